"""The Lie-Rinehart algebra End_A(E) + L twisted by a connection, cochains, and pair transforms.

Elements are pairs ``(endo, vec)`` with ``endo`` a phi-corner matrix and ``vec``
a tangent derivation.  The bracket is

    [(f, x), (g, y)] = ([f, g] + ad(x) g - ad(y) f + R(x, y), [x, y])

where ``ad(x) g = [nabla(x), g]`` is evaluated by operator composition and
``R`` is the curvature of the connection in the context.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Mapping, Sequence

from .connections import ConnectionPresentation, ExpansionError, GeneratorMap, in_corner
from .exactring import RingElem, RingError
from .idempotents import MatrixA, commutator
from .vectorfields import Derivation, expand_derivation

Action = Callable[[Derivation, object], object]


class NonCentralError(ValueError):
    pass


@dataclass(frozen=True)
class DElement:
    endo: MatrixA
    vec: Derivation

    def __post_init__(self):
        if self.endo.ring != self.vec.ring:
            raise RingError("ring mismatch")

    @classmethod
    def zero(cls, phi: MatrixA) -> DElement:
        return cls(MatrixA.zero(phi.ring, phi.rows), Derivation.zero(phi.ring))

    def __add__(self, other: DElement) -> DElement:
        return DElement(self.endo + other.endo, self.vec + other.vec)

    def __sub__(self, other: DElement) -> DElement:
        return DElement(self.endo - other.endo, self.vec - other.vec)

    def __neg__(self) -> DElement:
        return DElement(-self.endo, -self.vec)

    def __rmul__(self, a) -> DElement:
        return DElement(a * self.endo, a * self.vec)

    def is_zero(self) -> bool:
        return self.endo.is_zero() and self.vec.is_zero()

    def to_json(self) -> dict:
        return {"endo": self.endo.to_json(), "vec": self.vec.to_json()}


def _adjoint(ctx: ConnectionPresentation, x: Derivation, g: MatrixA) -> MatrixA:
    if x.is_zero() or g.is_zero():
        return MatrixA.zero(g.ring, g.rows)
    return ctx.adjoint(x, g)


def _curvature(ctx: ConnectionPresentation, x: Derivation, y: Derivation) -> MatrixA:
    if x.is_zero() or y.is_zero():
        return MatrixA.zero(ctx.ring, ctx.n)
    return ctx.curvature(x, y)


def d_bracket(z1: DElement, z2: DElement, ctx: ConnectionPresentation) -> DElement:
    f, x = z1.endo, z1.vec
    g, y = z2.endo, z2.vec
    endo = commutator(f, g) + _adjoint(ctx, x, g) - _adjoint(ctx, y, f) + _curvature(ctx, x, y)
    return DElement(endo, x.bracket(y))


def jacobi_residual(z1: DElement, z2: DElement, z3: DElement, ctx: ConnectionPresentation) -> DElement:
    def br(a, b):
        return d_bracket(a, b, ctx)

    return br(z1, br(z2, z3)) + br(z2, br(z3, z1)) + br(z3, br(z1, z2))


def anchor(z: DElement) -> Derivation:
    return z.vec


def leibniz_residual(z: DElement, a: RingElem, w: DElement, ctx: ConnectionPresentation) -> DElement:
    """``[z, a w] - a [z, w] - z.vec(a) w``."""
    lhs = d_bracket(z, a * w, ctx)
    return lhs - a * d_bracket(z, w, ctx) - anchor(z).apply(a) * w


def section(P: GeneratorMap, x: Derivation) -> DElement:
    """``s_P(x) = (P(x), x)``."""
    return DElement(P(x), x)


def gamma(P: GeneratorMap, x: Derivation, y: Derivation, ctx: ConnectionPresentation) -> DElement:
    """Failure of ``s_P`` to be a bracket map: ``[s_P x, s_P y] - s_P [x, y]``."""
    return d_bracket(section(P, x), section(P, y), ctx) - section(P, x.bracket(y))


def iso_map(P: GeneratorMap, z: DElement) -> DElement:
    """``(f, x) -> (f - P(x), x)``, from the context of ``nabla`` to that of ``nabla + P``."""
    return DElement(z.endo - P(z.vec), z.vec)


def iso_bracket_residual(P: GeneratorMap, z1: DElement, z2: DElement, ctx: ConnectionPresentation,
                         ctx_shifted: ConnectionPresentation | None = None) -> DElement:
    if ctx_shifted is None:
        ctx_shifted = ctx.shifted(P)
    lhs = iso_map(P, d_bracket(z1, z2, ctx))
    return lhs - d_bracket(iso_map(P, z1), iso_map(P, z2), ctx_shifted)


# -- cochains on declared generators ----------------------------------------


def _expansion(x: Derivation, generators: tuple[Derivation, ...], maxdeg: int) -> tuple[RingElem, ...]:
    coeffs = expand_derivation(x, generators, maxdeg)
    if coeffs is None:
        raise ExpansionError(f"cannot express {x} over the generators up to degree {maxdeg}")
    return coeffs


class GeneratorPairMap:
    """Antisymmetric A-bilinear map on derivations, stored on generator pairs ``i < j``.

    Values are matrices or ring elements.  Evaluation off the generators goes
    through the lowest-degree expansion; the stored values must respect
    relations among generators for that to be meaningful.
    """

    def __init__(self, generators: Sequence[Derivation], values: Mapping[tuple[int, int], object], zero,
                 maxdeg: int = 8):
        self.generators = tuple(generators)
        k = len(self.generators)
        self.zero = zero
        self.maxdeg = maxdeg
        self.values: dict[tuple[int, int], object] = {}
        for (i, j), v in values.items():
            if not (0 <= i < k and 0 <= j < k) or i == j:
                raise IndexError(f"invalid generator pair {(i, j)}")
            if i > j:
                i, j, v = j, i, -v
            self.values[(i, j)] = v
        for pair in combinations(range(k), 2):
            self.values.setdefault(pair, zero)

    @classmethod
    def from_function(cls, generators: Sequence[Derivation], fn: Callable[[int, int], object], zero,
                      maxdeg: int = 8) -> GeneratorPairMap:
        k = len(generators)
        return cls(generators, {p: fn(*p) for p in combinations(range(k), 2)}, zero, maxdeg)

    def at(self, i: int, j: int):
        if i == j:
            return self.zero
        if i < j:
            return self.values[(i, j)]
        return -self.values[(j, i)]

    def _index(self, x: Derivation) -> int | None:
        for k, g in enumerate(self.generators):
            if g == x:
                return k
        return None

    def __call__(self, x: Derivation, y: Derivation):
        i, j = self._index(x), self._index(y)
        if i is not None and j is not None:
            return self.at(i, j)
        if x.is_zero() or y.is_zero():
            return self.zero
        a = _expansion(x, self.generators, self.maxdeg)
        b = _expansion(y, self.generators, self.maxdeg)
        acc = self.zero
        for p, ap in enumerate(a):
            if ap.is_zero():
                continue
            for q, bq in enumerate(b):
                if p != q and not bq.is_zero():
                    acc = acc + (ap * bq) * self.at(p, q)
        return acc

    def map_values(self, fn: Callable[[object], object], zero) -> GeneratorPairMap:
        return GeneratorPairMap(self.generators, {p: fn(v) for p, v in self.values.items()}, zero, self.maxdeg)

    def _combine(self, other: GeneratorPairMap, op) -> GeneratorPairMap:
        if self.generators != other.generators:
            raise ValueError("generator lists differ")
        return GeneratorPairMap(self.generators, {p: op(v, other.values[p]) for p, v in self.values.items()},
                                self.zero, self.maxdeg)

    def __add__(self, other: GeneratorPairMap) -> GeneratorPairMap:
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: GeneratorPairMap) -> GeneratorPairMap:
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> GeneratorPairMap:
        return self.map_values(lambda v: -v, self.zero)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneratorPairMap):
            return NotImplemented
        return self.generators == other.generators and self.values == other.values

    __hash__ = None

    def to_json(self, names: Sequence[str] | None = None) -> dict:
        out = {}
        for (i, j), v in sorted(self.values.items()):
            key = f"{names[i]},{names[j]}" if names else f"{i},{j}"
            out[key] = v.to_json() if hasattr(v, "to_json") else str(v)
        return out


def alpha_action(x: Derivation, w: RingElem) -> RingElem:
    """Coefficients in A acted on by the anchor."""
    return x.apply(w)


def adjoint_action(ctx: ConnectionPresentation) -> Action:
    """Coefficients in End_A(E) acted on by ``[nabla(x), -]``."""
    return lambda x, v: _adjoint(ctx, x, v)


def d0(w, generators: Sequence[Derivation], action: Action = alpha_action, maxdeg: int = 8) -> GeneratorMap:
    """``d0(w)(x) = nabla(x) w`` on each generator."""
    return GeneratorMap(tuple(generators), tuple(action(g, w) for g in generators), maxdeg=maxdeg)


def d1_value(b: GeneratorMap, x: Derivation, y: Derivation, action: Action):
    return action(x, b(y)) - action(y, b(x)) - b(x.bracket(y))


def d1(b: GeneratorMap, action: Action = alpha_action) -> GeneratorPairMap:
    gens = b.generators
    return GeneratorPairMap.from_function(gens, lambda i, j: d1_value(b, gens[i], gens[j], action),
                                          b.zero_value, b.maxdeg)


def d2_value(psi: GeneratorPairMap, x: Derivation, y: Derivation, z: Derivation, action: Action):
    return (action(x, psi(y, z)) - action(y, psi(x, z)) + action(z, psi(x, y))
            - psi(x.bracket(y), z) + psi(x.bracket(z), y) - psi(y.bracket(z), x))


def d2(psi: GeneratorPairMap, action: Action = alpha_action) -> dict[tuple[int, int, int], object]:
    gens = psi.generators
    return {t: d2_value(psi, gens[t[0]], gens[t[1]], gens[t[2]], action)
            for t in combinations(range(len(gens)), 3)}


def cocycle_check2(psi: GeneratorPairMap, action: Action = alpha_action) -> bool:
    return all(v.is_zero() for v in d2(psi, action).values())


def pair_bracket(b: GeneratorMap, x: Derivation, y: Derivation) -> MatrixA:
    return commutator(b(x), b(y))


# -- pairs (connection on End_A(E), 2-cochain) -------------------------------


def is_central(v: MatrixA, phi: MatrixA) -> bool:
    """True iff ``v`` lies in the phi-corner and commutes with every corner matrix."""
    if not in_corner(phi, v):
        return False
    n = phi.rows
    for i in range(n):
        for j in range(n):
            e = phi @ MatrixA.unit(phi.ring, n, i, j) @ phi
            if not commutator(v, e).is_zero():
                return False
    return True


def central_matrix(c, phi: MatrixA) -> MatrixA:
    """A scalar as the central endomorphism ``c * phi``; matrices pass through after a centrality check."""
    if isinstance(c, MatrixA):
        if not is_central(c, phi):
            raise NonCentralError("value is not central in the phi-corner")
        return c
    return phi.ring.coerce(c) * phi


def central_generator_map(c: GeneratorMap, phi: MatrixA) -> GeneratorMap:
    values = tuple(central_matrix(v, phi) for v in c.values)
    ambient = None if c.ambient is None else tuple(central_matrix(v, phi) for v in c.ambient)
    return GeneratorMap(c.generators, values, ambient, c.maxdeg)


class ConnectionPair:
    """A connection on End_A(E), given as the adjoint of ``ctx``, with a 2-cochain ``psi``.

    Two pairs are equal when their phi agree, their potentials differ by a
    central value on every generator (so the adjoint connections agree), and
    their cochains agree on every generator pair.
    """

    def __init__(self, ctx: ConnectionPresentation, psi: GeneratorPairMap, check: bool = True):
        self.ctx = ctx
        self.psi = psi
        if check:
            for v in psi.values.values():
                if not in_corner(ctx.phi, v):
                    raise ValueError("cochain value is not an endomorphism of Im(phi)")

    @property
    def phi(self) -> MatrixA:
        return self.ctx.phi

    @property
    def generators(self) -> tuple[Derivation, ...]:
        return self.psi.generators

    def adjoint(self, x: Derivation, v: MatrixA) -> MatrixA:
        return _adjoint(self.ctx, x, v)

    def same_connection(self, other: ConnectionPair) -> bool:
        if self.phi != other.phi:
            return False
        for g in self.generators:
            diff = self.ctx.P(g) - other.ctx.P(g)
            if not diff.is_zero() and not is_central(diff, self.phi):
                return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConnectionPair):
            return NotImplemented
        return self.psi == other.psi and self.same_connection(other)

    __hash__ = None

    def to_json(self, names: Sequence[str] | None = None) -> dict:
        gens = self.generators
        pot = {}
        for k, g in enumerate(gens):
            key = names[k] if names else str(k)
            pot[key] = self.ctx.P(g).to_json()
        return {"potential": pot, "psi": self.psi.to_json(names)}


def fundamental_pair(ctx: ConnectionPresentation, generators: Sequence[Derivation]) -> ConnectionPair:
    """The pair ``(ad nabla, R_nabla)`` of the extension End_A(E) -> D -> L."""
    gens = tuple(generators)
    zero = MatrixA.zero(ctx.ring, ctx.n)
    psi = GeneratorPairMap.from_function(gens, lambda i, j: ctx.curvature(gens[i], gens[j]), zero, ctx.maxdeg)
    return ConnectionPair(ctx, psi, check=False)


def equivalence_transform(pair: ConnectionPair, b: GeneratorMap) -> ConnectionPair:
    """``nabla -> nabla + [b(x), -]`` and ``psi -> psi + d1(b) + [b(x), b(y)]``."""
    if b.generators != pair.generators:
        raise ValueError("generator lists differ")
    for v in b.values:
        if not in_corner(pair.phi, v):
            raise ValueError("witness value is not an endomorphism of Im(phi)")
    gens = pair.generators
    action = adjoint_action(pair.ctx)

    def shift(i, j):
        x, y = gens[i], gens[j]
        return d1_value(b, x, y, action) + pair_bracket(b, x, y)

    delta = GeneratorPairMap.from_function(gens, shift, pair.psi.zero, pair.psi.maxdeg)
    return ConnectionPair(pair.ctx.shifted(b), pair.psi + delta, check=False)


def section_pair(ctx_s: ConnectionPresentation, psi_s: GeneratorPairMap, b: GeneratorMap) -> ConnectionPair:
    """Pair of the section ``t = s + b`` given the pair ``(nabla_s, psi_s)`` of ``s``."""
    return equivalence_transform(ConnectionPair(ctx_s, psi_s), b)


def equivalent_with_witness(p1: ConnectionPair, p2: ConnectionPair, b: GeneratorMap) -> bool:
    return equivalence_transform(p1, b) == p2


def torsor_act(pair: ConnectionPair, rho: GeneratorPairMap) -> ConnectionPair:
    """``(nabla, psi) -> (nabla, psi + rho)`` for a central-valued 2-cochain ``rho``."""
    if rho.generators != pair.generators:
        raise ValueError("generator lists differ")
    phi = pair.phi
    as_matrix = GeneratorPairMap(rho.generators, {p: central_matrix(v, phi) for p, v in rho.values.items()},
                                 pair.psi.zero, rho.maxdeg)
    return ConnectionPair(pair.ctx, pair.psi + as_matrix, check=False)
