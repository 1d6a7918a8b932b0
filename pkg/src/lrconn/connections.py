"""Connections on projective modules presented by idempotents, and their curvature.

The module E = Im(phi) sits inside A^n.  The lifted connection is the operator
``u -> phi(rho(x)(phi u))`` on A^n, where ``rho(x)`` differentiates each
coordinate.  Endomorphisms of E are n x n matrices T with ``phi T phi = T``.

Two independent routes to curvature are provided: the closed form
``phi [x(phi), y(phi)]`` and the operator definition
``[D(x), D(y)] - D([x, y])`` evaluated column by column on basis vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .exactring import HypersurfaceRing, RingElem, RingError, monomial_basis
from .idempotents import MatrixA, commutator, derive_matrix
from .linsolve import solve_combination
from .vectorfields import Derivation, expand_derivation

Vector = tuple[RingElem, ...]

DEFAULT_MAXDEG = 8


class ExpansionError(ValueError):
    """A derivation could not be written over the declared generators within the degree bound."""


class NotInCornerError(ValueError):
    pass


class CurvatureTypeBoundError(ArithmeticError):
    """Curvature may be a multiple of rho, but no multiplier was found within the degree bound."""


def _lin_comb(coeffs: Sequence[RingElem], values: Sequence, zero):
    acc = zero
    for c, v in zip(coeffs, values):
        if not c.is_zero():
            acc = acc + c * v
    return acc


def _zero_like(v):
    if isinstance(v, MatrixA):
        return MatrixA.zero(v.ring, v.rows, v.cols)
    return v.ring.zero


@dataclass(frozen=True)
class GeneratorMap:
    """An A-linear map on derivations given by its values on a generator list.

    If ``ambient`` is set it holds the values on the coordinate fields
    d/dx_1..d/dx_n, and ``values`` are derived from it; evaluation at any
    derivation is then well defined without solving.  Otherwise evaluating at
    a non-generator expands it over the generators (lowest-degree solution);
    consistency of the values with relations among generators is the
    caller's responsibility.
    """

    generators: tuple[Derivation, ...]
    values: tuple
    ambient: tuple | None = None
    maxdeg: int = DEFAULT_MAXDEG

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.generators) != len(self.values):
            raise ValueError("generator and value lists differ in length")
        if not self.generators:
            raise ValueError("at least one generator is required")

    @classmethod
    def from_ambient(cls, generators: Sequence[Derivation], ambient: Sequence, maxdeg: int = DEFAULT_MAXDEG) -> GeneratorMap:
        zero = _zero_like(ambient[0])
        values = [_lin_comb(g.coeffs, ambient, zero) for g in generators]
        return cls(tuple(generators), tuple(values), tuple(ambient), maxdeg)

    @classmethod
    def zeros(cls, generators: Sequence[Derivation], zero, maxdeg: int = DEFAULT_MAXDEG) -> GeneratorMap:
        ring = generators[0].ring
        return cls.from_ambient(generators, [zero] * ring.nvars, maxdeg)

    @property
    def zero_value(self):
        return _zero_like(self.values[0])

    def __call__(self, x: Derivation):
        if self.ambient is not None:
            return _lin_comb(x.coeffs, self.ambient, self.zero_value)
        for g, v in zip(self.generators, self.values):
            if g == x:
                return v
        coeffs = expand_derivation(x, self.generators, self.maxdeg)
        if coeffs is None:
            raise ExpansionError(f"cannot express {x} over the generators up to degree {self.maxdeg}")
        return _lin_comb(coeffs, self.values, self.zero_value)

    def _combine(self, other: GeneratorMap, op) -> GeneratorMap:
        if self.generators != other.generators:
            raise ValueError("generator lists differ")
        values = tuple(op(a, b) for a, b in zip(self.values, other.values))
        ambient = None
        if self.ambient is not None and other.ambient is not None:
            ambient = tuple(op(a, b) for a, b in zip(self.ambient, other.ambient))
        return GeneratorMap(self.generators, values, ambient, self.maxdeg)

    def __add__(self, other: GeneratorMap) -> GeneratorMap:
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: GeneratorMap) -> GeneratorMap:
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> GeneratorMap:
        return self.scaled(-1)

    def scaled(self, c) -> GeneratorMap:
        values = tuple(c * v for v in self.values)
        ambient = None if self.ambient is None else tuple(c * v for v in self.ambient)
        return GeneratorMap(self.generators, values, ambient, self.maxdeg)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)


def in_corner(phi: MatrixA, v: MatrixA) -> bool:
    return phi @ v @ phi == v


def rho_apply(x: Derivation, u: Sequence[RingElem]) -> Vector:
    """Differentiate each coordinate of ``u``."""
    return tuple(x.apply(a) for a in u)


def lifted_connection_apply(phi: MatrixA, x: Derivation, u: Sequence[RingElem]) -> Vector:
    return phi.apply(rho_apply(x, phi.apply(u)))


def _basis_vector(ring: HypersurfaceRing, n: int, j: int) -> Vector:
    return tuple(ring.one if i == j else ring.zero for i in range(n))


def matrix_of_operator(ring: HypersurfaceRing, n: int, op: Callable[[Vector], Sequence[RingElem]]) -> MatrixA:
    """Assemble the matrix of an A-linear operator on A^n from its values on e_1..e_n."""
    cols = [tuple(op(_basis_vector(ring, n, j))) for j in range(n)]
    return MatrixA(ring, n, n, [cols[j][i] for i in range(n) for j in range(n)])


def _vsub(u: Sequence[RingElem], v: Sequence[RingElem]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def _vadd(u: Sequence[RingElem], v: Sequence[RingElem]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def curvature_matrix(phi: MatrixA, x: Derivation, y: Derivation) -> MatrixA:
    """Closed-form curvature ``phi (x(phi) y(phi) - y(phi) x(phi))`` of the lifted connection."""
    if x.ring != phi.ring or y.ring != phi.ring:
        raise RingError("ring mismatch")
    xp = derive_matrix(x, phi)
    yp = derive_matrix(y, phi)
    return phi @ commutator(xp, yp)


@dataclass(frozen=True)
class ConnectionPresentation:
    """The lifted connection of ``phi`` shifted by an optional potential.

    As an operator on A^n: ``nabla(x) u = phi rho(x)(phi u) + P(x) u``.
    """

    phi: MatrixA
    potential: GeneratorMap | None = None
    maxdeg: int = DEFAULT_MAXDEG
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.check and self.potential is not None:
            for v in self.potential.values:
                if not in_corner(self.phi, v):
                    raise NotInCornerError("potential value is not an endomorphism of Im(phi)")

    @property
    def ring(self) -> HypersurfaceRing:
        return self.phi.ring

    @property
    def n(self) -> int:
        return self.phi.rows

    def P(self, x: Derivation) -> MatrixA:
        if self.potential is None:
            return MatrixA.zero(self.ring, self.n)
        return self.potential(x)

    def shifted(self, b: GeneratorMap | None) -> ConnectionPresentation:
        if b is None:
            return self
        pot = b if self.potential is None else self.potential + b
        return replace(self, potential=pot)

    def apply(self, x: Derivation, u: Sequence[RingElem]) -> Vector:
        out = lifted_connection_apply(self.phi, x, u)
        if self.potential is not None:
            out = _vadd(out, self.P(x).apply(u))
        return out

    def adjoint(self, x: Derivation, v: MatrixA) -> MatrixA:
        """``[nabla(x), v]`` assembled by applying the operator to basis vectors."""
        return matrix_of_operator(self.ring, self.n, lambda e: _vsub(self.apply(x, v.apply(e)), v.apply(self.apply(x, e))))

    def curvature(self, x: Derivation, y: Derivation) -> MatrixA:
        """Closed form plus potential terms: R + ad(x)P(y) - ad(y)P(x) - P([x,y]) + [P(x),P(y)]."""
        r = curvature_matrix(self.phi, x, y)
        if self.potential is None:
            return r
        base = replace(self, potential=None, check=False)
        px, py = self.P(x), self.P(y)
        return r + base.adjoint(x, py) - base.adjoint(y, px) - self.P(x.bracket(y)) + commutator(px, py)

    def curvature_oracle(self, x: Derivation, y: Derivation) -> MatrixA:
        """Operator definition of curvature, column by column."""
        xy = x.bracket(y)

        def op(e: Vector) -> Vector:
            a = self.apply(x, self.apply(y, e))
            b = self.apply(y, self.apply(x, e))
            return _vsub(_vsub(a, b), self.apply(xy, e))

        return matrix_of_operator(self.ring, self.n, op)


def curvature_oracle(phi: MatrixA, x: Derivation, y: Derivation, potential: GeneratorMap | None = None) -> MatrixA:
    return ConnectionPresentation(phi, potential, check=False).curvature_oracle(x, y)


def adjoint_shortcut(phi: MatrixA, x: Derivation, v: MatrixA) -> MatrixA:
    """``phi x(v) - v x(phi)``: the adjoint action of the lifted connection on a corner matrix."""
    return phi @ derive_matrix(x, v) - v @ derive_matrix(x, phi)


def curvature_with_potential(phi: MatrixA, P: GeneratorMap, i: int, j: int) -> MatrixA:
    """Curvature of the lifted connection plus ``P`` on the generator pair (i, j)."""
    gens = P.generators
    return ConnectionPresentation(phi, P, maxdeg=P.maxdeg, check=False).curvature(gens[i], gens[j])


def generator_pairs(k: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(k) for j in range(i + 1, k)]


def check_flat(phi: MatrixA, generators: Sequence[Derivation], P: GeneratorMap | None = None) -> bool:
    """True iff the curvature vanishes on every pair of declared generators.

    Sufficient for flatness only when the generators generate the module of
    derivations; that is the caller's assertion.
    """
    conn = ConnectionPresentation(phi, P, check=False)
    gens = list(generators)
    return all(conn.curvature(gens[i], gens[j]).is_zero() for i, j in generator_pairs(len(gens)))


def is_multiple_candidate(r: MatrixA, rho: MatrixA) -> bool:
    """Necessary condition for ``r = f rho``: all 2x2 minors of (vec r, vec rho) vanish."""
    a, b = r.entries, rho.entries
    n = len(a)
    for p in range(n):
        for q in range(p + 1, n):
            if not (a[p] * b[q] - a[q] * b[p]).is_zero():
                return False
    return True


def solve_multiple(r: MatrixA, rho: MatrixA, maxdeg: int) -> RingElem | None:
    basis = monomial_basis(r.ring, maxdeg)
    columns = [[m * e for e in rho.entries] for m in basis]
    sol = solve_combination(columns, r.entries)
    if sol is None:
        return None
    f = r.ring.zero
    for m, c in zip(basis, sol):
        if c:
            f = f + m * c
    return f


def detect_curvature_type(rvals: Sequence[MatrixA], rho: MatrixA, maxdeg: int = DEFAULT_MAXDEG) -> list[RingElem] | None:
    """Scalars ``f_k`` with ``rvals[k] = f_k * rho``, or None when some value is not a multiple.

    Raises :class:`CurvatureTypeBoundError` when the minor test allows a
    multiple but no multiplier of degree <= maxdeg exists.
    """
    if rho.is_zero():
        raise ValueError("rho must be non-zero")
    out = []
    for r in rvals:
        if r.is_zero():
            out.append(r.ring.zero)
            continue
        if not is_multiple_candidate(r, rho):
            return None
        f = solve_multiple(r, rho, maxdeg)
        if f is None:
            raise CurvatureTypeBoundError(f"no multiplier of degree <= {maxdeg}")
        out.append(f)
    return out


def random_corner_matrix(phi: MatrixA, rng, maxdeg: int = 2, coeff_range: int = 3) -> MatrixA:
    from .sampling import random_elem

    n = phi.rows
    m = MatrixA(phi.ring, n, n, [random_elem(phi.ring, rng, maxdeg, coeff_range) for _ in range(n * n)])
    return phi @ m @ phi


def random_ambient_potential(phi: MatrixA, generators: Sequence[Derivation], rng, maxdeg: int = 1,
                             coeff_range: int = 2) -> GeneratorMap:
    """A random A-linear potential, specified on the coordinate fields so relations are respected."""
    ambient = [random_corner_matrix(phi, rng, maxdeg, coeff_range) for _ in range(phi.ring.nvars)]
    return GeneratorMap.from_ambient(generators, ambient)

