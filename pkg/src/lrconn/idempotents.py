"""Matrices over a hypersurface ring, idempotent presentations and presets."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactring import HypersurfaceRing, Poly, RingElem, RingError, parse_poly
from .vectorfields import Derivation, koszul_field, sphere_tangent_generators


class DimensionMismatch(ValueError):
    pass


class NotIdempotentError(ValueError):
    pass


class CofactorIdentityError(ValueError):
    pass


class MatrixA:
    """Dense matrix with entries in a hypersurface ring (row-major, immutable)."""

    __slots__ = ("ring", "rows", "cols", "entries", "_hash")

    def __init__(self, ring: HypersurfaceRing, rows: int, cols: int, entries: Sequence):
        if rows < 1 or cols < 1 or len(entries) != rows * cols:
            raise DimensionMismatch(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.entries: tuple[RingElem, ...] = tuple(ring.coerce(e) for e in entries)
        self._hash = None

    @classmethod
    def _raw(cls, ring, rows, cols, entries) -> MatrixA:
        m = cls.__new__(cls)
        m.ring, m.rows, m.cols, m.entries, m._hash = ring, rows, cols, tuple(entries), None
        return m

    @classmethod
    def from_rows(cls, ring: HypersurfaceRing, rows: Sequence[Sequence]) -> MatrixA:
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise DimensionMismatch("ragged matrix")
        return cls(ring, r, c, [e for row in rows for e in row])

    @classmethod
    def identity(cls, ring: HypersurfaceRing, n: int) -> MatrixA:
        return cls._raw(ring, n, n, [ring.one if i == j else ring.zero for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, ring: HypersurfaceRing, rows: int, cols: int | None = None) -> MatrixA:
        cols = rows if cols is None else cols
        return cls._raw(ring, rows, cols, [ring.zero] * (rows * cols))

    @classmethod
    def unit(cls, ring: HypersurfaceRing, n: int, i: int, j: int) -> MatrixA:
        e = [ring.zero] * (n * n)
        e[i * n + j] = ring.one
        return cls._raw(ring, n, n, e)

    @classmethod
    def column(cls, ring: HypersurfaceRing, values: Sequence) -> MatrixA:
        return cls(ring, len(values), 1, values)

    def __getitem__(self, ij: tuple[int, int]) -> RingElem:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[RingElem, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[RingElem, ...]:
        return self.entries[j::self.cols]

    def to_rows(self) -> list[list[RingElem]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def _same_shape(self, other: MatrixA) -> None:
        if self.ring != other.ring:
            raise RingError("ring mismatch")
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch(f"shape {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other: MatrixA) -> MatrixA:
        self._same_shape(other)
        return MatrixA._raw(self.ring, self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: MatrixA) -> MatrixA:
        self._same_shape(other)
        return MatrixA._raw(self.ring, self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> MatrixA:
        return MatrixA._raw(self.ring, self.rows, self.cols, [-a for a in self.entries])

    def scale(self, a) -> MatrixA:
        a = self.ring.coerce(a)
        if a.is_zero():
            return MatrixA.zero(self.ring, self.rows, self.cols)
        return MatrixA._raw(self.ring, self.rows, self.cols, [a * e for e in self.entries])

    def __rmul__(self, a) -> MatrixA:
        if isinstance(a, (RingElem, int, Fraction)):
            return self.scale(a)
        return NotImplemented

    def __matmul__(self, other: MatrixA) -> MatrixA:
        if self.ring != other.ring:
            raise RingError("ring mismatch")
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        n = self.ring.nvars
        reduce = self.ring.reduce
        out = []
        left = [[e.poly for e in self.row(i)] for i in range(self.rows)]
        right = [[e.poly for e in other.col(j)] for j in range(other.cols)]
        for lrow in left:
            for rcol in right:
                acc = Poly(n)
                for a, b in zip(lrow, rcol):
                    if a.terms and b.terms:
                        acc = acc + a * b
                out.append(RingElem(self.ring, reduce(acc)))
        return MatrixA._raw(self.ring, self.rows, other.cols, out)

    def apply(self, u: Sequence[RingElem]) -> tuple[RingElem, ...]:
        """Matrix times a column vector given as a sequence."""
        return (self @ MatrixA.column(self.ring, u)).entries

    def transpose(self) -> MatrixA:
        return MatrixA._raw(self.ring, self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixA):
            return NotImplemented
        return (self.ring == other.ring and self.rows == other.rows and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def to_json(self) -> list[list[str]]:
        return [[str(e) for e in self.row(i)] for i in range(self.rows)]

    def __repr__(self) -> str:
        return "MatrixA(" + repr(self.to_json()) + ")"


def mat_add(m: MatrixA, n: MatrixA) -> MatrixA:
    return m + n


def mat_sub(m: MatrixA, n: MatrixA) -> MatrixA:
    return m - n


def mat_mul(m: MatrixA, n: MatrixA) -> MatrixA:
    return m @ n


def mat_scale(a, m: MatrixA) -> MatrixA:
    return m.scale(a)


def mat_eq(m: MatrixA, n: MatrixA) -> bool:
    return m == n


def commutator(m: MatrixA, n: MatrixA) -> MatrixA:
    return m @ n - n @ m


def verify_idempotent(m: MatrixA) -> bool:
    if not m.is_square:
        raise DimensionMismatch("idempotent must be square")
    return m @ m == m


def derive_matrix(x: Derivation, m: MatrixA) -> MatrixA:
    """Apply a derivation to every entry."""
    if x.ring != m.ring:
        raise RingError("ring mismatch")
    return MatrixA._raw(m.ring, m.rows, m.cols, [x.apply(e) for e in m.entries])


@dataclass(frozen=True)
class IdempotentPresentation:
    phi: MatrixA

    def __post_init__(self):
        if not self.phi.is_square:
            raise DimensionMismatch("idempotent must be square")
        if not verify_idempotent(self.phi):
            raise NotIdempotentError("matrix is not idempotent: phi @ phi != phi")

    @property
    def ring(self) -> HypersurfaceRing:
        return self.phi.ring

    @property
    def size(self) -> int:
        return self.phi.rows


def cofactor_identity_holds(ring: HypersurfaceRing, cofactors: Sequence[Poly], h: Poly) -> bool:
    grads = ring.partials_of_relation()
    lhs = sum((c * g for c, g in zip(cofactors, grads)), Poly(ring.nvars))
    return lhs == 1 + h * ring.relation


def jacobian_splitting_idempotent(ring: HypersurfaceRing, cofactors: Sequence, h) -> IdempotentPresentation:
    """Idempotent ``I - grad(f) c^T`` splitting A^n -> Omega^1, from ``sum c_i f_i = 1 + h f``.

    Cofactors and ``h`` are ambient polynomials (Poly, text, or ring elements,
    whose stored representative is used); the identity is checked before any
    reduction.
    """
    if len(cofactors) != ring.nvars:
        raise DimensionMismatch(f"need {ring.nvars} cofactors, got {len(cofactors)}")
    cs = [_ambient(ring, c) for c in cofactors]
    hp = _ambient(ring, h)
    if not cofactor_identity_holds(ring, cs, hp):
        raise CofactorIdentityError("cofactor identity sum c_i * df/dx_i = 1 + h*f fails in the ambient ring")
    grads = [ring.normalize(g) for g in ring.partials_of_relation()]
    cvals = [ring.normalize(c) for c in cs]
    n = ring.nvars
    entries = [(ring.one if i == j else ring.zero) - cvals[j] * grads[i] for i in range(n) for j in range(n)]
    return IdempotentPresentation(MatrixA(ring, n, n, entries))


def _ambient(ring: HypersurfaceRing, c) -> Poly:
    if isinstance(c, Poly):
        return c
    if isinstance(c, RingElem):
        return c.poly
    if isinstance(c, str):
        return parse_poly(c, ring.variable_names)
    return Poly.const(ring.nvars, c)


def gradient(ring: HypersurfaceRing) -> tuple[RingElem, ...]:
    return tuple(ring.normalize(g) for g in ring.partials_of_relation())


@dataclass
class Preset:
    """A ready-made ring with generators and an idempotent."""

    name: str
    ring: HypersurfaceRing
    generators: tuple[Derivation, ...]
    generator_names: tuple[str, ...]
    phi: MatrixA
    cofactors: tuple[Poly, ...]
    h: Poly
    df: tuple[RingElem, ...]
    rho: MatrixA | None = None
    extras: dict = field(default_factory=dict)


def sphere_ring() -> HypersurfaceRing:
    return HypersurfaceRing(("x", "y", "z"), "x^2 + y^2 + z^2 - 1", "z")


def preset_sphere() -> Preset:
    """Unit 2-sphere with the rotation fields D1, D2, D3, rho and M = -rho^2."""
    ring = sphere_ring()
    x, y, z = ring.gens()
    zero = ring.zero
    rho = MatrixA.from_rows(ring, [[zero, z, -y], [-z, zero, x], [y, -x, zero]])
    M = -(rho @ rho)
    cof = tuple(Poly.var(3, i).scale(Fraction(1, 2)) for i in range(3))
    h = Poly.const(3, 1)
    return Preset(
        name="sphere",
        ring=ring,
        generators=sphere_tangent_generators(ring),
        generator_names=("D1", "D2", "D3"),
        phi=M,
        cofactors=cof,
        h=h,
        df=(x, y, z),
        rho=rho,
    )


def russel_ring() -> HypersurfaceRing:
    return HypersurfaceRing(("x", "y", "z", "t"), "x*(1 + x*y) + z^3 + t^2", "t")


def preset_russel() -> Preset:
    """Russell cubic threefold x + x^2 y + z^3 + t^2 = 0 with the Jacobian-splitting idempotent."""
    ring = russel_ring()
    cof = tuple(ring.normalize(c).poly for c in ("1 - 2*x*y", "4*y^2", "0", "0"))
    h = Poly(4)
    psi = jacobian_splitting_idempotent(ring, cof, h).phi
    gens = []
    names = []
    vn = ring.variable_names
    for i in range(4):
        for j in range(i + 1, 4):
            gens.append(koszul_field(ring, i, j))
            names.append(f"K_{vn[i]}{vn[j]}")
    return Preset(
        name="russel",
        ring=ring,
        generators=tuple(gens),
        generator_names=tuple(names),
        phi=psi,
        cofactors=cof,
        h=h,
        df=gradient(ring),
    )


PRESETS = {"sphere": preset_sphere, "russel": preset_russel, "russell": preset_russel}
