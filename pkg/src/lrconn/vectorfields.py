"""Tangent derivations of a hypersurface ring.

A derivation is stored by its values on the ambient coordinates,
``X = sum_i X(x_i) d/dx_i``.  It descends to A = Q[x]/(f) exactly when
``X(f)`` vanishes in A, which is checked on construction.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .exactring import HypersurfaceRing, Poly, RingElem, RingError, monomial_basis
from .linsolve import solve_combination


class NotTangentError(ValueError):
    pass


class Derivation:
    __slots__ = ("ring", "coeffs", "_hash")

    def __init__(self, ring: HypersurfaceRing, coeffs: Sequence, check: bool = True):
        if len(coeffs) != ring.nvars:
            raise RingError(f"derivation needs {ring.nvars} coefficients, got {len(coeffs)}")
        self.ring = ring
        self.coeffs: tuple[RingElem, ...] = tuple(ring.coerce(c) for c in coeffs)
        self._hash = None
        if check and not self.is_tangent():
            raise NotTangentError(f"derivation {self} does not preserve the ideal (f)")

    @classmethod
    def unchecked(cls, ring: HypersurfaceRing, coeffs: Sequence) -> Derivation:
        return cls(ring, coeffs, check=False)

    @classmethod
    def zero(cls, ring: HypersurfaceRing) -> Derivation:
        return cls(ring, [ring.zero] * ring.nvars, check=False)

    def apply_raw(self, p: Poly) -> Poly:
        """Action on an ambient polynomial, without reduction."""
        out = Poly(p.nvars)
        for i, c in enumerate(self.coeffs):
            if c:
                dp = p.partial(i)
                if dp:
                    out = out + c.poly * dp
        return out

    def apply(self, a: RingElem) -> RingElem:
        if a.ring != self.ring:
            raise RingError("ring mismatch")
        return self.ring.normalize(self.apply_raw(a.poly))

    __call__ = apply

    def is_tangent(self) -> bool:
        return self.ring.reduce(self.apply_raw(self.ring.relation)).is_zero()

    def bracket(self, other: Derivation) -> Derivation:
        if other.ring != self.ring:
            raise RingError("ring mismatch")
        coeffs = [self.apply(b) - other.apply(a) for a, b in zip(self.coeffs, other.coeffs)]
        return Derivation(self.ring, coeffs, check=False)

    def __add__(self, other: Derivation) -> Derivation:
        return Derivation(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)], check=False)

    def __sub__(self, other: Derivation) -> Derivation:
        return Derivation(self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)], check=False)

    def __neg__(self) -> Derivation:
        return Derivation(self.ring, [-a for a in self.coeffs], check=False)

    def __rmul__(self, a) -> Derivation:
        # A-module structure: (a X)(g) = a * X(g)
        a = self.ring.coerce(a)
        return Derivation(self.ring, [a * c for c in self.coeffs], check=False)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def __str__(self) -> str:
        parts = []
        for name, c in zip(self.ring.variable_names, self.coeffs):
            if c:
                parts.append(f"({c})*d{name}")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def apply(x: Derivation, a: RingElem) -> RingElem:
    return x.apply(a)


def bracket(x: Derivation, y: Derivation) -> Derivation:
    return x.bracket(y)


def is_tangent(x: Derivation) -> bool:
    return x.is_tangent()


def coordinate_derivation(ring: HypersurfaceRing, i: int) -> Derivation:
    """d/dx_i on the ambient ring; generally not tangent."""
    coeffs = [ring.zero] * ring.nvars
    coeffs[i] = ring.one
    return Derivation.unchecked(ring, coeffs)


def koszul_field(ring: HypersurfaceRing, i: int, j: int) -> Derivation:
    """f_j d/dx_i - f_i d/dx_j, tangent to any hypersurface."""
    grads = ring.partials_of_relation()
    coeffs = [ring.zero] * ring.nvars
    coeffs[i] = ring.normalize(grads[j])
    coeffs[j] = ring.normalize(-grads[i])
    return Derivation(ring, coeffs)


def sphere_tangent_generators(ring: HypersurfaceRing) -> tuple[Derivation, Derivation, Derivation]:
    """The rotation fields y dx - x dy, z dx - x dz, z dy - y dz."""
    if ring.nvars != 3 or not _is_unit_sphere(ring):
        raise RingError("sphere generators need the ring Q[x,y,z]/(x^2+y^2+z^2-1)")
    x, y, z = ring.gens()
    zero = ring.zero
    d1 = Derivation(ring, [y, -x, zero])
    d2 = Derivation(ring, [z, zero, -x])
    d3 = Derivation(ring, [zero, z, -y])
    return d1, d2, d3


def _is_unit_sphere(ring: HypersurfaceRing) -> bool:
    n = ring.nvars
    sphere = sum((Poly.var(n, i) ** 2 for i in range(n)), Poly(n)) - 1
    f = ring.relation
    c = f.constant_term()
    return bool(c) and f == sphere.scale(-c)


@lru_cache(maxsize=4096)
def expand_derivation(x: Derivation, generators: tuple[Derivation, ...], maxdeg: int = 8) -> tuple[RingElem, ...] | None:
    """Coefficients ``c`` with ``x = sum_k c_k * generators[k]``, or None up to ``maxdeg``.

    Degrees are tried in increasing order so the lowest-degree expansion is
    returned (for the sphere rotation fields, brackets expand with constant
    coefficients).
    """
    ring = x.ring
    for k, g in enumerate(generators):
        if g == x:
            return tuple(ring.one if i == k else ring.zero for i in range(len(generators)))
    if x.is_zero():
        return tuple(ring.zero for _ in generators)
    for deg in range(maxdeg + 1):
        basis = monomial_basis(ring, deg)
        columns = []
        labels = []
        for k, g in enumerate(generators):
            for m in basis:
                columns.append([m * c for c in g.coeffs])
                labels.append((k, m))
        sol = solve_combination(columns, x.coeffs)
        if sol is not None:
            out = [ring.zero] * len(generators)
            for (k, m), c in zip(labels, sol):
                if c:
                    out[k] = out[k] + m * c
            return tuple(out)
    return None
