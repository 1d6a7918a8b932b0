"""Degree-bounded algebraic de Rham complex of a surface f(x, y, z) = 0.

One-forms are triples (coefficients of dx, dy, dz) modulo A*Df; two-forms are
triples (coefficients of dx^dy, dx^dz, dy^dz) modulo the span of Df^dx,
Df^dy, Df^dz.  Every equality question is an exact linear solve for the
multipliers, with multiplier degree bounded by ``maxdeg``.  A negative answer
only means "none up to that degree".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .exactring import HypersurfaceRing, Poly, RingElem, RingError, monomial_basis
from .linsolve import Echelon, _solve_rows, ring_coordinates, solve_combination
from .vectorfields import _is_unit_sphere

DEFAULT_MAXDEG = 8


@dataclass(frozen=True)
class OneForm:
    ring: HypersurfaceRing
    g: tuple[RingElem, RingElem, RingElem]

    def __post_init__(self):
        if self.ring.nvars != 3:
            raise RingError("differential forms are implemented for three variables only")
        object.__setattr__(self, "g", tuple(self.ring.coerce(c) for c in self.g))
        if len(self.g) != 3:
            raise ValueError("a one-form has three coefficients")

    def __add__(self, other: OneForm) -> OneForm:
        return OneForm(self.ring, tuple(a + b for a, b in zip(self.g, other.g)))

    def __sub__(self, other: OneForm) -> OneForm:
        return OneForm(self.ring, tuple(a - b for a, b in zip(self.g, other.g)))

    def __neg__(self) -> OneForm:
        return OneForm(self.ring, tuple(-a for a in self.g))

    def __rmul__(self, a) -> OneForm:
        return OneForm(self.ring, tuple(a * c for c in self.g))

    def to_json(self) -> list[str]:
        return [str(c) for c in self.g]


@dataclass(frozen=True)
class TwoForm:
    ring: HypersurfaceRing
    h: tuple[RingElem, RingElem, RingElem]

    def __post_init__(self):
        if self.ring.nvars != 3:
            raise RingError("differential forms are implemented for three variables only")
        object.__setattr__(self, "h", tuple(self.ring.coerce(c) for c in self.h))
        if len(self.h) != 3:
            raise ValueError("a two-form has three coefficients")

    def __add__(self, other: TwoForm) -> TwoForm:
        return TwoForm(self.ring, tuple(a + b for a, b in zip(self.h, other.h)))

    def __sub__(self, other: TwoForm) -> TwoForm:
        return TwoForm(self.ring, tuple(a - b for a, b in zip(self.h, other.h)))

    def __rmul__(self, a) -> TwoForm:
        return TwoForm(self.ring, tuple(a * c for c in self.h))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.h)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.h]


def differential_of_relation(ring: HypersurfaceRing) -> OneForm:
    return OneForm(ring, tuple(ring.normalize(p) for p in ring.partials_of_relation()))


def twoform_relations(ring: HypersurfaceRing) -> tuple[TwoForm, TwoForm, TwoForm]:
    """Df^dx, Df^dy, Df^dz."""
    fx, fy, fz = differential_of_relation(ring).g
    zero = ring.zero
    return (TwoForm(ring, (-fy, -fz, zero)),
            TwoForm(ring, (fx, zero, -fz)),
            TwoForm(ring, (zero, fx, fy)))


def d0(g: RingElem | Poly, ring: HypersurfaceRing | None = None) -> OneForm:
    """Gradient of a representative."""
    if isinstance(g, RingElem):
        ring, p = g.ring, g.poly
    else:
        if ring is None:
            raise ValueError("a raw polynomial needs its ring")
        p = g
    return OneForm(ring, tuple(ring.normalize(p.partial(i)) for i in range(3)))


def d1(w: OneForm) -> TwoForm:
    """Exterior derivative of the representative triple (P, Q, R)."""
    P, Q, R = (c.poly for c in w.g)
    ring = w.ring

    def nf(p):
        return ring.normalize(p)

    return TwoForm(ring, (nf(Q.partial(0) - P.partial(1)),
                          nf(R.partial(0) - P.partial(2)),
                          nf(R.partial(1) - Q.partial(2))))


def _multiplier(ring: HypersurfaceRing, basis: list[RingElem], sol: Sequence, offset: int = 0) -> RingElem:
    acc = ring.zero
    for m, c in zip(basis, sol[offset:offset + len(basis)]):
        if c:
            acc = acc + m * c
    return acc


def oneform_difference_witness(w1: OneForm, w2: OneForm, maxdeg: int = DEFAULT_MAXDEG) -> RingElem | None:
    """``a`` with ``w1 - w2 = a * Df`` and deg a <= maxdeg, or None."""
    ring = w1.ring
    if w2.ring != ring:
        raise RingError("ring mismatch")
    df = differential_of_relation(ring).g
    diff = (w1 - w2).g
    if all(c.is_zero() for c in diff):
        return ring.zero
    basis = monomial_basis(ring, maxdeg)
    sol = solve_combination([[m * c for c in df] for m in basis], diff)
    if sol is None:
        return None
    return _multiplier(ring, basis, sol)


def oneform_equal(w1: OneForm, w2: OneForm, maxdeg: int = DEFAULT_MAXDEG) -> bool:
    return oneform_difference_witness(w1, w2, maxdeg) is not None


def twoform_difference_witness(t1: TwoForm, t2: TwoForm, maxdeg: int = DEFAULT_MAXDEG) -> tuple[RingElem, ...] | None:
    ring = t1.ring
    if t2.ring != ring:
        raise RingError("ring mismatch")
    diff = (t1 - t2).h
    if all(c.is_zero() for c in diff):
        return (ring.zero,) * 3
    basis = monomial_basis(ring, maxdeg)
    rels = twoform_relations(ring)
    columns = [[m * c for c in r.h] for r in rels for m in basis]
    sol = solve_combination(columns, diff)
    if sol is None:
        return None
    return tuple(_multiplier(ring, basis, sol, k * len(basis)) for k in range(3))


def twoform_equal(t1: TwoForm, t2: TwoForm, maxdeg: int = DEFAULT_MAXDEG) -> bool:
    return twoform_difference_witness(t1, t2, maxdeg) is not None


def is_closed(w: OneForm, maxdeg: int | None = None) -> bool:
    """Curl is a relation combination; the default bound grows with the form's degree."""
    curl = d1(w)
    if maxdeg is None:
        maxdeg = max(DEFAULT_MAXDEG, max(c.degree() for c in curl.h))
    return twoform_equal(curl, TwoForm(w.ring, (0, 0, 0)), maxdeg)


def omega_n(ring: HypersurfaceRing, n: int) -> OneForm:
    """``(x^2 + y^2)^n (xz dx + yz dy)`` on the unit sphere."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if ring.nvars != 3 or not _is_unit_sphere(ring):
        raise RingError("omega_n is defined on the unit sphere")
    x, y, z = ring.gens()
    s = (x * x + y * y) ** n
    return OneForm(ring, (s * x * z, s * y * z, ring.zero))


def area_form(ring: HypersurfaceRing) -> TwoForm:
    """``z dx^dy - y dx^dz + x dy^dz``."""
    x, y, z = ring.gens()
    return TwoForm(ring, (z, -y, x))


@dataclass
class ExactnessResult:
    """Outcome of a bounded search for ``g`` with ``d0(g) = w``.

    ``status`` is ``"exact"`` (witness found and re-verified),
    ``"not_closed"`` (``d1(w)`` is not a relation combination up to the
    bound, so ``w`` cannot be exact) or ``"inconclusive"`` (closed, but no
    witness of degree <= bound).
    """

    status: str
    bound: int
    witness: RingElem | None = None
    multiplier: RingElem | None = None
    curl: TwoForm | None = None

    @property
    def exact(self) -> bool:
        return self.status == "exact"

    def to_json(self) -> dict:
        out = {"status": self.status, "bound": self.bound}
        if self.witness is not None:
            out["witness"] = str(self.witness)
            out["multiplier"] = str(self.multiplier)
        if self.curl is not None:
            out["curl"] = self.curl.to_json()
        return out


def exactness_witness(w: OneForm, maxdeg: int = DEFAULT_MAXDEG) -> ExactnessResult:
    """Search ``g`` (deg <= maxdeg) and ``a`` (deg <= maxdeg) with ``d0(g) - a*Df = w``."""
    ring = w.ring
    if not is_closed(w, max(maxdeg + 1, max(c.degree() for c in d1(w).h))):
        return ExactnessResult("not_closed", maxdeg, curl=d1(w))
    gbasis = [m for m in monomial_basis(ring, maxdeg) if m.degree() > 0]
    abasis = monomial_basis(ring, maxdeg)
    df = differential_of_relation(ring).g
    columns = [list(d0(m).g) for m in gbasis] + [[-(m * c) for c in df] for m in abasis]
    sol = solve_combination(columns, w.g)
    if sol is None:
        return ExactnessResult("inconclusive", maxdeg)
    g = _multiplier(ring, gbasis, sol)
    a = _multiplier(ring, abasis, sol, len(gbasis))
    # independent re-verification: recompute d0(g) and compare modulo A*Df
    if not oneform_equal(d0(g), w, maxdeg):  # pragma: no cover - would mean a solver bug
        raise ArithmeticError("exactness witness failed re-verification")
    return ExactnessResult("exact", maxdeg, g, a)


def twoform_exactness_witness(t: TwoForm, maxdeg: int = DEFAULT_MAXDEG) -> OneForm | None:
    """A one-form ``w`` of coefficient degree <= maxdeg + 1 with ``d1(w) = t``, or None."""
    ring = t.ring
    forms = _form_space(ring, maxdeg + 1)
    mult = monomial_basis(ring, maxdeg + 1)
    rels = twoform_relations(ring)
    columns = [list(d1(OneForm(ring, f)).h) for f in forms]
    columns += [[-(m * c) for c in r.h] for r in rels for m in mult]
    sol = solve_combination(columns, t.h)
    if sol is None:
        return None
    acc = OneForm(ring, (0, 0, 0))
    for f, c in zip(forms, sol):
        if c:
            acc = acc + OneForm(ring, tuple(e * c for e in f))
    return acc


# -- bounded cohomology -------------------------------------------------------


def _rank(vectors) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


def _echelon(vectors) -> Echelon:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech


@dataclass
class BoundedCohomology:
    """Dimensions of a degree-filtered piece of H^i.

    Forms have coefficient degree <= ``maxdeg``; primitives degree <=
    ``maxdeg + 1``; relation multipliers degree <= ``maxdeg + slack``.  The
    numbers describe this filtered piece only.
    """

    degree: int
    maxdeg: int
    dim_closed: int
    dim_exact: int
    dim_quotient: int
    representatives: list[list[str]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "maxdeg": self.maxdeg,
            "dim_closed": self.dim_closed,
            "dim_exact": self.dim_exact,
            "dim_quotient": self.dim_quotient,
            "representatives": self.representatives,
            "note": f"degree-filtered: forms of degree <= {self.maxdeg}",
        }


def _form_space(ring: HypersurfaceRing, maxdeg: int) -> list[tuple[RingElem, ...]]:
    zero = ring.zero
    out = []
    for k in range(3):
        for m in monomial_basis(ring, maxdeg):
            t = [zero, zero, zero]
            t[k] = m
            out.append(tuple(t))
    return out


def h_bounded(ring: HypersurfaceRing, i: int, maxdeg: int, slack: int = 2) -> BoundedCohomology:
    if i not in (1, 2):
        raise ValueError("only degrees 1 and 2 are computed")
    if maxdeg < 2:
        raise ValueError("maxdeg must be at least 2")
    mult = monomial_basis(ring, maxdeg + slack)
    V = _form_space(ring, maxdeg)
    if i == 1:
        df = differential_of_relation(ring).g
        rel = [ring_coordinates([m * c for c in df]) for m in mult]
        exact = [ring_coordinates(d0(m).g) for m in monomial_basis(ring, maxdeg + 1) if m.degree() > 0]
        closed = _closed_one_forms(ring, V, maxdeg + slack)
    else:
        rel = [ring_coordinates([m * c for c in r.h]) for r in twoform_relations(ring) for m in mult]
        exact = [ring_coordinates(d1(OneForm(ring, t)).h) for t in _form_space(ring, maxdeg + 1)]
        closed = [ring_coordinates(t) for t in V]
    r_rel = _rank(rel)
    zr = _rank(rel + closed)
    br_ech = _echelon(rel + exact)
    reps = []
    quotient_ech = _echelon(rel + exact)
    for v in closed:
        if quotient_ech.add(v):
            reps.append(v)
    return BoundedCohomology(
        degree=i,
        maxdeg=maxdeg,
        dim_closed=zr - r_rel,
        dim_exact=br_ech.rank - r_rel,
        dim_quotient=quotient_ech.rank - br_ech.rank,
        representatives=[_format_coords(ring, v) for v in reps],
    )


def _closed_one_forms(ring: HypersurfaceRing, V: list[tuple[RingElem, ...]], reldeg: int) -> list[dict]:
    """A basis of the forms in span(V) whose curl is a relation combination of degree <= reldeg."""
    mult = monomial_basis(ring, reldeg)
    rel = _echelon(ring_coordinates([m * c for c in r.h]) for r in twoform_relations(ring) for m in mult)
    residues = [rel.reduce(ring_coordinates(d1(OneForm(ring, t)).h)) for t in V]
    eqs: dict = {}
    for j, res in enumerate(residues):
        for key, v in res.items():
            eqs.setdefault(key, {})[j] = v
    keys = sorted(eqs)
    _, kernel = _solve_rows([eqs[k] for k in keys], [0] * len(keys), len(V))
    out = []
    for vec in kernel:
        acc: dict = {}
        for j, c in vec.items():
            for key, v in ring_coordinates(V[j]).items():
                s = acc.get(key, 0) + c * v
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        out.append(acc)
    return out


def _format_coords(ring: HypersurfaceRing, coords: dict) -> list[str]:
    terms: list[dict] = [{}, {}, {}]
    for (k, mono), c in coords.items():
        terms[k][mono] = c
    return [str(RingElem(ring, Poly(ring.nvars, t))) for t in terms]
