"""Exact rational linear algebra on sparse rows.

Rows are dicts ``{column: value}``.  :class:`Echelon` keeps a reduced row
echelon form incrementally, which is what the bounded-degree searches need:
add generators one at a time, ask for rank, reduce a target against the span.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .exactring import RingElem, _q

Row = dict


class DimensionError(ValueError):
    pass


class InconsistentSystem(ArithmeticError):
    """``M x = b`` has no solution.

    ``certificate`` is a vector ``y`` with ``y^T M = 0`` and ``y . b = 1``.
    """

    def __init__(self, certificate: list):
        super().__init__("linear system is inconsistent")
        self.certificate = certificate


def _axpy(target: Row, scale, src: Row) -> None:
    """target += scale * src, in place, dropping zeros."""
    for col, v in src.items():
        s = target.get(col, 0) + scale * v
        if s:
            target[col] = _q(s)
        else:
            target.pop(col, None)


class Echelon:
    """Incrementally maintained reduced row echelon form.

    Each stored row has a pivot column with coefficient 1 and no other stored
    row has a non-zero entry in that column.  Columns listed in ``protected``
    are never chosen as pivots (used for right-hand sides and tags).
    """

    def __init__(self, protected: Iterable[Hashable] = ()):
        self.pivots: dict[Hashable, Row] = {}
        self.protected = frozenset(protected)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Mapping) -> Row:
        r = {c: _q(v) for c, v in row.items() if v}
        for col in [c for c in r if c in self.pivots]:
            v = r.get(col)
            if v:
                _axpy(r, -v, self.pivots[col])
        return r

    def _choose_pivot(self, r: Row):
        cands = [c for c in r if c not in self.protected]
        if not cands:
            return None
        return min(cands, key=_col_key)

    def add(self, row: Mapping) -> bool:
        """Insert ``row``; return True iff it was independent of the stored rows."""
        return self._insert(self.reduce(row))

    def _insert(self, r: Row) -> bool:
        piv = self._choose_pivot(r)
        if piv is None:
            return False
        inv = Fraction(1) / Fraction(r[piv])
        if inv != 1:
            r = {c: _q(v * inv) for c, v in r.items()}
        for other in self.pivots.values():
            v = other.get(piv)
            if v:
                _axpy(other, -v, r)
        self.pivots[piv] = r
        return True

    def contains(self, row: Mapping) -> bool:
        r = self.reduce(row)
        return not any(c not in self.protected for c in r)


def _col_key(c):
    # deterministic pivot choice across runs for mixed key types
    return (type(c).__name__, c)


@dataclass
class Solution:
    """A particular solution and a basis of the kernel."""

    solution: list
    kernel: list[list] = field(default_factory=list)


def rational_linear_solve(M: Sequence[Sequence], b: Sequence) -> Solution:
    """Solve ``M x = b`` exactly over Q.

    Returns one solution (free variables set to zero) and a kernel basis.
    Raises :class:`InconsistentSystem` carrying a left-null certificate.
    """
    m = len(M)
    if len(b) != m:
        raise DimensionError(f"matrix has {m} rows but right-hand side has {len(b)} entries")
    n = len(M[0]) if m else 0
    if any(len(row) != n for row in M):
        raise DimensionError("ragged matrix")
    rows = [{j: v for j, v in enumerate(row) if v} for row in M]
    x, kernel = _solve_rows(rows, list(b), n)
    if x is None:
        raise InconsistentSystem(_certificate(M, b))
    return Solution([x.get(j, 0) for j in range(n)], [[k.get(j, 0) for j in range(n)] for k in kernel])


_RHS = ("__rhs__",)


def _solve_rows(rows: list[Row], b: list, ncols: int | None, columns: Sequence | None = None):
    """Core solver on sparse rows.  Returns (solution dict, kernel dicts) or (None, None)."""
    ech = Echelon(protected=[_RHS])
    for row, rhs in zip(rows, b):
        r = dict(row)
        if rhs:
            r[_RHS] = _q(rhs)
        red = ech.reduce(r)
        # a row reducing to only the rhs column signals inconsistency
        if red and all(c == _RHS for c in red):
            return None, None
        ech._insert(red)
    x = {piv: r.get(_RHS, 0) for piv, r in ech.pivots.items()}
    x = {k: v for k, v in x.items() if v}
    cols = range(ncols) if columns is None else columns
    kernel = []
    for f in cols:
        if f in ech.pivots:
            continue
        vec = {f: 1}
        for piv, r in ech.pivots.items():
            v = r.get(f)
            if v:
                vec[piv] = _q(-v)
        kernel.append(vec)
    return x, kernel


def _certificate(M: Sequence[Sequence], b: Sequence) -> list:
    # y^T M = 0 and y^T b = 1: transpose system with one extra equation
    m = len(M)
    n = len(M[0]) if m else 0
    rows = [{i: M[i][j] for i in range(m) if M[i][j]} for j in range(n)]
    rows.append({i: b[i] for i in range(m) if b[i]})
    rhs = [0] * n + [1]
    y, _ = _solve_rows(rows, rhs, m)
    if y is None:  # pragma: no cover - excluded by the Fredholm alternative
        raise AssertionError("no certificate for an inconsistent system")
    return [y.get(i, 0) for i in range(m)]


# -- systems whose columns are vectors of ring elements ----------------------

def ring_coordinates(vec: Sequence[RingElem]) -> Row:
    """Q-coordinates of a vector of ring elements, keyed by (component, monomial)."""
    out: Row = {}
    for i, a in enumerate(vec):
        for k, c in a.poly.terms.items():
            out[(i, k)] = c
    return out


def solve_combination(columns: Sequence[Sequence[RingElem]], target: Sequence[RingElem]) -> list | None:
    """Find rationals ``c`` with ``sum_j c_j * columns[j] == target``, or None.

    Free variables are set to zero, so the result is deterministic.
    """
    coords = [ring_coordinates(col) for col in columns]
    eqs: dict = {}
    for j, cd in enumerate(coords):
        for key, v in cd.items():
            eqs.setdefault(key, {})[j] = v
    tgt = ring_coordinates(target)
    for key in tgt:
        eqs.setdefault(key, {})
    keys = sorted(eqs)
    x, _ = _solve_rows([eqs[k] for k in keys], [tgt.get(k, 0) for k in keys], len(columns))
    if x is None:
        return None
    return [x.get(j, 0) for j in range(len(columns))]


def span_echelon(vectors: Iterable[Sequence[RingElem]]) -> Echelon:
    ech = Echelon()
    for v in vectors:
        ech.add(ring_coordinates(v))
    return ech
