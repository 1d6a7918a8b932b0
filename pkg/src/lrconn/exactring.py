"""Exact polynomial arithmetic over Q and in hypersurface rings Q[x_1..x_n]/(f).

Monomials are packed into a single Python int, ``_BITS`` bits per variable,
so multiplying two monomials is one integer addition.  Coefficients are
``int`` whenever integral and ``Fraction`` otherwise; keeping integers
unboxed is a large constant-factor win for the matrix computations built on
top of this module.

A :class:`HypersurfaceRing` requires the relation ``f`` to contain exactly one
term of top degree ``d`` in a designated variable ``v`` and that term must be
``c * v^d`` with ``c`` a rational constant.  Normal forms are then the
representatives of degree ``< d`` in ``v``.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

_BITS = 16
_MASK = (1 << _BITS) - 1

Coeff = int | Fraction


class RingError(ValueError):
    """Raised on ring mismatches and malformed ring data."""


class PolynomialSyntaxError(ValueError):
    pass


def _q(c) -> Coeff:
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _q(Fraction(c.numerator, c.denominator))
    raise TypeError(f"not an exact rational: {c!r}")


def pack(exponents: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exponents):
        if e < 0 or e > _MASK:
            raise ValueError(f"exponent out of range: {e}")
        key |= e << (_BITS * i)
    return key


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(nvars))


def _exp(key: int, i: int) -> int:
    return (key >> (_BITS * i)) & _MASK


def _total_degree(key: int) -> int:
    d = 0
    while key:
        d += key & _MASK
        key >>= _BITS
    return d


def format_coeff(c: Coeff) -> str:
    c = _q(c)
    if isinstance(c, int):
        return str(c)
    return f"{c.numerator}/{c.denominator}"


class Poly:
    """Sparse polynomial in ``nvars`` variables with exact rational coefficients.

    Instances are treated as immutable; ``terms`` must not be mutated after
    construction.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[int, Coeff] | None = None):
        self.nvars = nvars
        self.terms: dict[int, Coeff] = (
            {k: _q(c) for k, c in terms.items() if c != 0} if terms else {}
        )
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[int, Coeff]) -> Poly:
        # terms must already be clean
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, nvars: int, c) -> Poly:
        c = _q(c)
        return cls._raw(nvars, {0: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> Poly:
        if not 0 <= i < nvars:
            raise RingError(f"invalid variable index {i} for {nvars} variables")
        return cls._raw(nvars, {1 << (_BITS * i): 1})

    @classmethod
    def monomial(cls, exponents: Sequence[int], c=1) -> Poly:
        c = _q(c)
        return cls._raw(len(exponents), {pack(exponents): c} if c else {})

    @classmethod
    def from_dict(cls, nvars: int, terms: Mapping[tuple[int, ...], Coeff]) -> Poly:
        out: dict[int, Coeff] = {}
        for e, c in terms.items():
            if len(e) != nvars:
                raise RingError("exponent vector length does not match variable count")
            k = pack(e)
            out[k] = out.get(k, 0) + _q(c)
        return cls(nvars, out)

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterator[tuple[tuple[int, ...], Coeff]]:
        """Terms as (exponent tuple, coefficient), in canonical (descending grlex) order."""
        for k in self.sorted_keys():
            yield unpack(k, self.nvars), self.terms[k]

    def sorted_keys(self) -> list[int]:
        n = self.nvars
        return sorted(self.terms, key=lambda k: (_total_degree(k), unpack(k, n)), reverse=True)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((_total_degree(k) for k in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((_exp(k, i) for k in self.terms), default=-1)

    def constant_term(self) -> Coeff:
        return self.terms.get(0, 0)

    def is_constant(self) -> bool:
        return all(k == 0 for k in self.terms)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: Poly) -> None:
        if self.nvars != other.nvars:
            raise RingError("variable-count mismatch")

    def __add__(self, other) -> Poly:
        if not isinstance(other, Poly):
            other = Poly.const(self.nvars, other)
        self._check(other)
        if len(other.terms) > len(self.terms):
            self, other = other, self
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = _q(s)
            else:
                out.pop(k, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        if not isinstance(other, Poly):
            other = Poly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def scale(self, c) -> Poly:
        c = _q(c)
        if not c:
            return Poly._raw(self.nvars, {})
        return Poly._raw(self.nvars, {k: _q(v * c) for k, v in self.terms.items()})

    def shift(self, key: int, c: Coeff = 1) -> Poly:
        """Multiply by the monomial ``c * X^key``."""
        if not c:
            return Poly._raw(self.nvars, {})
        return Poly._raw(self.nvars, {k + key: _q(v * c) for k, v in self.terms.items()})

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, Coeff] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return Poly._raw(self.nvars, {k: _q(c) for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            raise ValueError("negative exponent")
        result = Poly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def partial(self, i: int) -> Poly:
        """Formal partial derivative in variable ``i``."""
        if not 0 <= i < self.nvars:
            raise RingError(f"invalid variable index {i}")
        unit = 1 << (_BITS * i)
        out = {}
        for k, c in self.terms.items():
            e = _exp(k, i)
            if e:
                out[k - unit] = c * e
        return Poly._raw(self.nvars, out)

    def substitute_var(self, i: int, value: Poly) -> Poly:
        """Replace variable ``i`` by the polynomial ``value``."""
        out = Poly._raw(self.nvars, {})
        powers: dict[int, Poly] = {}
        for k, c in self.terms.items():
            e = _exp(k, i)
            if e not in powers:
                powers[e] = value ** e
            out = out + powers[e].shift(k - (e << (_BITS * i)), c)
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({0: _q(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- text -------------------------------------------------------------
    def format(self, names: Sequence[str]) -> str:
        """Canonical text form, e.g. ``-1/3 * z^3 + x * y - 1``."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.items():
            factors = []
            for name, p in zip(names, e):
                if p == 1:
                    factors.append(name)
                elif p > 1:
                    factors.append(f"{name}^{p}")
            mag = abs(c)
            if not factors:
                body = format_coeff(mag)
            elif mag == 1:
                body = " * ".join(factors)
            else:
                body = " * ".join([format_coeff(mag)] + factors)
            parts.append(("- " if c < 0 else "+ ", body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "- " else "") + first
        for sign, body in parts[1:]:
            text += f" {sign}{body}"
        return text

    def __repr__(self) -> str:
        return f"Poly({self.format([f'x{i + 1}' for i in range(self.nvars)])})"


def parse_poly(text: str, names: Sequence[str]) -> Poly:
    """Parse a polynomial expression in the given variables.

    Accepts ``+ - *``, ``^`` or ``**`` with non-negative integer exponents,
    integer literals, and division by non-zero constants (so ``3/4 * x`` works).
    """
    nvars = len(names)
    index = {n: i for i, n in enumerate(names)}
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise PolynomialSyntaxError(f"cannot parse polynomial {text!r}: {exc.msg} at column {exc.offset}") from None

    def ev(node) -> Poly:
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return Poly.const(nvars, node.value)
        if isinstance(node, ast.Name):
            if node.id not in index:
                raise PolynomialSyntaxError(f"unknown variable {node.id!r} in {text!r}")
            return Poly.var(nvars, index[node.id])
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            p = ev(node.operand)
            return -p if isinstance(node.op, ast.USub) else p
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = ev(node.right)
                if not exp.is_constant() or not isinstance(exp.constant_term(), int) or exp.constant_term() < 0:
                    raise PolynomialSyntaxError(f"exponent must be a non-negative integer in {text!r}")
                return ev(node.left) ** exp.constant_term()
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if not right.is_constant() or right.is_zero():
                    raise PolynomialSyntaxError(f"division only by non-zero constants in {text!r}")
                return left.scale(Fraction(1) / Fraction(right.constant_term()))
        raise PolynomialSyntaxError(f"unsupported syntax in polynomial {text!r}")

    return ev(tree.body)


class HypersurfaceRing:
    """The ring Q[x_1..x_n]/(f) with f monic (up to a unit of Q) in one variable."""

    def __init__(self, variable_names: Sequence[str], relation: Poly | str, leading_variable: str | int):
        names = tuple(variable_names)
        if len(set(names)) != len(names) or not names:
            raise RingError("variable names must be distinct and non-empty")
        if isinstance(relation, str):
            relation = parse_poly(relation, names)
        if relation.nvars != len(names):
            raise RingError("relation has the wrong number of variables")
        v = names.index(leading_variable) if isinstance(leading_variable, str) else int(leading_variable)
        if not 0 <= v < len(names):
            raise RingError(f"invalid leading variable {leading_variable!r}")
        d = relation.degree_in(v)
        if d < 1:
            raise RingError(f"relation does not involve {names[v]}")
        top = {k: c for k, c in relation.terms.items() if _exp(k, v) == d}
        vd = d << (_BITS * v)
        if set(top) != {vd}:
            raise RingError(f"relation is not monic in {names[v]} up to a rational unit")
        lc = top[vd]
        self.variable_names = names
        self.nvars = len(names)
        self.relation = relation
        self.leading_variable = v
        self.leading_degree = d
        self._vd_key = vd
        # v^d == tail modulo f
        rest = Poly._raw(self.nvars, {k: c for k, c in relation.terms.items() if k != vd})
        self._tail = rest.scale(Fraction(-1) / lc)
        self._power_nf: dict[int, Poly] = {}
        self._hash = hash((names, relation, v))
        self.zero = RingElem(self, Poly._raw(self.nvars, {}))
        self.one = RingElem(self, Poly.const(self.nvars, 1))

    # -- normal forms -----------------------------------------------------
    def _nf_power(self, k: int) -> Poly:
        """Normal form of v^k for k >= d."""
        nf = self._power_nf.get(k)
        if nf is not None:
            return nf
        v, d = self.leading_variable, self.leading_degree
        if k == d:
            nf = self._tail
        else:
            prev = self._nf_power(k - 1) if k - 1 >= d else Poly._raw(self.nvars, {(k - 1) << (_BITS * v): 1})
            shifted = prev.shift(1 << (_BITS * v))
            low = {kk: c for kk, c in shifted.terms.items() if _exp(kk, v) < d}
            nf = Poly._raw(self.nvars, low)
            for kk, c in shifted.terms.items():
                if _exp(kk, v) == d:
                    nf = nf + self._tail.shift(kk - self._vd_key, c)
        self._power_nf[k] = nf
        return nf

    def reduce(self, p: Poly) -> Poly:
        """Normal form of a raw polynomial modulo f (as a raw polynomial)."""
        if p.nvars != self.nvars:
            raise RingError("variable-count mismatch")
        v, d = self.leading_variable, self.leading_degree
        shift = _BITS * v
        high: dict[int, dict[int, Coeff]] = {}
        low: dict[int, Coeff] = {}
        for k, c in p.terms.items():
            e = (k >> shift) & _MASK
            if e < d:
                low[k] = c
            else:
                high.setdefault(e, {})[k - (e << shift)] = c
        if not high:
            return p
        out = Poly._raw(self.nvars, low)
        for e, rest in high.items():
            out = out + Poly._raw(self.nvars, rest) * self._nf_power(e)
        return out

    def normalize(self, p: Poly | str) -> RingElem:
        if isinstance(p, str):
            p = parse_poly(p, self.variable_names)
        return RingElem(self, self.reduce(p))

    __call__ = normalize

    def coerce(self, value) -> RingElem:
        if isinstance(value, RingElem):
            if value.ring != self:
                raise RingError("ring mismatch")
            return value
        if isinstance(value, (Poly, str)):
            return self.normalize(value)
        return RingElem(self, Poly.const(self.nvars, value))

    def var(self, name: str | int) -> RingElem:
        i = self.variable_names.index(name) if isinstance(name, str) else name
        return self.normalize(Poly.var(self.nvars, i))

    def gens(self) -> tuple[RingElem, ...]:
        return tuple(self.var(i) for i in range(self.nvars))

    def partials_of_relation(self) -> tuple[Poly, ...]:
        return tuple(self.relation.partial(i) for i in range(self.nvars))

    def is_normal(self, p: Poly) -> bool:
        return p.degree_in(self.leading_variable) < self.leading_degree

    def format(self, p: Poly) -> str:
        return p.format(self.variable_names)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, HypersurfaceRing):
            return NotImplemented
        return (
            self.variable_names == other.variable_names
            and self.relation == other.relation
            and self.leading_variable == other.leading_variable
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"HypersurfaceRing({list(self.variable_names)}, {self.format(self.relation)!r}, {self.variable_names[self.leading_variable]!r})"


class RingElem:
    """An element of a :class:`HypersurfaceRing`, stored in normal form."""

    __slots__ = ("ring", "poly")

    def __init__(self, ring: HypersurfaceRing, poly: Poly):
        self.ring = ring
        self.poly = poly

    def _other(self, other) -> RingElem | None:
        if isinstance(other, RingElem):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingError("ring mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return RingElem(self.ring, Poly.const(self.ring.nvars, other))
        return None

    def __add__(self, other) -> RingElem:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return RingElem(self.ring, self.poly + o.poly)

    __radd__ = __add__

    def __neg__(self) -> RingElem:
        return RingElem(self.ring, -self.poly)

    def __sub__(self, other) -> RingElem:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return RingElem(self.ring, self.poly - o.poly)

    def __rsub__(self, other) -> RingElem:
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RingElem(self.ring, self.poly.scale(other))
        if isinstance(other, RingElem):
            self._other(other)
            return RingElem(self.ring, self.ring.reduce(self.poly * other.poly))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RingElem(self.ring, self.poly.scale(other))
        return NotImplemented

    def __pow__(self, n: int) -> RingElem:
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return not self.poly.terms

    def __bool__(self) -> bool:
        return bool(self.poly.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, RingElem):
            return self.ring == other.ring and self.poly == other.poly
        if isinstance(other, (int, Fraction)):
            return self.poly == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.poly)

    def degree(self) -> int:
        return self.poly.degree()

    def partial(self, i: int) -> Poly:
        """Formal partial derivative of the stored representative (not normalized)."""
        return self.poly.partial(i)

    def __str__(self) -> str:
        return self.ring.format(self.poly)

    def __repr__(self) -> str:
        return f"RingElem({self})"


# -- module-level operations --------------------------------------------------

def normalize(p: Poly | str, ring: HypersurfaceRing) -> RingElem:
    return ring.normalize(p)


def add(a: RingElem, b: RingElem) -> RingElem:
    return a + b


def neg(a: RingElem) -> RingElem:
    return -a


def mul(a: RingElem, b: RingElem) -> RingElem:
    return a * b


def scalar_mul(q, a: RingElem) -> RingElem:
    return a * _q(q)


def partial(a: RingElem, v: int) -> Poly:
    return a.partial(v)


def monomial_basis(ring: HypersurfaceRing, maxdeg: int) -> list[RingElem]:
    """Normal-form monomials of total degree <= maxdeg.

    Ordered by degree, then lexicographically with the first variable largest:
    ``1, x, y, z, x^2, x*y, ...``.
    """
    if maxdeg < 0:
        raise ValueError("maxdeg must be non-negative")
    return [RingElem(ring, Poly._raw(ring.nvars, {k: 1})) for k in monomial_keys(ring, maxdeg)]


def monomial_keys(ring: HypersurfaceRing, maxdeg: int) -> list[int]:
    n, v, d = ring.nvars, ring.leading_variable, ring.leading_degree

    def exps(nleft: int, budget: int) -> Iterable[tuple[int, ...]]:
        if nleft == 0:
            yield ()
            return
        i = n - nleft
        top = budget if i != v else min(budget, d - 1)
        for e in range(top, -1, -1):
            for rest in exps(nleft - 1, budget - e):
                yield (e,) + rest

    out = []
    for deg in range(maxdeg + 1):
        out.extend(pack(e) for e in exps(n, deg) if sum(e) == deg)
    return out
