"""Seeded random instances for property checks.  Pass a ``random.Random``."""

from __future__ import annotations

import random
from typing import Sequence

from .exactring import HypersurfaceRing, RingElem, monomial_basis
from .vectorfields import Derivation


def random_elem(ring: HypersurfaceRing, rng: random.Random, maxdeg: int = 2, coeff_range: int = 3,
                density: float = 0.5) -> RingElem:
    acc = ring.zero
    for m in monomial_basis(ring, maxdeg):
        if rng.random() < density:
            c = rng.randint(-coeff_range, coeff_range)
            if c:
                acc = acc + m * c
    return acc


def random_combination(generators: Sequence[Derivation], rng: random.Random, maxdeg: int = 1,
                       coeff_range: int = 2) -> Derivation:
    """A random A-linear combination of the generators (tangent by construction)."""
    ring = generators[0].ring
    out = Derivation.zero(ring)
    for g in generators:
        out = out + random_elem(ring, rng, maxdeg, coeff_range) * g
    return out


def random_rational(rng: random.Random, num_range: int = 5, den_max: int = 4):
    from fractions import Fraction

    return Fraction(rng.randint(-num_range, num_range), rng.randint(1, den_max))
