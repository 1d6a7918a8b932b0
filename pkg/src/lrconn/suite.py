"""The reproduction suite behind ``lrconn verify``.

Each check returns a :class:`Verdict`.  Random instances come from a
``random.Random`` seeded by ``"{seed}:{check name}"`` so a check's inputs do
not depend on which other checks ran.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .connections import (
    ConnectionPresentation,
    GeneratorMap,
    curvature_matrix,
    curvature_oracle,
    curvature_with_potential,
    detect_curvature_type,
    generator_pairs,
    random_ambient_potential,
    random_corner_matrix,
)
from .derham import (
    area_form,
    d0,
    d1,
    exactness_witness,
    h_bounded,
    is_closed,
    omega_n,
    oneform_equal,
    twoform_exactness_witness,
)
from .exactring import monomial_basis
from .idempotents import MatrixA, jacobian_splitting_idempotent, verify_idempotent
from .lierinehart import (
    DElement,
    GeneratorPairMap,
    NonCentralError,
    central_generator_map,
    cocycle_check2,
    d1 as lr_d1,
    equivalence_transform,
    fundamental_pair,
    gamma,
    iso_bracket_residual,
    jacobi_residual,
    leibniz_residual,
    torsor_act,
)
from .presentation import Presentation
from .sampling import random_combination, random_elem
from .vectorfields import _is_unit_sphere

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

# sample counts per randomized check
DEFAULT_SAMPLES = {
    "oracle": 20,
    "jacobi": 50,
    "leibniz": 50,
    "gamma": 20,
    "iso": 20,
    "equivalence": 20,
    "torsor": 10,
}

H1_CONFLICT = ("contradicts the claim that the classes of the forms omega_n are independent and make "
               "H^1 infinite dimensional: omega_0 = d0(g) exactly, with g re-verified by substitution")


@dataclass
class Verdict:
    name: str
    status: str
    detail: dict = field(default_factory=dict)
    counterexample: dict | None = None
    bound: int | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status, "detail": self.detail}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.bound is not None:
            out["bound"] = self.bound
        return out


def _rng(seed: int, name: str) -> random.Random:
    return random.Random(f"{seed}:{name}")


def _names(pres: Presentation, i: int, j: int) -> str:
    return f"{pres.generator_names[i]},{pres.generator_names[j]}"


# -- idempotents ---------------------------------------------------------------


def check_idempotent(pres: Presentation, **_) -> list[Verdict]:
    out = [Verdict("idempotent.phi", PASS if verify_idempotent(pres.phi) else FAIL,
                   {"size": pres.phi.rows})]
    if pres.cofactors is not None:
        psi = jacobian_splitting_idempotent(pres.ring, pres.cofactors, pres.h).phi
        ok = verify_idempotent(psi)
        out.append(Verdict("idempotent.jacobian_splitting", PASS if ok else FAIL,
                           {"equals_phi": psi == pres.phi},
                           None if ok else {"matrix": psi.to_json()}))
    if pres.rho is not None:
        rejected = not verify_idempotent(pres.rho)
        out.append(Verdict("idempotent.rho_rejected", PASS if rejected else FAIL, {"rho_squared": (pres.rho @ pres.rho).to_json()}))
    return out


# -- curvature -----------------------------------------------------------------


def check_curvature_expected(pres: Presentation, **_) -> list[Verdict]:
    if not pres.expected_curvature_type or pres.rho is None:
        return []
    detail, bad = {}, {}
    G = pres.generators
    for (i, j), f in sorted(pres.expected_curvature_type.items()):
        r = curvature_matrix(pres.phi, G[i], G[j])
        key = _names(pres, i, j)
        ok = r == f * pres.rho
        detail[key] = {"expected_factor": str(f), "equal": ok}
        if not ok:
            bad[key] = r.to_json()
    return [Verdict("curvature.expected_values", FAIL if bad else PASS, detail, bad or None)]


def check_curvature_oracle(pres: Presentation, seed: int, samples: dict, **_) -> list[Verdict]:
    name = "curvature.oracle_equivalence"
    rng = _rng(seed, name)
    G = pres.generators
    phi = pres.phi
    cases = [(G[i], G[j], _names(pres, i, j)) for i, j in generator_pairs(len(G))]
    for k in range(samples["oracle"]):
        cases.append((random_combination(G, rng, 1, 2), random_combination(G, rng, 1, 2), f"random[{k}]"))
    range_ok = True
    for x, y, label in cases:
        a = curvature_matrix(phi, x, y)
        b = curvature_oracle(phi, x, y)
        if a != b:
            return [Verdict(name, FAIL, {"cases": len(cases)},
                            {"case": label, "x": x.to_json(), "y": y.to_json(),
                             "formula": a.to_json(), "oracle": b.to_json()})]
        range_ok = range_ok and phi @ a == a and a @ phi == a
    return [
        Verdict(name, PASS, {"cases": len(cases), "generator_pairs": len(G) * (len(G) - 1) // 2}),
        Verdict("curvature.range", PASS if range_ok else FAIL, {"cases": len(cases)}),
    ]


def check_curvature_type(pres: Presentation, maxdeg: int, **_) -> list[Verdict]:
    if pres.rho is None:
        return []
    G = pres.generators
    pairs = generator_pairs(len(G))
    rvals = [curvature_matrix(pres.phi, G[i], G[j]) for i, j in pairs]
    f = detect_curvature_type(rvals, pres.rho, maxdeg)
    if f is None:
        return [Verdict("curvature.type", FAIL, {"of_type": False})]
    detail = {_names(pres, i, j): str(v) for (i, j), v in zip(pairs, f)}
    fmap = GeneratorPairMap(G, dict(zip(pairs, f)), pres.ring.zero, maxdeg)
    cocycle = cocycle_check2(fmap)
    return [
        Verdict("curvature.type", PASS, {"factors": detail}),
        Verdict("curvature.type_cocycle", PASS if cocycle else FAIL, {"d2_zero": cocycle}),
    ]


# -- Lie-Rinehart ----------------------------------------------------------------


def _random_delement(pres: Presentation, rng: random.Random) -> DElement:
    return DElement(random_corner_matrix(pres.phi, rng, 1, 2), random_combination(pres.generators, rng, 1, 2))


def _context(pres: Presentation, rng: random.Random, with_potential: bool) -> ConnectionPresentation:
    if with_potential:
        return ConnectionPresentation(pres.phi, random_ambient_potential(pres.phi, pres.generators, rng, 0))
    return ConnectionPresentation(pres.phi)


def _residual_check(name: str, count: int, pres: Presentation, seed: int,
                    run: Callable[[random.Random, ConnectionPresentation], tuple]) -> Verdict:
    rng = _rng(seed, name)
    for k in range(count):
        # every fifth instance carries a random potential
        ctx = _context(pres, rng, k % 5 == 4)
        residual, inputs = run(rng, ctx)
        if not residual.is_zero():
            return Verdict(name, FAIL, {"instances": count},
                           {"index": k, "inputs": inputs, "residual": residual.to_json()})
    return Verdict(name, PASS, {"instances": count})


def check_jacobi(pres: Presentation, seed: int, samples: dict, **_) -> list[Verdict]:
    def run(rng, ctx):
        zs = [_random_delement(pres, rng) for _ in range(3)]
        return jacobi_residual(*zs, ctx), [z.to_json() for z in zs]

    return [_residual_check("lr.jacobi", samples["jacobi"], pres, seed, run)]


def check_leibniz(pres: Presentation, seed: int, samples: dict, **_) -> list[Verdict]:
    def run(rng, ctx):
        z, w = _random_delement(pres, rng), _random_delement(pres, rng)
        a = random_elem(pres.ring, rng, 2, 3)
        return leibniz_residual(z, a, w, ctx), {"z": z.to_json(), "a": str(a), "w": w.to_json()}

    return [_residual_check("lr.leibniz", samples["leibniz"], pres, seed, run)]


def check_gamma(pres: Presentation, seed: int, samples: dict, **_) -> list[Verdict]:
    name = "lr.gamma"
    rng = _rng(seed, name)
    G = pres.generators
    pairs = generator_pairs(len(G))
    ctx = ConnectionPresentation(pres.phi)
    for k in range(samples["gamma"]):
        P = random_ambient_potential(pres.phi, G, rng, 1)
        i, j = pairs[k % len(pairs)]
        g = gamma(P, G[i], G[j], ctx)
        expected = curvature_with_potential(pres.phi, P, i, j)
        if not g.vec.is_zero() or g.endo != expected:
            return [Verdict(name, FAIL, {"instances": samples["gamma"]},
                            {"index": k, "pair": _names(pres, i, j),
                             "potential": [v.to_json() for v in P.ambient],
                             "gamma": g.to_json(), "expected": expected.to_json()})]
    ident = MatrixA.identity(pres.ring, pres.phi.rows)
    flat_ctx = ConnectionPresentation(ident)
    zero_p = GeneratorMap.zeros(G, MatrixA.zero(pres.ring, pres.phi.rows))
    flat_ok = all(gamma(zero_p, G[i], G[j], flat_ctx).is_zero() for i, j in pairs)
    return [
        Verdict(name, PASS, {"instances": samples["gamma"]}),
        Verdict("lr.gamma_flat_identity", PASS if flat_ok else FAIL, {"pairs": len(pairs)}),
    ]


def check_iso(pres: Presentation, seed: int, samples: dict, **_) -> list[Verdict]:
    name = "lr.iso"
    rng = _rng(seed, name)
    ctx = ConnectionPresentation(pres.phi)
    for k in range(samples["iso"]):
        P = random_ambient_potential(pres.phi, pres.generators, rng, 0)
        z1, z2 = _random_delement(pres, rng), _random_delement(pres, rng)
        res = iso_bracket_residual(P, z1, z2, ctx)
        if not res.is_zero():
            return [Verdict(name, FAIL, {"instances": samples["iso"]},
                            {"index": k, "potential": [v.to_json() for v in P.ambient],
                             "z1": z1.to_json(), "z2": z2.to_json(), "residual": res.to_json()})]
    return [Verdict(name, PASS, {"instances": samples["iso"]})]


def check_equivalence(pres: Presentation, seed: int, samples: dict, **_) -> list[Verdict]:
    name = "lr.equivalence_laws"
    rng = _rng(seed, name)
    G = pres.generators
    pair = fundamental_pair(ConnectionPresentation(pres.phi), G)
    zero = GeneratorMap.zeros(G, MatrixA.zero(pres.ring, pres.phi.rows))
    if equivalence_transform(pair, zero) != pair:
        return [Verdict(name, FAIL, {}, {"law": "identity"})]
    for k in range(samples["equivalence"]):
        a = random_ambient_potential(pres.phi, G, rng, 0)
        b = random_ambient_potential(pres.phi, G, rng, 0)
        ta = equivalence_transform(pair, a)
        laws = {
            "composition": equivalence_transform(ta, b) == equivalence_transform(pair, a + b),
            "inverse": equivalence_transform(ta, -a) == pair,
        }
        for law, ok in laws.items():
            if not ok:
                return [Verdict(name, FAIL, {"instances": samples["equivalence"]},
                                {"law": law, "index": k, "a": [v.to_json() for v in a.ambient],
                                 "b": [v.to_json() for v in b.ambient]})]
    return [Verdict(name, PASS, {"instances": samples["equivalence"], "laws": ["composition", "identity", "inverse"]})]


def check_torsor(pres: Presentation, seed: int, samples: dict, maxdeg: int, **_) -> list[Verdict]:
    name = "lr.torsor"
    rng = _rng(seed, name)
    G = pres.generators
    ring = pres.ring
    pair = fundamental_pair(ConnectionPresentation(pres.phi), G)
    zero_rho = GeneratorPairMap(G, {}, ring.zero, maxdeg)
    if torsor_act(pair, zero_rho) != pair:
        return [Verdict(name, FAIL, {}, {"law": "identity"})]
    for k in range(samples["torsor"]):
        c = GeneratorMap.from_ambient(G, [random_elem(ring, rng, 2, 3) for _ in range(ring.nvars)])
        rho = lr_d1(c)
        acted = torsor_act(pair, rho)
        witness = central_generator_map(c, pres.phi)
        r2 = GeneratorPairMap.from_function(G, lambda i, j: random_elem(ring, rng, 2, 3), ring.zero, maxdeg)
        laws = {
            "coboundary_equivalent": equivalence_transform(pair, witness) == acted,
            "composition": torsor_act(torsor_act(pair, rho), r2) == torsor_act(pair, rho + r2),
        }
        for law, ok in laws.items():
            if not ok:
                return [Verdict(name, FAIL, {"instances": samples["torsor"]},
                                {"law": law, "index": k, "c": [str(v) for v in c.ambient]})]
    rejected = False
    noncentral = MatrixA.unit(ring, pres.phi.rows, 0, 0)
    noncentral = pres.phi @ noncentral @ pres.phi
    try:
        torsor_act(pair, GeneratorPairMap(G, {(0, 1): noncentral}, MatrixA.zero(ring, pres.phi.rows), maxdeg))
    except NonCentralError:
        rejected = True
    return [Verdict(name, PASS if rejected else FAIL,
                    {"instances": samples["torsor"], "non_central_rejected": rejected})]


# -- de Rham -------------------------------------------------------------------


def check_derham(pres: Presentation, maxdeg: int, **_) -> list[Verdict]:
    ring = pres.ring
    if ring.nvars != 3 or not _is_unit_sphere(ring):
        return []
    out = []
    basis = monomial_basis(ring, maxdeg)
    bad = [str(m) for m in basis if not d1(d0(m)).is_zero()]
    out.append(Verdict("derham.d1_d0_zero", FAIL if bad else PASS, {"monomials": len(basis)},
                       {"monomials": bad} if bad else None, maxdeg))

    closed = {str(n): is_closed(omega_n(ring, n)) for n in range(6)}
    out.append(Verdict("derham.omega_n_closed", PASS if all(closed.values()) else FAIL, {"closed": closed}))

    hdeg = min(maxdeg, 4)
    h2 = h_bounded(ring, 2, hdeg)
    w = area_form(ring)
    prim = twoform_exactness_witness(w, hdeg)
    ok = prim is None and h2.dim_quotient >= 1
    out.append(Verdict("derham.area_form_class_nonzero", PASS if ok else FAIL,
                       {"area_form": w.to_json(), "h2": h2.to_json()},
                       None if ok else {"primitive": prim.to_json() if prim else None}, hdeg))

    res = exactness_witness(omega_n(ring, 0), 4)
    verified = res.exact and oneform_equal(d0(res.witness), omega_n(ring, 0), 4)
    out.append(Verdict("derham.omega0_exactness", PASS if verified else FAIL,
                       {"result": res.to_json(), "reverified": verified, "conflict": H1_CONFLICT if verified else None},
                       None, 4))

    h1 = h_bounded(ring, 1, hdeg)
    out.append(Verdict("derham.h1_bounded", PASS, {"h1": h1.to_json()}, None, hdeg))
    return out


CHECK_GROUPS: dict[str, list[Callable[..., list[Verdict]]]] = {
    "idempotent": [check_idempotent],
    "curvature": [check_curvature_expected, check_curvature_oracle, check_curvature_type],
    "lr": [check_jacobi, check_leibniz, check_gamma, check_iso, check_equivalence, check_torsor],
    "derham": [check_derham],
}


def run_suite(pres: Presentation, maxdeg: int = 8, seed: int = 0, samples: dict | None = None,
              groups: list[str] | None = None) -> list[Verdict]:
    counts = dict(DEFAULT_SAMPLES)
    counts.update(samples or {})
    groups = ["idempotent"] + [g for g in (groups or pres.checks()) if g != "idempotent"]
    verdicts = []
    for g in groups:
        for check in CHECK_GROUPS[g]:
            verdicts.extend(check(pres, maxdeg=maxdeg, seed=seed, samples=counts))
    return sorted(verdicts, key=lambda v: v.name)
