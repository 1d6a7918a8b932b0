"""One test per acceptance criterion; the terminal summary prints a PASS/FAIL line for each."""

import json
import random

import pytest
import sympy

from lrconn.cli import main
from lrconn.connections import (
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
from lrconn.derham import (
    TwoForm,
    area_form,
    d0,
    d1,
    exactness_witness,
    h_bounded,
    is_closed,
    omega_n,
    oneform_equal,
    twoform_equal,
    twoform_exactness_witness,
)
from lrconn.exactring import monomial_basis
from lrconn.idempotents import (
    IdempotentPresentation,
    MatrixA,
    NotIdempotentError,
    jacobian_splitting_idempotent,
    verify_idempotent,
)
from lrconn.lierinehart import (
    DElement,
    GeneratorPairMap,
    central_generator_map,
    d1 as lr_d1,
    d2 as lr_d2,
    equivalence_transform,
    fundamental_pair,
    gamma,
    iso_bracket_residual,
    jacobi_residual,
    leibniz_residual,
    torsor_act,
)
from lrconn.sampling import random_combination, random_elem
from oracles import SPHERE_F, X, Y, Z, reduce_mod, to_sympy


@pytest.fixture(scope="module")
def verify_reports(tmp_path_factory):
    root = tmp_path_factory.mktemp("verify")
    codes, blobs = [], []
    for k in range(2):
        path = root / f"run{k}.json"
        codes.append(main(["verify", "sphere", "--seed", "0", "--out", str(path)]))
        blobs.append(path.read_bytes())
    return codes, blobs


def _delement(pre, rng):
    return DElement(random_corner_matrix(pre.phi, rng, 1, 2), random_combination(pre.generators, rng, 1, 2))


def test_criterion_1_sphere_curvature_identities(sphere):
    G, R = sphere.generators, sphere.ring
    for (i, j), f in zip(generator_pairs(3), "xyz"):
        assert curvature_matrix(sphere.phi, G[i], G[j]) == R.normalize(f) * sphere.rho


def test_criterion_2_oracle_equivalence(sphere, russel):
    for pre in (sphere, russel):
        G = pre.generators
        for i, j in generator_pairs(len(G)):
            assert curvature_matrix(pre.phi, G[i], G[j]) == curvature_oracle(pre.phi, G[i], G[j])
    rng = random.Random("criterion-2")
    for k in range(24):
        pre = sphere if k < 20 else russel
        x, y = (random_combination(pre.generators, rng, 1, 2) for _ in range(2))
        assert curvature_matrix(pre.phi, x, y) == curvature_oracle(pre.phi, x, y)


def test_criterion_3_idempotency(sphere, russel):
    assert sphere.phi @ sphere.phi == sphere.phi
    assert russel.phi @ russel.phi == russel.phi
    for pre in (sphere, russel):
        psi = jacobian_splitting_idempotent(pre.ring, pre.cofactors, pre.h).phi
        assert verify_idempotent(psi)
        assert psi == pre.phi
    assert not verify_idempotent(sphere.rho)
    with pytest.raises(NotIdempotentError):
        IdempotentPresentation(sphere.rho)


def test_criterion_4_jacobi_and_leibniz(sphere):
    rng = random.Random("criterion-4")
    plain = ConnectionPresentation(sphere.phi)
    for k in range(50):
        ctx = plain
        if k % 10 == 9:
            ctx = ConnectionPresentation(sphere.phi, random_ambient_potential(sphere.phi, sphere.generators, rng, 0))
        zs = [_delement(sphere, rng) for _ in range(3)]
        assert jacobi_residual(*zs, ctx).is_zero()
        a = random_elem(sphere.ring, rng, 2)
        assert leibniz_residual(zs[0], a, zs[1], ctx).is_zero()


def test_criterion_5_splitting_obstruction(sphere):
    rng = random.Random("criterion-5")
    G = sphere.generators
    ctx = ConnectionPresentation(sphere.phi)
    pairs = generator_pairs(3)
    for k in range(20):
        P = random_ambient_potential(sphere.phi, G, rng, 1)
        i, j = pairs[k % 3]
        g = gamma(P, G[i], G[j], ctx)
        assert g.vec.is_zero()
        assert g.endo == curvature_with_potential(sphere.phi, P, i, j)
    flat = ConnectionPresentation(MatrixA.identity(sphere.ring, 3))
    zero = GeneratorMap.zeros(G, MatrixA.zero(sphere.ring, 3))
    assert all(gamma(zero, G[i], G[j], flat).is_zero() for i, j in pairs)


def test_criterion_6_iso(sphere):
    rng = random.Random("criterion-6")
    ctx = ConnectionPresentation(sphere.phi)
    for _ in range(20):
        P = random_ambient_potential(sphere.phi, sphere.generators, rng, 0)
        z1, z2 = _delement(sphere, rng), _delement(sphere, rng)
        assert iso_bracket_residual(P, z1, z2, ctx).is_zero()


def test_criterion_7_equivalence_laws(sphere):
    rng = random.Random("criterion-7")
    G = sphere.generators
    pair = fundamental_pair(ConnectionPresentation(sphere.phi), G)
    assert equivalence_transform(pair, GeneratorMap.zeros(G, MatrixA.zero(sphere.ring, 3))) == pair
    for _ in range(20):
        a = random_ambient_potential(sphere.phi, G, rng, 0)
        b = random_ambient_potential(sphere.phi, G, rng, 0)
        ta = equivalence_transform(pair, a)
        assert equivalence_transform(ta, b) == equivalence_transform(pair, a + b)
        assert equivalence_transform(ta, -a) == pair


def test_criterion_8_torsor(sphere):
    rng = random.Random("criterion-8")
    G, R = sphere.generators, sphere.ring
    pair = fundamental_pair(ConnectionPresentation(sphere.phi), G)
    assert torsor_act(pair, GeneratorPairMap(G, {}, R.zero)) == pair
    for _ in range(10):
        c = GeneratorMap.from_ambient(G, [random_elem(R, rng, 2) for _ in range(3)])
        rho = lr_d1(c)
        acted = torsor_act(pair, rho)
        assert equivalence_transform(pair, central_generator_map(c, sphere.phi)) == acted
        r2 = GeneratorPairMap.from_function(G, lambda i, j: random_elem(R, rng, 2), R.zero)
        assert torsor_act(acted, r2) == torsor_act(pair, rho + r2)
        assert torsor_act(torsor_act(pair, r2), -r2) == pair


def test_criterion_9_curvature_type(sphere):
    G, R = sphere.generators, sphere.ring
    pairs = generator_pairs(3)
    f = detect_curvature_type([curvature_matrix(sphere.phi, G[i], G[j]) for i, j in pairs], sphere.rho)
    assert f == [R.normalize(s) for s in "xyz"]
    cochain = GeneratorPairMap(G, dict(zip(pairs, f)), R.zero)
    assert all(v.is_zero() for v in lr_d2(cochain).values())


def test_criterion_10_derham_structure(sphere):
    R = sphere.ring
    zero2 = TwoForm(R, (0, 0, 0))
    assert all(twoform_equal(d1(d0(m)), zero2) for m in monomial_basis(R, 8))
    assert all(is_closed(omega_n(R, n)) for n in range(6))
    h2 = h_bounded(R, 2, 4)
    assert h2.dim_quotient == 1
    assert twoform_exactness_witness(area_form(R), 4) is None


def test_criterion_11_omega0_exactness_adjudication(sphere, verify_reports):
    R = sphere.ring
    res = exactness_witness(omega_n(R, 0), 4)
    assert res.exact
    assert oneform_equal(d0(res.witness), omega_n(R, 0))
    # substitution in sympy: grad(g) - a grad(f) = (xz, yz, 0) modulo f, and g = -z^3/3 up to a constant
    g, a = to_sympy(res.witness), to_sympy(res.multiplier)
    for v, w in zip((X, Y, Z), (X * Z, Y * Z, 0)):
        assert reduce_mod(sympy.diff(g, v) - a * sympy.diff(SPHERE_F, v) - w) == 0
    assert reduce_mod(g + Z**3 / 3).is_constant()
    report = json.loads(verify_reports[1][0])
    flagged = [c["check"] for c in report["conflicts"]]
    assert "derham.omega0_exactness" in flagged


def test_criterion_12_determinism(verify_reports):
    codes, blobs = verify_reports
    assert codes == [0, 0]
    assert blobs[0] == blobs[1]
