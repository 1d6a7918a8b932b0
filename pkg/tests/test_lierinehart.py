import random

import pytest
from hypothesis import given, settings, strategies as st

from lrconn.connections import (
    ConnectionPresentation,
    GeneratorMap,
    adjoint_shortcut,
    curvature_oracle,
    curvature_with_potential,
    generator_pairs,
    random_ambient_potential,
    random_corner_matrix,
)
from lrconn.idempotents import MatrixA, commutator, preset_sphere
from lrconn.lierinehart import (
    ConnectionPair,
    DElement,
    GeneratorPairMap,
    NonCentralError,
    adjoint_action,
    alpha_action,
    central_generator_map,
    cocycle_check2,
    d0,
    d1,
    d2,
    d_bracket,
    equivalence_transform,
    equivalent_with_witness,
    fundamental_pair,
    gamma,
    is_central,
    iso_bracket_residual,
    iso_map,
    jacobi_residual,
    leibniz_residual,
    section_pair,
    torsor_act,
)
from lrconn.sampling import random_combination, random_elem
from lrconn.vectorfields import Derivation

SPHERE = preset_sphere()


def _delement(pre, rng):
    return DElement(random_corner_matrix(pre.phi, rng, 1, 2), random_combination(pre.generators, rng, 1, 2))


def _reference_bracket(z1, z2, phi, potential=None):
    """Bracket rebuilt from the matrix shortcut for ad and the operator oracle for R."""
    f, x = z1.endo, z1.vec
    g, y = z2.endo, z2.vec
    zero = MatrixA.zero(phi.ring, phi.rows)
    P = potential

    def ad(v, m):
        if v.is_zero() or m.is_zero():
            return zero
        base = adjoint_shortcut(phi, v, m)
        return base if P is None else base + commutator(P(v), m)

    curv = zero if x.is_zero() or y.is_zero() else curvature_oracle(phi, x, y, P)
    return DElement(commutator(f, g) + ad(x, g) - ad(y, f) + curv, x.bracket(y))


@pytest.fixture(scope="module")
def ctx():
    return ConnectionPresentation(SPHERE.phi)


def test_bracket_on_pure_parts(ctx):
    D1, D2, D3 = SPHERE.generators
    zero = MatrixA.zero(SPHERE.ring, 3)
    z = d_bracket(DElement(zero, D1), DElement(zero, D2), ctx)
    assert z.endo == ctx.curvature(D1, D2)
    assert z.vec == D3
    rng = random.Random(0)
    f, g = (random_corner_matrix(SPHERE.phi, rng, 1) for _ in range(2))
    zero_vec = Derivation.zero(SPHERE.ring)
    w = d_bracket(DElement(f, zero_vec), DElement(g, zero_vec), ctx)
    assert w == DElement(commutator(f, g), zero_vec)
    u = _delement(SPHERE, rng)
    assert d_bracket(u, u, ctx).is_zero()


@pytest.mark.parametrize("seed", range(4))
def test_bracket_matches_reference(seed):
    rng = random.Random(seed)
    P = random_ambient_potential(SPHERE.phi, SPHERE.generators, rng, 0) if seed % 2 else None
    local = ConnectionPresentation(SPHERE.phi, P)
    z1, z2 = _delement(SPHERE, rng), _delement(SPHERE, rng)
    assert d_bracket(z1, z2, local) == _reference_bracket(z1, z2, SPHERE.phi, P)
    assert d_bracket(z2, z1, local) == -d_bracket(z1, z2, local)


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10**6))
def test_jacobi_and_leibniz(seed):
    rng = random.Random(seed)
    local = ConnectionPresentation(SPHERE.phi)
    zs = [_delement(SPHERE, rng) for _ in range(3)]
    assert jacobi_residual(*zs, local).is_zero()
    a = random_elem(SPHERE.ring, rng, 2)
    assert leibniz_residual(zs[0], a, zs[1], local).is_zero()


def test_jacobi_with_potential():
    rng = random.Random(11)
    P = random_ambient_potential(SPHERE.phi, SPHERE.generators, rng, 0)
    local = ConnectionPresentation(SPHERE.phi, P)
    zs = [_delement(SPHERE, rng) for _ in range(3)]
    assert jacobi_residual(*zs, local).is_zero()


def test_gamma_equals_curvature_with_potential(ctx):
    rng = random.Random(12)
    G = SPHERE.generators
    P = random_ambient_potential(SPHERE.phi, G, rng, 1)
    for i, j in generator_pairs(3):
        g = gamma(P, G[i], G[j], ctx)
        assert g.vec.is_zero()
        assert g.endo == curvature_with_potential(SPHERE.phi, P, i, j)


def test_gamma_zero_potential_is_curvature(ctx):
    G = SPHERE.generators
    P = GeneratorMap.zeros(G, MatrixA.zero(SPHERE.ring, 3))
    g = gamma(P, G[0], G[1], ctx)
    assert g.endo == ctx.curvature(G[0], G[1])


def test_iso_map(ctx):
    rng = random.Random(13)
    G = SPHERE.generators
    zero = GeneratorMap.zeros(G, MatrixA.zero(SPHERE.ring, 3))
    z = _delement(SPHERE, rng)
    assert iso_map(zero, z) == z
    P = random_ambient_potential(SPHERE.phi, G, rng, 0)
    assert iso_map(-P, iso_map(P, z)) == z
    z2 = _delement(SPHERE, rng)
    assert iso_bracket_residual(P, z, z2, ctx).is_zero()


def test_generator_pair_map_antisymmetry():
    G = SPHERE.generators
    R = SPHERE.ring
    x, y, z = R.gens()
    psi = GeneratorPairMap(G, {(0, 1): x, (0, 2): y, (1, 2): z}, R.zero)
    assert psi.at(1, 0) == -x
    assert psi(G[0], G[1]) == x
    assert psi(G[1], G[0]) == -x
    assert psi(G[0], G[0]).is_zero()
    assert psi(x * G[0], G[2]) == x * y
    assert (psi - psi).is_zero()


def test_scalar_cochains():
    G = SPHERE.generators
    R = SPHERE.ring
    x, y, z = R.gens()
    w = x * y
    b = d0(w, G)
    assert b(G[0]) == G[0](w)
    assert d1(b).is_zero()
    curv_type = GeneratorPairMap(G, {(0, 1): x, (0, 2): y, (1, 2): z}, R.zero)
    assert cocycle_check2(curv_type)
    rng = random.Random(14)
    c = GeneratorMap.from_ambient(G, [random_elem(R, rng, 2) for _ in range(3)])
    assert all(v.is_zero() for v in d2(d1(c)).values())


def test_matrix_cochains(ctx):
    rng = random.Random(15)
    G = SPHERE.generators
    act = adjoint_action(ctx)
    b = random_ambient_potential(SPHERE.phi, G, rng, 0)
    # curvature acts on End as ad(R), so d1 d0 and d2 d1 reduce to commutators with R
    v = random_corner_matrix(SPHERE.phi, rng, 1)
    dd = d1(d0(v, G, act), act)
    for i, j in generator_pairs(3):
        assert dd.at(i, j) == commutator(ctx.curvature(G[i], G[j]), v)
    d2b = d2(d1(b, act), act)
    assert all(isinstance(val, MatrixA) for val in d2b.values())
    assert alpha_action(G[0], SPHERE.ring.one).is_zero()


def test_fundamental_pair_and_transforms(ctx):
    G = SPHERE.generators
    pair = fundamental_pair(ctx, G)
    assert pair.psi.at(0, 1) == SPHERE.ring.normalize("x") * SPHERE.rho
    zero = GeneratorMap.zeros(G, MatrixA.zero(SPHERE.ring, 3))
    assert equivalence_transform(pair, zero) == pair
    rng = random.Random(16)
    a = random_ambient_potential(SPHERE.phi, G, rng, 0)
    b = random_ambient_potential(SPHERE.phi, G, rng, 0)
    ta = equivalence_transform(pair, a)
    assert equivalence_transform(ta, b) == equivalence_transform(pair, a + b)
    assert equivalence_transform(ta, -a) == pair
    assert equivalent_with_witness(pair, ta, a)
    assert section_pair(ctx, pair.psi, a) == ta


def test_transformed_cochain_is_curvature_of_shift(ctx):
    # the transform of the fundamental pair by b is the fundamental pair of nabla + b
    rng = random.Random(17)
    G = SPHERE.generators
    b = random_ambient_potential(SPHERE.phi, G, rng, 0)
    moved = equivalence_transform(fundamental_pair(ctx, G), b)
    assert moved == fundamental_pair(ctx.shifted(b), G)


def test_centrality(ctx):
    R = SPHERE.ring
    phi = SPHERE.phi
    assert is_central(phi, phi)
    assert is_central(R.normalize("x*y") * phi, phi)
    assert not is_central(SPHERE.rho, phi)
    assert not is_central(MatrixA.identity(R, 3), phi)


def test_torsor(ctx):
    G = SPHERE.generators
    R = SPHERE.ring
    pair = fundamental_pair(ctx, G)
    assert torsor_act(pair, GeneratorPairMap(G, {}, R.zero)) == pair
    rng = random.Random(18)
    c = GeneratorMap.from_ambient(G, [random_elem(R, rng, 1) for _ in range(3)])
    rho = d1(c)
    acted = torsor_act(pair, rho)
    assert acted != pair or rho.is_zero()
    assert equivalence_transform(pair, central_generator_map(c, SPHERE.phi)) == acted
    with pytest.raises(NonCentralError):
        torsor_act(pair, GeneratorPairMap(G, {(0, 1): SPHERE.rho}, MatrixA.zero(R, 3)))


def test_pair_equality_allows_central_potential_shift(ctx):
    G = SPHERE.generators
    pair = fundamental_pair(ctx, G)
    central = GeneratorMap(G, tuple(SPHERE.ring.normalize(s) * SPHERE.phi for s in ("x", "1", "z")))
    shifted = ConnectionPair(ctx.shifted(central), pair.psi)
    assert shifted == pair
    other = ConnectionPair(ctx.shifted(GeneratorMap(G, (SPHERE.rho,) * 3)), pair.psi)
    assert other != pair


def test_jacobi_and_leibniz_examples(ctx):
    D1, D2, D3 = SPHERE.generators
    R = SPHERE.ring
    zero = MatrixA.zero(R, 3)
    zero_vec = Derivation.zero(R)
    pure = [DElement(zero, D) for D in SPHERE.generators]
    assert jacobi_residual(*pure, ctx).is_zero()
    rng = random.Random(19)
    endos = [DElement(random_corner_matrix(SPHERE.phi, rng, 1), zero_vec) for _ in range(3)]
    assert jacobi_residual(*endos, ctx).is_zero()
    x = R.gens()[0]
    assert leibniz_residual(pure[0], x, pure[1], ctx).is_zero()
    u, w = _delement(SPHERE, rng), _delement(SPHERE, rng)
    assert leibniz_residual(u, R.one, w, ctx).is_zero()
    assert leibniz_residual(endos[0], x * x, w, ctx).is_zero()
