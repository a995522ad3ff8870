import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qhodge import kufix
from qhodge.lattice import Lattice


def test_genuine_m3_degree4():
    c = kufix.pi_genuine(3).component(2)
    assert c.rank == 3
    assert c.basis_labels() == ["beta^2*q^0", "beta^2*q^1", "beta^2*q^2"]


def test_genuine_is_connective():
    with pytest.raises(ValueError):
        kufix.pi_genuine(4).component(-1)


def test_hfp_relation_and_degree_zero():
    pres = kufix.pi_homotopy_fixed(1, 8, 6)
    assert pres.reduces_to_zero(pres.relations[0])
    # degree 0: (beta t)^j = (q-1)^j, so only the q-truncation survives
    assert pres.component(0).rank == 6


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_hfp_comparison_is_ring_map(m):
    assert kufix.hfp_comparison(m, 8, 4).is_ring_map()


@given(st.integers(1, 9))
def test_m_series_matches_sympy(d):
    b, t = sympy.symbols("beta t")
    poly = sympy.Poly(sympy.expand(((1 + b * t) ** d - 1) / b), b, t)
    expected = {m: int(c) for m, c in zip(poly.monoms(), poly.coeffs())}
    assert kufix.m_series(d) == expected


def test_m_series_2():
    assert kufix.m_series(2) == {(0, 1): 2, (1, 2): 1}


@pytest.mark.parametrize("m,primes", [(1, []), (2, []), (3, []), (4, [2]), (6, [2, 3]), (9, [3]), (7, [])])
def test_geometric_inverted_primes(m, primes):
    assert kufix.pi_geometric(m).primes == primes


def test_geometric_m2_degree_zero_is_z():
    assert kufix.pi_geometric(2).component_json(0)["rank"] == "1"
    assert kufix.pi_geometric(2).base == "Z"


def test_localized_m2():
    pres = kufix.pi_geometric_localized(2, 2)
    for k in range(4):
        assert pres.component(k).rank == 1
    with pytest.raises(ValueError):
        kufix.pi_geometric_localized(6, 2)


def test_p_complete_beta_image_at_q_minus_one():
    piece = kufix.pi_geometric_p_complete(2, 1, 1, 5)
    img = piece.ring.ctx.element(piece.from_genuine.images["beta"][(1,)])
    assert img == piece.ring.ctx.scalar(-2)
    assert piece.from_genuine.is_ring_map()


@pytest.mark.parametrize("p,alpha,mp", [(2, 1, 1), (3, 1, 1), (2, 2, 1), (5, 1, 1), (3, 1, 2), (2, 1, 3)])
def test_p_complete_comparison_maps(p, alpha, mp):
    piece = kufix.pi_geometric_p_complete(p, alpha, mp, 5)
    assert piece.from_genuine.is_ring_map()
    assert piece.base_change_ok
    assert piece.completion_check(6)


def test_hfp_to_geometric():
    out = kufix.hfp_to_geometric_map(2, 1, 5, 8, 6)
    assert out == {"ring_map": True, "relation_image_exact": True}


@settings(max_examples=10)
@given(st.integers(1, 6), st.integers(1, 4))
def test_inflation_is_semilinear_ring_map(m, n):
    inf = kufix.inflation_map(m, n)
    assert inf.is_ring_map()
    # q-semilinear: q^j beta^k goes to q^(nj) beta^k
    out = inf.apply({(1,): [0, 1]})
    assert inf.target.component(1).vector(out) == inf.target.component(1).vector({(1,): [0] * n + [1]})


def test_inflation_by_one_is_identity():
    inf = kufix.inflation_map(5, 1)
    f = {(2,): [1, 2, 3]}
    assert inf.apply(f) == f


@pytest.mark.parametrize("k", range(4))
def test_inflation_base_change_isomorphism(k):
    r = kufix.base_change_check(2, 3, k)
    assert r["square"] and r["unimodular"]


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_fracture_consistent(m):
    assert kufix.fracture_assemble(m, 10, 5, 6)["ok"]


def test_fracture_m4_pullback_is_gaussian_integers():
    # the glued degree-0 piece keeps 2 integral
    rep = kufix.fracture_assemble(4, 0, 5, 6)
    d0 = rep["degrees"][0]
    assert d0["rank_match"] and d0["jointly_surjective"]
    D = 4 ** 6
    lam = kufix._pullback_lattice(4, 0, D, {2: [-1, 1]})
    assert lam == Lattice.span([{0: D}, {1: D}], 2)


def test_fracture_m6_pieces_consistent():
    rep = kufix.fracture_assemble(6, 4, 5, 6)
    assert {piece["p"] for piece in rep["pieces"]} == {2, 3}
    assert all(piece["ring_map"] and piece["completion"] for piece in rep["pieces"])


@pytest.mark.parametrize("p", [2, 3])
def test_pullback_exact(p):
    rep = kufix.genuine_pullback_check(p, 10)
    assert rep["ok"], rep


def test_pullback_insufficient_precision():
    assert kufix.genuine_pullback_check(2, 4, K=1)["status"] == "insufficient precision"
    assert kufix.genuine_pullback_check(2, 4, K=4, t_precision=2)["ok"] is None


def test_tc_minus_relation():
    pres = kufix.tc_minus_zpzeta_presentation(3, 4, 5)
    assert pres.reduces_to_zero(pres.relations[0])
    assert pres.component(0).invariant_factors == [81] * 5


def test_component_rejects_nonintegral_over_z():
    pres = kufix.pi_genuine(2)
    with pytest.raises(ValueError):
        pres.component(1).vector({(1,): [sympy.Rational(1, 2)]})
