import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from qhodge import polyqdr
from qhodge.polyqdr import (QForm, QPolynomial, build_qdr, cohomology, q_nabla, q_partial,
                            reduce_mod_q1)
from qhodge.qring import parse_context, q_integer

CTX = parse_context("Z;(q-1)^6")


def q_integer_coeffs(m, N):
    """(q-1)-adic coefficients of [m]_q, from sympy."""
    t = sympy.Symbol("t")
    p = sympy.Poly(sympy.expand(((1 + t) ** m - 1) / t), t)
    return [int(p.coeff_monomial(t ** k)) for k in range(N)]


def snf_factors(m):
    d = smith_normal_form(Matrix(m), domain=ZZ)
    diag = sorted(abs(d[i, i]) for i in range(min(d.shape)))
    return [x for x in diag if x != 1]


def random_poly(rng, ctx, nvars, bound):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        e = [0] * nvars
        for _ in range(rng.randint(0, bound // 2)):
            e[rng.randrange(nvars)] += 1
        terms[tuple(e)] = ctx.element([rng.randint(-5, 5) for _ in range(3)])
    return QPolynomial.from_dict(ctx, nvars, terms, bound)


# --- q-derivative ---------------------------------------------------------


def test_q_partial_of_cube():
    f = QPolynomial.from_dict(CTX, 1, {(3,): 1}, 3)
    assert q_partial(f, 0).as_dict == {(2,): q_integer(3, CTX)}


def test_q_partial_of_constant_is_zero():
    assert q_partial(QPolynomial.from_dict(CTX, 2, {(0, 0): 7}, 2), 1).is_zero()


def test_q_partial_bad_index():
    with pytest.raises(IndexError):
        q_partial(QPolynomial.from_dict(CTX, 1, {(1,): 1}, 1), 1)


def test_twisted_leibniz_random_pairs():
    rng = random.Random(11)
    for _ in range(500):
        n = rng.randint(1, 3)
        f, g = random_poly(rng, CTX, n, 4), random_poly(rng, CTX, n, 4)
        f = QPolynomial(f.ctx, n, f.terms, 8)
        g = QPolynomial(g.ctx, n, g.terms, 8)
        i = rng.randrange(n)
        lhs = q_partial(f * g, i)
        rhs = q_partial(f, i) * g + f.sigma(i) * q_partial(g, i)
        assert lhs == rhs


def test_two_variable_weight_two_differential():
    # each partial only touches its own variable, so mixed terms carry coefficient 1
    x = {e: QPolynomial.from_dict(CTX, 2, {e: 1}, 2) for e in [(2, 0), (1, 1), (0, 2)]}
    two = q_integer(2, CTX)
    one = CTX.one()
    d = {e: dict(q_nabla(QForm.from_dict(0, {(): f}), 2).components) for e, f in x.items()}
    assert d[(2, 0)][(0,)].as_dict == {(1, 0): two}
    assert d[(1, 1)][(0,)].as_dict == {(0, 1): one}
    assert d[(1, 1)][(1,)].as_dict == {(1, 0): one}
    assert d[(0, 2)][(1,)].as_dict == {(0, 1): two}


# --- complex ----------------------------------------------------------------


@settings(max_examples=25)
@given(st.integers(0, 3), st.integers(1, 8), st.integers(1, 8), st.data())
def test_d_squared_is_zero(n, D, N, data):
    depth = data.draw(st.integers(0, N))
    D = min(D, 5) if n == 3 else D
    cx = build_qdr(n, parse_context(f"Z;(q-1)^{N}"), D, depth)
    assert cx.check_d_squared()


@settings(max_examples=15)
@given(st.integers(1, 3), st.integers(1, 5), st.integers(1, 5), st.data())
def test_filtration_shape(n, D, N, data):
    depth = data.draw(st.integers(0, N))
    cx = build_qdr(n, parse_context(f"Z;(q-1)^{N}"), D, depth)
    assert all(cx.check_filtration().values())


def test_n0_is_constants():
    cx = build_qdr(0, parse_context("Z;(q-1)^4"), 0, 2)
    assert cx.keys() == [(0, 0)]
    assert cx.fil[(2, 0, 0)].rank == 2
    assert cohomology(cx)[(0, 0)] == [0, 0, 0, 0]


def test_n1_fil1_shape():
    cx = build_qdr(1, parse_context("Z;(q-1)^4"), 3, 2)
    for w in range(4):
        assert cx.fil[(1, 0, w)].rank == 3  # (q-1) times the degree-0 column
        if w >= 1:
            assert cx.fil[(1, 1, w)].rank == 4  # everything in degree 1


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        build_qdr(1, parse_context("Z;(q-1)^3"), 4, 4)
    with pytest.raises(ValueError):
        build_qdr(1, parse_context("Z[1/2];(q-1)^3"), 4, 1)
    with pytest.raises(ValueError):
        build_qdr(1, parse_context("Z;(q^2-1)^3"), 4, 1)
    with pytest.raises(ValueError):
        build_qdr(1, parse_context("Z;(q-1)^3"), 4, 1, max_weight=5)


def test_h1_matches_normal_form_oracle():
    N = 6
    cx = build_qdr(1, parse_context(f"Z;(q-1)^{N}"), 12, 2)
    H = cohomology(cx)
    for w in range(12):
        c = q_integer_coeffs(w + 1, N)
        mult = [[c[k - s] if k >= s else 0 for k in range(N)] for s in range(N)]
        assert H[(1, w + 1)] == snf_factors(mult), w
    assert H[(0, 0)] == [0] * N
    assert all(H[(0, w)] == [] for w in range(1, 13))


def test_h1_reduction_is_classical_torsion():
    cx = reduce_mod_q1(build_qdr(1, CTX, 12, 2))
    H = cohomology(cx)
    for w in range(12):
        assert H[(1, w + 1)] == ([w + 1] if w else [])


def test_cohomology_independent_of_jobs():
    cx = build_qdr(2, parse_context("Z;(q-1)^3"), 4, 2)
    assert cohomology(cx, 1, jobs=1).to_json() == cohomology(cx, 1, jobs=4).to_json()


def test_hodge_graded_ranks_three_variables():
    cx = build_qdr(3, parse_context("Z;(q-1)^5"), 6, 4)
    ranks = polyqdr.hodge_graded_ranks(reduce_mod_q1(cx))
    for (i, j, w), r in ranks.items():
        assert r == polyqdr.classical_hodge_ranks(3, i, j, w)


# --- degree-0 filtrations ---------------------------------------------------


def test_rescale_of_trivial_filtration_is_identity_for_m1():
    cx = build_qdr(1, CTX, 4, 2)
    r = polyqdr.habiro_hodge_rescale(polyqdr.degree_zero_filtration(cx), 1, 2)
    assert r.contains({((1,), 0): 1})
    assert not r.contains({((1,), -1): 1})
    assert not r.contains({((1,), 0): Fraction(1, 2)})


def test_rescale_at_level_two_adjoins_inverse_of_q_plus_one():
    cx = build_qdr(1, CTX, 2, 1)
    r = polyqdr.habiro_hodge_rescale(polyqdr.degree_zero_filtration(cx), 2, 1)
    # 1/(q+1) = 1/(2 + (q-1)) as a (q-1)-adic series
    inv = {((0,), k): Fraction((-1) ** k, 2 ** (k + 1)) for k in range(6)}
    assert r.contains(inv)
    half = {((0,), 0): Fraction(1, 2)}
    assert not r.contains(half)


def test_preimage_reduces_to_pd_hodge():
    rels = polyqdr.parse_relations("x1^2", 1)
    pf = polyqdr.preimage_filtration(1, rels, CTX, 6, 3)
    assert pf.matches_generated
    f = pf.filtration
    assert all(f.shape_checks().values())
    assert polyqdr.reduce_filtration_mod_q1(f) == polyqdr.classical_pd_hodge(1, rels, 6, 3, f.denominator)


def test_preimage_symmetric_under_variable_swap():
    a = polyqdr.preimage_filtration(2, polyqdr.parse_relations("x1^2,x2^3", 2), parse_context("Z;(q-1)^3"), 4, 2)
    b = polyqdr.preimage_filtration(2, polyqdr.parse_relations("x2^2,x1^3", 2), parse_context("Z;(q-1)^3"), 4, 2)
    assert [L.rank for L in a.filtration.levels] == [L.rank for L in b.filtration.levels]
    assert a.filtration.denominator == b.filtration.denominator


def test_relations_must_be_regular():
    with pytest.raises(ValueError):
        polyqdr.preimage_filtration(2, polyqdr.parse_relations("x1^2,x1^3", 2), CTX, 4, 2)
    with pytest.raises(ValueError):
        polyqdr.parse_relations("x1*x2", 2)
