import random

import pytest
import sympy
from hypothesis import given, strategies as st

from qhodge import qring
from qhodge.qring import (PrecisionError, adams_substitute, crt_reassemble, crt_split, cyclotomic,
                          cyclotomic_poly, parse_context, q_integer, q_pochhammer, q_power_u)

Q = sympy.Symbol("q")


def sympy_coeffs(expr, N):
    """(q-1)-adic coefficients of a polynomial expression, computed with sympy."""
    t = sympy.Symbol("t")
    poly = sympy.Poly(sympy.expand(expr.subs(Q, 1 + t)), t)
    c = [int(poly.coeff_monomial(t ** k)) for k in range(N)]
    return c


# --- examples -------------------------------------------------------------


def test_q_integer_4_is_product_of_phi2_phi4():
    ctx = parse_context("Z;(q-1)^8")
    assert q_integer(4, ctx) == cyclotomic(2, ctx) * cyclotomic(4, ctx)
    assert q_integer(4, ctx).coeffs == tuple(sympy_coeffs(1 + Q + Q ** 2 + Q ** 3, 8))


def test_cyclotomic_polys_match_sympy():
    for d in range(1, 61):
        expected = sympy.Poly(sympy.cyclotomic_poly(d, Q), Q).all_coeffs()[::-1]
        assert cyclotomic_poly(d) == [int(c) for c in expected]


def test_q_pochhammer_against_sympy():
    ctx = parse_context("Z;(q-1)^7")
    expr = sympy.prod([1 - Q ** j for j in range(1, 4)])
    assert list(q_pochhammer(3, ctx).coeffs) == sympy_coeffs(expr, 7)


def test_q_power_half_in_3adic_context():
    ctx = parse_context("Zp(3,4);(q-1)^5")
    # u = 1/2 mod 3^8, enough 3-adic digits for binom(u, n) mod 3^4 when n < 5
    f = q_power_u(3281, ctx, u_precision=8)
    expected = []
    for n in range(5):
        b = sympy.Rational(sympy.binomial(sympy.Rational(1, 2), n))
        expected.append(int(b.p) * pow(int(b.q), -1, 81) % 81)
    assert [int(c) % 81 for c in f.coeffs] == expected
    assert f * f == ctx.q()


def test_q_power_u_precision_guard():
    ctx = parse_context("Zp(2,3);(q-1)^6")
    with pytest.raises(PrecisionError):
        q_power_u(5, ctx, u_precision=3)
    q_power_u(5, ctx, u_precision=12)


def test_adams_rejects_non_descending_map():
    f = parse_context("Z;(q^2-1)^1").element([0, 1])
    with pytest.raises(ValueError):
        adams_substitute(f, 1, target=parse_context("Z;(q^4-1)^1"))
    g = adams_substitute(f, 2, target=parse_context("Z;(q^2-1)^1"))
    assert g == parse_context("Z;(q^2-1)^1").one()


def test_context_parse_errors():
    for bad in ("Z", "Q;(q-1)^3", "Z;(q+1)^2", "Zp(2);(q-1)^3"):
        with pytest.raises(ValueError):
            parse_context(bad)


def test_json_roundtrip():
    f = q_integer(5, parse_context("Z[1/6];Phi_5(q)^2"))
    assert qring.QSeries.from_json(f.to_json()) == f


def test_inverse_of_unit():
    ctx = parse_context("Z;(q-1)^6")
    q = ctx.q()
    assert q * q.inverse() == ctx.one()
    with pytest.raises(ZeroDivisionError):
        (q - ctx.one()).inverse()


# --- properties -----------------------------------------------------------


@given(st.integers(1, 60))
def test_product_of_cyclotomics_is_q_power_minus_one(m):
    prod = [1]
    for d in qring.divisors(m):
        prod = qring.pmul(prod, cyclotomic_poly(d))
    assert prod == [-1] + [0] * (m - 1) + [1]


@given(st.sampled_from([(p, a) for p in (2, 3, 5, 7) for a in range(1, 7) if p ** a <= 64]),
       st.integers(1, 12))
def test_prime_power_q_integer_factorization(pa, N):
    p, a = pa
    ctx = parse_context(f"Z;(q-1)^{N}")
    rhs = ctx.one()
    for i in range(1, a + 1):
        rhs = rhs * cyclotomic(p ** i, ctx)
    assert q_integer(p ** a, ctx) == rhs


@given(st.integers(1, 40), st.integers(1, 8))
def test_q_integer_reduces_to_integer(n, N):
    c = q_integer(n, parse_context(f"Z;(q-1)^{N}")).coeffs
    assert c[0] == n


coeff_lists = st.lists(st.integers(-30, 30), min_size=1, max_size=8)


@given(coeff_lists, coeff_lists, st.integers(1, 5))
def test_adams_is_multiplicative(a, b, n):
    ctx = parse_context("Z;(q-1)^8")
    f, g = ctx.element(a), ctx.element(b)
    assert adams_substitute(f * g, n) == adams_substitute(f, n) * adams_substitute(g, n)


@given(coeff_lists, st.integers(1, 5), st.integers(1, 5))
def test_adams_composes(a, n, k):
    ctx = parse_context("Z;(q-1)^8")
    f = ctx.element(a)
    assert adams_substitute(adams_substitute(f, k), n) == adams_substitute(f, n * k)


@given(st.sampled_from([2, 3, 5]), st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6))
def test_q_power_group_law(p, u, v):
    ctx = parse_context(f"Zp({p},10);(q-1)^10")
    assert q_power_u(u, ctx) * q_power_u(v, ctx) == q_power_u(u + v, ctx)


@given(st.integers(0, 12))
def test_q_power_integer_matches_power_of_q(u):
    ctx = parse_context("Zp(2,10);(q-1)^10")
    assert q_power_u(u, ctx) == ctx.q() ** u


def test_crt_roundtrip_random():
    rng = random.Random(2024)
    for _ in range(200):
        m = rng.choice([2, 3, 4, 6, 12])
        ctx = parse_context(f"Z[1/{m}];(q^{m}-1)^1")
        f = ctx.element([rng.randint(-99, 99) for _ in range(m)])
        parts = crt_split(f)
        assert sorted(parts) == qring.divisors(m)
        assert crt_reassemble(parts, ctx) == f


def test_crt_needs_inverted_primes():
    with pytest.raises(ValueError):
        crt_split(parse_context("Z;(q^6-1)^1").one())
