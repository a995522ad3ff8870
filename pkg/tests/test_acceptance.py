"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.

Runtime limits are part of each criterion.  The lines are also collected into
the terminal summary so they show up without ``-s``.
"""

import contextlib
import io
import json
import random
import time

import pytest
import sympy
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from qhodge import cli, kufix, polyqdr, qpd, qring
from qhodge.qring import parse_context


@pytest.fixture
def report(request):
    def emit(name, ok, seconds, limit, detail=""):
        within = seconds < limit
        status = "PASS" if ok and within else "FAIL"
        line = f"[{status}] {name}: {seconds:.2f}s (limit {limit}s){' ' + detail if detail else ''}"
        if not within:
            line += " runtime over limit"
        print(line)
        cfg = request.config
        if not hasattr(cfg, "acceptance_lines"):
            cfg.acceptance_lines = []
        cfg.acceptance_lines.append(line)
        assert ok and within, line

    return emit


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


# ---------------------------------------------------------------------------


def cyclotomic_suite():
    bad = []
    for m in range(1, 61):
        prod = [1]
        for d in qring.divisors(m):
            prod = qring.pmul(prod, qring.cyclotomic_poly(d))
        if prod != [-1] + [0] * (m - 1) + [1]:
            bad.append(f"prod m={m}")
    for p in (2, 3, 5, 7):
        a = 1
        while p ** a <= 64:
            prod = [1]
            for i in range(1, a + 1):
                prod = qring.pmul(prod, qring.cyclotomic_poly(p ** i))
            if prod != [1] * p ** a:
                bad.append(f"[{p}^{a}]")
            a += 1
    return bad


def test_cyclotomic_factorization(report):
    bad, s = timed(cyclotomic_suite)
    report("cyclotomic factorization", not bad, s, 1, ", ".join(bad))


# ---------------------------------------------------------------------------


def _oracle_factors(w1, N):
    t = sympy.Symbol("t")
    poly = sympy.Poly(sympy.expand(((1 + t) ** w1 - 1) / t), t)
    c = [int(poly.coeff_monomial(t ** k)) for k in range(N)]
    m = Matrix([[c[k - s] if k >= s else 0 for k in range(N)] for s in range(N)])
    d = smith_normal_form(m, domain=ZZ)
    return sorted(x for x in (abs(d[i, i]) for i in range(N)) if x != 1)


def qdr_z_x_suite():
    N, W = 6, 12
    cx = polyqdr.build_qdr(1, parse_context(f"Z;(q-1)^{N}"), W, 2)
    bad = []
    if not cx.check_d_squared():
        bad.append("d^2")
    H = polyqdr.cohomology(cx)
    Hred = polyqdr.cohomology(polyqdr.reduce_mod_q1(cx))
    for w in range(W):
        if H[(1, w + 1)] != _oracle_factors(w + 1, N):
            bad.append(f"H1 w={w + 1}")
        if Hred[(1, w + 1)] != ([w + 1] if w else []):
            bad.append(f"H1 mod q-1 w={w + 1}")
    return bad


def test_qdr_of_polynomial_ring(report):
    bad, s = timed(qdr_z_x_suite)
    report("q-de Rham complex of Z[x]", not bad, s, 10, ", ".join(bad))


# ---------------------------------------------------------------------------


def filtration_suite():
    bad = []
    for n in (1, 2, 3):
        cx = polyqdr.build_qdr(n, parse_context("Z;(q-1)^5"), 10, 4)
        checks = cx.check_filtration()
        bad += [f"n={n} {k}" for k, v in checks.items() if not v]
        ranks = polyqdr.hodge_graded_ranks(polyqdr.reduce_mod_q1(cx))
        bad += [f"n={n} gr{key}" for key, r in ranks.items() if r != polyqdr.classical_hodge_ranks(n, *key)]
    return bad


def test_q_hodge_filtration_shape(report):
    bad, s = timed(filtration_suite)
    report("q-Hodge filtration shape", not bad, s, 30, ", ".join(bad[:5]))


# ---------------------------------------------------------------------------

x, y, q, t = sympy.symbols("x y q t")


def _gamma(d, yy=y):
    return sympy.prod([x - q ** j * yy for j in range(d)]) / sympy.prod([1 - q ** j for j in range(1, d + 1)])


def _witness_ok(p, alpha, witness, K, N):
    n = p ** alpha
    combo = 0
    for label, c in witness:
        term = sympy.Integer(int(c))
        for bit in label.split("*"):
            if bit.startswith("g"):
                d = int(bit[1:])
                term *= (q - 1) ** d * _gamma(d)
            elif bit != "1":
                var, e = bit.split("^")
                term *= {"x": x, "y": y, "t": q - 1}[var] ** int(e)
        combo += term
    diff = sympy.cancel(combo - (x ** n - y ** n) / sum(q ** i for i in range(n))).subs(q, 1 + t)
    diff = sympy.expand(sympy.series(diff, t, 0, N).removeO())
    if diff == 0:
        return True
    for c in sympy.Poly(diff, x, y, t).coeffs():
        r = sympy.Rational(c)
        if sympy.multiplicity(p, r.p) - sympy.multiplicity(p, r.q) < K:
            return False
    return True


def divided_power_suite():
    bad = []
    for d in range(1, 9):
        r = qpd.verify_derivative_identities(d)
        if not (r["dx"] and r["dy"]):
            bad.append(f"identity d={d}")
    K, N = 5, 6
    for p, alpha in [(2, 1), (3, 1), (2, 2)]:
        res = qpd.check_p_power_divisibility(p, alpha, parse_context(f"Zp({p},{K});(q-1)^{N}"), 6)
        if not res.ok:
            bad.append(f"no witness ({p},{alpha})")
        elif not _witness_ok(p, alpha, res.witness, K, N):
            bad.append(f"witness fails recheck ({p},{alpha})")
    return bad


def test_divided_power_divisibility(report):
    bad, s = timed(divided_power_suite)
    report("q-divided powers and [p^a]_q divisibility", not bad, s, 20, ", ".join(bad))


# ---------------------------------------------------------------------------


def ku_suite():
    bad = []
    for m in (1, 2, 3, 4, 6):
        rep = kufix.fracture_assemble(m, 10, 5, 6)
        if not rep["ok"]:
            degs = [d["degree"] for d in rep["degrees"] if not (d["lattice_match"] and d["rank_match"])]
            bad.append(f"fracture m={m} differs from presentation in degrees {degs}")
    for p in (2, 3):
        rep = kufix.genuine_pullback_check(p, 10)
        if not rep["ok"]:
            bad.append(f"pullback p={p}")
    for p, alpha, mp in [(2, 1, 1), (2, 2, 1), (2, 3, 1), (3, 1, 1), (3, 2, 1), (5, 1, 1), (2, 1, 3), (3, 1, 2)]:
        if not kufix.pi_geometric_p_complete(p, alpha, mp, 5).from_genuine.is_ring_map():
            bad.append(f"comparison ({p},{alpha},{mp})")
    for p in (2, 3):
        if not all(kufix.hfp_to_geometric_map(p, 1, 5, 8, 6).values()):
            bad.append(f"hfp map p={p}")
    return bad


def test_ku_fixed_points(report):
    bad, s = timed(ku_suite)
    report("ku fixed-point suite", not bad, s, 30, "; ".join(bad))


# ---------------------------------------------------------------------------


def adams_inflation_suite():
    rng = random.Random(5)
    bad = []
    ctx = parse_context("Z;(q-1)^10")
    for _ in range(40):
        f = ctx.element([rng.randint(-9, 9) for _ in range(6)])
        n, k = rng.randint(1, 6), rng.randint(1, 6)
        if qring.adams_substitute(qring.adams_substitute(f, k), n) != qring.adams_substitute(f, n * k):
            bad.append(f"psi {n}o{k}")
    for p in (2, 3, 5):
        c = parse_context(f"Zp({p},10);(q-1)^10")
        for _ in range(20):
            u, v = rng.randint(-10 ** 9, 10 ** 9), rng.randint(-10 ** 9, 10 ** 9)
            if qring.q_power_u(u, c) * qring.q_power_u(v, c) != qring.q_power_u(u + v, c):
                bad.append(f"q^u p={p}")
    for m in range(1, 7):
        for n in range(1, 5):
            inf = kufix.inflation_map(m, n)
            if not inf.is_ring_map():
                bad.append(f"inf ring map {m},{n}")
            for k in range(4):
                tgt = inf.target.component(k)
                f = [rng.randint(-5, 5) for _ in range(m)]
                xj = [0] * rng.randrange(m) + [1]
                lhs = inf.apply({(k,): qring.pmul(f, xj)})
                rhs = kufix.kp_mul({(0,): qring.pcompose_power(f, n)}, inf.apply({(k,): xj}))
                if tgt.vector(lhs) != tgt.vector(rhs):
                    bad.append(f"semilinear {m},{n},{k}")
    for m, n in [(1, 2), (2, 3), (3, 2), (2, 2)]:
        for k in range(4):
            r = kufix.base_change_check(m, n, k)
            if not (r["square"] and r["unimodular"]):
                bad.append(f"base change {m},{n},deg {2 * k}")
    return bad


def test_adams_and_inflation(report):
    bad, s = timed(adams_inflation_suite)
    report("Adams and inflation", not bad, s, 5, ", ".join(bad[:5]))


# ---------------------------------------------------------------------------

COMMANDS = [
    (cli.qdr_main, ["build", "--vars", "2", "--ctx", "Z;(q-1)^3", "--deg", "3", "--fil", "2"]),
    (cli.qdr_main, ["cohomology", "--vars", "2", "--ctx", "Z;(q-1)^3", "--deg", "4", "--fil", "2", "--level", "1"]),
    (cli.qdr_main, ["reduce-q1", "--vars", "2", "--ctx", "Z;(q-1)^3", "--deg", "4", "--fil", "2"]),
    (cli.qdr_main, ["preimage", "--vars", "2", "--relations", "x1^2,x2^2", "--ctx", "Z;(q-1)^3", "--deg", "4",
                    "--fil", "2"]),
    (cli.qdr_main, ["rescale", "--ctx", "Z;(q-1)^4", "--deg", "3", "--fil", "2", "--m", "2", "--imax", "2"]),
    (cli.qpd_main, ["verify", "--p", "2", "--alpha", "2"]),
    (cli.qpd_main, ["identities", "--max-d", "5"]),
    (cli.ku_main, ["pi", "--which", "genuine", "--m", "6"]),
    (cli.ku_main, ["pi", "--which", "hfp", "--m", "2", "--max-deg", "4", "--qprec", "3"]),
    (cli.ku_main, ["pi", "--which", "geom", "--m", "6"]),
    (cli.ku_main, ["pi", "--which", "geom-local", "--m", "6", "--qprec", "6"]),
    (cli.ku_main, ["pi", "--which", "geom-p", "--m", "6", "--p", "3"]),
    (cli.ku_main, ["pi", "--which", "tcminus", "--p", "3", "--max-deg", "4"]),
    (cli.ku_main, ["fracture", "--m", "6"]),
    (cli.ku_main, ["pullback", "--p", "3"]),
    (cli.ku_main, ["inflation", "--m", "2", "--n", "3"]),
    (cli.checks_main, []),
]


def _capture(main, argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = main(argv)
    return code, buf.getvalue()


def determinism_suite():
    bad = []
    for main, argv in COMMANDS:
        takes_jobs = main is cli.checks_main or argv[0] in ("cohomology", "reduce-q1")
        a = _capture(main, argv + (["--jobs", "1"] if takes_jobs else []))
        b = _capture(main, argv + (["--jobs", "4"] if takes_jobs else []))
        if a != b:
            bad.append(" ".join(argv[:3]))
        json.loads(a[1])
    return bad


def test_cli_determinism(report):
    bad, s = timed(determinism_suite)
    report("CLI determinism across job counts", not bad, s, 120, ", ".join(bad))
