"""Named, digest-pinned checks and the manifest runner behind the CLI."""

from __future__ import annotations

import difflib
import fnmatch
import hashlib
import json
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

from . import kufix, polyqdr, qpd, qring
from .qring import PrecisionError, parse_context

# ---------------------------------------------------------------------------
# canonical JSON


def stringify(obj):
    """Integers become decimal strings; containers are processed recursively."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [stringify(v) for v in obj]
    return str(obj)


def canonical(obj) -> str:
    return json.dumps(stringify(obj), sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


def seed() -> int:
    return int(os.environ.get("QDR_SEED", "0"))


# ---------------------------------------------------------------------------
# operations


def _series(f: qring.QSeries) -> dict:
    return f.to_json()


def op_q_integer(m, ctx):
    return _series(qring.q_integer(m, parse_context(ctx)))


def op_q_integer_factorization(p, alpha, ctx):
    c = parse_context(ctx)
    lhs = qring.q_integer(p ** alpha, c)
    rhs = c.one()
    for i in range(1, alpha + 1):
        rhs = rhs * qring.cyclotomic(p ** i, c)
    return {"q_integer": _series(lhs), "product": _series(rhs), "equal": lhs == rhs}


def op_cyclotomic(d, ctx):
    return _series(qring.cyclotomic(d, parse_context(ctx)))


def op_cyclotomic_product(max_m):
    bad = []
    for m in range(1, max_m + 1):
        prod = [1]
        for d in qring.divisors(m):
            prod = qring.pmul(prod, qring.cyclotomic_poly(d))
        if prod != [-1] + [0] * (m - 1) + [1]:
            bad.append(m)
    return {"max_m": max_m, "failures": bad}


def op_q_pochhammer(d, ctx):
    return _series(qring.q_pochhammer(d, parse_context(ctx)))


def op_adams(poly, n, ctx):
    c = parse_context(ctx)
    return _series(qring.adams_substitute(c.element(poly), n))


def op_q_power_u(u, ctx):
    c = parse_context(ctx)
    f = qring.q_power_u(u, c)
    return {"series": _series(f), "times_q_power_minus_u_is_one": (f * qring.q_power_u(-u, c)) == c.one()}


def op_crt_split(poly, ctx):
    c = parse_context(ctx)
    f = c.element(poly)
    parts = qring.crt_split(f)
    back = qring.crt_reassemble(parts, c)
    return {"parts": {str(d): _series(v) for d, v in sorted(parts.items())}, "reassembles": back == f}


def op_crt_random(m, N, trials):
    rng = random.Random(seed())
    c = parse_context(f"Z[1/{N}];(q^{m}-1)^1")
    for _ in range(trials):
        f = c.element([rng.randint(-50, 50) for _ in range(m)])
        if qring.crt_reassemble(qring.crt_split(f), c) != f:
            return {"ok": False}
    return {"ok": True, "trials": trials}


def op_q_partial(nvars, exponent, var, ctx):
    c = parse_context(ctx)
    f = polyqdr.QPolynomial.from_dict(c, nvars, {tuple(exponent): 1}, bound=sum(exponent))
    g = polyqdr.q_partial(f, var)
    return {"terms": [{"exponent": list(e), "coeff": _series(v)} for e, v in g.terms]}


def _filtration_summary(cx: polyqdr.FilteredComplex) -> list:
    out = []
    for (j, w) in cx.keys():
        for i in range(cx.depth + 1):
            out.append({"level": i, "degree": j, "weight": w, "rank": cx.fil[(i, j, w)].rank,
                        "index": cx.fil[(i, j, w)].index_in(cx.fil[(0, j, w)])
                        if cx.modulus else cx.rank(j, w) - cx.fil[(i, j, w)].rank})
    return out


def op_qdr_build(vars, ctx, deg, fil, max_weight=None):
    cx = polyqdr.build_qdr(vars, parse_context(ctx), deg, fil, max_weight)
    out = cx.to_json()
    out["filtration"] = _filtration_summary(cx)
    out["d_squared_zero"] = cx.check_d_squared()
    out["filtration_checks"] = cx.check_filtration()
    return out


def op_qdr_cohomology(vars, ctx, deg, fil, level=0, max_weight=None, jobs=1):
    cx = polyqdr.build_qdr(vars, parse_context(ctx), deg, fil)
    return {"level": level, "cohomology": polyqdr.cohomology(cx, level, max_weight, jobs).to_json()}


def op_qdr_reduce_q1(vars, ctx, deg, fil, level=0, max_weight=None, jobs=1):
    cx = polyqdr.reduce_mod_q1(polyqdr.build_qdr(vars, parse_context(ctx), deg, fil))
    ranks = polyqdr.hodge_graded_ranks(cx)
    return {
        "level": level,
        "cohomology": polyqdr.cohomology(cx, level, max_weight, jobs).to_json(),
        "graded_ranks": [{"level": i, "degree": j, "weight": w, "rank": r,
                          "classical": polyqdr.classical_hodge_ranks(vars, i, j, w)}
                         for (i, j, w), r in sorted(ranks.items(), key=lambda t: (t[0][1], t[0][2], t[0][0]))],
    }


def op_qdr_preimage(vars, relations, ctx, deg, fil, denominator_bound=10 ** 12):
    rels = polyqdr.parse_relations(relations, vars)
    pf = polyqdr.preimage_filtration(vars, rels, parse_context(ctx), deg, fil, denominator_bound)
    out = pf.to_json()
    classical = polyqdr.classical_pd_hodge(vars, rels, deg, fil, pf.filtration.denominator)
    out["reduces_to_hodge"] = polyqdr.reduce_filtration_mod_q1(pf.filtration) == classical
    out["shape"] = pf.filtration.shape_checks()
    return out


def op_qdr_rescale(vars, ctx, deg, fil, m, i_max):
    cx = polyqdr.build_qdr(vars, parse_context(ctx), deg, fil)
    r = polyqdr.habiro_hodge_rescale(polyqdr.degree_zero_filtration(cx), m, i_max)
    return r.filtration.to_json()


def op_gamma_tilde(d):
    g = qpd.gamma_tilde(d)
    return {"d": d, "numerator": [{"x": a, "y": b, "q": k, "coeff": v} for (a, b, k), v in g.numerator],
            "denominator": list(g.denominator)}


def op_derivative_identity(d):
    return qpd.verify_derivative_identities(d)


def op_qpd_verify(p, alpha, deg, qprec, pprec):
    ctx = parse_context(f"Zp({p},{pprec});(q-1)^{qprec}")
    return qpd.check_p_power_divisibility(p, alpha, ctx, deg).to_json()


def op_ku_pi(which, m=1, p=2, alpha=1, max_deg=10, qprec=6, pprec=5, tprec=None, min_deg=0):
    if which == "genuine":
        return kufix.pi_genuine(m).to_json(max_deg)
    if which == "hfp":
        pres = kufix.pi_homotopy_fixed(m, tprec or qprec + 2, qprec)
        out = pres.to_json(max_deg, min_deg)
        out["relation_zero"] = pres.reduces_to_zero(pres.relations[0])
        out["comparison_ring_map"] = kufix.hfp_comparison(m, tprec or qprec + 2, qprec).is_ring_map()
        return out
    if which == "geom":
        return kufix.pi_geometric(m).to_json(max_deg)
    if which == "geom-local":
        return kufix.pi_geometric_localized(m, qprec if qprec > 1 else m).to_json(max_deg)
    if which == "geom-p":
        mp = m // p ** alpha if m % p ** alpha == 0 and m > 1 else 1
        piece = kufix.pi_geometric_p_complete(p, alpha, mp, pprec)
        out = piece.ring.to_json(max_deg)
        beta = piece.from_genuine.images["beta"]
        out["beta_image"] = {"u": _series(piece.ring.ctx.element(beta[(1,)]))}
        out["ring_map"] = piece.from_genuine.is_ring_map()
        out["completion"] = piece.completion_check(qprec)
        out["hfp_map"] = kufix.hfp_to_geometric_map(p, alpha, pprec, tprec or qprec + 2, qprec) if mp == 1 else None
        return out
    if which == "tcminus":
        pres = kufix.tc_minus_zpzeta_presentation(p, pprec, qprec, tprec)
        out = pres.to_json(max_deg)
        out["relation_zero"] = pres.reduces_to_zero(pres.relations[0])
        return out
    raise ValueError(f"unknown ring {which!r}")


def op_m_series(d):
    return {f"beta^{i}*t^{j}": c for (i, j), c in sorted(kufix.m_series(d).items())}


def op_ku_fracture(m, max_deg, pprec=5, qprec=6):
    return kufix.fracture_assemble(m, max_deg, pprec, qprec)


def op_ku_pullback(p, max_deg, pprec=6, tprec=None):
    return kufix.genuine_pullback_check(p, max_deg, pprec, tprec)


def op_inflation(m, n, max_deg):
    inf = kufix.inflation_map(m, n)
    return {"ring_map": inf.is_ring_map(),
            "base_change": [kufix.base_change_check(m, n, k) for k in range(max_deg // 2 + 1)]}


OPERATIONS: dict[tuple[str, str], Callable] = {
    ("qring", "q_integer"): op_q_integer,
    ("qring", "q_integer_factorization"): op_q_integer_factorization,
    ("qring", "cyclotomic"): op_cyclotomic,
    ("qring", "cyclotomic_product"): op_cyclotomic_product,
    ("qring", "q_pochhammer"): op_q_pochhammer,
    ("qring", "adams_substitute"): op_adams,
    ("qring", "q_power_u"): op_q_power_u,
    ("qring", "crt_split"): op_crt_split,
    ("qring", "crt_random"): op_crt_random,
    ("polyqdr", "q_partial"): op_q_partial,
    ("polyqdr", "build"): op_qdr_build,
    ("polyqdr", "cohomology"): op_qdr_cohomology,
    ("polyqdr", "reduce_q1"): op_qdr_reduce_q1,
    ("polyqdr", "preimage"): op_qdr_preimage,
    ("polyqdr", "rescale"): op_qdr_rescale,
    ("qpd", "gamma_tilde"): op_gamma_tilde,
    ("qpd", "derivative_identity"): op_derivative_identity,
    ("qpd", "verify"): op_qpd_verify,
    ("kufix", "pi"): op_ku_pi,
    ("kufix", "m_series"): op_m_series,
    ("kufix", "fracture"): op_ku_fracture,
    ("kufix", "pullback"): op_ku_pullback,
    ("kufix", "inflation"): op_inflation,
}


def run_operation(module: str, operation: str, params: dict):
    try:
        fn = OPERATIONS[(module, operation)]
    except KeyError:
        raise ValueError(f"unknown operation {module}.{operation}") from None
    return stringify(fn(**params))


# ---------------------------------------------------------------------------
# manifest


# where an expected value comes from: a published identity, a trivial case, or an independent oracle
TAGS = ("published", "trivial", "derived")


class ManifestError(ValueError):
    pass


@dataclass
class Check:
    name: str
    module: str
    operation: str
    params: dict
    tag: str
    precision: dict
    digest: str = ""
    expected: object = None  # canonical output at pin time, used only to render diffs


@dataclass
class Manifest:
    checks: list = field(default_factory=list)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Manifest":
        if path is None:
            text = resources.files("qhodge").joinpath("data/manifest.json").read_text()
        else:
            text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"manifest is not valid JSON: {exc}") from None
        if not isinstance(data, dict) or not isinstance(data.get("checks", []), list):
            raise ManifestError("manifest must be an object with a 'checks' list")
        checks, seen = [], set()
        for raw in data.get("checks", []):
            try:
                c = Check(raw["name"], raw["module"], raw["operation"], dict(raw.get("params", {})),
                          raw.get("tag", "derived"), dict(raw.get("precision", {})), raw.get("digest", ""),
                          raw.get("expected"))
            except (KeyError, TypeError) as exc:
                raise ManifestError(f"malformed check entry: {raw!r}") from exc
            if c.name in seen:
                raise ManifestError(f"duplicate check name {c.name!r}")
            if c.tag not in TAGS:
                raise ManifestError(f"check {c.name!r} has unknown tag {c.tag!r}")
            if set(c.precision) - {"p", "q", "t"}:
                raise ManifestError(f"check {c.name!r}: precision keys must be among p, q, t")
            seen.add(c.name)
            checks.append(c)
        return cls(checks)

    def to_json(self) -> dict:
        return {"checks": [c.__dict__ for c in self.checks]}


@dataclass
class CheckResult:
    name: str
    tag: str
    status: str  # pass | fail | precision | error
    expected: str
    actual: str
    detail: str = ""
    output: object = None

    def row(self) -> dict:
        return {"name": self.name, "tag": self.tag, "status": self.status, "expected": self.expected,
                "actual": self.actual, "detail": self.detail}


def _insufficient(obj) -> bool:
    if isinstance(obj, dict):
        if obj.get("status") == "insufficient precision":
            return True
        return any(_insufficient(v) for v in obj.values())
    if isinstance(obj, list):
        return any(_insufficient(v) for v in obj)
    return False


def run_check(c: Check) -> CheckResult:
    try:
        out = run_operation(c.module, c.operation, c.params)
    except PrecisionError as exc:
        return CheckResult(c.name, c.tag, "precision", c.digest, "", str(exc))
    except (ValueError, TypeError) as exc:
        return CheckResult(c.name, c.tag, "error", c.digest, "", str(exc))
    got = digest(out)
    if _insufficient(out):
        return CheckResult(c.name, c.tag, "precision", c.digest, got, "insufficient precision", out)
    if got == c.digest:
        return CheckResult(c.name, c.tag, "pass", c.digest, got, "", out)
    return CheckResult(c.name, c.tag, "fail", c.digest, got, output_diff(c.expected, out), out)


def output_diff(expected, actual) -> str:
    """Unified diff of pretty-printed outputs; falls back to the actual output alone."""
    new = json.dumps(stringify(actual), sort_keys=True, indent=1).splitlines()
    if expected is None:
        return "no stored output to diff against; actual:\n" + "\n".join(new)
    old = json.dumps(expected, sort_keys=True, indent=1).splitlines()
    return "\n".join(difflib.unified_diff(old, new, "expected", "actual", lineterm=""))


def run_checks(manifest: Manifest, pattern: str | None = None, jobs: int = 1) -> list[CheckResult]:
    checks = [c for c in manifest.checks if pattern is None or fnmatch.fnmatch(c.name, pattern)]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            return list(ex.map(run_check, checks))
    return [run_check(c) for c in checks]


def exit_code(results: list[CheckResult]) -> int:
    if any(r.status in ("precision", "error") for r in results):
        return 2
    if any(r.status == "fail" for r in results):
        return 1
    return 0


def pin(manifest: Manifest) -> Manifest:
    """Recompute every digest from the current implementation."""
    for c in manifest.checks:
        out = run_operation(c.module, c.operation, c.params)
        c.digest = digest(out)
        c.expected = out
    return manifest
