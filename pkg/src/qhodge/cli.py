"""Command-line entry points: ``qdr``, ``qpd``, ``ku`` and ``qhodge-checks``.

All JSON output uses decimal strings for numbers and sorted keys, so runs
with different ``--jobs`` produce byte-identical output.  Exit codes: 0 pass,
1 mathematical mismatch, 2 configuration or precision error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import checks
from .qring import PrecisionError

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG = 0, 1, 2


def emit(obj, fmt: str, out=None) -> None:
    out = out or sys.stdout
    obj = checks.stringify(obj)
    if fmt == "json":
        out.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")
        return
    out.write(render_table(obj) + "\n")


def render_table(obj) -> str:
    """Plain-text rendering: lists of flat records become aligned columns."""
    lines: list[str] = []

    def table(rows: list[dict]):
        cols = []
        for r in rows:
            for k in r:
                if k not in cols:
                    cols.append(k)
        cells = [[_cell(r.get(k, "")) for k in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
        for row in cells:
            lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))

    def walk(o, prefix=""):
        if isinstance(o, list) and o and all(isinstance(r, dict) for r in o):
            if prefix:
                lines.append(f"[{prefix}]")
            table(o)
        elif isinstance(o, dict):
            for k in sorted(o):
                v = o[k]
                if isinstance(v, (dict, list)) and v and not _flat(v):
                    walk(v, f"{prefix}.{k}" if prefix else k)
                else:
                    lines.append(f"{prefix + '.' if prefix else ''}{k}: {_cell(v)}")
        else:
            lines.append(_cell(o))

    walk(obj)
    return "\n".join(lines)


def _flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v)
    return False


def _cell(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_cell(x) for x in v) + "]"
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _run(fn, fmt: str, verdict=None) -> int:
    try:
        out = fn()
    except PrecisionError as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    emit(out, fmt)
    if verdict is None:
        return EXIT_OK
    return verdict(out)


def _format_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "table"), default="json")


# ---------------------------------------------------------------------------
# qdr


def _complex_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--vars", type=int, default=1, help="number of polynomial variables")
    p.add_argument("--ctx", default="Z;(q-1)^6", help='coefficient context, e.g. "Z;(q-1)^6"')
    p.add_argument("--deg", type=int, default=6, help="x-degree bound")
    p.add_argument("--fil", type=int, default=2, help="filtration depth")
    _format_arg(p)


def qdr_main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="qdr", description="q-de Rham complexes and their q-Hodge filtration")
    sub = ap.add_subparsers(dest="cmd", required=True)
    b = sub.add_parser("build", help="build the complex and check its filtration")
    _complex_args(b)
    b.add_argument("--max-weight", type=int)
    for name in ("cohomology", "reduce-q1"):
        c = sub.add_parser(name)
        _complex_args(c)
        c.add_argument("--level", type=int, default=0)
        c.add_argument("--max-weight", type=int)
        c.add_argument("--jobs", type=int, default=1)
    pre = sub.add_parser("preimage", help="preimage filtration on a monomial quotient")
    _complex_args(pre)
    pre.add_argument("--relations", required=True, help='e.g. "x1^2,x2^3"')
    pre.add_argument("--denominator-bound", type=int, default=10 ** 12)
    r = sub.add_parser("rescale", help="adjoin fil^i/(q^m-1)^i to the degree-0 ring")
    _complex_args(r)
    r.add_argument("--m", type=int, default=1)
    r.add_argument("--imax", type=int, default=1)
    a = ap.parse_args(argv)
    base = dict(vars=a.vars, ctx=a.ctx, deg=a.deg, fil=a.fil)
    if a.cmd == "build":
        return _run(lambda: checks.op_qdr_build(max_weight=a.max_weight, **base), a.format,
                    lambda o: EXIT_OK if o["d_squared_zero"] and all(o["filtration_checks"].values())
                    else EXIT_MISMATCH)
    if a.cmd == "cohomology":
        return _run(lambda: checks.op_qdr_cohomology(level=a.level, max_weight=a.max_weight, jobs=a.jobs, **base),
                    a.format)
    if a.cmd == "reduce-q1":
        return _run(lambda: checks.op_qdr_reduce_q1(level=a.level, max_weight=a.max_weight, jobs=a.jobs, **base),
                    a.format,
                    lambda o: EXIT_OK if all(r["rank"] == r["classical"] for r in o["graded_ranks"])
                    else EXIT_MISMATCH)
    if a.cmd == "preimage":
        return _run(lambda: checks.op_qdr_preimage(relations=a.relations, denominator_bound=a.denominator_bound,
                                                   **base), a.format,
                    lambda o: EXIT_OK if o["reduces_to_hodge"] and all(o["shape"].values()) else EXIT_MISMATCH)
    return _run(lambda: checks.op_qdr_rescale(m=a.m, i_max=a.imax, **base), a.format)


# ---------------------------------------------------------------------------
# qpd


def qpd_main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="qpd", description="q-divided powers and [p^alpha]_q divisibility")
    sub = ap.add_subparsers(dest="cmd", required=True)
    v = sub.add_parser("verify", help="divide x^(p^a) - y^(p^a) by [p^a]_q inside the envelope")
    v.add_argument("--p", type=int, required=True)
    v.add_argument("--alpha", type=int, default=1)
    v.add_argument("--deg", type=int, default=6)
    v.add_argument("--qprec", type=int, default=6)
    v.add_argument("--pprec", type=int, default=5)
    _format_arg(v)
    g = sub.add_parser("identities", help="check the derivative identities of the q-divided powers")
    g.add_argument("--max-d", type=int, default=8)
    _format_arg(g)
    a = ap.parse_args(argv)
    if a.cmd == "verify":
        return _run(lambda: checks.op_qpd_verify(a.p, a.alpha, a.deg, a.qprec, a.pprec), a.format,
                    lambda o: EXIT_OK if o["status"] == "pass" else EXIT_MISMATCH)
    return _run(lambda: [checks.op_derivative_identity(d) for d in range(1, a.max_d + 1)], a.format,
                lambda o: EXIT_OK if all(r["dx"] and r["dy"] for r in o) else EXIT_MISMATCH)


# ---------------------------------------------------------------------------
# ku


def ku_main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="ku", description="graded homotopy of fixed points of equivariant ku")
    sub = ap.add_subparsers(dest="cmd", required=True)
    pi = sub.add_parser("pi", help="per-degree presentation of a fixed-point ring")
    pi.add_argument("--which", choices=("genuine", "hfp", "geom", "geom-local", "geom-p", "tcminus"),
                    required=True)
    pi.add_argument("--m", type=int, default=1)
    pi.add_argument("--p", type=int, default=2)
    pi.add_argument("--alpha", type=int, default=1)
    pi.add_argument("--max-deg", type=int, default=10)
    pi.add_argument("--qprec", type=int, default=6)
    pi.add_argument("--pprec", type=int, default=5)
    pi.add_argument("--tprec", type=int)
    _format_arg(pi)
    fr = sub.add_parser("fracture", help="glue localized and p-complete pieces, compare with the presentation")
    fr.add_argument("--m", type=int, required=True)
    fr.add_argument("--max-deg", type=int, default=10)
    fr.add_argument("--pprec", type=int, default=5)
    fr.add_argument("--qprec", type=int, default=6)
    _format_arg(fr)
    pb = sub.add_parser("pullback", help="exactness of the genuine/homotopy/geometric/Tate square for C_p")
    pb.add_argument("--p", type=int, required=True)
    pb.add_argument("--max-deg", type=int, default=10)
    pb.add_argument("--pprec", type=int, default=6)
    pb.add_argument("--tprec", type=int)
    _format_arg(pb)
    inf = sub.add_parser("inflation", help="inflation q -> q^n and its base-change isomorphism")
    inf.add_argument("--m", type=int, required=True)
    inf.add_argument("--n", type=int, required=True)
    inf.add_argument("--max-deg", type=int, default=6)
    _format_arg(inf)
    a = ap.parse_args(argv)
    if a.cmd == "pi":
        return _run(lambda: checks.op_ku_pi(a.which, a.m, a.p, a.alpha, a.max_deg, a.qprec, a.pprec, a.tprec),
                    a.format)
    if a.cmd == "fracture":
        return _run(lambda: checks.op_ku_fracture(a.m, a.max_deg, a.pprec, a.qprec), a.format,
                    lambda o: EXIT_OK if o["ok"] else EXIT_MISMATCH)
    if a.cmd == "pullback":
        return _run(lambda: checks.op_ku_pullback(a.p, a.max_deg, a.pprec, a.tprec), a.format,
                    lambda o: EXIT_CONFIG if o["ok"] is None else (EXIT_OK if o["ok"] else EXIT_MISMATCH))
    return _run(lambda: checks.op_inflation(a.m, a.n, a.max_deg), a.format,
                lambda o: EXIT_OK if o["ring_map"] and all(b["unimodular"] for b in o["base_change"])
                else EXIT_MISMATCH)


# ---------------------------------------------------------------------------
# manifest runner


def checks_main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="qhodge-checks", description="run the digest-pinned check manifest")
    ap.add_argument("--manifest", help="manifest path (default: the bundled manifest)")
    ap.add_argument("--filter", help="glob on check names")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--pin", action="store_true", help="rewrite digests in the manifest from current output")
    _format_arg(ap)
    a = ap.parse_args(argv)
    try:
        manifest = checks.Manifest.load(a.manifest)
    except (OSError, checks.ManifestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if a.pin:
        if not a.manifest:
            print("error: --pin needs an explicit --manifest path", file=sys.stderr)
            return EXIT_CONFIG
        checks.pin(manifest)
        with open(a.manifest, "w") as fh:
            json.dump(manifest.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    results = checks.run_checks(manifest, a.filter, a.jobs)
    rows = [r.row() for r in results]
    if a.format == "json":
        emit({"checks": rows, "passed": sum(r.status == "pass" for r in results), "total": len(results)}, "json")
    else:
        short = [{"name": r.name, "tag": r.tag, "status": r.status, "expected": r.expected[:12],
                  "actual": r.actual[:12]} for r in results]
        emit(short or {"checks": "none"}, "table")
        for r in results:
            if r.status != "pass":
                print(f"\n--- {r.name} ({r.status})\n{r.detail}")
    return checks.exit_code(results)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    tools = {"qdr": qdr_main, "qpd": qpd_main, "ku": ku_main, "checks": checks_main}
    if not argv or argv[0] not in tools:
        print("usage: python -m qhodge {qdr,qpd,ku,checks} ...", file=sys.stderr)
        return EXIT_CONFIG
    return tools[argv[0]](argv[1:])
