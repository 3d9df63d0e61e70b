"""Command line front end.

Subcommands::

    check       KE verdict            exit 0 KE_EXISTS, 3 NO_KE, 4 BOUNDARY
    rlb         greatest Ricci lower bound
    barycenter  DH volume and barycenter
    verify      quadrature checks of the integral identities; exit 0 iff all pass, 5 otherwise
    figure      CSV (and optional SVG) of the rank-2 picture
    catalog     list builtin examples, or dump one as a config

Input is ``--builtin NAME`` or ``--config FILE``.  Bad input exits 2.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from kepoly import __version__
from kepoly import linalg as la
from kepoly.analytic import (QuadratureSpec, build_test_potential, check_barycenter_identity,
                             check_j_inequalities, check_pushforward_identity, check_zero_integral,
                             sample_chamber)
from kepoly.catalog import UnknownExampleError, builtin, names
from kepoly.config import ConfigError, Problem, builtin_config, load_builtin, load_config
from kepoly.criterion import KEVerdict, RLBResult, Verdict, greatest_ricci_lower_bound, ke_verdict
from kepoly.dhmeasure import DHResult
from kepoly.geometry import GeometryError, UNBOUNDED, polygon_cycle, weyl_hull
from kepoly.roots import RootSystemError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_KE = 3
EXIT_BOUNDARY = 4
EXIT_VERIFY_FAILED = 5

VERDICT_EXIT = {Verdict.KE_EXISTS: EXIT_OK, Verdict.NO_KE: EXIT_NO_KE, Verdict.BOUNDARY: EXIT_BOUNDARY}
CSV_HEADER = "kind,x,y,label"

# default verify tolerances by rank: (pushforward, barycenter, zero integral)
TOLERANCES = {1: (1e-6, 1e-4, 1e-4), 2: (1e-3, 1e-3, 1e-3)}


# ---------------------------------------------------------------------------
# serialization


def rational(x: Fraction) -> dict:
    return {"exact": la.fmt(x), "decimal": float(f"{float(x):.12g}")}


def rationals(v: Sequence[Fraction]) -> list[dict]:
    return [rational(x) for x in v]


def dh_json(p: Problem, dh: DHResult) -> dict:
    return {"volume": rational(dh.volume), "coordinates": p.coordinates,
            "barycenter": rationals(p.to_coordinates(dh.barycenter))}


def verdict_json(kv: KEVerdict) -> dict:
    return {"verdict": kv.verdict.value,
            "cone_coefficients": rationals(kv.cone_coeffs),
            "toric_residual": rationals(kv.toric_residual)}


def rlb_json(p: Problem, r: RLBResult) -> dict:
    def point(v):
        return None if v is None else rationals(p.to_coordinates(v))
    return {"R": rational(r.R),
            "s_star": UNBOUNDED if r.s_star == UNBOUNDED else rational(r.s_star),
            "A": point(r.point_A), "B": point(r.point_B), "C": point(r.point_C),
            "ratio_BC_AC": None if r.ratio_BC_AC is None else rational(r.ratio_BC_AC),
            "hypothesis_met": r.hypothesis_met}


def _text_value(v: Any) -> str:
    if isinstance(v, dict) and "exact" in v:
        return v["exact"]
    if isinstance(v, list):
        return "(" + ", ".join(_text_value(x) for x in v) + ")"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_text_value(x)}" for k, x in v.items()) + "}"
    return "-" if v is None else str(v)


def render_text(report: dict) -> str:
    lines = []
    for section, body in report.items():
        if section == "input":
            continue
        lines.append(f"[{section}]")
        rows = body if isinstance(body, list) else [body]
        for row in rows:
            if not isinstance(row, dict):
                lines.append(f"  {row}")
                continue
            width = max((len(k) for k in row), default=0)
            for k, v in row.items():
                lines.append(f"  {k.ljust(width)}  {_text_value(v)}")
            if isinstance(body, list):
                lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def emit(report: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        out.write(render_text(report))


# ---------------------------------------------------------------------------
# commands


def _problem(args) -> Problem:
    if args.builtin is not None:
        return load_builtin(args.builtin)
    return load_config(args.config)


def _base(p: Problem) -> dict:
    return {"input": p.echo()}


def cmd_barycenter(args, p: Problem) -> tuple[dict, int]:
    kv = ke_verdict(p.rs, p.pplus, p.options.dilation)
    report = _base(p)
    report["dh"] = dh_json(p, kv.dh)
    return report, EXIT_OK


def cmd_check(args, p: Problem) -> tuple[dict, int]:
    kv = ke_verdict(p.rs, p.pplus, p.options.dilation)
    report = _base(p)
    report["dh"] = dh_json(p, kv.dh)
    report["ke"] = verdict_json(kv)
    return report, VERDICT_EXIT[kv.verdict]


def cmd_rlb(args, p: Problem) -> tuple[dict, int]:
    r = greatest_ricci_lower_bound(p.rs, p.pplus, p.options.dilation)
    kv = ke_verdict(p.rs, p.pplus, p.options.dilation)
    report = _base(p)
    report["dh"] = dh_json(p, kv.dh)
    report["ke"] = verdict_json(kv)
    report["rlb"] = rlb_json(p, r)
    return report, EXIT_OK


def _quadrature(p: Problem, tolerance: float) -> QuadratureSpec:
    q = dict(p.options.quadrature)
    q.setdefault("tolerance", tolerance)
    return QuadratureSpec(**q)


def cmd_verify(args, p: Problem) -> tuple[dict, int]:
    rs = p.rs
    if rs.rank not in TOLERANCES:
        raise GeometryError(f"verify supports rank 1 and 2, got rank {rs.rank}")
    t_push, t_bar, t_zero = TOLERANCES[rs.rank]
    P = weyl_hull(rs, p.pplus)
    u = build_test_potential(rs, P)
    basis = rs.simple_roots or rs.toric_basis
    xi_bar = basis[0]
    xi_zero = la.scale(Fraction(1, 2), rs.two_rho) if rs.simple_roots else basis[0]
    reports = [
        check_pushforward_identity(rs, p.pplus, u, _quadrature(p, t_push)),
        check_barycenter_identity(rs, p.pplus, u, xi_bar, _quadrature(p, t_bar)),
        check_zero_integral(rs, P, u, xi_zero, _quadrature(p, t_zero)),
    ]
    samples = sample_chamber(rs, p.options.samples, np.random.default_rng(p.options.seed))
    jr = check_j_inequalities(rs, samples)
    report = _base(p)
    report["residuals"] = [r.to_json() for r in reports]
    report["j_inequalities"] = {"samples": jr.samples, "constant": jr.constant,
                                "lower_bound_margin": jr.lower_bound_margin,
                                "gradient_margin": jr.gradient_margin, "skipped": jr.skipped,
                                "passed": jr.passed}
    ok = all(r.passed for r in reports) and jr.passed
    return report, EXIT_OK if ok else EXIT_VERIFY_FAILED


def figure_rows(p: Problem, rlb: RLBResult | None, kv: KEVerdict) -> list[tuple[str, Fraction, Fraction, str]]:
    """Rows in realization coordinates: vertices (cyclic), 2rho, barycenter, rays, A/B/C."""
    rs = p.rs
    rows = [("vertex", v[0], v[1], f"v{i}") for i, v in enumerate(polygon_cycle(p.pplus))]
    lam = p.options.dilation
    rows.append(("point", lam * rs.two_rho[0], lam * rs.two_rho[1], "2rho"))
    rows.append(("point", kv.barycenter[0], kv.barycenter[1], "bar"))
    for i, a in enumerate(rs.simple_roots, 1):
        rows.append(("ray", a[0], a[1], f"alpha{i}"))
    if rlb is not None:
        for label, v in (("A", rlb.point_A), ("B", rlb.point_B), ("C", rlb.point_C)):
            if v is not None:
                rows.append(("point", v[0], v[1], label))
    return rows


def render_csv(rows) -> str:
    out = [CSV_HEADER]
    for kind, x, y, label in rows:
        out.append(f"{kind},{la.fmt(x)},{la.fmt(y)},{label}")
    return "\n".join(out) + "\n"


def render_svg(p: Problem, rows, size: int = 480) -> str:
    """Static drawing in an orthonormal frame of the pairing."""
    L = np.linalg.cholesky(np.array(p.rs.gram, dtype=float))

    def frame(x, y):
        return L.T @ np.array([float(x), float(y)])

    verts = [frame(x, y) for k, x, y, _ in rows if k == "vertex"]
    pts = [(frame(x, y), lab) for k, x, y, lab in rows if k == "point"]
    rays = [(frame(x, y), lab) for k, x, y, lab in rows if k == "ray"]
    apex = next(q for q, lab in pts if lab == "2rho")
    span = np.array(verts + [q for q, _ in pts])
    lo, hi = span.min(axis=0), span.max(axis=0)
    reach = float(np.max(hi - lo)) or 1.0
    ray_ends = [(apex + 0.6 * reach * d / np.linalg.norm(d), lab) for d, lab in rays]
    allp = np.array([*span, *(e for e, _ in ray_ends)])
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    pad = 40.0
    sc = (size - 2 * pad) / max(float(np.max(hi - lo)), 1e-9)

    def xy(q):
        return pad + sc * (q[0] - lo[0]), size - pad - sc * (q[1] - lo[1])

    def fmtp(q):
        x, y = xy(q)
        return f"{x:.2f},{y:.2f}"

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             '<rect width="100%" height="100%" fill="white"/>',
             f'<polygon points="{" ".join(fmtp(v) for v in verts)}" fill="#dde8f5" stroke="#23507a"/>']
    ax, ay = xy(apex)
    for end, lab in ray_ends:
        ex, ey = xy(end)
        parts.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{ex:.2f}" y2="{ey:.2f}" '
                     f'stroke="#888" stroke-dasharray="4 3"/>')
        parts.append(f'<text x="{ex:.2f}" y="{ey:.2f}" font-size="11" fill="#555">2rho+{lab}</text>')
    colors = {"2rho": "#b22", "bar": "#161", "A": "#161", "B": "#b22", "C": "#a60"}
    for q, lab in pts:
        x, y = xy(q)
        c = colors.get(lab, "#000")
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3.5" fill="{c}"/>')
        parts.append(f'<text x="{x + 5:.2f}" y="{y - 5:.2f}" font-size="12" fill="{c}">{lab}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_figure(args, p: Problem) -> tuple[dict | None, int]:
    if p.rs.rank != 2:
        raise GeometryError(f"figure needs rank 2, got rank {p.rs.rank}")
    kv = ke_verdict(p.rs, p.pplus, p.options.dilation)
    rlb = greatest_ricci_lower_bound(p.rs, p.pplus, p.options.dilation) if kv.verdict == Verdict.NO_KE else None
    rows = figure_rows(p, rlb, kv)
    csv = render_csv(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(render_svg(p, rows))
    return None, EXIT_OK


def cmd_catalog(args) -> int:
    if args.name is None:
        if args.json:
            emit({"builtins": [{"name": n, "provenance": builtin(n).provenance} for n in names()]}, True)
        else:
            width = max(len(n) for n in names())
            for n in names():
                sys.stdout.write(f"{n.ljust(width)}  {builtin(n).provenance}\n")
        return EXIT_OK
    sys.stdout.write(json.dumps(builtin_config(args.name), indent=2) + "\n")
    return EXIT_OK


COMMANDS = {"check": cmd_check, "rlb": cmd_rlb, "barycenter": cmd_barycenter,
            "verify": cmd_verify, "figure": cmd_figure}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kepoly", description="Kahler-Einstein criterion for Fano group compactifications.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    source = argparse.ArgumentParser(add_help=False)
    g = source.add_mutually_exclusive_group(required=True)
    g.add_argument("--builtin", metavar="NAME", help=f"one of {', '.join(names())}")
    g.add_argument("--config", metavar="FILE", help="JSON config file")
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--json", action="store_true", help="JSON report instead of text")
    output.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")

    sub.add_parser("check", parents=[source, output], help="KE verdict")
    sub.add_parser("rlb", parents=[source, output], help="greatest Ricci lower bound")
    sub.add_parser("barycenter", parents=[source, output], help="DH volume and barycenter")
    sub.add_parser("verify", parents=[source, output], help="quadrature checks of the analytic identities")
    fig = sub.add_parser("figure", parents=[source], help="rank-2 picture as CSV (and SVG)")
    fig.add_argument("--csv", metavar="FILE", help="write CSV here instead of stdout")
    fig.add_argument("--svg", metavar="FILE", help="also write an SVG drawing")
    cat = sub.add_parser("catalog", help="list builtins, or dump one as a config")
    cat.add_argument("name", nargs="?", choices=names())
    cat.add_argument("--json", action="store_true")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    if args.command == "catalog":
        return cmd_catalog(args)
    start = time.perf_counter()
    try:
        p = _problem(args)
        report, code = COMMANDS[args.command](args, p)
    except (ConfigError, GeometryError, RootSystemError, UnknownExampleError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        sys.stderr.write(f"kepoly: error: {msg}\n")
        return EXIT_INPUT
    if report is not None:
        if getattr(args, "timing", False):
            report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
        emit(report, args.json)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
