"""Batch command-line interface.

Commands: certify, gh, constants, model, riccati, shortbasis, flow, ingest.
Every run writes a canonical-JSON report envelope embedding the tool
version, the resolved tolerance, and a sha256 digest of each input file;
table-like results are also written as CSV, and a PNG figure is rendered
next to the delimited output when an output path is given.  Exit codes:
0 success/pass, 1 a mathematical violation was found, 2 input or
configuration error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io as cio
from .errors import CompassError
from .finite_metric import certify_curvature, curvature_scan
from .gromov_hausdorff import EXACT_SIZE_CAP, gh_bounds, gh_distance_exact
from .jacobi_riccati import (
    POLE_AT_ZERO,
    CurvatureProfile,
    compare_riccati,
    rauch_ratio,
    solve_jacobi,
)
from .lattice_short_basis import (
    count_vs_bound,
    filtration_check,
    short_basis,
    torus_diameter,
    verify_geometry,
)
from .model_space import (
    model_angle,
    model_side,
    modified_distance,
    trig,
    validate_triangle,
)
from .semiconcave_flow import contraction_report, gradient_curve, petrunin_report
from .volume_comparison import (
    critical_separation,
    packing_multiplicity_bound,
    short_basis_bound,
    sphere_measure,
)


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise cio.InputError(f"{flag}: expected comma-separated numbers, "
                             f"got {text!r}") from exc


def _parse_grid(text: str, flag: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise cio.InputError(f"{flag}: expected start:stop:step, got {text!r}")
    try:
        a, b, h = (float(p) for p in parts)
    except ValueError as exc:
        raise cio.InputError(f"{flag}: non-numeric bound in {text!r}") from exc
    if h <= 0 or b < a:
        raise cio.InputError(f"{flag}: need stop >= start and step > 0")
    count = int(math.floor((b - a) / h + 1e-12)) + 1
    return a + h * np.arange(count)


def _out_paths(args) -> tuple[Path | None, Path | None, Path | None]:
    """(envelope json, csv base, png) derived from --output; None = stdout."""
    if args.output is None:
        return None, None, None
    out = Path(args.output)
    base = out.with_suffix("")
    return base.with_suffix(".json"), base, base.with_suffix(".png")


def _emit(args, payload, *, inputs: dict[str, str], tolerance) -> None:
    env = cio.report_envelope(payload, tolerance=tolerance, inputs=inputs,
                              command=args.command, seed=args.seed)
    json_path, _, _ = _out_paths(args)
    if json_path is None:
        sys.stdout.write(cio.canonical_json(env))
    else:
        cio.write_json(json_path, env)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("COMPASS_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise cio.InputError(f"COMPASS_THREADS={env!r} is not an integer") from exc
    return 1


def _figure(path: Path | None, draw) -> None:
    if path is None:
        return
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig = draw(plt)
    fig.savefig(path, dpi=110, metadata={"Software": "compass"})
    plt.close(fig)


# ---------------------------------------------------------------- commands


def cmd_certify(args) -> int:
    m = cio.load_space(args.input)
    inputs = {str(args.input): cio.file_digest(args.input)}
    tol = args.tolerance
    threads = _threads(args)
    json_path, base, png = _out_paths(args)
    if (args.kappa is None) == (args.scan is None):
        raise cio.InputError("certify needs exactly one of --kappa or --scan")
    if args.kappa is not None:
        report = certify_curvature(args.kappa, m, tol, threads)
        _emit(args, report.to_dict(), inputs=inputs, tolerance=report.tolerance)

        def draw(plt):
            fig, ax = plt.subplots(figsize=(5, 3.5))
            defects = [v for _, v in report.violations]
            if defects:
                ax.hist(defects, bins=min(30, max(5, len(defects))), color="firebrick")
                ax.set_xlabel("violation defect")
            else:
                ax.bar([0], [report.max_defect if report.max_defect is not None else 0.0])
                ax.set_xticks([0], ["max defect (no violations)"])
            ax.set_title(f"four-point defects at kappa={report.kappa:g}")
            fig.tight_layout()
            return fig

        _figure(png, draw)
        return 0 if report.passed else 1
    grid = _parse_floats(args.scan, "--scan")
    if not grid:
        raise cio.InputError("--scan: empty curvature grid")
    scan = curvature_scan(m, grid, tol, threads)
    _emit(args, scan.to_dict(), inputs=inputs,
          tolerance=scan.rows[0].tolerance if scan.rows else tol)
    if base is not None:
        cio.write_csv(base.parent / (base.name + "_scan.csv"),
                      ["kappa", "passed", "checked", "n_violations", "max_defect"],
                      [[r.kappa, int(r.passed), r.checked, len(r.violations),
                        r.max_defect if r.max_defect is not None else ""]
                       for r in scan.rows])

    def draw(plt):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ks = [r.kappa for r in scan.rows]
        ds = [r.max_defect if r.max_defect is not None else 0.0 for r in scan.rows]
        colors = ["seagreen" if r.passed else "firebrick" for r in scan.rows]
        ax.bar(range(len(ks)), ds, color=colors)
        ax.set_xticks(range(len(ks)), [f"{k:g}" for k in ks])
        ax.set_xlabel("kappa")
        ax.set_ylabel("max defect")
        ax.set_title("curvature scan")
        fig.tight_layout()
        return fig

    _figure(png, draw)
    return 0


def cmd_gh(args) -> int:
    X = cio.load_space(args.input)
    Y = cio.load_space(args.input2)
    inputs = {str(args.input): cio.file_digest(args.input),
              str(args.input2): cio.file_digest(args.input2)}
    bound = gh_bounds(X, Y)
    payload = bound.to_dict()
    if X.n <= EXACT_SIZE_CAP and Y.n <= EXACT_SIZE_CAP:
        value, corr = gh_distance_exact(X, Y)
        payload = {"lower": value, "upper": value, "exact": True,
                   "witness_pairs": list(map(list, corr.pairs))}
    _emit(args, payload, inputs=inputs, tolerance=args.tolerance)
    _, _, png = _out_paths(args)

    def draw(plt):
        fig, axes = plt.subplots(1, 2, figsize=(7, 3.2))
        for ax, m, name in ((axes[0], X, "X"), (axes[1], Y, "Y")):
            im = ax.matshow(m.d)
            ax.set_title(f"{name} ({m.n} points)")
            fig.colorbar(im, ax=ax, shrink=0.8)
        fig.suptitle(f"GH in [{payload['lower']:.6g}, {payload['upper']:.6g}]")
        fig.tight_layout()
        return fig

    _figure(png, draw)
    return 0


def cmd_constants(args) -> int:
    lo, hi = 2, 5
    if args.n_range:
        parts = args.n_range.split(":")
        if len(parts) != 2:
            raise cio.InputError(f"--n-range: expected lo:hi, got {args.n_range!r}")
        try:
            lo, hi = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise cio.InputError(f"--n-range: non-integer bound") from exc
        if lo < 1 or hi < lo:
            raise cio.InputError("--n-range: need 1 <= lo <= hi")
    rows = []
    for n in range(lo, hi + 1):
        C_n = short_basis_bound(n) if n >= 2 else None
        C_curved = None
        if (n >= 2 and args.kappa is not None and args.kappa < 0
                and args.D is not None and args.D > 0):
            C_curved = short_basis_bound(n, args.kappa, args.D)
        eps = delta = None
        if n >= 2 and args.D is not None and args.V is not None:
            eps, delta = critical_separation(n, args.D, args.V)
        rows.append({
            "n": n,
            "C_n": C_n,
            "C_curved": C_curved,
            "L_n": packing_multiplicity_bound(n),
            "c_n": 2.0 * sphere_measure(n),
            "eps": eps,
            "delta": delta,
        })
    _emit(args, {"rows": rows, "kappa": args.kappa, "D": args.D, "V": args.V},
          inputs={}, tolerance=args.tolerance)
    _, base, png = _out_paths(args)
    if base is not None and args.format == "csv":
        cio.write_csv(base.parent / (base.name + "_constants.csv"),
                      ["n", "C_n", "C_curved", "L_n", "c_n", "eps", "delta"],
                      [[r["n"]] + [("" if r[k] is None else r[k])
                                   for k in ("C_n", "C_curved", "L_n", "c_n",
                                             "eps", "delta")] for r in rows])

    def draw(plt):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ns = [r["n"] for r in rows]
        for key, marker in (("C_n", "o"), ("L_n", "s"), ("c_n", "^")):
            vals = [r[key] for r in rows]
            if any(v is not None for v in vals):
                ax.semilogy(ns, [v if v is not None else float("nan") for v in vals],
                            marker=marker, label=key)
        ax.set_xlabel("dimension n")
        ax.legend()
        ax.set_title("comparison constants")
        fig.tight_layout()
        return fig

    _figure(png, draw)
    return 0


def cmd_model(args) -> int:
    if args.table is None and args.triangle is None:
        raise cio.InputError("model needs --table and/or --triangle")
    payload: dict = {"kappa": args.kappa}
    table_rows = None
    if args.table is not None:
        ts = _parse_grid(args.table, "--table")
        table_rows = []
        for t in ts:
            sn, cs, ct = trig(args.kappa, float(t))
            table_rows.append([float(t), sn, cs, ct,
                               modified_distance(args.kappa, float(t))])
        payload["table_points"] = len(table_rows)
    if args.triangle is not None:
        sides = _parse_floats(args.triangle, "--triangle")
        if len(sides) != 3:
            raise cio.InputError("--triangle: expected three side lengths")
        a, b, c = sides
        verdict = validate_triangle(args.kappa, a, b, c)
        tri: dict = {"sides": sides, "verdict": verdict}
        if verdict != "invalid":
            try:
                alpha = model_angle(args.kappa, a, b, c)
                beta = model_angle(args.kappa, b, c, a)
                gamma = model_angle(args.kappa, c, a, b)
                tri["angles"] = [alpha, beta, gamma]
                tri["side_roundtrip"] = model_side(args.kappa, alpha, b, c)
            except CompassError as exc:
                tri["angles_error"] = str(exc)
        payload["triangle"] = tri
    _emit(args, payload, inputs={}, tolerance=args.tolerance)
    _, base, png = _out_paths(args)
    if table_rows is not None and base is not None:
        cio.write_csv(base.parent / (base.name + "_table.csv"),
                      ["t", "sn", "cs", "ct", "md"], table_rows)

        def draw(plt):
            fig, ax = plt.subplots(figsize=(5.5, 3.5))
            arr = np.array(table_rows)
            for col, name in ((1, "sn"), (2, "cs"), (3, "ct"), (4, "md")):
                vals = np.clip(arr[:, col], -10, 10)
                ax.plot(arr[:, 0], vals, label=name)
            ax.set_xlabel("t")
            ax.set_title(f"model functions, kappa={args.kappa:g}")
            ax.legend()
            fig.tight_layout()
            return fig

        _figure(png, draw)
    return 0


def _load_profile(spec: str, horizon: float) -> tuple[CurvatureProfile, dict]:
    if spec.startswith("const:"):
        try:
            k = float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise cio.InputError(f"--profile: bad constant in {spec!r}") from exc
        return CurvatureProfile.from_constant(k, horizon), {}
    path = Path(spec[4:] if spec.startswith("csv:") else spec)
    profile = cio.load_profile_csv(path)
    return profile, {str(path): cio.file_digest(path)}


def cmd_riccati(args) -> int:
    profile, inputs = _load_profile(args.profile, args.horizon)
    step = args.step if args.step is not None else profile.horizon / 2048.0
    sol = solve_jacobi(profile, 0.0, 1.0, step)
    payload: dict = {
        "profile": profile.label,
        "horizon": profile.horizon,
        "step": step,
        "first_zero": sol.first_zero,
        "zeros": list(sol.zeros),
    }
    rc = 0
    report = None
    if args.rauch is not None:
        if args.model_kappa is None:
            raise cio.InputError("--rauch needs --model-kappa")
        report = rauch_ratio(profile, args.model_kappa, args.rauch, step)
        payload["rauch"] = report.to_dict()
        rc = 0 if report.passed else 1
    if args.compare:
        if args.model_kappa is None:
            raise cio.InputError("--compare needs --model-kappa")
        model_profile = CurvatureProfile.from_constant(args.model_kappa,
                                                       profile.horizon)
        report = compare_riccati(profile, model_profile, POLE_AT_ZERO,
                                 POLE_AT_ZERO, step)
        payload["comparison"] = report.to_dict()
        rc = 0 if (rc == 0 and report.passed) else 1
    _emit(args, payload, inputs=inputs, tolerance=args.tolerance)
    _, base, png = _out_paths(args)
    if base is not None:
        cio.write_csv(base.parent / (base.name + "_solution.csv"),
                      ["t", "y", "dy"],
                      [[float(t), float(y), float(dy)]
                       for t, y, dy in zip(sol.ts, sol.ys, sol.dys)])

        def draw(plt):
            fig, ax = plt.subplots(figsize=(5.5, 3.5))
            ax.plot(sol.ts, sol.ys, label="y(t)")
            if args.model_kappa is not None:
                model = [trig(args.model_kappa, float(t))[0] for t in sol.ts]
                ax.plot(sol.ts, model, "--",
                        label=f"model sn, kappa={args.model_kappa:g}")
            ax.set_xlabel("t")
            ax.legend()
            ax.set_title(f"Jacobi solution under {profile.label}")
            fig.tight_layout()
            return fig

        _figure(png, draw)
    return rc


def cmd_shortbasis(args) -> int:
    lat = cio.load_lattice(args.input)
    inputs = {str(args.input): cio.file_digest(args.input)}
    sb = short_basis(lat, args.grid_resolution)
    geom = verify_geometry(sb)
    count = count_vs_bound(sb)
    diam = torus_diameter(lat, args.grid_resolution)
    payload: dict = {
        "basis": lat.basis.tolist(),
        "vectors": [v.tolist() for v in sb.vectors],
        "coords": [list(c) for c in sb.coords],
        "lengths": list(sb.lengths),
        "torus_diameter": {"value": diam.value, "error_bound": diam.error_bound},
        "geometry": geom.to_dict(),
        "count_vs_bound": count.to_dict(),
    }
    if args.radius is not None:
        if lat.n <= 3:
            payload["filtration"] = filtration_check(lat, args.radius, sb).to_dict()
        else:
            payload["filtration"] = {"skipped": f"rank {lat.n} > 3"}
    _emit(args, payload, inputs=inputs, tolerance=args.tolerance)
    _, _, png = _out_paths(args)

    def draw(plt):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        if lat.n == 2:
            ks = np.arange(-3, 4)
            pts = np.array([[i, j] for i in ks for j in ks]) @ lat.basis
            ax.plot(pts[:, 0], pts[:, 1], ".", color="gray", ms=4)
            for v in sb.vectors:
                ax.annotate("", xy=(v[0], v[1]), xytext=(0, 0),
                            arrowprops={"arrowstyle": "->", "color": "firebrick"})
            ax.set_aspect("equal")
            ax.set_title("lattice and short basis")
        else:
            ax.bar(range(len(sb.lengths)), sb.lengths)
            ax.set_xlabel("basis index")
            ax.set_ylabel("length")
            ax.set_title("short basis lengths")
        fig.tight_layout()
        return fig

    _figure(png, draw)
    return 0 if (geom.passed and count.passed) else 1


def cmd_flow(args) -> int:
    f = cio.load_min_function(args.fn)
    inputs = {str(args.fn): cio.file_digest(args.fn)}
    p = _parse_floats(args.start, "--from")
    step = args.step if args.step is not None else args.T / 256.0
    curve = gradient_curve(f, p, args.T, step)
    payload: dict = {
        "lambda_bound": f.lambda_bound,
        "T": args.T,
        "step": step,
        "nodes": len(curve.times),
        "endpoint": curve.endpoint.tolist(),
        "final_value": float(curve.values[-1]),
    }
    rc = 0
    if args.second is not None:
        q = _parse_floats(args.second, "--second")
        rep = contraction_report(f, p, q, args.T, step)
        payload["contraction"] = rep.to_dict()
        rc = 0 if rep.passed else 1
        if args.petrunin is not None:
            st = _parse_floats(args.petrunin, "--petrunin")
            if len(st) != 2:
                raise cio.InputError("--petrunin: expected s,t")
            rep2 = petrunin_report(f, p, q, st[0], st[1], step)
            payload["petrunin"] = rep2.to_dict()
            rc = 0 if (rc == 0 and rep2.passed) else 1
    elif args.petrunin is not None:
        raise cio.InputError("--petrunin needs --second")
    _emit(args, payload, inputs=inputs, tolerance=args.tolerance)
    _, base, png = _out_paths(args)
    if base is not None:
        dim = curve.points.shape[1]
        cio.write_csv(base.parent / (base.name + "_curve.csv"),
                      ["t"] + [f"x{i}" for i in range(dim)] + ["f"],
                      [[float(t)] + [float(v) for v in pt] + [float(val)]
                       for t, pt, val in zip(curve.times, curve.points, curve.values)])

        def draw(plt):
            fig, axes = plt.subplots(1, 2, figsize=(7.5, 3.4))
            if dim >= 2:
                axes[0].plot(curve.points[:, 0], curve.points[:, 1], "o-", ms=3)
                axes[0].set_title("flow path (first two coords)")
                axes[0].set_aspect("equal")
            else:
                axes[0].plot(curve.times, curve.points[:, 0], "o-", ms=3)
                axes[0].set_title("flow coordinate")
            axes[1].plot(curve.times, curve.values, "o-", ms=3)
            axes[1].set_title("f along the flow")
            axes[1].set_xlabel("t")
            fig.tight_layout()
            return fig

        _figure(png, draw)
    return rc


def cmd_ingest(args) -> int:
    m = cio.load_graph(args.input)
    data = cio.matrix_to_dict(m)
    if args.output is None:
        sys.stdout.write(cio.canonical_json(data))
    else:
        cio.write_json(Path(args.output), data)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None,
                        help="override the default check tolerance")
    common.add_argument("--output", default=None,
                        help="output path; report JSON, CSV tables, and a PNG "
                             "figure are written next to it (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="preferred table format where applicable")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (fallback: COMPASS_THREADS)")
    common.add_argument("--seed", type=int, default=None,
                        help="seed recorded in the report envelope and used by "
                             "randomized subcommands")

    parser = argparse.ArgumentParser(
        prog="compass",
        description="Numerical comparison-geometry toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", parents=[common],
                       help="four-point curvature certification of a finite metric")
    p.add_argument("--input", required=True, help="matrix/graph JSON or matrix CSV")
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--scan", default=None, help="comma-separated curvature grid")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("gh", parents=[common],
                       help="Gromov-Hausdorff distance bounds between two spaces")
    p.add_argument("input", help="first space (matrix/graph file)")
    p.add_argument("input2", help="second space (matrix/graph file)")
    p.set_defaults(func=cmd_gh)

    p = sub.add_parser("constants", parents=[common],
                       help="table of comparison constants by dimension")
    p.add_argument("--n-range", default=None, help="lo:hi inclusive (default 2:5)")
    p.add_argument("--kappa", type=float, default=None,
                   help="negative curvature for the curved generator bound")
    p.add_argument("--D", type=float, default=None, help="diameter scale")
    p.add_argument("--V", type=float, default=None, help="volume lower bound")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("model", parents=[common],
                       help="model-space trig tables and triangle solving")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--table", default=None, help="t grid start:stop:step")
    p.add_argument("--triangle", default=None, help="three sides a,b,c")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("riccati", parents=[common],
                       help="Jacobi/Riccati solutions and comparison checks")
    p.add_argument("--profile", required=True,
                   help="const:K or a two-column (t, kappa) CSV path")
    p.add_argument("--horizon", type=float, default=10.0,
                   help="horizon for const profiles (default 10)")
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--model-kappa", dest="model_kappa", type=float, default=None)
    p.add_argument("--rauch", choices=("sn", "cs"), default=None,
                   help="ratio monotonicity check against the model solution")
    p.add_argument("--compare", action="store_true",
                   help="slope comparison against the constant model profile")
    p.set_defaults(func=cmd_riccati)

    p = sub.add_parser("shortbasis", parents=[common],
                       help="short basis and flat-torus geometry of a lattice")
    p.add_argument("--input", required=True, help="lattice JSON {basis: [[...]]}")
    p.add_argument("--radius", type=float, default=None,
                   help="also run the filtration check at this radius")
    p.add_argument("--grid-resolution", type=int, default=32)
    p.set_defaults(func=cmd_shortbasis)

    p = sub.add_parser("flow", parents=[common],
                       help="gradient flow of a piecewise-min function")
    p.add_argument("--fn", required=True, help="function spec JSON")
    p.add_argument("--from", dest="start", required=True,
                   help="start point coordinates x0,x1,...")
    p.add_argument("--T", type=float, required=True, help="flow horizon")
    p.add_argument("--step", type=float, default=None, help="Euler step (default T/256)")
    p.add_argument("--second", default=None,
                   help="second start point: adds a contraction report")
    p.add_argument("--petrunin", default=None,
                   help="s,t flow times for the two-point estimate (needs --second)")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("ingest", parents=[common],
                       help="convert a weighted graph to a distance matrix")
    p.add_argument("--input", required=True, help="graph JSON {vertices, edges}")
    p.set_defaults(func=cmd_ingest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CompassError as exc:
        print(f"compass: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"compass: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
