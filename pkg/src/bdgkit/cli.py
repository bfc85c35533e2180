"""Command-line entry point.

Exit codes: 0 when every check passes, 1 on a verification failure, 2 on a
solver or configuration error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import OUTPUT_ENV, load_config
from .errors import BdgError, ConfigInvalid
from .reports import ALL_SUITES, emit_plotdata, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration document")
    common.add_argument("--output-dir", help=f"artifact directory (overrides ${OUTPUT_ENV} and the config)")

    p = argparse.ArgumentParser(prog="bdgkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("profile", parents=[common], help="angular ODE suite")
    sub.add_parser("coords", parents=[common], help="(t, s) chart round-trip and frame suite")

    c = sub.add_parser("curvature-check", parents=[common], help="supersolution certificates and minimality of F0")
    c.add_argument("--kind", choices=["tilde_F0", "const", "tanh", "beta", "power"])
    c.add_argument("--sigma", type=float)
    c.add_argument("--amp", type=float)
    c.add_argument("--rmin", type=float)
    c.add_argument("--rmax", type=float)
    c.add_argument("--n", type=int, help="radial grid size")

    g = sub.add_parser("solve-graph", parents=[common], help="Dirichlet problem and sandwich certificate")
    g.add_argument("--R", type=float)
    g.add_argument("--nr", type=int)
    g.add_argument("--ntheta", type=int)
    g.add_argument("--tol", type=float)
    g.add_argument("--sigma", type=float)

    sub.add_parser("geometry-check", parents=[common], help="curvature spectrum and Fermi projection suite")

    a = sub.add_parser("ansatz-residual", parents=[common], help="corrector, residual scaling and projection")
    a.add_argument("--alpha", type=float, action="append")
    a.add_argument("--with-w1", action="store_true")
    a.add_argument("--nu", type=float, help="radial weight exponent (pairs with --sigma-weight)")
    a.add_argument("--sigma-weight", type=float, help="exponential weight in z")
    a.add_argument("--samples", type=int, help="z samples per footprint")

    j = sub.add_parser("jacobi-check", parents=[common], help="Jacobi supersolution lemma")
    j.add_argument("--sigma", type=float)
    j.add_argument("--sigma1", type=float)
    j.add_argument("--rmin", type=float)
    j.add_argument("--rmax", type=float)

    js = sub.add_parser("jacobi-solve", parents=[common], help="outer linear problem on an annulus")
    js.add_argument("--R0", type=float)
    js.add_argument("--R", type=float)
    js.add_argument("--rhs", choices=["zero", "manufactured", "decay"])

    al = sub.add_parser("all", parents=[common], help="run every suite")
    al.add_argument("--parallel", action="store_true", help="run independent suites in parallel")

    pd = sub.add_parser("plotdata", parents=[common], help="merge suite reports into a plot-ready CSV")
    pd.add_argument("reports", nargs="*", help="suite JSON reports (default: all in the output directory)")
    pd.add_argument("--out", help="output CSV (default: <output-dir>/plotdata.csv)")
    return p


def _set(over: dict, section: str, key: str, value):
    if value is not None:
        over.setdefault(section, {})[key] = value


def _overrides(args) -> tuple[dict, str, dict]:
    """Config overrides, suite name and extra suite arguments for a subcommand."""
    over: dict = {}
    extra: dict = {}
    cmd = args.command
    if cmd == "curvature-check":
        if args.kind:
            over.setdefault("curvature", {})["kinds"] = [args.kind]
        _set(over, "curvature", "sigma", args.sigma)
        _set(over, "curvature", "amp", args.amp)
        _set(over, "curvature", "rmax", args.rmax)
        _set(over, "curvature", "n_r", args.n)
        if args.rmin is not None:
            extra["rmin"] = args.rmin
        return over, "curvature", extra
    if cmd == "solve-graph":
        for k in ("R", "nr", "ntheta", "tol", "sigma"):
            _set(over, "graph", k, getattr(args, k))
        return over, "graph", extra
    if cmd == "ansatz-residual":
        _set(over, "ansatz", "alphas", args.alpha)
        if args.with_w1:
            over.setdefault("ansatz", {})["with_w1"] = True
        _set(over, "ansatz", "n_z", args.samples)
        if args.nu is not None or args.sigma_weight is not None:
            nu = 3.0 if args.nu is None else args.nu
            sw = 1.0 if args.sigma_weight is None else args.sigma_weight
            over.setdefault("ansatz", {})["weights"] = [[nu, sw], [2.0, 0.5]] if (nu, sw) != (2.0, 0.5) else [[nu, sw]]
        return over, "ansatz", extra
    if cmd == "jacobi-check":
        for k in ("sigma", "sigma1", "rmin", "rmax"):
            _set(over, "jacobi", k, getattr(args, k))
        return over, "jacobi_check", extra
    if cmd == "jacobi-solve":
        _set(over, "jacobi", "R0", args.R0)
        _set(over, "jacobi", "R", args.R)
        if args.rhs:
            extra["rhs"] = args.rhs
        return over, "jacobi_solve", extra
    names = {"profile": "profile", "coords": "coords", "geometry-check": "geometry"}
    return over, names.get(cmd, cmd), extra


def _run_one(cfg, suite, extra):
    return run_suite(cfg, suite, **extra)


def _code(verdicts) -> int:
    if any(v.status == "error" for v in verdicts):
        return EXIT_ERROR
    return EXIT_PASS if all(v.passed for v in verdicts) else EXIT_FAIL


def _report(v, stream=None):
    stream = stream or sys.stdout
    print(f"{v.suite:14s} {v.status.upper():5s} worst_margin={v.worst_margin:.3e} "
          f"time={v.seconds:.1f}s" + (f"  {v.error}" if v.error else ""), file=stream)
    for name, c in v.checks.items():
        if not c["passed"]:
            print(f"    failed: {name} value={c['value']:.6g} limit={c['limit']:.6g}", file=stream)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        over, suite, extra = _overrides(args)
        if args.output_dir:
            over["output_dir"] = args.output_dir
        cfg = load_config(args.config, over)
        if args.output_dir:
            cfg["output_dir"] = args.output_dir
        out = Path(cfg["output_dir"])
        if args.command == "plotdata":
            reports = args.reports or sorted(str(p) for p in out.glob("*.json"))
            path = emit_plotdata(reports, Path(args.out) if args.out else out / "plotdata.csv")
            print(f"wrote {path}")
            return EXIT_PASS
        if args.command == "all":
            if args.parallel:
                with ProcessPoolExecutor() as ex:
                    verdicts = list(ex.map(_run_one, [cfg] * len(ALL_SUITES), ALL_SUITES,
                                           [{}] * len(ALL_SUITES)))
            else:
                verdicts = [run_suite(cfg, s) for s in ALL_SUITES]
        else:
            verdicts = [run_suite(cfg, suite, **extra)]
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (BdgError, ArithmeticError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for v in verdicts:
        _report(v)
    return _code(verdicts)


if __name__ == "__main__":
    sys.exit(main())
