"""Command-line front end: experiment orchestration and result persistence.

Subcommands: ``exponents``, ``verify <experiment>``, ``sharpness``,
``solve``, ``kernel-table``.  A flat ``key = value`` config file can supply
any option; command-line flags override file values.  Every run writes a
JSON record named by the hash of its resolved configuration (plus CSV
tables and optional SVG plots), so a changed configuration can never
overwrite an old record.  Exit codes: 0 pass, 1 criterion failure,
2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import inspect
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .errors import ConeHeatError, ConfigError, NumericalFailure
from .exponents import (
    CriticalExponents,
    EllipticityPair,
    beltrami_eigenvalue,
    lambda_from_Lambda,
    lambda_lower_bound,
    weight_windows,
)
from .experiments import EXPERIMENTS, ExperimentResult, run_sharpness
from .geometry import CapCone3D, Wedge2D
from .kernel import WedgeHeatKernel
from .mesh import GradedMesh, ScalarField, uniform_times
from .solver import CoefficientPath, SeparableBump, SolveConfig, solve_fd, solve_green

EXIT_PASS = 0
EXIT_CRITERION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def parse_angle(text: str) -> float:
    """Angles as plain floats or simple pi expressions: 'pi', 'pi/2', '1.9pi'."""
    s = text.strip().lower().replace(" ", "")
    try:
        return float(s)
    except ValueError:
        pass
    if "pi" not in s:
        raise ConfigError(f"cannot parse angle {text!r}")
    head, _, tail = s.partition("pi")
    try:
        value = math.pi * (float(head) if head else 1.0)
        if tail.startswith("/"):
            value /= float(tail[1:])
        elif tail:
            raise ValueError
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None
    return value


def read_config(path: str | None) -> dict:
    """Flat typed key = value file; '#' starts a comment."""
    if path is None:
        return {}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        out[key.strip().replace("-", "_")] = _coerce(value.strip())
    return out


def _coerce(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def config_hash(config: dict) -> str:
    payload = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(payload).hexdigest()[:12]


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _slug(name: str) -> str:
    return "".join(c if c.isalnum() or c == "-" else "-" for c in name).strip("-")


def write_tables(result: ExperimentResult, outdir: Path, tag: str) -> list[str]:
    paths = []
    for tname, (header, rows) in result.tables.items():
        path = outdir / f"{_slug(result.name)}-{tname}-{tag}.csv"
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
        paths.append(str(path))
    return paths


def write_record(result: ExperimentResult, config: dict, outdir: Path,
                 wall: float, extra: dict | None = None) -> Path:
    tag = config_hash(config)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_paths = write_tables(result, outdir, tag)
    record = {
        "experiment": result.name,
        "config": config,
        "config_hash": tag,
        "passed": result.passed,
        "gating": result.gating,
        "checks": [{"name": c.name, "value": c.value,
                    "threshold": c.threshold, "ok": c.ok} for c in result.checks],
        "info": _jsonable(result.info),
        "tables": csv_paths,
        "wall_seconds": wall,
    }
    if extra:
        record.update(_jsonable(extra))
    path = outdir / f"{_slug(result.name)}-{tag}.json"
    path.write_text(json.dumps(record, indent=2, sort_keys=True, default=str))
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def maybe_plot(result: ExperimentResult, outdir: Path, tag: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for tname, (header, rows) in result.tables.items():
        if not rows or len(header) < 2:
            continue
        try:
            x = [float(r[0]) for r in rows]
            y = [float(r[-1]) for r in rows]
        except (TypeError, ValueError):
            continue
        fig, ax = plt.subplots(figsize=(5, 3.2))
        ax.plot(x, y, marker="o", lw=1)
        ax.set_xlabel(header[0])
        ax.set_ylabel(header[-1])
        ax.set_title(f"{result.name}: {tname}")
        fig.tight_layout()
        fig.savefig(outdir / f"{_slug(result.name)}-{tname}-{tag}.svg")
        plt.close(fig)


def print_result(result: ExperimentResult) -> None:
    status = "PASS" if result.passed else ("TREND" if not result.gating else "FAIL")
    print(f"== {result.name}: {status}")
    for c in result.checks:
        print(c.line())
    for key in ("verdict", "ratios", "empirical_constant", "suite_constant"):
        if key in result.info:
            print(f"  {key}: {result.info[key]}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_exponents(opts: dict) -> int:
    if opts.get("kappa") is not None and opts.get("alpha_cap") is not None:
        raise ConfigError("give either a wedge opening or a cap half-angle, not both")
    if opts.get("kappa") is not None:
        domain = Wedge2D(opts["kappa"])
    elif opts.get("alpha_cap") is not None:
        domain = CapCone3D(opts["alpha_cap"])
    else:
        raise ConfigError("a domain is required: --kappa or --alpha-cap")
    p = opts.get("p", 2.0)
    nu = None
    if opts.get("nu1") is not None or opts.get("nu2") is not None:
        nu = EllipticityPair(opts.get("nu1", 1.0), opts.get("nu2", 1.0))
    exps = CriticalExponents.for_laplacian(domain, nu)
    win = weight_windows(p, exps)
    print(f"domain: {domain}")
    print(f"Lambda (first base eigenvalue):  {exps.Lambda:.12g}")
    print(f"lambda+/- (Laplacian):           {exps.lambda_plus:.12g}")
    if nu is not None:
        print(f"robust lower bound ({nu.nu1:g},{nu.nu2:g}): {exps.lambda_robust:.12g}")
    print(f"theta window at p={p:g}:          ({win.theta_lo:.12g}, {win.theta_hi:.12g})")
    print(f"Theta window at p={p:g}:          ({win.Theta_lo:.12g}, {win.Theta_hi:.12g})")
    if opts.get("out"):
        outdir = Path(opts["out"])
        outdir.mkdir(parents=True, exist_ok=True)
        tag = config_hash(opts)
        payload = {
            "config": opts, "Lambda": exps.Lambda, "lambda": exps.lambda_plus,
            "lambda_robust": exps.lambda_robust,
            "theta_window": [win.theta_lo, win.theta_hi],
            "Theta_window": [win.Theta_lo, win.Theta_hi],
        }
        (outdir / f"exponents-{tag}.json").write_text(
            json.dumps(_jsonable(payload), indent=2, sort_keys=True))
    if opts.get("theta") is not None and opts.get("Theta") is not None:
        bad = win.violated_inequalities(opts["theta"], opts["Theta"])
        if bad:
            print("requested exponents are infeasible; violated:")
            for b in bad:
                print(f"  {b}")
            return EXIT_CRITERION
        print("requested exponents are feasible")
    return EXIT_PASS


def _experiment_kwargs(fn, opts: dict) -> dict:
    sig = inspect.signature(fn)
    return {k: v for k, v in opts.items() if k in sig.parameters and v is not None}


def cmd_verify(name: str, opts: dict) -> int:
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; "
                          f"choose from {sorted(EXPERIMENTS)}")
    fn = EXPERIMENTS[name]
    if name == "estimate":
        for key in ("kappa", "p", "theta", "Theta"):
            if opts.get(key) is None:
                raise ConfigError(f"experiment 'estimate' needs --{key}")
        exps = CriticalExponents.for_laplacian(Wedge2D(opts["kappa"]))
        win = weight_windows(opts["p"], exps)
        bad = win.violated_inequalities(opts["theta"], opts["Theta"])
        if bad:
            raise ConfigError("infeasible exponent pair; violated: " + "; ".join(bad))
    t0 = time.perf_counter()
    result = fn(**_experiment_kwargs(fn, opts))
    wall = time.perf_counter() - t0
    print_result(result)
    outdir = Path(opts.get("out") or "runs")
    rec = write_record(result, {"experiment": name, **opts}, outdir, wall)
    print(f"record: {rec}")
    if opts.get("plot"):
        maybe_plot(result, outdir, config_hash({"experiment": name, **opts}))
    return EXIT_PASS if result.passed else EXIT_CRITERION


def cmd_sharpness(opts: dict) -> int:
    for key in ("kappa", "p", "theta", "Theta"):
        if opts.get(key) is None:
            raise ConfigError(f"sharpness needs --{key}")
    exps = CriticalExponents.for_laplacian(Wedge2D(opts["kappa"]))
    win = weight_windows(opts["p"], exps)
    bad = win.violated_inequalities(opts["theta"], opts["Theta"])
    if bad and not opts.get("allow_infeasible"):
        raise ConfigError(
            "exponents are deliberately infeasible (violated: " + "; ".join(bad)
            + "); pass --allow-infeasible to run the probe")
    t0 = time.perf_counter()
    result = run_sharpness(opts["kappa"], opts["p"], opts["theta"], opts["Theta"],
                           levels=opts.get("levels", 5))
    wall = time.perf_counter() - t0
    print_result(result)
    outdir = Path(opts.get("out") or "runs")
    rec = write_record(result, {"experiment": "sharpness", **opts}, outdir, wall)
    print(f"record: {rec}")
    if opts.get("plot"):
        maybe_plot(result, outdir, config_hash({"experiment": "sharpness", **opts}))
    return EXIT_PASS  # exploratory: never a criterion failure


def cmd_solve(opts: dict) -> int:
    kappa = opts.get("kappa")
    if kappa is None:
        raise ConfigError("solve needs --kappa")
    mesh = GradedMesh.for_wedge(
        kappa,
        r_min=opts.get("r_min", 0.05),
        r_out=opts.get("r_out", 8.0),
        n_r=opts.get("n_r", 96),
        n_eta=opts.get("n_eta", 0),
    )
    T = opts.get("T", 0.5)
    dt = opts.get("dt", 0.0125)
    method = opts.get("method", "fd")
    times = uniform_times(T, dt)
    bump = SeparableBump(kappa, u_center=opts.get("source_center", 0.0),
                         u_width=opts.get("source_width", 1.2),
                         eta_frac=opts.get("source_eta_frac", 0.7))
    f = ScalarField.from_function(mesh, times, lambda t, R, E: bump.value(R, E))
    cfg = SolveConfig(mesh, dt, T, method)
    t0 = time.perf_counter()
    if method == "green":
        u = solve_green(f, cfg)
    else:
        u = solve_fd(f, CoefficientPath.laplacian(T), cfg)
    wall = time.perf_counter() - t0
    outdir = Path(opts.get("out") or "runs")
    outdir.mkdir(parents=True, exist_ok=True)
    tag = config_hash(opts)
    u.to_csv(outdir / f"solution-{tag}.csv")
    log = {"config": opts, "config_hash": tag, "mesh": mesh.params(),
           "stats": u.stats, "wall_seconds": wall,
           "max_value": float(np.max(np.abs(u.values)))}
    (outdir / f"solve-log-{tag}.json").write_text(
        json.dumps(_jsonable(log), indent=2, sort_keys=True))
    print(f"solved {method} on {mesh.n_r}x{mesh.n_eta} mesh, "
          f"{times.size - 1} steps, wall {wall:.2f}s")
    print(f"solution: {outdir / f'solution-{tag}.csv'}")
    return EXIT_PASS


def cmd_kernel_table(opts: dict) -> int:
    kappa = opts.get("kappa")
    if kappa is None:
        raise ConfigError("kernel-table needs --kappa")
    kern = WedgeHeatKernel(kappa)
    t = opts.get("t", 0.1)
    n = opts.get("n_samples", 6)
    radii = np.logspace(-1, 0.5, n)
    etas = np.linspace(-0.4, 0.4, n) * kappa
    rows = []
    for r in radii:
        for e in etas:
            for rp in radii:
                for ep in etas:
                    rows.append((t, r, e, rp, ep,
                                 float(kern.eval_polar(t, r, e, rp, ep))))
    outdir = Path(opts.get("out") or "runs")
    outdir.mkdir(parents=True, exist_ok=True)
    tag = config_hash(opts)
    path = outdir / f"kernel-table-{tag}.csv"
    lines = ["t,r,eta,rp,etap,G"]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    print(f"kernel table: {path} ({len(rows)} rows)")
    return EXIT_PASS


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="flat key = value config file")
    sp.add_argument("--kappa", type=parse_angle, help="wedge opening (e.g. pi, 3pi/2)")
    sp.add_argument("--p", type=float, help="summability exponent")
    sp.add_argument("--theta", type=float, help="vertex weight power")
    sp.add_argument("--Theta", type=float, help="boundary weight power")
    sp.add_argument("--out", help="output directory (default: runs)")
    sp.add_argument("--seed", type=int, help="seed for sample grids")
    sp.add_argument("--plot", action="store_true", help="emit SVG plots")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coneheat",
        description="verification experiments for parabolic estimates on wedges")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("exponents", help="critical exponents and weight windows")
    _add_common(sp)
    sp.add_argument("--alpha-cap", dest="alpha_cap", type=parse_angle,
                    help="cap half-angle (3-d cone)")
    sp.add_argument("--nu1", type=float, help="lower parabolicity constant")
    sp.add_argument("--nu2", type=float, help="upper parabolicity constant")

    sp = sub.add_parser("verify", help="run a named verification experiment")
    sp.add_argument("experiment", choices=sorted(EXPERIMENTS))
    _add_common(sp)
    sp.add_argument("--grid", default="default", help="sample grid preset")

    sp = sub.add_parser("sharpness", help="vertex-window sharpness probe")
    _add_common(sp)
    sp.add_argument("--allow-infeasible", dest="allow_infeasible",
                    action="store_true",
                    help="accept exponents outside the admissible window")
    sp.add_argument("--levels", type=int, help="number of vertex-extension levels")

    sp = sub.add_parser("solve", help="solve the forced heat problem once")
    _add_common(sp)
    sp.add_argument("--method", choices=("fd", "green"))
    sp.add_argument("--T", type=float, help="terminal time")
    sp.add_argument("--dt", type=float, help="time step")
    sp.add_argument("--r-min", dest="r_min", type=float)
    sp.add_argument("--r-out", dest="r_out", type=float)
    sp.add_argument("--n-r", dest="n_r", type=int)
    sp.add_argument("--n-eta", dest="n_eta", type=int)

    sp = sub.add_parser("kernel-table", help="emit a CSV table of kernel values")
    _add_common(sp)
    sp.add_argument("--t", type=float, help="elapsed time")
    sp.add_argument("--n-samples", dest="n_samples", type=int)
    return ap


def resolve_options(args: argparse.Namespace) -> dict:
    """File config under CLI flags; flags win."""
    opts = read_config(getattr(args, "config", None))
    for key, value in vars(args).items():
        if key in ("command", "config", "experiment"):
            continue
        if value is not None and value is not False:
            opts[key] = value
    if "kappa" in opts and isinstance(opts["kappa"], str):
        opts["kappa"] = parse_angle(opts["kappa"])
    if "alpha_cap" in opts and isinstance(opts["alpha_cap"], str):
        opts["alpha_cap"] = parse_angle(opts["alpha_cap"])
    return opts


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve_options(args)
        if args.command == "exponents":
            return cmd_exponents(opts)
        if args.command == "verify":
            return cmd_verify(args.experiment, opts)
        if args.command == "sharpness":
            return cmd_sharpness(opts)
        if args.command == "solve":
            return cmd_solve(opts)
        if args.command == "kernel-table":
            return cmd_kernel_table(opts)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ConeHeatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
