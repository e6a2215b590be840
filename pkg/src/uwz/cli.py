"""Command-line entry point: ``uwz {bounds,fig4,sim,wz}``.

Exit codes: 0 success, 2 spec or argument errors, 3 solver failures,
4 enumeration-cap violations.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .config import ProblemSpec, SpecError, binary_example, build_adversaries, load_spec
from .errors import InfeasibleError, SolverError, UnsupportedSizeError

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SOLVER = 3
EXIT_CAP = 4

log = logging.getLogger("uwz")


class CapError(Exception):
    pass


def fmt(x) -> str:
    """CSV cell: 9 significant digits for numbers, lowercase booleans, empty for missing, strings verbatim."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not np.isfinite(x):
        raise ValueError("refusing to write a non-finite number")
    # normalize -0 so reruns are byte-identical regardless of rounding sign
    return f"{x + 0.0:.9g}" if x != 0 else "0"


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(r.get(h)) for h in header])
    text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _git_revision() -> str | None:
    try:
        out = subprocess.run(["git", "rev-parse", "--short", "HEAD"], capture_output=True, text=True, timeout=5, cwd=Path(__file__).parent)
    except (OSError, subprocess.SubprocessError):
        return None
    return out.stdout.strip() or None if out.returncode == 0 else None


def _resolve_spec(args) -> ProblemSpec:
    if args.spec and args.binary_example is not None:
        raise SpecError("use either --spec or --binary-example, not both")
    if args.spec:
        return load_spec(args.spec)
    if args.binary_example is not None:
        return binary_example(args.binary_example, _parse_grid(args.grid) if getattr(args, "grid", None) else None)
    raise SpecError("a problem is required: pass --spec FILE or --binary-example E")


def _parse_grid(text: str) -> list:
    """``a,b,c`` or ``start:stop:step`` (stop inclusive)."""
    try:
        if ":" in text:
            a, b, s = (float(t) for t in text.split(":"))
            if s <= 0:
                raise ValueError
            return [round(float(x), 10) for x in np.arange(a, b + s * 1e-6, s)]
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise SpecError(f"cannot parse grid {text!r}", "--grid") from None


BOUND_COLUMNS = ["D", "rm_lower", "rm_upper", "ra_upper", "ra_lower", "matching_c1", "matching_c2", "limiting", "status"]


def cmd_bounds(args) -> int:
    from .solvers.bounds import bound_report, wz_rate

    spec = _resolve_spec(args)
    if getattr(args, "grid", None) and args.spec:
        spec.D_grid = _parse_grid(args.grid)
    problem = spec.problem()
    settings = spec.settings(args.tolerance, args.seed)
    names = sorted(spec.channels)
    header = BOUND_COLUMNS[:-1] + [f"wz_{n}" for n in names] + ["status"]
    rows = []
    for D in spec.D_grid:
        row = {"D": D}
        try:
            rep = bound_report(D, problem, settings)
            row.update(
                rm_lower=rep.rm_lower,
                rm_upper=rep.rm_upper,
                ra_upper=rep.ra_upper,
                ra_lower=rep.ra_lower,
                matching_c1=rep.matching_c1,
                matching_c2=rep.matching_c2,
                limiting=rep.limiting,
            )
            for n in names:
                row[f"wz_{n}"] = wz_rate(spec.channel(n), D, problem, settings)[0]
            row["status"] = "ok"
        except InfeasibleError:
            row["status"] = "infeasible"
        except SolverError as exc:
            log.warning("D=%s: %s", D, exc)
            row["status"] = "solver_error"
        rows.append(row)
        log.info("D=%.6g done (%s)", D, row["status"])
    write_csv(args.out, header, rows)
    return EXIT_SOLVER if any(r["status"] == "solver_error" for r in rows) else EXIT_OK


FIG4_COLUMNS = ["D", "wz_w1", "hb_tilde", "rm"]


def cmd_fig4(args) -> int:
    from .binary import binary_problem, fig4_channels
    from .solvers.bounds import SolverSettings, hb_tilde, rm_upper, wz_rate

    E = args.binary_example if args.binary_example is not None else 0.25
    if not 0.0 < E <= 0.5:
        raise SpecError("fig4 needs E in (0, 1/2]", "--binary-example")
    grid = _parse_grid(args.grid) if args.grid else [round(float(x), 10) for x in np.linspace(0.0, E, 11)]
    problem = binary_problem(E)
    kw = {"rng_seed": args.seed} if args.seed is not None else {}
    if args.tolerance is not None:
        kw["tolerance"] = args.tolerance
    settings = SolverSettings(**kw)
    w1, w2 = fig4_channels(E)
    rows = []
    for D in grid:
        rm, _ = rm_upper(D, problem, settings)
        rows.append({"D": D, "wz_w1": wz_rate(w1, D, problem, settings)[0], "hb_tilde": hb_tilde(D, w1, w2, problem, settings), "rm": rm})
    write_csv(args.out, FIG4_COLUMNS, rows)
    return EXIT_OK


WZ_COLUMNS = ["D", "channel", "rate"]


def cmd_wz(args) -> int:
    from .solvers.bounds import wz_rate

    spec = _resolve_spec(args)
    if args.grid:
        spec.D_grid = _parse_grid(args.grid)
    if not spec.channels:
        raise SpecError("the wz sweep needs at least one named channel", "channels")
    problem = spec.problem()
    settings = spec.settings(args.tolerance, args.seed)
    rows = []
    for name in sorted(spec.channels):
        w = spec.channel(name)
        for D in spec.D_grid:
            try:
                rows.append({"D": D, "channel": name, "rate": wz_rate(w, D, problem, settings)[0]})
            except InfeasibleError:
                rows.append({"D": D, "channel": name, "rate": None})
    write_csv(args.out, WZ_COLUMNS, rows)
    return EXIT_OK


def sim_test_channel(spec: ProblemSpec, D: float, settings):
    """Test channel the code is built on: the parametric optimum in the binary example, else the minimax V*."""
    if spec.binary_example is not None:
        from .binary import wz_binary_optimizer
        from .geometry import FunctionAlphabet

        return wz_binary_optimizer(spec.binary_example, D).test_channel(FunctionAlphabet(2, 2))
    from .solvers.bounds import rm_upper

    _, (v, _) = rm_upper(D, spec.problem(), settings)
    return v


def cmd_sim(args) -> int:
    from .sim import CodeConfig, run_experiment
    from .sim.code import MAX_CODES

    spec = _resolve_spec(args)
    sim = spec.simulation
    if sim is None:
        raise SpecError("the spec has no simulation section", "simulation")
    if args.trials is not None:
        sim.trials = args.trials
    if args.n is not None:
        sim.n = args.n
    problem = spec.problem()
    # cheap cap check before any solver work; the active support can only be smaller
    if len(problem.fa) ** sim.n > MAX_CODES and 2**sim.n > MAX_CODES:
        raise CapError(f"blocklength {sim.n} exceeds the enumeration cap")
    settings = spec.settings(args.tolerance, None)
    v = sim_test_channel(spec, sim.D, settings)
    try:
        config = CodeConfig(problem, v, sim.n, sim.delta)
    except ValueError as exc:
        if "cap" in str(exc):
            raise CapError(str(exc)) from None
        raise SpecError(str(exc), "simulation") from None
    seed = args.seed if args.seed is not None else 0
    report = run_experiment(config, build_adversaries(spec), sim.trials, seed)
    doc = {
        "meta": {"package": "uwz", "version": __version__, "git_revision": _git_revision(), "backend": _kernels.BACKEND_NAME},
        "master_seed": seed,
        "config": spec.to_dict(),
        "test_channel": np.round(config.v, 12).tolist(),
        "report": report.to_dict(),
    }
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="YAML problem spec")
    common.add_argument("--out", default="-", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=None, help="master seed for every random choice")
    common.add_argument("--tolerance", type=float, default=None, help="solver tolerance")
    common.add_argument("--binary-example", type=float, default=None, metavar="E", help="use the binary Hamming example at level E")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="uwz", description="Universal Wyner-Ziv bounds and binning-code simulation.")
    p.add_argument("--version", action="version", version=f"uwz {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    b = sub.add_parser("bounds", parents=[common], help="bound sweep over the D grid (CSV)")
    b.add_argument("--grid", help="override the D grid: a,b,c or start:stop:step")
    b.set_defaults(func=cmd_bounds)
    f = sub.add_parser("fig4", parents=[common], help="R_WZ(D|W1), two-decoder bound and R_m on the binary example (CSV)")
    f.add_argument("--grid", help="D grid: a,b,c or start:stop:step (default 11 points on [0, E])")
    f.set_defaults(func=cmd_fig4)
    s = sub.add_parser("sim", parents=[common], help="Monte Carlo run of the binning code (JSON report)")
    s.add_argument("--trials", type=int, default=None, help="override simulation.trials")
    s.add_argument("--n", type=int, default=None, help="override simulation.n")
    s.set_defaults(func=cmd_sim)
    w = sub.add_parser("wz", parents=[common], help="R_WZ(D|W) sweep for every named channel (CSV)")
    w.add_argument("--grid", help="override the D grid")
    w.set_defaults(func=cmd_wz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"uwz: spec error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CapError, UnsupportedSizeError) as exc:
        print(f"uwz: size cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (SolverError, InfeasibleError) as exc:
        print(f"uwz: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"uwz: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
