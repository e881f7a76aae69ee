"""Command-line interface: ``opinet simulate | infer | reproduce``.

Exit codes: 0 success, 1 usage or parse error, 2 not solvable,
3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .approx import infer_problem3
from .dynamics import REGIMES, simulate
from .errors import DegenerateSource, InvariantBreach, NotSolvable, OpinetError
from .exact import infer_problem1, infer_problem2, source_residual
from .io import (
    read_trajectory,
    write_csv,
    write_json,
    write_manifest,
    write_matrix_csv,
    write_trajectory_csv,
    write_trajectory_json,
)
from .measurement import build_pq
from .metrics import mc_edge_errors, mc_window_error, mean_trajectory, sample_x0
from .network import validate_network
from .scenario import Scenario, ScenarioError, bundled_names, bundled_scenario, load_scenario

EXIT_OK, EXIT_USAGE, EXIT_UNSOLVABLE, EXIT_INTERNAL = 0, 1, 2, 3

FIGURES = ("toy12", "fig3", "fig4a", "fig4b")
DEFAULT_SAMPLES = {"fig3": 1000, "fig4a": 1000, "fig4b": 200}
TOY12_TOL = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def resolve_scenario(ref: str) -> tuple[Scenario, list[Path]]:
    path = Path(ref)
    if path.is_file():
        return load_scenario(path), [path]
    if ref in bundled_names():
        return bundled_scenario(ref), []
    raise UsageError(f"no scenario file or bundled scenario named {ref!r} (bundled: {', '.join(bundled_names())})")


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _read_x0(ref: str | None, sc: Scenario, n: int) -> tuple[np.ndarray, list[Path]]:
    if ref is None:
        if sc.x0 is not None:
            return sc.x0, []
        return sample_x0(sc.simulation.seed, 0, n), []
    if ref.startswith("random:"):
        try:
            seed = int(ref.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"--x0 {ref!r}: seed must be an integer") from None
        return sample_x0(seed, 0, n), []
    path = Path(ref)
    if not path.is_file():
        raise UsageError(f"--x0 {ref!r}: no such file (use a file or random:SEED)")
    text = path.read_text().strip()
    try:
        vals = json.loads(text) if text.startswith("[") else [float(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise UsageError(f"--x0 {ref}: {exc}") from None
    x0 = np.array(vals, dtype=float)
    if x0.shape != (n,):
        raise UsageError(f"--x0 {ref}: expected {n} values, got {x0.size}")
    return x0, [path]


def cmd_simulate(args, argv) -> int:
    started = _dt.datetime.now(_dt.timezone.utc)
    sc, inputs = resolve_scenario(args.scenario)
    net = validate_network(sc.spec)
    x0, more = _read_x0(args.x0, sc, net.n)
    horizon = args.horizon if args.horizon is not None else sc.simulation.horizon
    precision = args.precision or sc.simulation.precision
    traj = simulate(net, x0, horizon, regime=args.regime, precision=precision)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = [out / "trajectory.csv", out / "trajectory.json"]
    write_trajectory_csv(traj, files[0])
    write_trajectory_json(traj, files[1])
    params = {"scenario": args.scenario, "x0": args.x0, "horizon": traj.T, "precision": precision, "regime": traj.regime}
    write_manifest(out, "simulate", argv, params, inputs + more, files, started)
    print(f"wrote {traj.T + 1} opinion vectors ({traj.regime}, {precision}) to {out}")
    return EXIT_OK


def cmd_infer(args, argv) -> int:
    started = _dt.datetime.now(_dt.timezone.utc)
    traj = read_trajectory(args.trajectory)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    params = {
        "problem": args.problem, "m": args.m, "p": args.p, "m_max": args.m_max,
        "rank_tol": args.rank_tol, "zero_tol": args.zero_tol, "agree_tol": args.agree_tol,
    }
    code = EXIT_OK
    try:
        if args.problem == 1:
            res = infer_problem1(traj, args.m, args.p, args.rank_tol, args.zero_tol)
            doc = res.to_dict()
            if not res.solvability.solvable:
                code = EXIT_UNSOLVABLE
                print(f"verdict: {res.solvability.verdict}", file=sys.stderr)
        elif args.problem == 2:
            res = infer_problem2(traj, args.m, args.p, args.rank_tol, args.zero_tol)
            doc = res.to_dict()
            doc["source_residuals"] = []
            for i in range(traj.n):
                try:
                    doc["source_residuals"].append(source_residual(traj, res.W_hat, i).to_dict())
                except DegenerateSource:
                    doc["source_residuals"].append(None)
        else:
            res = infer_problem3(traj, args.m_max, args.p, args.agree_tol, args.rank_tol)
            doc = res.to_dict()
            print("followers:", " ".join(str(i + 1) for i in sorted(res.followers)) or "none")
    except NotSolvable as exc:
        doc = {"problem": args.problem, "solvability": exc.report.to_dict(), "error": str(exc)}
        code = EXIT_UNSOLVABLE
        print(json.dumps(exc.report.to_dict(), indent=2), file=sys.stderr)
    path = out / "result.json"
    write_json(doc, path)
    files.append(path)
    if args.dump_pq:
        pq = build_pq(traj, args.m, args.p, args.rank_tol)
        for name, M in (("P", pq.P), ("Q", pq.Q)):
            files.append(out / f"{name}.csv")
            write_matrix_csv(M, files[-1], decimals=4)
    write_manifest(out, "infer", argv, params, [Path(args.trajectory)], files, started)
    return code


def _reproduce_toy12(sc, out) -> tuple[list[Path], dict, int]:
    net = validate_network(sc.spec)
    traj = simulate(net, sc.x0, sc.simulation.horizon)
    res = infer_problem1(traj, sc.inference.m, sc.inference.p, sc.inference.tolerances.rank)
    pq = build_pq(traj, sc.inference.m, sc.inference.p)
    from .network import linear_parameters

    beta, gamma = linear_parameters(sc.spec)
    err_w = float(np.abs(res.weights - sc.spec.weights).max())
    err_g = float(np.abs(res.gamma_hat - gamma).max())
    err_b = float(np.abs(res.beta_hat - beta).max())
    ok = res.solvability.solvable and max(err_w, err_g, err_b) < TOY12_TOL
    files = [out / "toy12_P.csv", out / "toy12_Q.csv", out / "toy12_W_hat.csv", out / "toy12_report.json"]
    write_matrix_csv(pq.P, files[0], decimals=4)
    write_matrix_csv(pq.Q, files[1], decimals=4)
    write_matrix_csv(res.W_hat, files[2])
    report = {
        "exact_recovery": ok,
        "tolerance": TOY12_TOL,
        "max_error_weights": err_w,
        "max_error_gamma": err_g,
        "max_error_beta": err_b,
        "rank_P": pq.rank_P,
        "result": res.to_dict(),
    }
    write_json(report, files[3])
    print(f"toy12: rank(P) = {pq.rank_P}, max errors W {err_w:.2e}, gamma {err_g:.2e}, beta {err_b:.2e}")
    if not ok:
        raise InvariantBreach("toy12 parameters were not recovered exactly")
    return files, {}, EXIT_OK


def _reproduce_fig3(sc, out, samples, seed):
    inf = sc.inference
    rep = mc_edge_errors(sc, inf.m, inf.p, samples, seed)
    n = sc.spec.n
    rows = [(i + 1, j + 1, rep.edge_errors[i, j]) for i in range(n) for j in range(n)]
    files = [out / "fig3_errors.csv"]
    write_csv(files[0], ("i", "j", "e_ij"), rows)
    nf, f = rep.follower_split(sc.spec.follower_set)
    print(f"fig3: {rep.samples} samples ({rep.skipped} skipped), mean error non-followers {nf:.3e}, followers {f:.3e}")
    return files, {"samples_used": rep.samples, "samples_skipped": rep.skipped, "window": list(rep.window)}, EXIT_OK


def _reproduce_fig4a(sc, out, samples, seed):
    mt = mean_trajectory(sc, samples, seed)
    n = sc.spec.n
    rows = [(k, *row) for k, row in enumerate(mt.mean)]
    files = [out / "fig4a_mean_traj.csv"]
    write_csv(files[0], ("k", *(f"xbar_{i + 1}" for i in range(n))), rows)
    print(f"fig4a: {samples} samples, final step {mt.max_final_step:.2e}")
    return files, {"horizon": mt.mean.shape[0] - 1}, EXIT_OK


def _reproduce_fig4b(sc, out, samples, seed):
    inf = sc.inference
    sweep = inf.p_sweep or (inf.p,)
    reps = mc_window_error(sc, inf.m, sweep, samples, seed)
    files = [out / "fig4b_window_error.csv"]
    write_csv(files[0], ("p", "e"), [(r.window[1], r.window_error) for r in reps])
    for r in reps:
        print(f"fig4b: e({r.window[0]}, {r.window[1]}) = {r.window_error:.6e}")
    return files, {"m": inf.m, "p_sweep": list(sweep), "skipped": [r.skipped for r in reps]}, EXIT_OK


def cmd_reproduce(args, argv) -> int:
    started = _dt.datetime.now(_dt.timezone.utc)
    fig = args.figure
    default = "toy12" if fig == "toy12" else "krackhardt"
    sc, inputs = resolve_scenario(args.scenario or default)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    samples = args.samples or DEFAULT_SAMPLES.get(fig, 1)
    seed = sc.simulation.seed if args.seed is None else args.seed
    if fig == "toy12":
        files, extra, code = _reproduce_toy12(sc, out)
    elif fig == "fig3":
        files, extra, code = _reproduce_fig3(sc, out, samples, seed)
    elif fig == "fig4a":
        files, extra, code = _reproduce_fig4a(sc, out, samples, seed)
    else:
        files, extra, code = _reproduce_fig4b(sc, out, samples, seed)
    params = {"figure": fig, "scenario": sc.name, "samples": samples, "seed": seed, **extra}
    write_manifest(out, "reproduce", argv, params, inputs, files, started)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="opinet", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"opinet {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="simulate a scenario and write its trajectory")
    s.add_argument("scenario", help="scenario JSON file or bundled name")
    s.add_argument("--x0", help="innate opinions: a file or random:SEED (default: scenario x0)")
    s.add_argument("--horizon", type=int, help="number of steps T (default: scenario, else n + 2)")
    s.add_argument("--precision", choices=("double", "dd"))
    s.add_argument("--regime", choices=REGIMES, help="override the detected regime tag")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("infer", help="infer topology from a trajectory file")
    s.add_argument("trajectory", help="trajectory .json (or .csv, without metadata)")
    s.add_argument("--problem", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--m", type=int, default=0, help="window start for problems 1 and 2")
    s.add_argument("--p", type=int, help="window end (default: all data, or automatic for problem 3)")
    s.add_argument("--m-max", type=int, default=2, help="largest window start for problem 3")
    s.add_argument("--rank-tol", type=float, help="relative singular-value threshold on P")
    s.add_argument("--zero-tol", type=float, default=1e-7)
    s.add_argument("--agree-tol", type=float, default=1e-7)
    s.add_argument("--dump-pq", action="store_true", help="also write P.csv and Q.csv at 4 decimals")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_infer)

    s = sub.add_parser("reproduce", help="regenerate figure data")
    s.add_argument("figure", choices=FIGURES)
    s.add_argument("--samples", type=_positive_int)
    s.add_argument("--seed", type=int)
    s.add_argument("--scenario", help="override the scenario (file or bundled name)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, ["opinet", *argv])
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OpinetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:  # bad input values that argparse cannot see
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # anything unexpected is an invariant breach
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
