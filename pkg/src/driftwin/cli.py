"""Command-line interface.

Exit codes: 0 success, 2 input validation failure, 3 non-convergence,
4 internal numeric failure.
"""

import argparse
import dataclasses
import importlib.resources
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, benchmark, serialize, water
from .baselines import nelder_mead_reconstruct
from .errors import DriftwinError, NonFiniteObjective
from .reconstruction import ReconstructionConfig, reconstruct
from .wds import WindowObservations
from .windows import atomize

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NO_CONVERGENCE = 3
EXIT_NUMERIC = 4


def _write_manifest(out_path: Path, command: str, args: argparse.Namespace,
                    outputs: list[str], started: float) -> None:
    manifest = {
        "command": command,
        "config": {k: v for k, v in vars(args).items() if k != "func"},
        "seed": getattr(args, "seed", None),
        "versions": {
            "driftwin": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "outputs": outputs,
        "wall_clock_s": time.monotonic() - started,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    out_path.write_text(json.dumps(manifest, indent=2) + "\n")


def cmd_atomize(args) -> int:
    windows = serialize.windows_from_json(Path(args.windows).read_text())
    atoms, incidence = atomize(windows)
    Path(args.out_atoms).write_text(serialize.atom_set_to_json(atoms) + "\n")
    Path(args.out_incidence).write_text(serialize.incidence_to_csv(incidence))
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    incidence = serialize.incidence_from_csv(Path(args.incidence).read_text())
    R = serialize.matrix_from_csv(Path(args.observations).read_text())
    obs = WindowObservations(R=R, incidence=incidence)
    config = ReconstructionConfig(
        max_outer_iter=args.max_iter,
        convergence_tol=args.tol,
        objective_variant=args.variant,
        seed=args.seed,
    )
    if args.solver == "cd":
        result = reconstruct(incidence, obs, config)
    else:
        result = nelder_mead_reconstruct(incidence, obs, config)
    Path(args.out).write_text(json.dumps(result.to_dict(), indent=2) + "\n")
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_benchmark(args) -> int:
    ranks = tuple(float(r) for r in args.ranks.split(","))
    rows = benchmark.run_benchmark(
        ranks=ranks, runs=args.runs, m=args.m, seed=args.seed
    )
    Path(args.out).write_text(benchmark.aggregate_table(rows))
    if args.emit_fixtures:
        rng = np.random.default_rng(np.random.SeedSequence([args.seed, 0]))
        inst = benchmark.generate_instance(ranks[0], args.m, rng)
        fixture_dir = Path(args.emit_fixtures)
        fixture_dir.mkdir(parents=True, exist_ok=True)
        (fixture_dir / "incidence.csv").write_text(
            serialize.incidence_to_csv(inst.incidence)
        )
        (fixture_dir / "R.csv").write_text(serialize.matrix_to_csv(inst.obs.R))
    return EXIT_OK


def _default_profile() -> str:
    return (
        importlib.resources.files("driftwin.data")
        .joinpath("default_profile.json")
        .read_text()
    )


def cmd_water(args) -> int:
    if args.water_command == "simulate":
        profile_text = (
            Path(args.profile).read_text() if args.profile else _default_profile()
        )
        profile = serialize.profile_from_json(profile_text)
        if args.days:
            profile = dataclasses.replace(profile, horizon_days=args.days)
        logs, truth = water.simulate_households(
            profile, args.households, args.reports_per_day, seed=args.seed
        )
        Path(args.out_logs).write_text(serialize.meter_logs_to_csv(logs))
        Path(args.out_truth).write_text(serialize.matrix_to_csv(truth))
    elif args.water_command == "fit":
        logs = serialize.meter_logs_from_csv(Path(args.logs).read_text())
        estimate = water.fit_demand(logs)
        Path(args.out).write_text(serialize.estimate_to_json(estimate) + "\n")
    else:  # predict
        estimate = serialize.estimate_from_json(Path(args.estimate).read_text())
        mean, quant = water.predict_community(estimate, args.households, args.quantile)
        curves = np.column_stack([np.arange(water.HOURS_PER_DAY), mean, quant])
        Path(args.out).write_text(
            "hour,mean_liters,quantile_liters\n"
            + "".join(
                f"{int(h)},{float(m)!r},{float(q)!r}\n" for h, m, q in curves
            )
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftwin",
        description="Reconstruct time-point-wise distribution processes "
        "from window-level observations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("atomize", help="atomize interval windows")
    p.add_argument("windows", help="windows JSON file")
    p.add_argument("--out-atoms", default="atoms.json")
    p.add_argument("--out-incidence", default="incidence.csv")
    p.set_defaults(func=cmd_atomize)

    p = sub.add_parser("reconstruct", help="reconstruct (P, D) from (W, R)")
    p.add_argument("incidence", help="incidence CSV file")
    p.add_argument("observations", help="window observation matrix CSV file")
    p.add_argument("--solver", choices=("cd", "nelder-mead"), default="cd")
    p.add_argument("--variant", choices=("constrained", "direct"),
                   default="constrained")
    p.add_argument("--tol", type=float, default=1e-14)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="result.json")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("benchmark", help="rank-sweep reconstruction benchmark")
    p.add_argument("--ranks", default="1.0,1.4,1.9,2.2,2.6")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="table.csv")
    p.add_argument("--emit-fixtures", default=None,
                   help="directory for a reconstruction fixture (incidence.csv, R.csv)")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("water", help="water-demand case study")
    wsub = p.add_subparsers(dest="water_command", required=True)

    ps = wsub.add_parser("simulate")
    ps.add_argument("--profile", default=None, help="demand profile JSON")
    ps.add_argument("--households", type=int, default=200)
    ps.add_argument("--days", type=int, default=None)
    ps.add_argument("--reports-per-day", type=float, default=4.0)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out-logs", default="logs.csv")
    ps.add_argument("--out-truth", default="truth.csv")
    ps.set_defaults(func=cmd_water)

    pf = wsub.add_parser("fit")
    pf.add_argument("--logs", required=True)
    pf.add_argument("--out", default="estimate.json")
    pf.set_defaults(func=cmd_water)

    pp = wsub.add_parser("predict")
    pp.add_argument("--estimate", required=True)
    pp.add_argument("--households", type=int, required=True)
    pp.add_argument("--quantile", type=float, default=0.95)
    pp.add_argument("--out", default="curves.csv")
    pp.set_defaults(func=cmd_water)

    return parser


def main(argv=None) -> int:
    started = time.monotonic()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except NonFiniteObjective as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DriftwinError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FloatingPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out = getattr(args, "out", None) or getattr(args, "out_atoms", None) \
        or getattr(args, "out_logs", None)
    if out:
        outputs = [
            str(getattr(args, name))
            for name in ("out", "out_atoms", "out_incidence", "out_logs", "out_truth")
            if getattr(args, name, None)
        ]
        _write_manifest(
            Path(out).with_suffix(".manifest.json"),
            args.command, args, outputs, started,
        )
    return code


if __name__ == "__main__":
    sys.exit(main())
