"""Command-line entry point: ``mosaic-dc <command> ...``.

Failures exit with status 2 (bad input) or 1 (anything else) after printing a
single JSON line to stderr, e.g.
``{"error": "ScenarioError", "message": "...", "path": "scenario.locations[texas].prices.tou"}``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, MosaicError, OversubscriptionError, ScenarioError
from .experiment import ALGORITHMS, DEFAULT_EPOCH, SWEEP_AXES, run_day, sweep
from .models import HOURS_PER_DAY
from .pareto import DEFAULT_REF, normalize, pareto_filter, phv, read_front_csv
from .scenario import (
    generate_scenario,
    load_scenario,
    save_scenario,
    subscription_rate,
)

log = logging.getLogger("mosaic_dc")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _name_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    peak = max(subscription_rate(scenario, e) for e in range(scenario.demand.n_epochs))
    print(f"ok: {len(scenario.locations)} locations, {len(scenario.node_types)} node types, "
          f"{len(scenario.demand.workload_types)} workload types, peak subscription {peak:.4f}")
    return 0


def cmd_generate(args) -> int:
    scenario = generate_scenario(args.dcs, args.seed, args.subscription,
                                 n_workloads=args.workloads, profile=args.profile)
    save_scenario(scenario, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    epochs = args.epochs if args.epochs is not None else list(range(HOURS_PER_DAY))
    report = run_day(scenario, args.algo, seed=args.seed, max_evals=args.budget_evals,
                     wall_budget=args.budget_secs, out_dir=args.out, workers=args.workers,
                     epochs=epochs, audit=args.audit)
    totals = report.cumulative_best()[1]
    print(f"wrote {len(epochs)} epoch fronts to {args.out}; cumulative best: "
          + ", ".join(f"{k}={v:.6g}" for k, v in totals.items()))
    return 0


def cmd_sweep(args) -> int:
    rows = sweep(args.axis, args.algos, args.seeds, args.budget_evals, values=args.values,
                 n_dcs=args.dcs, subscription=args.subscription,
                 scenario_seed=args.scenario_seed, epoch=args.epoch, workers=args.workers,
                 out_dir=args.out, progress=lambda msg: log.info(msg))
    width = max(len(r.algorithm) for r in rows)
    for r in rows:
        print(f"{args.axis}={r.value:<6} {r.algorithm:<{width}}  median={r.median_phv:.4f}  "
              f"normalized={r.normalized:.4f}")
    return 0


def cmd_phv(args) -> int:
    fronts = []
    for path in args.front:
        objectives, _, _ = read_front_csv(path)
        fronts.append(pareto_filter(objectives[:, args.objectives]))
    normed, _ = normalize(fronts)
    for path, front in zip(args.front, normed):
        print(f"{path}\t{phv(front, args.ref):.10g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mosaic-dc",
        description="Sustainability-aware workload distribution across datacenters.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario", type=Path)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="write a synthetic scenario")
    p.add_argument("--dcs", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subscription", type=float, default=0.75,
                   help="peak-epoch demand as a fraction of fleet capacity")
    p.add_argument("--workloads", type=int, default=5)
    p.add_argument("--profile", choices=("flat", "diurnal"), default="flat")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="optimize all epochs of a day")
    p.add_argument("--scenario", type=Path, required=True)
    p.add_argument("--algo", choices=ALGORITHMS, default="mosaic")
    budget = p.add_mutually_exclusive_group(required=True)
    budget.add_argument("--budget-evals", type=int, help="evaluations per epoch (deterministic)")
    budget.add_argument("--budget-secs", type=float,
                        help="wall-clock seconds per epoch (not reproducible)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--epochs", type=_int_list, default=None, help="subset, e.g. 0,6,12")
    p.add_argument("--audit", action="store_true",
                   help="check arrival conservation of every evaluated plan")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="compare algorithms along one problem axis")
    p.add_argument("--axis", choices=tuple(SWEEP_AXES), required=True)
    p.add_argument("--algos", type=_name_list, default=list(ALGORITHMS))
    p.add_argument("--seeds", type=_int_list, default=[0, 1, 2, 3, 4])
    p.add_argument("--values", type=lambda s: [float(v) for v in s.split(",")], default=None)
    p.add_argument("--budget-evals", type=int, default=50000)
    p.add_argument("--dcs", type=int, default=16)
    p.add_argument("--subscription", type=float, default=0.75)
    p.add_argument("--scenario-seed", type=int, default=0)
    p.add_argument("--epoch", type=int, default=DEFAULT_EPOCH)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("phv", help="hypervolume of one or more front CSVs")
    p.add_argument("--front", type=Path, nargs="+", required=True,
                   help="several fronts are normalized over their union")
    p.add_argument("--ref", type=float, default=DEFAULT_REF)
    p.add_argument("--objectives", type=_int_list, default=[0, 1, 2],
                   help="objective columns to use, e.g. 0,1")
    p.set_defaults(func=cmd_phv)
    return parser


def _error_line(exc: BaseException) -> str:
    record = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ScenarioError):
        record["path"] = exc.path
    if isinstance(exc, OversubscriptionError) and exc.epoch is not None:
        record["epoch"] = exc.epoch
    return json.dumps(record)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except (ScenarioError, ConfigError, OSError, ValueError) as exc:
        print(_error_line(exc), file=sys.stderr)
        return 2
    except MosaicError as exc:
        print(_error_line(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
