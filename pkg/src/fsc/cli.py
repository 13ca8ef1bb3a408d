"""Command-line front end.

    fsc run <scenario> [--out DIR] [--seed N] [--long]
    fsc mc <scenario> [--out DIR] [--seed N] [--long]
    fsc sweep <scenario> --param P=3..7 [--jobs N] [--out DIR] [--long]
    fsc convert-at2 <in.AT2> <out.txt>
    fsc list

``<scenario>`` is a path or the name of a bundled scenario.
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .groundmotion import convert_at2
from .runner import run_scenario, write_table
from .scenario import Scenario, ScenarioError, bundled_scenario_path, bundled_scenarios, parse_scenario

log = logging.getLogger("fsc")

#: sweepable FscConfig fields; P is an alias of basis_size
SWEEP_FIELDS = {"P": "basis_size", "basis_size": "basis_size", "flow_order": "flow_order",
                "cadence": "cadence", "warmup_index_bound": "warmup_index_bound"}


def resolve_scenario(name: str) -> Path:
    path = Path(name)
    if path.is_file():
        return path
    bundled = bundled_scenario_path(name)
    if bundled.is_file():
        return bundled
    raise ScenarioError(f"no scenario file {name!r} (bundled: {', '.join(bundled_scenarios())})")


def load(args) -> Scenario:
    scenario = parse_scenario(resolve_scenario(args.scenario), long=args.long)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    return scenario


def parse_sweep(spec: str) -> tuple[str, list[int]]:
    """``P=3..7`` or ``P=3,5,7`` -> ("basis_size", [3, 4, 5, 6, 7])."""
    if "=" not in spec:
        raise ValueError(f"sweep spec {spec!r} must look like NAME=LO..HI or NAME=A,B,C")
    name, values = spec.split("=", 1)
    name = name.strip()
    if name not in SWEEP_FIELDS:
        raise ValueError(f"cannot sweep {name!r}; choose from {sorted(SWEEP_FIELDS)}")
    values = values.strip()
    if ".." in values:
        lo, hi = (int(x) for x in values.split("..", 1))
        if hi < lo:
            raise ValueError(f"empty range {values!r}")
        out = list(range(lo, hi + 1))
    else:
        out = [int(x) for x in values.split(",") if x.strip()]
    if not out:
        raise ValueError(f"no values in {spec!r}")
    return SWEEP_FIELDS[name], out


def _sweep_one(job):
    scenario, out = job
    run_scenario(scenario, out)
    return out


def cmd_run(args) -> int:
    scenario = load(args)
    out = Path(args.out or f"results/{scenario.name}")
    run_scenario(scenario, out)
    print(f"wrote {out}")
    return 0


def cmd_mc(args) -> int:
    scenario = load(args)
    out = Path(args.out or f"results/{scenario.name}_mc")
    run_scenario(scenario, out, mc_only=True)
    print(f"wrote {out}")
    return 0


def cmd_sweep(args) -> int:
    scenario = load(args)
    field, values = parse_sweep(args.param)
    root = Path(args.out or f"results/{scenario.name}_sweep")
    jobs = []
    for v in values:
        try:
            variant = scenario.with_fsc(**{field: v})
            variant.fsc.order_for(variant.model.n_dof)
        except ValueError as exc:
            raise ScenarioError(f"{field}={v}: {exc}") from None
        jobs.append((variant, root / f"{field}={v}"))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            list(pool.map(_sweep_one, jobs))
    else:
        for job in jobs:
            _sweep_one(job)

    rows = []
    for v, (_, out) in zip(values, jobs):
        err = out / "errors.csv"
        if not err.is_file():
            continue
        lines = err.read_text().splitlines()
        for line in lines[1:]:
            rows.append([str(v)] + line.split(","))
    if rows:
        header = [field] + Path(jobs[0][1] / "errors.csv").read_text().splitlines()[0].split(",")
        write_table(root / "sweep_errors.csv", header, rows)
    print(f"wrote {root}")
    return 0


def cmd_convert(args) -> int:
    record = convert_at2(args.src, args.dst)
    print(f"wrote {args.dst}: {len(record.values)} samples at dt={record.dt:g} s")
    return 0


def cmd_list(args) -> int:
    for name in bundled_scenarios():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsc", description="Flow-driven spectral chaos solver")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", help="scenario file or bundled scenario name")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="override the Monte Carlo seed")
        p.add_argument("--long", action="store_true",
                       help="full durations, quadrature and sample counts instead of desk scale")

    p = sub.add_parser("run", help="run FSC and the scenario's comparison target")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("mc", help="run only the Monte Carlo estimate")
    common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("sweep", help="run FSC over a range of one setting")
    common(p)
    p.add_argument("--param", required=True, help="e.g. P=3..7 or P=3,5")
    p.add_argument("--jobs", type=int, default=1, help="concurrent runs")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("convert-at2", help="convert a PEER .AT2 record to the plain text format")
    p.add_argument("src")
    p.add_argument("dst")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("list", help="list bundled scenarios")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, LookupError, OSError, FloatingPointError) as exc:
        print(f"fsc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
