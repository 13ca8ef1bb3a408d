"""Run a scenario end to end and write its artifacts.

Files written to the output directory:

``moments_fsc.csv``
    ``t, mean_<q>, var_<q>, ...`` for q in u1.., v1..
``moments_exact.csv`` / ``moments_mc.csv``
    the comparison target in the same layout
``errors.csv``
    time-averaged and peak absolute error of every moment history
``plot_data.csv`` and ``plot_moments.py``
    long-format table and a small script that plots it
``run.json``
    configuration, versions, seeds and timings

CSV numbers carry 17 significant digits and every CSV is a pure function of
the scenario and seed.
"""
from __future__ import annotations

import json
import platform
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .integrate import TimeGrid
from .models import ForcedSDOF, FreeSDOF
from .scenario import Scenario
from .scheme import run_fsc
from .series import MomentSeries
from .validate import ExactSDOFReference, errors, exact_series, forced_sdof_reference, monte_carlo

STATISTICS = ("mean", "var")

PLOT_SCRIPT = '''"""Plot moment histories from plot_data.csv (needs pandas and matplotlib)."""
import sys

import matplotlib.pyplot as plt
import pandas as pd

data = pd.read_csv(sys.argv[1] if len(sys.argv) > 1 else "plot_data.csv")
quantity = sys.argv[2] if len(sys.argv) > 2 else "u1"
sel = data[data.quantity == quantity]
fig, axes = plt.subplots(2, 1, sharex=True)
for ax, stat in zip(axes, ("mean", "var")):
    for source, grp in sel[sel.statistic == stat].groupby("source"):
        ax.plot(grp.t, grp.value, label=source)
    ax.set_ylabel(f"{stat} {quantity}")
    ax.legend()
axes[-1].set_xlabel("t [s]")
plt.show()
'''


def fmt(x: float) -> str:
    return f"{x:.17g}"


def write_table(path: Path, header: list[str], rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


def write_moments(path: Path, series: MomentSeries):
    header, table = series.columns()
    write_table(path, header, table.tolist())


def write_plot_data(path: Path, sources: dict[str, MomentSeries]):
    with open(path, "w") as fh:
        fh.write("source,quantity,statistic,t,value\n")
        for source, series in sources.items():
            for q, name in enumerate(series.names):
                for stat, arr in (("mean", series.mean[q]), ("var", series.var[q])):
                    for t, val in zip(series.times.tolist(), arr.tolist()):
                        fh.write(f"{source},{name},{stat},{fmt(t)},{fmt(val)}\n")


def reference(scenario: Scenario, time_grid: TimeGrid):
    """Comparison series for the scenario's target, or None; also returns run metadata."""
    model, domain = scenario.model, scenario.domain
    if scenario.target == "exact":
        if isinstance(model, FreeSDOF):
            return "exact", exact_series(ExactSDOFReference.from_model(model, domain), time_grid.times), {
                "method": "closed form"}
        if isinstance(model, ForcedSDOF):
            n_points = scenario.reference_points or 4 * max(scenario.points)
            return "exact", forced_sdof_reference(model, domain, time_grid.times, n_points), {
                "method": "quadrature in k", "points": n_points}
        raise ValueError(f"no exact reference for {model.name}")
    if scenario.target == "monte_carlo":
        mc = monte_carlo(model, domain, scenario.samples, scenario.seed, time_grid)
        return "mc", mc.moments, {"method": "monte carlo", "samples": mc.n,
                                  "excluded": mc.n_excluded, "seed": mc.seed}
    return None, None, {}


def error_rows(fsc: MomentSeries, ref: MomentSeries, tg: TimeGrid, n_samples: int | None = None):
    rows = []
    for name in fsc.names:
        for stat in STATISTICS:
            a = getattr(fsc, f"{stat}_of")(name)
            b = getattr(ref, f"{stat}_of")(name)
            rep = errors(a, b, tg)
            row = [name, stat, rep.global_, float(rep.local.max())]
            if n_samples:
                # CLT half-width (5 standard errors) for sampled means
                band = 5.0 * np.sqrt(fsc.var_of(name).max() / n_samples) if stat == "mean" else float("nan")
                row.append(float(band))
            rows.append(row)
    return rows


def run_scenario(scenario: Scenario, out: Path, mc_only: bool = False) -> dict:
    """Execute ``scenario`` and write artifacts to ``out``; returns the manifest."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    tg = scenario.fsc.time_grid
    timings = {}
    sources = {}
    manifest = {
        "scenario": scenario.name,
        "source": scenario.source,
        "long": scenario.long,
        "tables": scenario.tables,
        "fsc": asdict(scenario.fsc),
        "quadrature_points": list(scenario.points),
        "target": scenario.target,
        "seed": scenario.seed,
        "versions": {"fsc": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": sys.version.split()[0], "platform": platform.platform()},
    }

    fsc = None
    if not mc_only:
        t0 = time.perf_counter()
        grid = scenario.grid()
        result = run_fsc(scenario.model, grid, scenario.fsc)
        timings["fsc"] = time.perf_counter() - t0
        fsc = result.moments
        write_moments(out / "moments_fsc.csv", fsc)
        sources["fsc"] = fsc
        manifest["basis_sizes"] = result.basis_sizes
        manifest["degenerate_updates"] = result.degenerate_updates
        manifest["quadrature_nodes"] = grid.Q

    if mc_only:
        if scenario.samples < 2:
            raise ValueError("scenario has no Monte Carlo sample count ([compare] samples)")
        t0 = time.perf_counter()
        mc = monte_carlo(scenario.model, scenario.domain, scenario.samples, scenario.seed, tg)
        timings["mc"] = time.perf_counter() - t0
        label, ref, meta = "mc", mc.moments, {"method": "monte carlo", "samples": mc.n,
                                              "excluded": mc.n_excluded, "seed": mc.seed}
    else:
        t0 = time.perf_counter()
        label, ref, meta = reference(scenario, tg)
        if label is not None:
            timings[label] = time.perf_counter() - t0
    manifest["reference"] = meta

    if ref is not None:
        write_moments(out / f"moments_{label}.csv", ref)
        sources[label] = ref
    if fsc is not None and ref is not None:
        n = meta.get("samples") if label == "mc" else None
        header = ["quantity", "statistic", "eps_global", "max_abs"]
        if n:
            header.append("clt_band")
        write_table(out / "errors.csv", header, error_rows(fsc, ref, tg, n))

    if sources and ref is not None:
        write_plot_data(out / "plot_data.csv", sources)
        (out / "plot_moments.py").write_text(PLOT_SCRIPT)
    manifest["timings_s"] = timings
    (out / "run.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return manifest
