"""Measurement harnesses: sweep-profile statistics and pipeline scaling.

The bimodality study measures, over seeded random instances, how often the
full sweep profile h(x) is circularly bimodal among trials whose cost range
clears the configured cutoff. The scaling study times the end-to-end solve
over a ladder of instance sizes and fits a log-log slope. Both report
objects are deterministic in content for a fixed master seed (timings aside);
per-trial seeds come from a fixed affine rule so results do not depend on
execution order.
"""

from __future__ import annotations

import dataclasses
import math
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .bipartition import polar_fold, sweep_minimize
from .instance import FULL_SCAN, CostModel, SolverConfig, Thresholds, generate_instance
from .tree import solve_topology
from .weber import solve_weber

_SEED_STRIDE = 1_000_003


def derive_seed(master: int, index: int) -> int:
    return (master * _SEED_STRIDE + index) % (1 << 63)


@dataclass
class BimodalityTrial:
    seed: int
    n: int
    range_ratio: float
    bimodal: bool


@dataclass
class BimodalityReport:
    trials: int
    n_per_trial: int
    range_cutoff: float
    fraction_bimodal_given_range: float
    mean_range: float
    rows: list[BimodalityTrial]

    def summary(self) -> dict:
        return {
            "trials": self.trials,
            "n_per_trial": self.n_per_trial,
            "range_cutoff": self.range_cutoff,
            "fraction_bimodal_given_range": self.fraction_bimodal_given_range,
            "mean_range": self.mean_range,
        }

    def csv_rows(self):
        header = ["seed", "n", "range_ratio", "bimodal"]
        rows = [[r.seed, r.n, repr(r.range_ratio), int(r.bimodal)] for r in self.rows]
        return header, rows


def run_bimodality_study(
    trials: int,
    n: int,
    model: CostModel | None = None,
    config: SolverConfig | None = None,
    seed: int = 0,
    instance_factory=None,
) -> BimodalityReport:
    """Classify the full sweep profile of seeded random instances.

    ``instance_factory(n, seed)`` replaces the uniform generator when a
    specific instance family is under study.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 2:
        raise ValueError("n must be >= 2")
    model = model or CostModel()
    config = config or SolverConfig()
    factory = instance_factory or generate_instance
    scan_config = dataclasses.replace(config, sweep_strategy=FULL_SCAN)
    rows = []
    for t in range(trials):
        trial_seed = derive_seed(seed, t)
        inst = factory(n, trial_seed)
        center = solve_weber(inst.coords, model.effective_weights(inst.weights), config.epsilon).center
        folded = polar_fold(inst.coords, center)
        _, profile = sweep_minimize(folded, inst.coords, inst.weights, model, scan_config)
        rows.append(BimodalityTrial(trial_seed, n, profile.range_ratio, profile.bimodal))
    eligible = [r for r in rows if r.range_ratio >= config.bimodal_range_cutoff]
    fraction = (
        sum(1 for r in eligible if r.bimodal) / len(eligible) if eligible else 0.0
    )
    mean_range = sum(r.range_ratio for r in rows) / len(rows)
    return BimodalityReport(trials, n, config.bimodal_range_cutoff, fraction, mean_range, rows)


@dataclass
class ScalingRow:
    n: int
    seed: int
    median_seconds: float
    times: list[float]


@dataclass
class ScalingReport:
    sizes: list[int]
    wall_times: list[float]  # per-size medians, seconds
    fitted_exponent: float
    repeats: int
    rows: list[ScalingRow]

    def summary(self) -> dict:
        exponent = self.fitted_exponent if math.isfinite(self.fitted_exponent) else None
        return {
            "sizes": self.sizes,
            "wall_times": self.wall_times,
            "fitted_exponent": exponent,  # None when a single size was timed
            "repeats": self.repeats,
        }

    def csv_rows(self):
        header = ["n", "seed", "median_seconds"]
        rows = [[r.n, r.seed, repr(r.median_seconds)] for r in self.rows]
        return header, rows


def run_scaling_study(
    sizes,
    repeats: int,
    model: CostModel | None = None,
    config: SolverConfig | None = None,
    thresholds: Thresholds | None = None,
    seed: int = 0,
) -> ScalingReport:
    """Median end-to-end solve time per size, plus the log-log slope.

    One untimed warm-up solve per size is discarded; the exponent comes from
    a least-squares fit of log(median time) against log(n).
    """
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ValueError("sizes must be nonempty")
    if sorted(sizes) != sizes or len(set(sizes)) != len(sizes):
        raise ValueError("sizes must be strictly increasing")
    if repeats < 3:
        raise ValueError("repeats must be >= 3")
    model = model or CostModel()
    config = config or SolverConfig()
    thresholds = thresholds or Thresholds()
    rows = []
    for i, n in enumerate(sizes):
        size_seed = derive_seed(seed, i)
        inst = generate_instance(n, size_seed)
        solve_topology(inst, model, config, thresholds)  # warm-up
        times = []
        for _ in range(repeats):
            start = time.perf_counter()
            solve_topology(inst, model, config, thresholds)
            times.append(time.perf_counter() - start)
        rows.append(ScalingRow(n, size_seed, statistics.median(times), times))
    medians = [r.median_seconds for r in rows]
    if len(sizes) >= 2:
        slope = float(np.polyfit(np.log(sizes), np.log(medians), 1)[0])
    else:
        slope = float("nan")
    return ScalingReport(sizes, medians, slope, repeats, rows)
