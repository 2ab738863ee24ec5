"""Binary split of a cluster by a line rotating through its center of gravity.

Each user is folded to an angle ``x`` in [0, pi) with a side sign ``c``: a
line at angle ``x`` through the center puts user i on side 1 exactly when
``(x - x_i) * c_i >= 0``. Rotating the line by pi reproduces the partition
with the sides swapped, so the split cost ``h(x)`` is pi-periodic and
piecewise constant with at most n pieces, one opening at each folded user
angle; evaluating h at one representative angle per piece covers every
distinct line partition with at most n evaluations.

The sweep either scans all candidate angles or, for large clusters whose
measured cost range clears a cutoff, runs the Fibonacci search over the
candidate cycle. The chosen split is then polished by alternating
reassign-to-cheaper-center passes with re-located centers; a pass that would
raise the total cost is rolled back, so h never increases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fibsearch import minimize_periodic_bimodal
from .instance import FIBONACCI_IF_BIMODAL, CostModel, SolverConfig
from .weber import solve_weber

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PolarUser:
    user: int  # index into the cluster arrays given to polar_fold
    d: float
    phi: float  # polar angle about the center, in [0, 2*pi)
    x: float  # folded angle in [0, pi)
    c: int  # +1 if x == phi, -1 if x == phi - pi


@dataclass
class SweepProfile:
    angles: list[float]
    h_values: list[float]
    range_ratio: float
    bimodal: bool
    evaluations: int


@dataclass
class SplitResult:
    s1: np.ndarray  # sorted user indices, side 1
    s2: np.ndarray
    c1: np.ndarray | None  # station locations; None for an empty side
    c2: np.ndarray | None
    g1: float
    g2: float
    h: float
    angle: float
    sweep_evaluations: int = 0
    refined: bool = False

    @property
    def empty_side(self) -> bool:
        return len(self.s1) == 0 or len(self.s2) == 0


def polar_fold(points, center) -> list[PolarUser]:
    """Fold every user to (x, c) about the center; result sorted by x.

    A user exactly at the center gets (x, c) = (0, +1) and therefore always
    lands on side 1; refinement can move it afterwards.
    """
    pts = np.asarray(points, dtype=float)
    out = []
    for i in range(pts.shape[0]):
        dx = pts[i, 0] - center[0]
        dy = pts[i, 1] - center[1]
        d = math.hypot(dx, dy)
        if d == 0.0:
            out.append(PolarUser(i, 0.0, 0.0, 0.0, 1))
            continue
        phi = math.atan2(dy, dx)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:  # guards atan2(-0.0, ..) rounding
            phi -= TWO_PI
        if phi >= math.pi:
            out.append(PolarUser(i, d, phi, phi - math.pi, -1))
        else:
            out.append(PolarUser(i, d, phi, phi, 1))
    out.sort(key=lambda u: (u.x, u.user))
    return out


def split_at_angle(x: float, folded) -> tuple[np.ndarray, np.ndarray]:
    """Partition by the line at angle x: side 1 iff (x - x_i) * c_i >= 0."""
    s1 = sorted(u.user for u in folded if (x - u.x) * u.c >= 0.0)
    s2 = sorted(u.user for u in folded if (x - u.x) * u.c < 0.0)
    return np.array(s1, dtype=int), np.array(s2, dtype=int)


def candidate_angles(folded) -> list[float]:
    """One representative angle per distinct membership piece; at most n.

    A side +1 user enters side 1 exactly AT its folded angle, so that angle
    represents the piece it opens. A side -1 user leaves side 1 just PAST
    its folded angle, so the piece it opens is represented by the midpoint
    to the next distinct folded angle (or to pi). Together these angles
    realize every partition the rotating line can produce.
    """
    xs = sorted({u.x for u in folded})
    following = {x: (xs[i + 1] if i + 1 < len(xs) else math.pi) for i, x in enumerate(xs)}
    reps = {u.x if u.c == 1 else 0.5 * (u.x + following[u.x]) for u in folded}
    return sorted(reps)


def cluster_cost(points, weights, model: CostModel, epsilon: float):
    """Best station location for one cluster and its total link cost."""
    pts = np.asarray(points, dtype=float)
    wts = np.asarray(weights, dtype=float)
    if pts.shape[0] == 0:
        raise ValueError("cluster is empty")
    res = solve_weber(pts, model.effective_weights(wts), epsilon)
    return res.center, res.objective


def _evaluate_split(x, folded, points, weights, model, epsilon) -> SplitResult:
    pts = np.asarray(points, dtype=float)
    wts = np.asarray(weights, dtype=float)
    s1, s2 = split_at_angle(x, folded)
    sides = []
    for s in (s1, s2):
        if len(s) == 0:
            sides.append((None, 0.0, 0.0))
        else:
            center, g = cluster_cost(pts[s], wts[s], model, epsilon)
            sides.append((center, g, float(wts[s].sum())))
    (cen1, g1, w1), (cen2, g2, w2) = sides
    # fsum: the total is exactly rounded, hence independent of side order
    h = math.fsum((model.es_cost(w1), g1, model.es_cost(w2), g2))
    return SplitResult(s1, s2, cen1, cen2, g1, g2, h, float(x))


def split_cost(x, folded, points, weights, model: CostModel, epsilon: float) -> float:
    """Two-station cost of the partition at angle x (station + link costs).

    An empty side still pays the fixed station cost, which keeps one-sided
    candidates comparable but never attractive when splitting helps.
    """
    return _evaluate_split(x, folded, points, weights, model, epsilon).h


def sweep_minimize(folded, points, weights, model: CostModel, config: SolverConfig):
    """Find the candidate angle minimizing the split cost.

    Full-scan mode evaluates every distinct candidate. The Fibonacci mode
    first probes 8 evenly spaced candidates; if the estimated cost range is
    at least ``bimodal_range_cutoff`` and the cluster has at least
    ``bimodal_n_cutoff`` users, the minimum is located by the logarithmic
    search over the candidate cycle, otherwise it falls back to the scan.
    Returns (angle, SweepProfile over the evaluated candidates).
    """
    if len(folded) < 2:
        raise ValueError("need a cluster of at least 2 users")
    candidates = candidate_angles(folded)
    m = len(candidates)

    memo: dict[int, float] = {}

    def h_at(idx: int) -> float:
        if idx not in memo:
            memo[idx] = split_cost(candidates[idx], folded, points, weights, model, config.epsilon)
        return memo[idx]

    use_fib = False
    if config.sweep_strategy == FIBONACCI_IF_BIMODAL and len(folded) >= config.bimodal_n_cutoff and m >= 2:
        coarse = sorted({(j * m) // 8 for j in range(8)})
        coarse_vals = [h_at(i) for i in coarse]
        lo = min(coarse_vals)
        if lo > 0 and (max(coarse_vals) - lo) / lo >= config.bimodal_range_cutoff:
            use_fib = True

    if use_fib:
        result = minimize_periodic_bimodal(h_at, m, seed=config.rng_seed)
        best_idx = result.argmin_index
        if memo[best_idx] > min(memo.values()):  # coarse probe saw better
            best_idx = min(memo, key=lambda i: (memo[i], i))
        evaluated = sorted(memo)
        h_values = [memo[i] for i in evaluated]
        profile = SweepProfile(
            angles=[candidates[i] for i in evaluated],
            h_values=h_values,
            range_ratio=range_ratio(h_values) if min(h_values) > 0 else 0.0,
            bimodal=True,  # the gate's working assumption; not re-verified
            evaluations=len(memo),
        )
        return candidates[best_idx], profile

    h_values = [h_at(i) for i in range(m)]
    best_idx = int(np.argmin(h_values))  # first occurrence on ties
    profile = SweepProfile(
        angles=list(candidates),
        h_values=h_values,
        range_ratio=range_ratio(h_values) if min(h_values) > 0 else 0.0,
        bimodal=is_circular_bimodal(h_values),
        evaluations=len(memo),
    )
    return candidates[best_idx], profile


def refine(split: SplitResult, points, weights, model: CostModel, epsilon: float, max_passes: int = 50) -> SplitResult:
    """Alternate reassignment and relocation until a fixed point.

    Each pass moves every user whose own-side link cost strictly exceeds its
    cost to the other center (ties stay), then re-solves both centers. A pass
    that empties a side, or that would increase h, is discarded and the
    previous split is returned, so h is non-increasing across passes.
    """
    if split.empty_side:
        return split
    pts = np.asarray(points, dtype=float)
    eff = model.effective_weights(np.asarray(weights, dtype=float))
    wts = np.asarray(weights, dtype=float)
    current = split
    for _ in range(max_passes):
        cost1 = eff * np.hypot(pts[:, 0] - current.c1[0], pts[:, 1] - current.c1[1])
        cost2 = eff * np.hypot(pts[:, 0] - current.c2[0], pts[:, 1] - current.c2[1])
        side = np.ones(pts.shape[0], dtype=int)
        side[current.s2] = 2
        move_to_2 = (side == 1) & (cost1 > cost2)
        move_to_1 = (side == 2) & (cost2 > cost1)
        if not move_to_2.any() and not move_to_1.any():
            current.refined = True
            return current
        side[move_to_2] = 2
        side[move_to_1] = 1
        s1 = np.flatnonzero(side == 1)
        s2 = np.flatnonzero(side == 2)
        if len(s1) == 0 or len(s2) == 0:
            current.refined = True
            return current
        cen1, g1 = cluster_cost(pts[s1], wts[s1], model, epsilon)
        cen2, g2 = cluster_cost(pts[s2], wts[s2], model, epsilon)
        h = math.fsum(
            (model.es_cost(float(wts[s1].sum())), g1, model.es_cost(float(wts[s2].sum())), g2)
        )
        if h > current.h:
            # station-cost changes outweighed the link gain: keep the old split
            current.refined = True
            return current
        current = SplitResult(
            s1, s2, cen1, cen2, g1, g2, h, current.angle,
            sweep_evaluations=current.sweep_evaluations,
        )
    current.refined = False  # pass budget exhausted with moves still pending
    return current


def bipartition_cluster(points, weights, model: CostModel, config: SolverConfig) -> SplitResult:
    """Full split pipeline: locate center, fold, sweep, then refine.

    The result's cost is never above the best swept candidate. A result with
    an empty side means no line split was attractive; callers treat the
    cluster as not worth splitting.
    """
    pts = np.asarray(points, dtype=float)
    wts = np.asarray(weights, dtype=float)
    if pts.shape[0] < 2:
        raise ValueError("cannot bipartition a cluster of fewer than 2 users")
    center0 = solve_weber(pts, model.effective_weights(wts), config.epsilon).center
    folded = polar_fold(pts, center0)
    angle, profile = sweep_minimize(folded, pts, wts, model, config)
    split = _evaluate_split(angle, folded, pts, wts, model, config.epsilon)
    split.sweep_evaluations = profile.evaluations
    if split.empty_side:
        split.refined = True
        return split
    return refine(split, pts, wts, model, config.epsilon, config.refine_max_passes)


def range_ratio(h_values) -> float:
    """(max - min) / min of a cost profile; requires a positive minimum."""
    if len(h_values) == 0:
        raise ValueError("empty profile")
    lo = min(h_values)
    if lo <= 0:
        raise ValueError("range ratio needs a positive minimum")
    return (max(h_values) - lo) / lo


def is_circular_bimodal(values) -> bool:
    """True iff the cyclic sequence has exactly one local minimum.

    Adjacent equal values are merged first, so a plateau counts as a single
    extremum; an all-equal sequence is bimodal by convention.
    """
    vals = list(values)
    if not vals:
        raise ValueError("empty sequence")
    runs = [vals[0]]
    for v in vals[1:]:
        if v != runs[-1]:
            runs.append(v)
    if len(runs) > 1 and runs[-1] == runs[0]:
        runs.pop()
    k = len(runs)
    if k <= 2:
        return True
    minima = sum(
        1 for i in range(k) if runs[i] < runs[i - 1] and runs[i] < runs[(i + 1) % k]
    )
    return minima == 1
