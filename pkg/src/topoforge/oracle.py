"""Brute-force baselines for tests and the oracle-check command.

Everything here trades time for certainty: exhaustive enumeration of all
two-way clusterings, full scans, and grid search for the station location.
All oracles are deterministic for fixed inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .instance import CostModel
from .weber import solve_weber

EXHAUSTIVE_CAP = 16


@dataclass
class OracleReport:
    best_value: float
    best_witness: object
    enumerated: int


def exhaustive_bipartition(points, weights, model: CostModel, epsilon: float) -> OracleReport:
    """Try every unordered two-way clustering (2**(n-1) - 1 of them).

    Station locations on each side come from the same iterative solver as the
    heuristic; this oracle pins down the partition choice, while grid_weber
    independently audits locations.
    """
    pts = np.asarray(points, dtype=float)
    wts = np.asarray(weights, dtype=float)
    n = pts.shape[0]
    if n < 2:
        raise ValueError("need at least 2 users")
    if n > EXHAUSTIVE_CAP:
        raise ValueError(f"n={n} above the exhaustive cap {EXHAUSTIVE_CAP}")
    eff = model.effective_weights(wts)

    def side_cost(index_tuple):
        s = np.array(index_tuple, dtype=int)
        g = solve_weber(pts[s], eff[s], epsilon).objective
        return g, model.es_cost(float(wts[s].sum()))

    best_value = None
    best_witness = None
    count = 0
    # user 0 stays on side 1, so each unordered pair appears exactly once;
    # fsum makes the total independent of the side order
    for mask in range(1, 1 << (n - 1)):
        s2 = tuple(i + 1 for i in range(n - 1) if mask >> i & 1)
        s1 = tuple(i for i in range(n) if i not in s2)
        value = math.fsum(side_cost(s1) + side_cost(s2))
        count += 1
        if best_value is None or value < best_value:
            best_value = value
            best_witness = (s1, s2)
    return OracleReport(best_value, best_witness, count)


def nearest_center_assignment(points, weights, centers, model: CostModel) -> np.ndarray:
    """Index of the cheapest-link center for every user; ties to the lowest."""
    pts = np.asarray(points, dtype=float)
    eff = model.effective_weights(np.asarray(weights, dtype=float))
    cen = np.asarray(centers, dtype=float)
    if cen.ndim != 2 or cen.shape[0] < 1:
        raise ValueError("need at least one center")
    d = np.hypot(pts[:, None, 0] - cen[None, :, 0], pts[:, None, 1] - cen[None, :, 1])
    return np.argmin(eff[:, None] * d, axis=1)


def full_scan_min(values) -> tuple[int, float]:
    """(index, value) of the first-occurring minimum."""
    vals = list(values)
    if not vals:
        raise ValueError("empty list")
    best_i = 0
    for i, v in enumerate(vals):
        if v < vals[best_i]:
            best_i = i
    return best_i, vals[best_i]


def enumerate_line_partitions(folded) -> list[tuple[tuple, tuple]]:
    """All distinct partitions a center line can produce, by direct sweep.

    Reimplements the piece structure on its own: side +1 membership starts
    AT the folded angle, side -1 membership ends just past it, so the sweep
    visits each folded angle and a point inside the gap that follows it.
    Deduplicated as unordered pairs; at most n remain.
    """
    xs = sorted({u.x for u in folded})
    probes = []
    for i, x in enumerate(xs):
        upper = xs[i + 1] if i + 1 < len(xs) else math.pi
        probes += [x, 0.5 * (x + upper)]
    seen = set()
    out = []
    for x in probes:
        s1 = tuple(sorted(u.user for u in folded if (x - u.x) * u.c >= 0.0))
        s2 = tuple(sorted(u.user for u in folded if (x - u.x) * u.c < 0.0))
        key = (s1, s2) if s1 <= s2 else (s2, s1)
        if key not in seen:
            seen.add(key)
            out.append((s1, s2))
    return out


def grid_weber(points, weights, bounds, resolution: int = 200, refinements: int = 2):
    """Station location by grid search, recentering the grid around the best
    point after each pass. Returns (point, value); the value can only improve
    across refinements. Independent of the iterative solver by construction.
    """
    pts = np.asarray(points, dtype=float)
    wts = np.asarray(weights, dtype=float)
    xmin, ymin, xmax, ymax = map(float, bounds)
    if not (xmax > xmin and ymax > ymin):
        raise ValueError(f"degenerate bounds {bounds}")
    if (
        pts[:, 0].min() < xmin
        or pts[:, 0].max() > xmax
        or pts[:, 1].min() < ymin
        or pts[:, 1].max() > ymax
    ):
        raise ValueError("bounds must contain all users")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")

    best_point = None
    best_value = np.inf
    for _ in range(refinements + 1):
        xs = np.linspace(xmin, xmax, resolution)
        ys = np.linspace(ymin, ymax, resolution)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        values = np.zeros_like(gx)
        for i in range(pts.shape[0]):
            values += wts[i] * np.hypot(gx - pts[i, 0], gy - pts[i, 1])
        flat = int(np.argmin(values))
        value = float(values.flat[flat])
        point = np.array([gx.flat[flat], gy.flat[flat]])
        if value < best_value:
            best_value = value
            best_point = point
        half_x = 2.0 * (xs[1] - xs[0])
        half_y = 2.0 * (ys[1] - ys[0])
        xmin, xmax = best_point[0] - half_x, best_point[0] + half_x
        ymin, ymax = best_point[1] - half_y, best_point[1] + half_y
    return best_point, best_value
