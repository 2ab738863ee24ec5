"""Optimal single-station location among weighted users.

The station location minimizing ``F(p) = sum_i w_i * dist(P_i, p)`` is found
by the classic fixed-point iteration: from the weighted centroid, repeatedly
replace the iterate by the distance-weighted mean of the user positions until
successive iterates move less than ``epsilon``.

F is convex but non-smooth at the user locations, so two refinements make the
stopping rule trustworthy:

* interior stops additionally require a small gradient, which is free via the
  map identity ``grad F(p) = (p - T(p)) * sum(w_i / R_i)``; the step criterion
  alone fires spuriously while the iterate escapes a nearly-optimal vertex,
  where progress per step is a vanishing fraction of the remaining distance;
* at a vertex P_k the exact first-order condition is that the pull of the
  other users, ``s = sum_{i != k} w_i (P_k - P_i) / R_i``, satisfies
  ``|s| <= w_k``. The iteration checks it periodically to accept a dominated
  vertex early, or to jump out of a stalled creep along the certified
  descent direction (backtracking keeps the objective monotone).

When the iteration does converge onto a user, the solver removes it,
re-solves on the remaining users and either confirms the point (the reduced
solution returns to it, or the vertex test passes) or resumes descending.
The per-iteration work runs in compiled kernels; one solve is a handful of
kernel calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

DEFAULT_MAX_ITERATIONS = 10_000

_SNAP_PERIOD = 64
_GRAD_SAFETY = 0.01


@dataclass
class WeberResult:
    center: np.ndarray
    objective: float
    iterations: int
    removed_user: int | None = None  # index into the input arrays, if the
    # optimum coincides with a user
    converged: bool = True
    trace: list[list[float]] | None = None  # per-phase objective values


def _as_arrays(points, weights):
    pts = np.asarray(points, dtype=float)
    wts = np.asarray(weights, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"points must have shape (n, 2), got {pts.shape}")
    if wts.shape != (pts.shape[0],):
        raise ValueError("weights must be a vector matching points")
    if pts.shape[0] < 1:
        raise ValueError("need at least one user")
    if not np.all(wts > 0):
        raise ValueError("weights must be positive")
    return pts, wts


def centroid_seed(points, weights) -> np.ndarray:
    """Weighted arithmetic mean of the user positions (iteration start)."""
    pts, wts = _as_arrays(points, weights)
    return (wts[:, None] * pts).sum(axis=0) / wts.sum()


def weber_objective(points, weights, p) -> float:
    """Total weighted distance from all users to p."""
    pts = np.asarray(points, dtype=float)
    wts = np.asarray(weights, dtype=float)
    d = np.hypot(pts[:, 0] - p[0], pts[:, 1] - p[1])
    return float(wts @ d)


def weber_gradient(points, weights, p) -> np.ndarray:
    """Gradient of the objective at p; undefined on a user location."""
    pts = np.asarray(points, dtype=float)
    wts = np.asarray(weights, dtype=float)
    dx = p[0] - pts[:, 0]
    dy = p[1] - pts[:, 1]
    d = np.hypot(dx, dy)
    if np.any(d == 0.0):
        raise ValueError("gradient undefined at a user location")
    scale = wts / d
    return np.array([scale @ dx, scale @ dy])


def weiszfeld_map(points, weights, p) -> np.ndarray:
    """One fixed-point step: distance-weighted mean of the user positions.

    Raises if p coincides exactly with a user; the solver handles that case
    separately.
    """
    pts = np.asarray(points, dtype=float)
    wts = np.asarray(weights, dtype=float)
    d = np.hypot(pts[:, 0] - p[0], pts[:, 1] - p[1])
    if np.any(d == 0.0):
        raise ValueError("iterate coincides exactly with a user")
    inv = wts / d
    total = inv.sum()
    return np.array([(inv @ pts[:, 0]) / total, (inv @ pts[:, 1]) / total])


@njit(cache=True)
def _objective_nb(px, py, w, x, y):
    total = 0.0
    for i in range(px.shape[0]):
        total += w[i] * math.hypot(px[i] - x, py[i] - y)
    return total


@njit(cache=True)
def _vertex_nb(px, py, w, cx, cy, epsilon):
    """Exact optimality test at (cx, cy); users within epsilon form the kink.

    Returns (optimal, descent_x, descent_y); the direction is the normalized
    negative pull, meaningful only when not optimal.
    """
    kink = 0.0
    sx = 0.0
    sy = 0.0
    for i in range(px.shape[0]):
        dx = cx - px[i]
        dy = cy - py[i]
        d = math.hypot(dx, dy)
        if d <= epsilon:
            kink += w[i]
        else:
            sx += w[i] * dx / d
            sy += w[i] * dy / d
    pull = math.hypot(sx, sy)
    if pull <= kink:
        return True, 0.0, 0.0
    return False, -sx / pull, -sy / pull


@njit(cache=True)
def _descend_nb(px, py, w, x, y, epsilon, budget, want_trace, trace):
    """Run the fixed-point iteration from (x, y).

    Returns (x, y, iterations_used, converged_flag, trace_length). Stops on
    an exact user hit, on a step <= epsilon with a small implied gradient,
    or on a periodic vertex certificate; a stalled creep next to a dominated
    vertex is broken by a backtracked jump along the certified direction.
    """
    n = px.shape[0]
    wsum = 0.0
    for i in range(n):
        wsum += w[i]
    gtol = _GRAD_SAFETY * math.sqrt(epsilon) * wsum
    tlen = 0
    if want_trace:
        trace[tlen] = _objective_nb(px, py, w, x, y)
        tlen += 1
    used = 0
    step = math.inf
    while used < budget:
        dmin = math.inf
        d2 = math.inf
        jmin = -1
        exact = False
        for i in range(n):
            di = math.hypot(px[i] - x, py[i] - y)
            if di == 0.0:
                exact = True
            if di < dmin:
                d2 = dmin
                dmin = di
                jmin = i
            elif di < d2:
                d2 = di
        if exact:
            return x, y, used, 1, tlen
        if used % _SNAP_PERIOD == _SNAP_PERIOD - 1:
            optimal, ddx, ddy = _vertex_nb(px, py, w, px[jmin], py[jmin], epsilon)
            if optimal:
                x = px[jmin]
                y = py[jmin]
                if want_trace:
                    trace[tlen] = _objective_nb(px, py, w, x, y)
                    tlen += 1
                return x, y, used, 1, tlen
            if step <= dmin:
                # creeping near a dominated vertex (progress per step is a
                # vanishing fraction of the remaining distance); jump out,
                # backtracking so the objective still drops
                f_here = _objective_nb(px, py, w, x, y)
                t = d2 / 2.0
                if not math.isfinite(t) or t < _SNAP_PERIOD * epsilon:
                    t = _SNAP_PERIOD * epsilon
                for _ in range(24):
                    candx = px[jmin] + t * ddx
                    candy = py[jmin] + t * ddy
                    f_cand = _objective_nb(px, py, w, candx, candy)
                    if f_cand < f_here:
                        x = candx
                        y = candy
                        if want_trace:
                            trace[tlen] = f_cand
                            tlen += 1
                        break
                    t /= 2.0
            used += 1  # the certificate counts as an iteration's work
            step = math.inf
            continue
        sx = 0.0
        sy = 0.0
        total = 0.0
        for i in range(n):
            di = math.hypot(px[i] - x, py[i] - y)
            inv = w[i] / di
            total += inv
            sx += inv * px[i]
            sy += inv * py[i]
        qx = sx / total
        qy = sy / total
        used += 1
        if want_trace:
            trace[tlen] = _objective_nb(px, py, w, qx, qy)
            tlen += 1
        step = math.hypot(qx - x, qy - y)
        x = qx
        y = qy
        if step <= epsilon and step * total <= gtol:
            return x, y, used, 1, tlen
    return x, y, used, 0, tlen


_NO_TRACE = np.empty(1)


def _descend(pts, wts, start, epsilon, budget, sink):
    px = np.ascontiguousarray(pts[:, 0])
    py = np.ascontiguousarray(pts[:, 1])
    want = sink is not None
    trace = np.empty(budget + 2) if want else _NO_TRACE
    x, y, used, ok, tlen = _descend_nb(
        px, py, wts, float(start[0]), float(start[1]), epsilon, budget, want, trace
    )
    if want:
        sink.extend(trace[:tlen].tolist())
    return np.array([x, y]), used, bool(ok)


def _vertex_test(pts, wts, c, epsilon):
    """(is_optimal, unit descent direction or None) at candidate vertex c."""
    optimal, dx, dy = _vertex_nb(
        np.ascontiguousarray(pts[:, 0]),
        np.ascontiguousarray(pts[:, 1]),
        wts,
        float(c[0]),
        float(c[1]),
        epsilon,
    )
    return (True, None) if optimal else (False, np.array([dx, dy]))


def solve_weber(
    points,
    weights,
    epsilon: float = 1e-7,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    collect_trace: bool = False,
) -> WeberResult:
    """Locate the cost-minimizing station for one cluster of users.

    The returned objective is always evaluated over the full input set, even
    when the solution coincides with a user (that user contributes zero).
    ``removed_user`` reports the index of the coinciding user, if any.
    """
    if not (epsilon > 0):
        raise ValueError("epsilon must be > 0")
    pts, wts = _as_arrays(points, weights)
    n = pts.shape[0]
    trace: list[list[float]] | None = [] if collect_trace else None

    if n == 1:
        return WeberResult(pts[0].copy(), 0.0, 0, None, True, trace)

    def finish(center, removed, iters, converged=True):
        return WeberResult(
            np.asarray(center, dtype=float).copy(),
            weber_objective(pts, wts, center),
            iters,
            removed,
            converged,
            trace,
        )

    active = np.ones(n, dtype=bool)
    p = centroid_seed(pts, wts)
    flag = 0
    pnt = -1
    removed_once: set[int] = set()
    budget = max_iterations
    iterations = 0

    while budget > 0:
        idx = np.flatnonzero(active)
        phase: list[float] | None = [] if collect_trace else None
        sp, used, ok = _descend(pts[idx], wts[idx], p, epsilon, budget, phase)
        iterations += used
        budget -= max(used, 1)  # probes and restarts also consume budget
        if collect_trace:
            trace.append(phase)
        if not ok:
            return finish(sp, None, iterations, converged=False)

        d = np.hypot(pts[idx, 0] - sp[0], pts[idx, 1] - sp[1])
        near = int(np.argmin(d))
        if d[near] <= epsilon:
            k = int(idx[near])
            if flag == 0:
                optimal, direction = _vertex_test(pts, wts, pts[k], epsilon)
                if optimal:
                    # the coinciding user passes the exact optimality test;
                    # no need to remove it and re-solve
                    return finish(pts[k], k, iterations)
                if k not in removed_once:
                    pnt = k
                    active[k] = False
                    removed_once.add(k)
                    flag = -1
                    p = sp
                    continue
                p = pts[k] + epsilon * direction
                continue
            # flag == -1: the reduced problem landed on a different user
            active[pnt] = True
            flag = 0
            optimal, direction = _vertex_test(pts, wts, pts[k], epsilon)
            if optimal:
                return finish(pts[k], k, iterations)
            removed_once.add(k)
            p = pts[k] + epsilon * direction
            continue

        # sp is clear of every active user
        if flag == 0:
            return finish(sp, None, iterations)
        # flag == -1: did the reduced problem come back to the removed point?
        old_sp = pts[pnt]
        active[pnt] = True
        flag = 0
        if math.hypot(sp[0] - old_sp[0], sp[1] - old_sp[1]) <= epsilon:
            return finish(old_sp, pnt, iterations)
        optimal, direction = _vertex_test(pts, wts, old_sp, epsilon)
        if optimal:
            return finish(old_sp, pnt, iterations)
        p = sp
        # keep iterating on the full set from the reduced solution

    return finish(p, None, iterations, converged=False)
