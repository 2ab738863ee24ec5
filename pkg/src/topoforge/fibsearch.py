"""Fibonacci bracketing search on a periodic, circularly bimodal sequence.

Given an evaluator ``g`` over ``M`` cyclic points whose one-period profile has
a single local minimum and a single local maximum (plateaus merged), the
search finds the global minimum in Theta(log M) evaluations instead of M.

The bracket starts as one full period anchored at a random point: two probes
split it at consecutive Fibonacci offsets, each comparison discards the outer
piece next to the worse probe, the surviving probe is reused, and exactly one
new evaluation is made per step. Bracket widths run down the Fibonacci
sequence until the interval of uncertainty is a single point.

When M is not a Fibonacci number the search runs on the next Fibonacci size
over the M-periodic extension of ``g``; probe indices are reduced mod M, so
no padding values are invented. Values at repeated residues are cached and
counted once.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass


@dataclass
class SearchResult:
    argmin_index: int  # in [0, M)
    min_value: float
    evaluations: int


def fibonacci(k: int) -> int:
    """k-th Fibonacci number with F(1) = F(2) = 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a, b = 1, 1
    for _ in range(k - 2):
        a, b = b, a + b
    return b if k > 1 else a


def _fib_table(n: int) -> list[int]:
    table = [0] * (n + 1)  # 1-indexed; table[0] unused
    for k in range(1, n + 1):
        table[k] = table[k - 1] + table[k - 2] if k > 2 else 1
    return table


def pad_to_fibonacci(m: int) -> tuple[int, int]:
    """Smallest (n, F_n) with F_n >= m."""
    if m < 1:
        raise ValueError("domain size must be >= 1")
    n, fib = 1, 1
    prev = 1
    while fib < m:
        n += 1
        if n <= 2:
            fib = 1
        else:
            prev, fib = fib, fib + prev
    return n, fib


def minimize_periodic_bimodal(g, m: int, seed: int = 0) -> SearchResult:
    """Minimize g over the cycle {0, .., m-1}.

    For a circularly bimodal sequence the result is the exact global minimum;
    for anything else it is some local minimum (documented behavior, not an
    error). Ties g(L) == g(R) discard the left piece.
    """
    if m < 1:
        raise ValueError("domain size must be >= 1")
    n, f_n = pad_to_fibonacci(m)
    fib = _fib_table(max(n, 3))

    cache: dict[int, float] = {}

    def ev(i: int) -> float:
        r = i % m
        if r not in cache:
            v = float(g(r))
            if math.isnan(v):
                raise ValueError(f"evaluator returned NaN at index {r}")
            cache[r] = v
        return cache[r]

    if f_n == 1:
        v = ev(0)
        return SearchResult(0, v, len(cache))

    rng = random.Random(seed)
    left = rng.randrange(m)
    right = left + fib[n - 1]
    g_left, g_right = ev(left), ev(right)

    # Initial bracket: one full (padded) period placed so both known values
    # become interior probes and the worse one sits next to a bracket end.
    if g_left >= g_right:
        lo, hi = left, left + fib[n]
        probe_r, g_r = right, g_right
        probe_l = lo + fib[n - 2]
        g_l = ev(probe_l)
    else:
        hi, lo = right, right - fib[n]
        probe_l, g_l = left, g_left
        probe_r = hi - fib[n - 2]
        g_r = ev(probe_r)

    while True:
        if g_l >= g_r:
            # keep [probe_l, hi]; the survivor becomes the new left probe
            best_idx, best_val = probe_r, g_r
            width = hi - probe_l
            if width <= 1:
                return SearchResult(best_idx % m, best_val, len(cache))
            new_r = 2 * probe_l - lo
            lo = probe_l
            probe_l, g_l = probe_r, g_r
            probe_r, g_r = new_r, ev(new_r)
        else:
            # keep [lo, probe_r]; the survivor becomes the new right probe
            best_idx, best_val = probe_l, g_l
            width = probe_r - lo
            if width <= 1:
                return SearchResult(best_idx % m, best_val, len(cache))
            new_l = 2 * probe_r - hi
            hi = probe_r
            probe_r, g_r = probe_l, g_l
            probe_l, g_l = new_l, ev(new_l)
