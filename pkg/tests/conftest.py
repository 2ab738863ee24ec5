"""Shared fixtures and instance factories for the test suite."""

import math

import numpy as np
import pytest

from topoforge import CostModel, Instance, SolverConfig, Thresholds, User

REPO_FIXTURES = "fixtures"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion, capture or not."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in rep.nodeid:
                name = rep.nodeid.split("::")[-1]
                lines.append(f"[{'PASS' if outcome == 'passed' else 'FAIL'}] {name}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def model():
    return CostModel()


@pytest.fixture
def config():
    return SolverConfig()


@pytest.fixture
def thresholds():
    return Thresholds()


def make_instance(rows) -> Instance:
    """rows: iterable of (x, y, w); ids assigned 1..n."""
    return Instance(tuple(User(i + 1, float(x), float(y), float(w)) for i, (x, y, w) in enumerate(rows)))


def random_points(n, seed, lo=0.0, hi=100.0, wlo=1.0, whi=10.0):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, hi, size=(n, 2))
    wts = rng.uniform(wlo, whi, size=n)
    return pts, wts


def two_blob_instance(per_blob=10, separation=100.0, radius=0.5, weight=1.0) -> Instance:
    """Two tight rings of users far apart; the blob split is unambiguous."""
    users = []
    uid = 1
    for cx in (0.0, separation):
        for j in range(per_blob):
            ang = 2.0 * math.pi * j / per_blob + 0.1
            users.append(User(uid, cx + radius * math.cos(ang), radius * math.sin(ang), weight))
            uid += 1
    return Instance(tuple(users))


def reference_angle_points(center=(0.0, 0.0), radii=(1.0, 1.0, 1.0, 1.0)):
    """Four points whose polar angles about `center` are the bundled
    reference angles (3.65, 0.67, 1.53, 2.11)."""
    angles = (3.65, 0.67, 1.53, 2.11)
    cx, cy = center
    return np.array(
        [(cx + r * math.cos(a), cy + r * math.sin(a)) for r, a in zip(radii, angles)]
    )


def bimodal_vector(m, rng, plateaus=False):
    """Random circularly bimodal sequence: a V with random arm split,
    randomly rotated. With plateaus=True values are coarsely quantized."""
    if m == 1:
        return np.array([float(rng.uniform(0.0, 100.0))])
    vals = rng.uniform(0.0, 100.0, size=m)
    if plateaus:
        vals = np.round(vals / 10.0) * 10.0
    vals = np.sort(vals)
    k = int(rng.integers(0, m))
    seq = np.concatenate([[vals[0]], vals[k + 1:], vals[1:k + 1][::-1]])
    return np.roll(seq, int(rng.integers(0, m)))
