"""Problem instances, cost models and solver configuration.

An instance is a set of terrestrial users, each with planar coordinates and
a positive traffic weight. The cost model prices a user-to-station link as
``w**link_exponent * dist(P, C)`` and a station serving total flow ``W`` as
``es_fixed + es_rate * W**es_exponent``. With ``es_exponent < 1`` the station
cost is strictly concave (economies of scale), which is the regime where
grouping users around shared stations involves a real trade-off.

Instances can be read from JSON (``{"users": [{"id", "x", "y", "w"}, ...]}``)
or from CSV with an ``id,x,y,w`` header, and are immutable once built.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

FULL_SCAN = "full_scan"
FIBONACCI_IF_BIMODAL = "fibonacci_if_bimodal"

SWEEP_STRATEGIES = (FULL_SCAN, FIBONACCI_IF_BIMODAL)


class InstanceError(ValueError):
    """Raised for malformed instance files or invalid instance data."""


@dataclass(frozen=True)
class User:
    id: int
    x: float
    y: float
    w: float

    def __post_init__(self):
        if not (self.w > 0):
            raise InstanceError(f"user {self.id}: weight must be positive, got {self.w}")
        for name in ("x", "y", "w"):
            if not math.isfinite(getattr(self, name)):
                raise InstanceError(f"user {self.id}: field {name!r} is not finite")


@dataclass(frozen=True)
class Instance:
    users: tuple[User, ...]

    def __post_init__(self):
        if len(self.users) < 1:
            raise InstanceError("instance must contain at least one user")
        seen = set()
        for u in self.users:
            if u.id in seen:
                raise InstanceError(f"duplicate user id {u.id}")
            seen.add(u.id)

    @property
    def n(self) -> int:
        return len(self.users)

    @cached_property
    def coords(self) -> np.ndarray:
        """(n, 2) float64 array of user positions, in input order."""
        return np.array([(u.x, u.y) for u in self.users], dtype=float)

    @cached_property
    def weights(self) -> np.ndarray:
        """(n,) float64 array of user weights, in input order."""
        return np.array([u.w for u in self.users], dtype=float)

    @cached_property
    def ids(self) -> tuple[int, ...]:
        return tuple(u.id for u in self.users)


@dataclass(frozen=True)
class CostModel:
    """Link and station cost parameters.

    link_exponent: exponent applied to the user weight in the link cost.
    es_fixed / es_rate / es_exponent: station cost is
    ``es_fixed + es_rate * W**es_exponent`` for total served flow W.
    """

    link_exponent: float = 1.0
    es_fixed: float = 5.0
    es_rate: float = 2.0
    es_exponent: float = 0.5

    def __post_init__(self):
        if self.link_exponent < 0:
            raise ValueError("link_exponent must be >= 0")
        if self.es_fixed < 0 or self.es_rate < 0:
            raise ValueError("es_fixed and es_rate must be >= 0")
        if not (0 < self.es_exponent <= 1):
            raise ValueError("es_exponent must lie in (0, 1]")

    def link_cost(self, w, p, c) -> float:
        """Cost of one link: w**link_exponent times Euclidean distance."""
        if not (w > 0):
            raise ValueError("link_cost requires a positive weight")
        return float(w**self.link_exponent * math.hypot(p[0] - c[0], p[1] - c[1]))

    def es_cost(self, total_weight) -> float:
        """Cost of one station serving the given total flow (>= 0)."""
        if total_weight < 0:
            raise ValueError("total weight must be >= 0")
        return float(self.es_fixed + self.es_rate * total_weight**self.es_exponent)

    def effective_weights(self, weights: np.ndarray) -> np.ndarray:
        """Weights raised to link_exponent, as used in every link-cost sum."""
        if self.link_exponent == 1.0:
            return np.asarray(weights, dtype=float)
        return np.asarray(weights, dtype=float) ** self.link_exponent


@dataclass(frozen=True)
class Thresholds:
    """Designer limits below which a cluster is not split further."""

    min_weight: float = 0.0
    min_users: int = 1
    max_depth: int = 6

    def __post_init__(self):
        if self.min_weight < 0:
            raise ValueError("min_weight must be >= 0")
        if self.min_users < 1:
            raise ValueError("min_users must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the location iteration and the angle sweep."""

    epsilon: float = 1e-7
    sweep_strategy: str = FULL_SCAN
    bimodal_range_cutoff: float = 0.05
    bimodal_n_cutoff: int = 25
    refine_max_passes: int = 50
    rng_seed: int = 0

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ValueError("epsilon must be > 0")
        if self.sweep_strategy not in SWEEP_STRATEGIES:
            raise ValueError(
                f"sweep_strategy must be one of {SWEEP_STRATEGIES}, got {self.sweep_strategy!r}"
            )
        if not (0 < self.bimodal_range_cutoff < 1):
            raise ValueError("bimodal_range_cutoff must lie in (0, 1)")
        if self.refine_max_passes < 1:
            raise ValueError("refine_max_passes must be >= 1")


def _users_from_rows(rows) -> Instance:
    users = []
    for lineno, row in rows:
        try:
            uid = int(row["id"])
            x = float(row["x"])
            y = float(row["y"])
            w = float(row["w"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceError(f"line {lineno}: bad user record ({exc})") from exc
        try:
            users.append(User(uid, x, y, w))
        except InstanceError as exc:
            raise InstanceError(f"line {lineno}: {exc}") from exc
    try:
        return Instance(tuple(users))
    except InstanceError as exc:
        raise InstanceError(str(exc)) from exc


def load_instance(path) -> Instance:
    """Read an instance from a JSON or CSV file.

    JSON files hold ``{"users": [{"id", "x", "y", "w"}, ...]}``; CSV files
    need an ``id,x,y,w`` header. Malformed records are reported with their
    line number.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv" or (path.suffix.lower() != ".json" and not text.lstrip().startswith("{")):
        reader = csv.DictReader(text.splitlines())
        if reader.fieldnames is None or {"id", "x", "y", "w"} - set(reader.fieldnames):
            raise InstanceError(f"{path}: CSV header must contain id,x,y,w")
        rows = [(i + 2, row) for i, row in enumerate(reader)]
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(doc, dict) or not isinstance(doc.get("users"), list):
            raise InstanceError(f"{path}: expected a JSON object with a 'users' array")
        rows = [(i + 1, row) for i, row in enumerate(doc["users"])]
    if not rows:
        raise InstanceError(f"{path}: no users found")
    return _users_from_rows(rows)


def instance_to_json(instance: Instance) -> str:
    """Canonical JSON serialization (stable bytes for identical instances)."""
    doc = {
        "users": [
            {"id": u.id, "x": u.x, "y": u.y, "w": u.w} for u in instance.users
        ]
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(instance_to_json(instance))


def generate_instance(
    n: int,
    seed: int,
    region=(0.0, 0.0, 100.0, 100.0),
    weight_range=(1.0, 10.0),
) -> Instance:
    """Draw a uniform random instance, deterministic for a fixed seed.

    ``region`` is (xmin, ymin, xmax, ymax); weights are uniform in
    ``weight_range``, which must be strictly positive.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    xmin, ymin, xmax, ymax = map(float, region)
    if not (xmax > xmin and ymax > ymin):
        raise ValueError(f"empty region {region}")
    wlo, whi = map(float, weight_range)
    if not (0 < wlo <= whi):
        raise ValueError(f"weight_range must be positive and ordered, got {weight_range}")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(xmin, xmax, size=n)
    ys = rng.uniform(ymin, ymax, size=n)
    ws = rng.uniform(wlo, whi, size=n)
    users = tuple(User(i + 1, float(xs[i]), float(ys[i]), float(ws[i])) for i in range(n))
    return Instance(users)


def config_from_dict(doc: dict):
    """Split a flat config mapping into (CostModel, Thresholds, SolverConfig).

    Keys mirror the dataclass field names exactly; unknown keys are rejected.
    """
    model_keys = {"link_exponent", "es_fixed", "es_rate", "es_exponent"}
    thr_keys = {"min_weight", "min_users", "max_depth"}
    cfg_keys = {
        "epsilon",
        "sweep_strategy",
        "bimodal_range_cutoff",
        "bimodal_n_cutoff",
        "refine_max_passes",
        "rng_seed",
    }
    unknown = set(doc) - model_keys - thr_keys - cfg_keys
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    model = CostModel(**{k: doc[k] for k in model_keys & set(doc)})
    thresholds = Thresholds(**{k: doc[k] for k in thr_keys & set(doc)})
    config = SolverConfig(**{k: doc[k] for k in cfg_keys & set(doc)})
    return model, thresholds, config


def load_config(path):
    """Read a JSON config file; see config_from_dict for the key set."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return config_from_dict(doc)
