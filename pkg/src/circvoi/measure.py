"""Probability primitives on finite supports.

Everything here works in natural logarithms; conversion to bits happens
only when a caller asks for ``base="bits"``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

GEOMETRIES = ("circle_circumference_n", "unit_circle", "one_way_line")
BASES = ("nats", "bits")

PROB_ATOL = 1e-12


class DegenerateMeasureError(ValueError):
    """Raised when a measure has zero total mass and cannot be normalized."""


def to_base(value_nats, base="nats"):
    if base == "nats":
        return value_nats
    if base == "bits":
        return value_nats / math.log(2.0)
    raise ValueError(f"unknown information base {base!r}; expected one of {BASES}")


@dataclass(frozen=True)
class FiniteSpace:
    """Labeled set of ``n`` equally spaced points on a circle or a segment."""

    n: int
    geometry: str = "unit_circle"

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}, got {self.geometry!r}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if self.geometry != "one_way_line" and self.n % 2:
            raise ValueError(f"n must be even on a circle, got {self.n}")

    @property
    def spacing(self):
        if self.geometry == "circle_circumference_n":
            return 1.0
        return 2.0 * math.pi / self.n

    @property
    def coordinates(self):
        return np.arange(self.n) * self.spacing


def as_prob_vector(p, n=None, name="probability vector"):
    """Validate ``p`` as a normalized nonnegative vector and return it as float array."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {p.shape}")
    if n is not None and p.shape[0] != n:
        raise ValueError(f"{name} has length {p.shape[0]}, expected {n}")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError(f"{name} must be finite and nonnegative")
    if abs(p.sum() - 1.0) > PROB_ATOL:
        raise ValueError(f"{name} must sum to 1 (got {p.sum():.15g})")
    return p


def uniform(n):
    return np.full(n, 1.0 / n)


def normalize(v):
    """Scale a nonnegative weight vector to unit mass.

    The map is idempotent and invariant to rescaling the input by any
    nonzero constant.
    """
    v = np.asarray(v, dtype=float)
    total = v.sum()
    if total == 0:
        raise DegenerateMeasureError("degenerate measure: weights sum to zero")
    return v / total


def partial_normalize_rows(m):
    m = np.asarray(m, dtype=float)
    sums = m.sum(axis=1)
    zero = np.flatnonzero(sums == 0)
    if zero.size:
        raise DegenerateMeasureError(f"row {zero[0]} has zero mass")
    return m / sums[:, None]


def marginals(joint):
    """Row (X) and column (U) marginals of a joint measure."""
    joint = np.asarray(joint, dtype=float)
    return joint.sum(axis=1), joint.sum(axis=0)


def _xlogy_ratio(p, q):
    # sum p*ln(p/q) with the 0*ln 0 = 0 convention
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


def entropy(p, base="nats"):
    p = np.asarray(p, dtype=float)
    mask = p > 0
    h = -float(np.sum(p[mask] * np.log(p[mask])))
    return to_base(max(h, 0.0), base)


def kl_divergence(p, q, base="nats"):
    return to_base(_xlogy_ratio(p, q), base)


def mutual_information(joint, base="nats"):
    """KL divergence of ``joint`` from the product of its own marginals."""
    joint = np.asarray(joint, dtype=float)
    px, pu = marginals(joint)
    mask = joint > 0
    rows, cols = np.nonzero(mask)
    # logs of the marginals taken separately so tiny products do not underflow
    log_ratio = np.log(joint[mask]) - np.log(px[rows]) - np.log(pu[cols])
    info = float(np.sum(joint[mask] * log_ratio))
    # rounding can leave a product measure a hair below zero
    return to_base(max(info, 0.0), base)


def expected_cost(joint, cost):
    joint = np.asarray(joint, dtype=float)
    entries = cost.entries if isinstance(cost, CostMatrix) else np.asarray(cost, dtype=float)
    if joint.shape != entries.shape:
        raise ValueError(f"dimension mismatch: joint {joint.shape} vs cost {entries.shape}")
    return float(np.sum(joint * entries))


def is_translation_invariant(cost, geometry="circle", atol=1e-12):
    """True when the cost depends only on the displacement between state and action.

    For ``geometry="circle"`` the matrix must be circulant (dependence on
    ``(u - x) mod n``); for ``"line"`` it must be Toeplitz.
    """
    c = cost.entries if isinstance(cost, CostMatrix) else np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    n = c.shape[0]
    scale = max(1.0, float(np.max(np.abs(c)))) if c.size else 1.0
    tol = atol * scale
    idx = np.arange(n)
    if geometry == "circle":
        expected = c[0, (idx[None, :] - idx[:, None]) % n]
        return bool(np.all(np.abs(c - expected) <= tol))
    if geometry == "line":
        for k in range(-n + 1, n):
            d = np.diagonal(c, offset=k)
            if d.size and np.ptp(d) > tol:
                return False
        return True
    raise ValueError(f"geometry must be 'circle' or 'line', got {geometry!r}")


@dataclass(frozen=True)
class CostMatrix:
    """Cost c(x, u) of taking action u in state x."""

    entries: np.ndarray
    geometry: str | None = None
    translation_invariant: bool = field(default=False)

    @classmethod
    def from_array(cls, entries, geometry=None):
        entries = np.array(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"cost matrix must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("cost matrix entries must be finite")
        entries.setflags(write=False)
        kind = "line" if geometry == "one_way_line" else "circle"
        return cls(entries, geometry, is_translation_invariant(entries, kind))

    @property
    def n(self):
        return self.entries.shape[0]


def _read_numeric_rows(path):
    rows = []
    with open(path, newline="") as fh:
        for raw in csv.reader(fh):
            cells = [c.strip() for c in raw if c.strip()]
            if not cells or cells[0].startswith("#"):
                continue
            rows.append([float(c) for c in cells])
    return rows


def load_cost_csv(path):
    """Read a cost matrix (and optional prior) from CSV.

    Layout: first line ``n``; then ``n`` lines of ``n`` costs; optionally a
    final line of ``n`` prior weights, which are normalized on load.

    Returns ``(CostMatrix, prior_or_None)``.
    """
    rows = _read_numeric_rows(Path(path))
    if not rows or len(rows[0]) != 1:
        raise ValueError(f"{path}: first line must hold the single integer n")
    n = rows[0][0]
    if n != int(n) or n < 1:
        raise ValueError(f"{path}: n must be a positive integer, got {n}")
    n = int(n)
    body = rows[1:]
    if len(body) not in (n, n + 1):
        raise ValueError(f"{path}: expected {n} cost rows plus an optional prior row, got {len(body)} rows")
    for i, row in enumerate(body):
        if len(row) != n:
            raise ValueError(f"{path}: row {i + 1} has {len(row)} entries, expected {n}")
    cost = CostMatrix.from_array(body[:n])
    prior = None
    if len(body) == n + 1:
        weights = np.asarray(body[n])
        if np.any(weights < 0):
            raise ValueError(f"{path}: prior weights must be nonnegative")
        prior = normalize(weights)
    return cost, prior


def load_prior_csv(path, n=None):
    values = [v for row in _read_numeric_rows(Path(path)) for v in row]
    weights = np.asarray(values, dtype=float)
    if np.any(weights < 0):
        raise ValueError(f"{path}: prior weights must be nonnegative")
    return as_prob_vector(normalize(weights), n=n, name="prior")
