"""Bundled cost geometries and their closed-form partition functions.

Families
--------
``circle_circumference_n_linear``
    n points on a circle of circumference n, cost = shortest arc length.
``unit_circle_linear``, ``unit_circle_log``, ``unit_circle_root``
    n points on a circle of circumference 2*pi with linear, logarithmic and
    square-root costs of the shortest arc length.
``one_way_line_linear``
    n points on a segment of length 2*pi travelled in one direction only.
``custom``
    any square cost matrix supplied by the caller.

All partition functions assume the uniform prior and reference measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import DecisionProblem, cumulant_derivative
from .measure import CostMatrix, as_prob_vector, uniform

FAMILIES = (
    "circle_circumference_n_linear",
    "unit_circle_linear",
    "unit_circle_log",
    "unit_circle_root",
    "one_way_line_linear",
    "custom",
)
CLOSED_FORM_FAMILIES = frozenset(
    {"circle_circumference_n_linear", "unit_circle_linear", "unit_circle_log", "one_way_line_linear"}
)
CIRCLE_FAMILIES = frozenset(
    {"circle_circumference_n_linear", "unit_circle_linear", "unit_circle_log", "unit_circle_root"}
)
ALIASES = {
    "circle-linear": "circle_circumference_n_linear",
    "circle": "circle_circumference_n_linear",
    "unit-circle-linear": "unit_circle_linear",
    "unit-circle-log": "unit_circle_log",
    "unit-circle-root": "unit_circle_root",
    "one-way-line": "one_way_line_linear",
    "one-way-line-linear": "one_way_line_linear",
}

_GEOMETRY = {
    "circle_circumference_n_linear": "circle_circumference_n",
    "unit_circle_linear": "unit_circle",
    "unit_circle_log": "unit_circle",
    "unit_circle_root": "unit_circle",
    "one_way_line_linear": "one_way_line",
}


def resolve_family(name):
    if name in FAMILIES:
        return name
    key = name.strip().lower()
    if key in ALIASES:
        return ALIASES[key]
    if key.replace("-", "_") in FAMILIES:
        return key.replace("-", "_")
    raise ValueError(f"unknown model {name!r}; choose from {sorted(FAMILIES + tuple(ALIASES))}")


@dataclass(frozen=True)
class ModelSpec:
    family: str
    n: int = 8
    prior: np.ndarray | None = None
    cost: CostMatrix | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "family", resolve_family(self.family))
        if self.family == "custom":
            if self.cost is None:
                raise ValueError("custom model needs a cost matrix")
            object.__setattr__(self, "n", self.cost.n)
        else:
            n = self.n
            if int(n) != n or n < 2:
                raise ValueError(f"n must be an integer >= 2, got {n}")
            if n % 2:
                raise ValueError(f"n must be even, got {n}")
            object.__setattr__(self, "n", int(n))
        if self.prior is not None:
            object.__setattr__(self, "prior", as_prob_vector(self.prior, self.n, "prior"))

    @property
    def uniform_prior(self):
        return self.prior is None or bool(np.all(self.prior == 1.0 / self.n))

    @property
    def closed_form_available(self):
        return self.family in CLOSED_FORM_FAMILIES and self.uniform_prior

    @property
    def label(self):
        return f"{self.family}(n={self.n})"


@dataclass(frozen=True)
class HartleyPoint:
    bits: int
    info_nats: float
    value: float

    @property
    def info_bits(self):
        return float(self.bits)


def _as_spec(spec_or_family, n=None):
    if isinstance(spec_or_family, ModelSpec):
        return spec_or_family
    return ModelSpec(spec_or_family, n if n is not None else 8)


def distance_profile(family, n):
    """Cost from state 0 to every action, i.e. the first row of the circulant cost matrix."""
    i = np.arange(n)
    if family == "one_way_line_linear":
        return i * (2.0 * math.pi / n)
    steps = np.minimum(i, n - i).astype(float)
    if family == "circle_circumference_n_linear":
        return steps
    d = steps * (2.0 * math.pi / n)
    if family == "unit_circle_linear":
        return d
    if family == "unit_circle_log":
        out = np.zeros(n)
        out[1:] = np.log(d[1:])
        return out
    if family == "unit_circle_root":
        return np.sqrt(d)
    raise ValueError(f"family {family!r} has no built-in distance profile")


def build_cost(spec, n=None):
    """Cost matrix ``c(x, u) = profile[(u - x) mod n]`` for a bundled family."""
    spec = _as_spec(spec, n)
    if spec.family == "custom":
        return spec.cost
    row = distance_profile(spec.family, spec.n)
    idx = np.arange(spec.n)
    entries = row[(idx[None, :] - idx[:, None]) % spec.n]
    return CostMatrix.from_array(entries, geometry=_GEOMETRY[spec.family])


def generalized_harmonic(m, order):
    """H(m, s) = sum_{i=1}^{m} i^{-s}, summed exactly rounded."""
    if m <= 0:
        return 0.0
    return math.fsum(float(i) ** (-order) for i in range(m, 0, -1))


def _log_z_circle(n, beta):
    # (1/n)(1 - e^{-beta n/2}) coth(beta/2)
    return math.log(-math.expm1(-beta * n / 2)) - math.log(math.tanh(beta / 2)) - math.log(n)


def _log_z_unit_linear(n, beta):
    # 1/n + 2e^{-b pi}(e^{b pi} - e^{2 b pi/n}) / ((e^{2 b pi/n} - 1) n) + e^{-b pi}/n,
    # with the middle term rewritten via expm1 to avoid cancellation and overflow
    a = 2.0 * beta * math.pi / n
    with np.errstate(over="ignore"):
        middle = -2.0 * math.expm1(a - beta * math.pi) / (float(np.expm1(a)) * n)
    return math.log(1.0 / n + middle + math.exp(-beta * math.pi) / n)


def _log_z_unit_log(n, beta):
    # (2/n)^{1-beta} pi^{-beta} H(n/2 - 1, beta) + (1 + pi^{-beta})/n, in log space
    h = generalized_harmonic(n // 2 - 1, beta)
    tail = math.log1p(math.pi**-beta) - math.log(n)
    if h == 0:
        return tail
    head = (1.0 - beta) * math.log(2.0 / n) - beta * math.log(math.pi) + math.log(h)
    return float(np.logaddexp(head, tail))


def _log_z_one_way(n, beta):
    # (1/n) e^{-b pi} sinh(pi b) (coth(pi b / n) + 1)
    damped_sinh = -0.5 * math.expm1(-2.0 * math.pi * beta)
    return math.log(damped_sinh) + math.log(1.0 / math.tanh(math.pi * beta / n) + 1.0) - math.log(n)


_LOG_Z = {
    "circle_circumference_n_linear": _log_z_circle,
    "unit_circle_linear": _log_z_unit_linear,
    "unit_circle_log": _log_z_unit_log,
    "one_way_line_linear": _log_z_one_way,
}


# Below beta * max|c| = SMALL_BETA the closed forms subtract nearly equal
# quantities (coth, csch and expm1 ratios blow up like 1/beta), so the exact
# finite sum in expm1/log1p form is used instead. It is O(n) and relatively
# accurate as beta -> 0.
SMALL_BETA = 1e-3


def _small_beta(family, n, beta):
    row = distance_profile(family, n)
    return beta * float(np.max(np.abs(row))) < SMALL_BETA, row


def closed_form_log_Z(spec, beta, n=None):
    spec = _as_spec(spec, n)
    if spec.family not in CLOSED_FORM_FAMILIES:
        raise ValueError(f"{spec.family}: no closed form; use generic path")
    if not spec.uniform_prior:
        raise ValueError(f"{spec.family}: closed form assumes a uniform prior; use generic path")
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    if beta == 0:
        return 0.0
    small, row = _small_beta(spec.family, spec.n, beta)
    if small:
        return math.log1p(math.fsum(np.expm1(-beta * row)) / spec.n)
    return _LOG_Z[spec.family](spec.n, float(beta))


def closed_form_Z(spec, beta, n=None):
    """Partition function of a bundled family under the uniform prior (1 at beta=0)."""
    return math.exp(closed_form_log_Z(spec, beta, n))


def brute_force_Z(spec, beta, n=None, action=0):
    """Direct sum ``(1/n) sum_x exp(-beta c(x, u0))``."""
    cost = build_cost(_as_spec(spec, n)).entries
    m = cost.shape[0]
    return math.fsum(math.exp(-beta * c) / m for c in cost[:, action])


def circle_gamma_prime(n, beta):
    """n / (2 (e^{beta n/2} - 1)) - csch(beta) on the circumference-n circle."""
    small, row = _small_beta("circle_circumference_n_linear", n, beta)
    if small:
        w = np.exp(-beta * row)
        return -float(w @ row / w.sum())
    with np.errstate(over="ignore"):
        first = n / (2.0 * float(np.expm1(beta * n / 2)))
    return first - csch(beta)


def csch(beta):
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return -2.0 * math.exp(-beta) / math.expm1(-2.0 * beta)


def circle_gamma_prime_limit(beta):
    """n -> infinity limit of the circumference-n Gamma', i.e. -csch(beta)."""
    return -csch(beta)


def one_way_expected_utility(n, beta):
    """(1/n) pi (n (coth(pi b) - 1) - coth(pi b / n) + 1), i.e. d/dbeta ln Z on the one-way line."""
    small, row = _small_beta("one_way_line_linear", n, beta)
    if small:
        w = np.exp(-beta * row)
        return -float(w @ row / w.sum())
    coth = lambda t: 1.0 / math.tanh(t)  # noqa: E731
    return (math.pi / n) * (n * (coth(math.pi * beta) - 1.0) - coth(math.pi * beta / n) + 1.0)


def limit_Z_unit_linear(beta):
    """(1 - e^{-beta pi}) / (beta pi), the n -> infinity unit-circle linear partition function."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    x = beta * math.pi
    return -math.expm1(-x) / x


def build_problem(spec, n=None):
    """Wrap a model as an engine :class:`~circvoi.engine.DecisionProblem`."""
    spec = _as_spec(spec, n)
    cost = build_cost(spec)
    prior = uniform(spec.n) if spec.prior is None else spec.prior
    log_partition = gamma_prime = None
    if spec.closed_form_available:
        log_partition = lambda b, _s=spec: closed_form_log_Z(_s, b)  # noqa: E731
        if spec.family == "circle_circumference_n_linear":
            gamma_prime = lambda b, _n=spec.n: circle_gamma_prime(_n, b)  # noqa: E731
    return DecisionProblem(
        cost,
        prior,
        uniform(spec.n),
        log_partition=log_partition,
        gamma_prime=gamma_prime,
        label=spec.label,
    )


def maxent_cost(spec, n=None):
    """Expected cost under the zero-information (product) measure."""
    spec = _as_spec(spec, n)
    n = spec.n
    if spec.uniform_prior and spec.family != "custom":
        m = n // 2 - 1
        if spec.family == "circle_circumference_n_linear":
            return (m * (m + 1) + n / 2) / n
        if spec.family == "unit_circle_linear":
            return (0.5 * math.pi * (n - 2) + math.pi) / n
        if spec.family == "unit_circle_log":
            # (1/n)(2 ln((2pi/n)^{n/2-1} Gamma(n/2)) + ln pi)
            return (2.0 * (m * math.log(2.0 * math.pi / n) + math.lgamma(n / 2)) + math.log(math.pi)) / n
        if spec.family == "unit_circle_root":
            return math.sqrt(math.pi) * (1.0 / n + 2.0 * math.sqrt(2.0) * n**-1.5 * generalized_harmonic(m, -0.5))
        if spec.family == "one_way_line_linear":
            return math.pi * (n - 1) / n
    problem = build_problem(spec)
    return float(problem.prior @ problem.cost.entries @ problem.ref)


def maxent_limit(family):
    """n -> infinity MaxEnt cost where a closed form exists, else ``None``."""
    family = resolve_family(family)
    if family == "unit_circle_linear":
        return math.pi / 2
    if family == "unit_circle_log":
        return math.log(math.pi) - 1.0
    return None


def hartley_voi(spec, bits, n=None):
    """Value of learning which of ``2**bits`` contiguous arcs holds the state.

    Each arc is answered with its best single action; the value is the
    MaxEnt cost minus the resulting expected cost.
    """
    spec = _as_spec(spec, n)
    if spec.family not in CIRCLE_FAMILIES:
        raise ValueError(f"{spec.family}: Hartley values are defined for circle families only")
    cells = 2**bits
    if bits < 1 or spec.n % cells:
        raise ValueError(f"n must be a power-of-two multiple of cells: {cells} cells do not divide n={spec.n}")
    cost = build_cost(spec).entries
    prior = uniform(spec.n) if spec.prior is None else spec.prior
    width = spec.n // cells
    residual = 0.0
    for k in range(cells):
        block = slice(k * width, (k + 1) * width)
        mass = prior[block].sum()
        if mass == 0:
            continue
        per_action = prior[block] @ cost[block] / mass
        residual += mass * float(per_action.min())
    return HartleyPoint(bits=bits, info_nats=bits * math.log(2.0), value=maxent_cost(spec) - residual)


def hartley_table(spec, n=None):
    spec = _as_spec(spec, n)
    k = spec.n.bit_length() - 1
    if 2**k != spec.n:
        raise ValueError(f"n must be a power-of-two multiple of cells; n={spec.n} is not a power of two")
    return [hartley_voi(spec, b) for b in range(1, k + 1)]


def _effect(family, n, beta, order):
    family = resolve_family(family)
    lo = cumulant_derivative(build_problem(ModelSpec(family, n)), beta, order)
    hi = cumulant_derivative(build_problem(ModelSpec(family, n + 2)), beta, order)
    return (hi - lo) / 2.0


def cost_effect(family, n, beta):
    """Per-unit change of E{c} when going from n to n + 2 points."""
    return -_effect(family, n, beta, 1)


def variance_effect(family, n, beta):
    """Per-unit change of the cost variance (Gamma'') when going from n to n + 2 points."""
    return _effect(family, n, beta, 2)
