"""Gibbs channels, cumulant generating functions and value-of-information curves.

Sign convention used throughout::

    Gamma(beta)  = sum_x p(x) ln Z(x, beta)
    Gamma'(beta) = -E{c}
    I(beta)      = beta * Gamma'(beta) - Gamma(beta)

where ``Z(x, beta) = sum_u q(u) exp(-beta c(x, u))`` and ``q`` is the
reference measure on actions.
"""
from __future__ import annotations

import math
from functools import cached_property
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .measure import (
    CostMatrix,
    as_prob_vector,
    entropy,
    is_translation_invariant,
    kl_divergence,
    marginals,
    mutual_information,
    to_base,
)

__all__ = [
    "DecisionProblem",
    "GibbsSolution",
    "CurvePoint",
    "VoiCurve",
    "SignConventionError",
    "gibbs_channel",
    "log_partition_rows",
    "cumulant",
    "cumulant_derivative",
    "finite_difference_check",
    "info_from_cumulant",
    "evaluate",
    "voi_curve",
    "default_beta_grid",
    "beta_for_info",
    "value_at_info",
    "check_marginal_conditions",
    "is_translation_invariant",
    "curve_shape",
]

IDENTITY_TOL = 1e-9


class SignConventionError(ValueError):
    pass


@dataclass(frozen=True)
class DecisionProblem:
    """A cost matrix together with the prior on states and reference measure on actions.

    ``log_partition`` is an optional closed form for ``ln Z(beta)``; it is
    only consulted when the partition value is the same for every state
    (translation-invariant cost with uniform prior and reference).
    """

    cost: CostMatrix
    prior: np.ndarray
    ref: np.ndarray
    log_partition: Callable[[float], float] | None = None
    gamma_prime: Callable[[float], float] | None = None
    beta_max: float = math.inf
    label: str = "custom"
    n: int = field(init=False)

    def __post_init__(self):
        n = self.cost.n
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "prior", as_prob_vector(self.prior, n, "prior"))
        object.__setattr__(self, "ref", as_prob_vector(self.ref, n, "reference measure"))

    @classmethod
    def from_cost(cls, cost, prior=None, ref=None, **kwargs):
        if not isinstance(cost, CostMatrix):
            cost = CostMatrix.from_array(cost)
        n = cost.n
        prior = np.full(n, 1.0 / n) if prior is None else prior
        ref = np.full(n, 1.0 / n) if ref is None else ref
        return cls(cost, prior, ref, **kwargs)

    @cached_property
    def symmetric(self):
        """Partition value independent of the state, and both marginal conditions hold."""
        n = self.n
        return (
            self.cost.translation_invariant
            and is_translation_invariant(self.cost, "circle")
            and np.allclose(self.prior, 1.0 / n, rtol=0, atol=1e-15)
            and np.allclose(self.ref, 1.0 / n, rtol=0, atol=1e-15)
        )

    @property
    def closed_form_available(self):
        return self.log_partition is not None and self.symmetric

    def check_beta(self, beta):
        if not (beta >= 0) or not math.isfinite(beta):
            raise ValueError(f"beta must be a finite nonnegative number, got {beta}")
        if beta >= self.beta_max:
            raise ValueError(
                f"beta={beta} is outside the convergence range of {self.label}: "
                f"the partition sum is finite only for beta < {self.beta_max}"
            )


@dataclass(frozen=True)
class GibbsSolution:
    beta: float
    channel: np.ndarray
    log_z_of_x: np.ndarray
    gamma: float
    gamma_prime: float
    expected_cost: float
    info_nats: float
    # KL of the channel from prior x ref; equals info_nats when the action
    # marginal of the channel coincides with the reference measure
    rate_nats: float

    @property
    def z_of_x(self):
        return np.exp(self.log_z_of_x)

    @property
    def conditional(self):
        return self.channel / self.channel.sum(axis=1, keepdims=True)


def _problem(model):
    if isinstance(model, DecisionProblem):
        return model
    problem = getattr(model, "problem", None)
    if isinstance(problem, DecisionProblem):
        return problem
    raise TypeError(f"expected a DecisionProblem or a model exposing .problem, got {type(model).__name__}")


def _log_kernel(cost, ref, beta):
    with np.errstate(divide="ignore"):
        log_ref = np.log(ref)
    if beta == 0:
        return np.broadcast_to(log_ref, cost.shape).copy()
    return log_ref[None, :] - beta * cost


def log_partition_rows(cost, ref, beta):
    """``ln Z(x, beta)`` for every state, via log-sum-exp."""
    entries = cost.entries if isinstance(cost, CostMatrix) else np.asarray(cost, dtype=float)
    return logsumexp(_log_kernel(entries, np.asarray(ref, dtype=float), beta), axis=1)


def gibbs_channel(prior_x, ref_u, cost, beta):
    """Optimal joint measure ``p(x) q(u) exp(-beta c(x,u)) / Z(x, beta)``.

    The X-marginal equals ``prior_x`` by construction. Computation is done
    with the log-sum-exp shift so large ``beta`` does not overflow.
    """
    entries = cost.entries if isinstance(cost, CostMatrix) else np.asarray(cost, dtype=float)
    n_x, n_u = entries.shape
    prior_x = as_prob_vector(prior_x, n_x, "prior")
    ref_u = as_prob_vector(ref_u, n_u, "reference measure")
    if not (beta >= 0) or not math.isfinite(beta):
        raise ValueError(f"beta must be a finite nonnegative number, got {beta}")

    log_kernel = _log_kernel(entries, ref_u, beta)
    log_z = logsumexp(log_kernel, axis=1)
    log_cond = log_kernel - log_z[:, None]
    cond = np.exp(log_cond)
    channel = prior_x[:, None] * cond

    mean_c = np.sum(cond * entries, axis=1)
    e_cost = float(prior_x @ mean_c)
    gamma = float(prior_x @ log_z)
    rate = max(kl_divergence(channel, np.outer(prior_x, ref_u)), 0.0)
    return GibbsSolution(
        beta=float(beta),
        channel=channel,
        log_z_of_x=log_z,
        gamma=gamma,
        gamma_prime=-e_cost,
        expected_cost=e_cost,
        info_nats=mutual_information(channel),
        rate_nats=rate,
    )


def cumulant(sol, prior_x):
    """Gamma(beta) = sum_x p(x) ln Z(x, beta) for an already computed channel."""
    return float(np.asarray(prior_x, dtype=float) @ sol.log_z_of_x)


def _cost_moments(problem, beta, order):
    """Prior-weighted central moments of the cost under the conditional Gibbs law.

    Returns a list ``[mean, variance, third central moment][:order]``.
    For symmetric problems a single row suffices.
    """
    entries = problem.cost.entries
    prior = problem.prior
    if problem.symmetric:
        entries = entries[:1]
        prior = np.ones(1)
    log_kernel = _log_kernel(entries, problem.ref, beta)
    w = np.exp(log_kernel - logsumexp(log_kernel, axis=1, keepdims=True))
    mean = np.sum(w * entries, axis=1)
    out = [float(prior @ mean)]
    if order >= 2:
        dev = entries - mean[:, None]
        out.append(float(prior @ np.sum(w * dev**2, axis=1)))
        if order >= 3:
            out.append(float(prior @ np.sum(w * dev**3, axis=1)))
    return out


def cumulant_value(model, beta):
    problem = _problem(model)
    problem.check_beta(beta)
    if problem.closed_form_available:
        return float(problem.log_partition(beta))
    if problem.symmetric:
        return float(log_partition_rows(problem.cost.entries[:1], problem.ref, beta)[0])
    return float(problem.prior @ log_partition_rows(problem.cost, problem.ref, beta))


def cumulant_derivative(model, beta, order=1):
    """Analytic beta-derivatives of Gamma.

    ``order=1`` gives ``-E{c}``, ``order=2`` the cost variance and
    ``order=3`` minus the third central moment.
    """
    problem = _problem(model)
    problem.check_beta(beta)
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    if order == 1 and problem.gamma_prime is not None and problem.symmetric and beta > 0:
        return float(problem.gamma_prime(beta))
    moment = _cost_moments(problem, beta, order)[order - 1]
    return moment if order == 2 else -moment


def finite_difference_check(model, beta):
    """Compare the analytic Gamma' with a finite difference of Gamma.

    Central differences with step ``1e-6 * max(1, beta)``; a second-order
    one-sided stencil when ``beta`` is closer than one step to zero.

    The relative error is taken against ``max(|Gamma'|, 1e-4 * max|c|)`` so
    that near-deterministic channels, where Gamma' underflows toward zero,
    are judged by absolute accuracy on the scale of the costs.

    Returns ``(analytic, numeric, relative_error)``.
    """
    problem = _problem(model)
    h = 1e-6 * max(1.0, beta)
    f = lambda b: cumulant_value(model, b)  # noqa: E731
    if beta - h < 0:
        numeric = (-3 * f(beta) + 4 * f(beta + h) - f(beta + 2 * h)) / (2 * h)
    else:
        numeric = (f(beta + h) - f(beta - h)) / (2 * h)
    analytic = cumulant_derivative(model, beta)
    floor = 1e-4 * max(float(np.max(np.abs(problem.cost.entries))), 1e-300)
    rel = abs(analytic - numeric) / max(abs(analytic), floor)
    return analytic, numeric, rel


def info_from_cumulant(gamma, gamma_prime, beta):
    info = beta * gamma_prime - gamma
    if info < -IDENTITY_TOL:
        raise SignConventionError(
            f"sign-convention violation: beta*Gamma' - Gamma = {info:.3e} < 0 at beta={beta}"
        )
    return info if info > 0 else 0.0


@dataclass(frozen=True)
class CurvePoint:
    beta: float
    z: float
    gamma: float
    expected_cost: float
    info_nats: float
    info: float
    value: float


@dataclass(frozen=True)
class VoiCurve:
    model: str
    n: int
    base: str
    points: tuple

    @property
    def betas(self):
        return np.array([p.beta for p in self.points])

    @property
    def info(self):
        return np.array([p.info for p in self.points])

    @property
    def info_nats(self):
        return np.array([p.info_nats for p in self.points])

    @property
    def values(self):
        return np.array([p.value for p in self.points])

    @property
    def expected_costs(self):
        return np.array([p.expected_cost for p in self.points])


def evaluate(model, beta):
    """Return ``(Gamma, Gamma', E{c}, I)`` at one beta.

    Symmetric problems with a closed-form partition function use it, other
    symmetric problems reduce to a single row, and everything else goes
    through the full Gibbs channel.
    """
    problem = _problem(model)
    problem.check_beta(beta)
    if problem.closed_form_available:
        gamma = float(problem.log_partition(beta)) if beta > 0 else 0.0
        gamma_prime = cumulant_derivative(problem, beta)
        info = info_from_cumulant(gamma, gamma_prime, beta)
        return gamma, gamma_prime, -gamma_prime, info
    if problem.symmetric:
        # every row of a circulant problem is a shifted copy of the first
        row = problem.cost.entries[:1]
        log_kernel = _log_kernel(row, problem.ref, beta)
        gamma = float(logsumexp(log_kernel, axis=1)[0])
        e_cost = float(np.sum(np.exp(log_kernel - gamma) * row))
        return gamma, -e_cost, e_cost, info_from_cumulant(gamma, -e_cost, beta)
    sol = gibbs_channel(problem.prior, problem.ref, problem.cost, beta)
    return sol.gamma, sol.gamma_prime, sol.expected_cost, sol.info_nats


def default_beta_grid(beta_min=1e-3, beta_max=50.0, count=200, scale="geometric", include_zero=True):
    if count < 1:
        raise ValueError(f"beta-count must be >= 1, got {count}")
    if scale == "geometric":
        if not 0 < beta_min <= beta_max:
            raise ValueError(f"geometric grid needs 0 < beta-min <= beta-max, got {beta_min}, {beta_max}")
        grid = np.geomspace(beta_min, beta_max, count)
    elif scale == "linear":
        if not 0 <= beta_min <= beta_max:
            raise ValueError(f"linear grid needs 0 <= beta-min <= beta-max, got {beta_min}, {beta_max}")
        grid = np.linspace(beta_min, beta_max, count)
    else:
        raise ValueError(f"beta-scale must be 'geometric' or 'linear', got {scale!r}")
    if include_zero and grid[0] != 0:
        grid = np.concatenate([[0.0], grid])
    return grid


def voi_curve(model, beta_grid=None, base="bits"):
    """Sweep beta and collect ``(beta, I, E{c}, V)`` points.

    The grid must be ascending and start at 0; ``V = E{c}(0) - E{c}(beta)``.
    """
    problem = _problem(model)
    grid = default_beta_grid() if beta_grid is None else np.asarray(beta_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("beta grid must be a non-empty one-dimensional sequence")
    if grid[0] != 0:
        raise ValueError(f"beta grid must start at 0, got {grid[0]}")
    if np.any(np.diff(grid) < 0):
        raise ValueError("beta grid must be sorted ascending")
    for b in grid:
        problem.check_beta(float(b))

    points = []
    baseline = None
    for b in grid:
        gamma, _, e_cost, info = evaluate(problem, float(b))
        if baseline is None:
            baseline = e_cost
        points.append(
            CurvePoint(
                beta=float(b),
                z=math.exp(gamma),
                gamma=gamma,
                expected_cost=e_cost,
                info_nats=info,
                info=to_base(info, base),
                value=baseline - e_cost,
            )
        )
    return VoiCurve(model=problem.label, n=problem.n, base=base, points=tuple(points))


def beta_for_info(model, target_nats, tol=1e-9, beta_hi=1.0, max_iter=400):
    """Bisection for the beta whose information equals ``target_nats`` within ``tol``."""
    problem = _problem(model)
    i_max = entropy(problem.prior)
    if target_nats < 0 or target_nats > i_max + tol:
        raise ValueError(f"target information {target_nats} outside [0, {i_max}]")
    info = lambda b: evaluate(problem, b)[3]  # noqa: E731
    if target_nats <= tol:
        return 0.0
    lo, hi = 0.0, beta_hi
    while info(hi) < target_nats - tol:
        lo, hi = hi, 2 * hi
        if hi >= problem.beta_max or hi > 1e6:
            raise ValueError(f"information {target_nats} not reached below beta={hi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        i_mid = info(mid)
        if abs(i_mid - target_nats) <= tol:
            return mid
        if i_mid < target_nats:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return hi


def value_at_info(model, target_nats, tol=1e-9):
    """V at a matched information level (nats), via :func:`beta_for_info`."""
    problem = _problem(model)
    beta = beta_for_info(problem, target_nats, tol)
    e0 = evaluate(problem, 0.0)[2]
    return e0 - evaluate(problem, beta)[2]


def check_marginal_conditions(sol, prior_x, ref_u, tol=1e-10):
    """Report whether the channel reproduces the prior on X and the reference on U."""
    px, pu = marginals(sol.channel)
    dx = float(np.max(np.abs(px - np.asarray(prior_x))))
    du = float(np.max(np.abs(pu - np.asarray(ref_u))))
    return {"x_ok": dx <= tol, "u_ok": du <= tol, "max_deviation": max(dx, du), "x_deviation": dx, "u_deviation": du}


def curve_shape(curve, min_spacing=1e-6):
    """Summary statistics for the shape claims on a VoI curve.

    Concavity is judged on a thinned copy of the curve where consecutive
    points are at least ``min_spacing`` nats apart, since second divided
    differences on nearly coincident points only measure rounding noise.
    """
    info = curve.info_nats
    value = curve.values
    cost = curve.expected_costs
    keep = [0]
    for k in range(1, len(info)):
        if info[k] - info[keep[-1]] >= min_spacing:
            keep.append(k)
    ti, tv = info[keep], value[keep]
    if len(ti) >= 3:
        slopes = np.diff(tv) / np.diff(ti)
        second = np.diff(slopes) / (0.5 * (ti[2:] - ti[:-2]))
        max_second = float(np.max(second))
    else:
        max_second = -math.inf
    return {
        "value_at_zero": float(value[0]),
        "min_value_step": float(np.min(np.diff(value))) if len(value) > 1 else 0.0,
        "min_info_step": float(np.min(np.diff(info))) if len(info) > 1 else 0.0,
        "max_cost_step": float(np.max(np.diff(cost))) if len(cost) > 1 else 0.0,
        "max_second_difference": max_second,
        "max_value": float(np.max(value)),
        "max_info_nats": float(np.max(info)),
        "min_value": float(np.min(value)),
    }
