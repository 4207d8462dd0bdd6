"""Blahut-Arimoto rate-distortion solver used as an independent check on the engine.

Unlike :func:`circvoi.engine.gibbs_channel`, which holds the action
reference measure fixed, this alternates between the channel and the
action marginal until the marginal stops moving.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .measure import CostMatrix, as_prob_vector, mutual_information


@dataclass(frozen=True)
class OracleResult:
    beta: float
    info_nats: float
    expected_cost: float
    iterations: int
    converged: bool
    final_ref_u: np.ndarray
    channel: np.ndarray
    last_change: float

    @property
    def objective(self):
        """Rate-distortion Lagrangian ``I + beta * E{c}`` at the fixed point."""
        return self.info_nats + self.beta * self.expected_cost


def _entries(cost):
    return cost.entries if isinstance(cost, CostMatrix) else np.asarray(cost, dtype=float)


def solve(prior_x, cost, beta, tol=1e-12, max_iter=100_000, q0=None):
    """Alternating minimization at fixed ``beta``.

    Each sweep sets ``p(u|x) ~ q(u) exp(-beta c(x,u))`` and then
    ``q(u) = sum_x p(x) p(u|x)``; iteration stops once ``max|dq| < tol``.
    Running out of iterations is reported through ``converged=False``.
    """
    c = _entries(cost)
    n_x, n_u = c.shape
    prior_x = as_prob_vector(prior_x, n_x, "prior")
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    q = np.full(n_u, 1.0 / n_u) if q0 is None else as_prob_vector(q0, n_u, "initial marginal").copy()

    neg_bc = -beta * c
    change = np.inf
    converged = False
    it = 0
    cond = None
    while it < max_iter:
        it += 1
        with np.errstate(divide="ignore"):
            log_kernel = np.log(q)[None, :] + neg_bc
        cond = np.exp(log_kernel - logsumexp(log_kernel, axis=1, keepdims=True))
        q_new = prior_x @ cond
        change = float(np.max(np.abs(q_new - q)))
        q = q_new
        if change < tol:
            converged = True
            break

    joint = prior_x[:, None] * cond
    return OracleResult(
        beta=float(beta),
        info_nats=mutual_information(joint),
        expected_cost=float(np.sum(joint * c)),
        iterations=it,
        converged=converged,
        final_ref_u=q,
        channel=joint,
        last_change=change,
    )


WARM_START_MIX = 1e-6


def curve(prior_x, cost, beta_grid, tol=1e-12, max_iter=100_000):
    """Solve along a beta grid, warm-starting each point from the previous marginal.

    The previous marginal is blended with a ``WARM_START_MIX`` share of the
    uniform measure. Without it an action that died out at small beta starts
    the next point at (almost) zero mass, the update moves it too slowly for
    the stopping rule to notice, and the iteration halts away from the optimum.
    """
    results = []
    q = None
    for beta in beta_grid:
        res = solve(prior_x, cost, float(beta), tol=tol, max_iter=max_iter, q0=q)
        results.append(res)
        q = (1.0 - WARM_START_MIX) * res.final_ref_u + WARM_START_MIX / res.final_ref_u.size
    return results
