"""scikit-learn style wrappers.

A cost matrix is treated as a design matrix: each row is a state, each
column the cost of one action. ``predict_proba`` returns the stochastic
choice rule ``p(u | x)`` of an information-constrained decision maker,
so the estimators drop into pipelines and ``GridSearchCV`` like any
probabilistic classifier.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import oracle
from .engine import DecisionProblem, beta_for_info, evaluate, gibbs_channel, voi_curve
from .measure import as_prob_vector, normalize, to_base


def _check_cost(X):
    X = check_array(X, dtype=float, ensure_min_samples=1, ensure_min_features=2)
    return X


def _check_prior(sample_weight, n):
    if sample_weight is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(sample_weight, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"sample_weight must have shape ({n},), got {w.shape}")
    if np.any(w < 0):
        raise ValueError("sample_weight must be nonnegative")
    return normalize(w)


class _ChannelMixin(TransformerMixin):
    """``predict_proba``/``predict``/``transform`` shared by the channel estimators."""

    def _log_proba(self, X):
        check_is_fitted(self, "ref_")
        X = _check_cost(X)
        if X.shape[1] != self.ref_.shape[0]:
            raise ValueError(f"X has {X.shape[1]} actions, estimator was fitted with {self.ref_.shape[0]}")
        with np.errstate(divide="ignore"):
            log_kernel = np.log(self.ref_)[None, :] - self.beta * X
        return log_kernel - logsumexp(log_kernel, axis=1, keepdims=True)

    def predict_proba(self, X):
        return np.exp(self._log_proba(X))

    def predict_log_proba(self, X):
        return self._log_proba(X)

    def predict(self, X):
        """Most likely action index for each state row."""
        return np.argmax(self._log_proba(X), axis=1)

    def transform(self, X):
        return self.predict_proba(X)

    def score(self, X, y=None, sample_weight=None):
        """Negative rate-distortion Lagrangian ``-(I + beta E{c})`` (higher is better)."""
        X = _check_cost(X)
        prior = _check_prior(sample_weight, X.shape[0])
        cond = self.predict_proba(X)
        joint = prior[:, None] * cond
        pu = joint.sum(axis=0)
        mask = joint > 0
        ratio = np.log(cond[mask]) - np.log(np.broadcast_to(pu, cond.shape)[mask])
        info = float(np.sum(joint[mask] * ratio))
        return -(info + self.beta * float(np.sum(joint * X)))


class GibbsChannel(_ChannelMixin, BaseEstimator):
    """Optimal channel at fixed ``beta`` against a fixed action reference measure.

    Parameters
    ----------
    beta : float
        Inverse multiplier of the information constraint.
    ref : array-like of shape (n_actions,), optional
        Reference measure on actions; uniform when omitted.

    Attributes
    ----------
    ref_, solution_, gamma_, expected_cost_, info_nats_
    """

    def __init__(self, beta=1.0, ref=None):
        self.beta = beta
        self.ref = ref

    def fit(self, X, y=None, sample_weight=None):
        X = _check_cost(X)
        n_x, n_u = X.shape
        prior = _check_prior(sample_weight, n_x)
        ref = np.full(n_u, 1.0 / n_u) if self.ref is None else as_prob_vector(self.ref, n_u, "ref")
        self.ref_ = ref
        self.solution_ = gibbs_channel(prior, ref, X, float(self.beta))
        self.gamma_ = self.solution_.gamma
        self.expected_cost_ = self.solution_.expected_cost
        self.info_nats_ = self.solution_.info_nats
        self.n_features_in_ = n_u
        return self


class RateDistortionChannel(_ChannelMixin, BaseEstimator):
    """Channel whose action marginal is learned by Blahut-Arimoto iteration."""

    def __init__(self, beta=1.0, tol=1e-12, max_iter=100_000):
        self.beta = beta
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None, sample_weight=None):
        X = _check_cost(X)
        prior = _check_prior(sample_weight, X.shape[0])
        res = oracle.solve(prior, X, float(self.beta), tol=self.tol, max_iter=self.max_iter)
        self.result_ = res
        self.ref_ = res.final_ref_u
        self.converged_ = res.converged
        self.n_iter_ = res.iterations
        self.expected_cost_ = res.expected_cost
        self.info_nats_ = res.info_nats
        self.n_features_in_ = X.shape[1]
        return self


class ValueOfInformation(BaseEstimator):
    """Value-of-information curve of a cost matrix.

    ``fit`` sweeps ``betas`` through the Gibbs family with a uniform
    action reference; ``predict`` maps information levels (in ``base``)
    to values by bisection on beta.
    """

    def __init__(self, betas=None, base="bits", tol=1e-9):
        self.betas = betas
        self.base = base
        self.tol = tol

    def fit(self, X, y=None, sample_weight=None):
        X = _check_cost(X)
        if X.shape[0] != X.shape[1]:
            raise ValueError(f"cost matrix must be square, got {X.shape}")
        prior = _check_prior(sample_weight, X.shape[0])
        self.problem_ = DecisionProblem.from_cost(X, prior=prior)
        self.curve_ = voi_curve(self.problem_, self.betas, base=self.base)
        self.maxent_cost_ = self.curve_.points[0].expected_cost
        return self

    def predict(self, info):
        check_is_fitted(self, "problem_")
        info = np.atleast_1d(np.asarray(info, dtype=float))
        scale = math.log(2.0) if self.base == "bits" else 1.0
        out = np.empty_like(info)
        for k, level in enumerate(info):
            beta = beta_for_info(self.problem_, level * scale, tol=self.tol)
            out[k] = self.maxent_cost_ - evaluate(self.problem_, beta)[2]
        return out

    def info_max(self):
        check_is_fitted(self, "curve_")
        return to_base(float(self.curve_.info_nats.max()), self.base)
