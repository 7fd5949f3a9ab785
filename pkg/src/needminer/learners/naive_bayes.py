"""Multinomial Naive Bayes with Laplace smoothing."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# stands in for log(0) so that zero counts stay harmless in the dot product
_NEG_LARGE = -1e300


@dataclass
class NaiveBayesPayload:
    class_log_prior: np.ndarray  # shape (2,), order [negative, positive]
    feature_log_prob: np.ndarray  # shape (2, dim)

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, alpha: float) -> "NaiveBayesPayload":
        n, dim = X.shape
        priors = np.empty(2)
        loglik = np.empty((2, dim))
        for c in (0, 1):
            rows = X[y == c]
            priors[c] = np.log(rows.shape[0] / n)
            counts = rows.sum(axis=0) + alpha
            total = counts.sum()
            if total == 0:  # alpha = 0 and a class of all-empty vectors
                loglik[c] = _NEG_LARGE
                continue
            with np.errstate(divide="ignore"):
                ll = np.log(counts / total)
            loglik[c] = np.where(np.isneginf(ll), _NEG_LARGE, ll)
        return cls(priors, loglik)

    def score_positive(self, X: np.ndarray) -> np.ndarray:
        """Posterior probability of the positive class per row."""
        jll = X @ self.feature_log_prob.T + self.class_log_prior
        shift = jll.max(axis=1, keepdims=True)
        logsum = shift[:, 0] + np.log(np.exp(jll - shift).sum(axis=1))
        return np.exp(jll[:, 1] - logsum)

    def to_dict(self) -> dict:
        return {
            "class_log_prior": self.class_log_prior.tolist(),
            "feature_log_prob": self.feature_log_prob.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NaiveBayesPayload":
        return cls(np.array(d["class_log_prior"]), np.array(d["feature_log_prob"]))
