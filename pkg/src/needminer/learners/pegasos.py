"""Stochastic primal sub-gradient SVM: hinge loss, step size 1/(lambda*t),
projection onto the ball of radius 1/sqrt(lambda).

The bias rides along as an augmented constant-one feature, so it is
regularized and projected like every other coordinate and the classic
convergence guarantee applies to the whole parameter vector. The
regularized hinge objective is evaluated after every epoch and the best
iterate seen so far becomes the model, which makes the recorded
best-objective sequence non-increasing by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def hinge_objective(X: np.ndarray, y_pm: np.ndarray, w: np.ndarray, b: float, lam: float) -> float:
    """lam/2 * ||(w, b)||^2 + mean hinge; the bias is a regular coordinate."""
    margins = y_pm * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins).mean()
    return float(lam / 2.0 * (w @ w + b * b) + hinge)


@dataclass
class PegasosPayload:
    weights: np.ndarray
    bias: float
    objective_history: list[float] = field(default_factory=list)
    best_objective_history: list[float] = field(default_factory=list)

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, lam: float, epochs: int, seed: int) -> "PegasosPayload":
        n = X.shape[0]
        y_pm = 2.0 * y - 1.0
        Xa = np.hstack([X, np.ones((n, 1))])  # bias as constant feature
        rng = np.random.default_rng(seed)
        wa = np.zeros(Xa.shape[1])
        radius = 1.0 / math.sqrt(lam)
        best: tuple[float, np.ndarray] | None = None
        history: list[float] = []
        best_history: list[float] = []
        t = 0
        for _ in range(epochs):
            for i in rng.permutation(n):
                t += 1
                eta = 1.0 / (lam * t)
                margin = y_pm[i] * (Xa[i] @ wa)
                wa *= 1.0 - eta * lam  # == 1 - 1/t
                if margin < 1.0:
                    wa += eta * y_pm[i] * Xa[i]
                norm = float(np.linalg.norm(wa))
                if norm > radius:
                    wa *= radius / norm
            obj = hinge_objective(X, y_pm, wa[:-1], wa[-1], lam)
            history.append(obj)
            if best is None or obj < best[0]:
                best = (obj, wa.copy())
            best_history.append(best[0])
        wa = best[1]
        return cls(wa[:-1], float(wa[-1]), history, best_history)

    def score_positive(self, X: np.ndarray) -> np.ndarray:
        """Logistic squash of the signed margin; margin 0 maps to 0.5."""
        margins = X @ self.weights + self.bias
        with np.errstate(over="ignore"):  # exp overflow saturates to score 0
            return 1.0 / (1.0 + np.exp(-margins))

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "objective_history": self.objective_history,
            "best_objective_history": self.best_objective_history,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PegasosPayload":
        return cls(
            np.array(d["weights"]),
            float(d["bias"]),
            list(d.get("objective_history", [])),
            list(d.get("best_objective_history", [])),
        )
