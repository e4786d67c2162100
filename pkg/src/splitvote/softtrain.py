"""Linear softmax classifier trained against soft (vote-derived) targets.

The loss is the soft cross-entropy

    L(theta) = -sum_i sum_c q_ic * log p_theta(c | x_i),

where q_i is the normalized judge vote distribution for pair i and p_theta is
the row softmax of X @ W. With one-hot targets this is exactly multinomial
logistic regression. The loss is written in sum form; a mean variant is
available for learning-rate-friendly scaling. Training is deterministic
full-batch gradient descent with a backtracking halving line search and zero
initialization (the problem is convex for a linear model, so the start does
not change the optimum).

A one-column constant feature gives the intercept-only model whose optimum is
the empirical mean of the target distributions; that model stands in for a
null-input predictor when computing per-instance information gain.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, Diverged

_PROB_FLOOR = 1e-12
_MAX_HALVINGS = 60
_MIN_STEP = 1e-20


@dataclass
class SoftTrainProblem:
    """Feature matrix and row-stochastic target matrix."""

    features: np.ndarray
    targets: np.ndarray

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.features.ndim != 2 or self.targets.ndim != 2:
            raise DimensionMismatch("features and targets must be 2-D")
        if self.features.shape[0] != self.targets.shape[0]:
            raise DimensionMismatch(
                f"{self.features.shape[0]} feature rows vs "
                f"{self.targets.shape[0]} target rows"
            )
        if self.features.shape[0] < 1 or self.features.shape[1] < 1:
            raise DimensionMismatch("need at least one row and one feature")
        sums = self.targets.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-12) or np.any(self.targets < 0.0):
            raise ValueError("each target row must be a probability vector")

    @property
    def n_classes(self) -> int:
        return self.targets.shape[1]

    @staticmethod
    def from_hard_labels(
        features: np.ndarray, labels: np.ndarray, n_classes: int = 2
    ) -> "SoftTrainProblem":
        """Build a problem whose targets are exact one-hot rows."""
        labels = np.asarray(labels, dtype=np.int64)
        return SoftTrainProblem(features, np.eye(n_classes)[labels])


@dataclass
class TrainConfig:
    learning_rate: float = 1.0
    epochs: int = 500
    seed: int = 0
    average: bool = False


@dataclass
class LinearSoftModel:
    """Weight matrix (d x c) plus the loss trace of the run that made it."""

    weights: np.ndarray
    training_trace: list[tuple[int, float]] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "weights": self.weights.tolist(),
            "training_trace": [[e, loss] for e, loss in self.training_trace],
        }
        return json.dumps(payload, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "LinearSoftModel":
        payload = json.loads(text)
        return LinearSoftModel(
            weights=np.asarray(payload["weights"], dtype=np.float64),
            training_trace=[
                (int(e), float(loss)) for e, loss in payload.get("training_trace", [])
            ],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @staticmethod
    def load(path: str | Path) -> "LinearSoftModel":
        return LinearSoftModel.from_json(Path(path).read_text(encoding="utf-8"))


def row_softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def _check_shapes(weights: np.ndarray, problem: SoftTrainProblem) -> None:
    if weights.ndim != 2 or weights.shape != (
        problem.features.shape[1],
        problem.targets.shape[1],
    ):
        raise DimensionMismatch(
            f"weights {weights.shape} do not match features "
            f"{problem.features.shape} and targets {problem.targets.shape}"
        )


def soft_cross_entropy(model: LinearSoftModel, problem: SoftTrainProblem) -> float:
    """Sum-form soft cross-entropy of the model on the problem."""
    _check_shapes(model.weights, problem)
    return _soft_loss(model.weights, problem.features, problem.targets, False)


def mean_soft_cross_entropy(
    model: LinearSoftModel, problem: SoftTrainProblem
) -> float:
    """Per-instance average of :func:`soft_cross_entropy`."""
    _check_shapes(model.weights, problem)
    return _soft_loss(model.weights, problem.features, problem.targets, True)


def _soft_loss(
    weights: np.ndarray, X: np.ndarray, Q: np.ndarray, average: bool
) -> float:
    probs = np.clip(row_softmax(X @ weights), _PROB_FLOOR, 1.0)
    # Per-row reduction first so that one-hot targets reproduce the
    # hard-label loss bit for bit.
    row_terms = (Q * np.log(probs)).sum(axis=1)
    loss = -np.sum(row_terms)
    return float(loss / X.shape[0]) if average else float(loss)


def _soft_grad(
    weights: np.ndarray, X: np.ndarray, Q: np.ndarray, average: bool
) -> np.ndarray:
    probs = row_softmax(X @ weights)
    grad = X.T @ (probs - Q)
    return grad / X.shape[0] if average else grad


def gradient(model: LinearSoftModel, problem: SoftTrainProblem) -> np.ndarray:
    """Analytic gradient of the sum-form loss: X^T (p_theta - q)."""
    _check_shapes(model.weights, problem)
    return _soft_grad(model.weights, problem.features, problem.targets, False)


def _hard_loss(
    weights: np.ndarray, X: np.ndarray, labels: np.ndarray, average: bool
) -> float:
    probs = np.clip(row_softmax(X @ weights), _PROB_FLOOR, 1.0)
    row_terms = np.log(probs)[np.arange(X.shape[0]), labels]
    loss = -np.sum(row_terms)
    return float(loss / X.shape[0]) if average else float(loss)


def _hard_grad(
    weights: np.ndarray, X: np.ndarray, labels: np.ndarray, average: bool
) -> np.ndarray:
    probs = row_softmax(X @ weights)
    probs[np.arange(X.shape[0]), labels] -= 1.0
    grad = X.T @ probs
    return grad / X.shape[0] if average else grad


def _descend(loss_fn, grad_fn, shape: tuple[int, int], config: TrainConfig):
    weights = np.zeros(shape)
    loss = loss_fn(weights)
    if not math.isfinite(loss):
        raise Diverged(f"initial loss is not finite: {loss}")
    trace = [(0, loss)]
    for epoch in range(1, config.epochs + 1):
        grad = grad_fn(weights)
        step = config.learning_rate
        accepted = None
        for _ in range(_MAX_HALVINGS):
            candidate = weights - step * grad
            new_loss = loss_fn(candidate)
            if math.isfinite(new_loss) and new_loss <= loss:
                accepted = (candidate, new_loss)
                break
            step *= 0.5
            if step < _MIN_STEP:
                break
        if accepted is None:
            # No step of any length improves the loss: we are at (or beyond
            # float resolution of) the optimum.
            break
        weights, loss = accepted
        trace.append((epoch, loss))
    if not math.isfinite(loss):
        raise Diverged(f"loss became non-finite: {loss}")
    return weights, trace


def train(problem: SoftTrainProblem, config: TrainConfig | None = None) -> LinearSoftModel:
    """Fit the linear model by full-batch gradient descent.

    Deterministic for a given config: zero-initialized weights and a
    backtracking halving search that only accepts non-increasing loss. The
    seed is carried in the config for data-shuffling extensions but the
    current full-batch loop never consumes randomness.
    """
    config = config or TrainConfig()
    X, Q = problem.features, problem.targets
    weights, trace = _descend(
        lambda w: _soft_loss(w, X, Q, config.average),
        lambda w: _soft_grad(w, X, Q, config.average),
        (X.shape[1], Q.shape[1]),
        config,
    )
    return LinearSoftModel(weights=weights, training_trace=trace)


def train_hard(
    features: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig | None = None,
    n_classes: int = 2,
) -> LinearSoftModel:
    """Plain multinomial logistic regression on integer labels.

    Shares the descent loop with :func:`train` but computes loss and
    gradient through the hard-label formulas; with one-hot soft targets the
    two trainers produce bitwise identical weights.
    """
    config = config or TrainConfig()
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionMismatch("features must be (n, d) and labels (n,)")
    weights, trace = _descend(
        lambda w: _hard_loss(w, X, y, config.average),
        lambda w: _hard_grad(w, X, y, config.average),
        (X.shape[1], n_classes),
        config,
    )
    return LinearSoftModel(weights=weights, training_trace=trace)


def predict_proba(model: LinearSoftModel, features: np.ndarray) -> np.ndarray:
    """Softmax of the linear scores for one row or a matrix of rows."""
    x = np.asarray(features, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != model.weights.shape[0]:
        raise DimensionMismatch(
            f"feature width {x.shape[1]} does not match weights "
            f"{model.weights.shape}"
        )
    probs = row_softmax(x @ model.weights)
    return probs[0] if single else probs
