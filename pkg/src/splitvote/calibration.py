"""Post-hoc confidence calibration via temperature scaling.

A single scalar t > 0 divides the logits before the softmax. This leaves the
argmax (and therefore every F1 score) untouched while flattening (t > 1) or
sharpening (t < 1) the predictive distribution. The temperature is chosen by
grid search on a development set, minimizing either the mean negative
log-likelihood of the gold labels or the expected calibration error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import EmptyInput, InvalidTemperature
from .metrics import PredictionRecord, ece, softmax

_PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class TemperatureGrid:
    """Inclusive search grid lo, lo+step, ..., up to hi."""

    lo: float = 0.25
    hi: float = 10.0
    step: float = 0.05

    def __post_init__(self) -> None:
        if not 0.0 < self.lo < self.hi:
            raise ValueError("grid needs 0 < lo < hi")
        if self.step <= 0.0:
            raise ValueError("grid step must be positive")

    def points(self) -> list[float]:
        count = int(math.floor((self.hi - self.lo) / self.step + 1e-9))
        return [self.lo + k * self.step for k in range(count + 1)]

    @staticmethod
    def parse(text: str) -> "TemperatureGrid":
        """Parse a "lo:hi:step" grid specification."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected lo:hi:step, got {text!r}")
        lo, hi, step = (float(p) for p in parts)
        return TemperatureGrid(lo, hi, step)


@dataclass(frozen=True)
class Temperature:
    """A fitted temperature and the development objective it minimized."""

    t: float
    objective: str
    dev_objective_value: float

    def __post_init__(self) -> None:
        if self.t <= 0.0:
            raise InvalidTemperature(f"temperature must be positive: {self.t}")


def apply_temperature(logits: Sequence[float], t: float) -> tuple[float, float]:
    """softmax(logits / t); keeps the argmax of the raw logits."""
    if t <= 0.0:
        raise InvalidTemperature(f"temperature must be positive: {t}")
    return softmax((logits[0] / t, logits[1] / t))


def scale_records(
    records: Sequence[PredictionRecord], t: float
) -> list[PredictionRecord]:
    """Return copies of the records with logits divided by t."""
    if t <= 0.0:
        raise InvalidTemperature(f"temperature must be positive: {t}")
    return [
        replace(r, logits=(r.logits[0] / t, r.logits[1] / t)) for r in records
    ]


def nll(records: Sequence[PredictionRecord], t: float = 1.0) -> float:
    """Mean negative log-likelihood of the gold labels at temperature t.

    Probabilities are floored at 1e-12 before the logarithm.
    """
    if not records:
        raise EmptyInput("cannot compute NLL over zero records")
    total = math.fsum(
        -math.log(max(apply_temperature(r.logits, t)[r.gold], _PROB_FLOOR))
        for r in records
    )
    return total / len(records)


def fit_temperature(
    dev: Sequence[PredictionRecord],
    objective: str = "nll",
    grid: TemperatureGrid | None = None,
    ece_bins: int = 10,
) -> Temperature:
    """Grid-search the temperature that minimizes an objective on dev data.

    ``objective`` is "nll" (default) or "ece". Points are visited in
    ascending order and only a strict improvement moves the optimum, so ties
    resolve toward the smaller temperature.
    """
    if not dev:
        raise EmptyInput("cannot fit a temperature on zero records")
    if objective not in ("nll", "ece"):
        raise ValueError(f"objective must be 'nll' or 'ece': {objective!r}")
    if grid is None:
        grid = TemperatureGrid()
    best_t = None
    best_value = math.inf
    for t in grid.points():
        if objective == "nll":
            value = nll(dev, t)
        else:
            value = ece(scale_records(dev, t), ece_bins).ece
        if value < best_value:
            best_t, best_value = t, value
    return Temperature(t=best_t, objective=objective, dev_objective_value=best_value)
