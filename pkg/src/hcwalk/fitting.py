"""Scaling-law fits for hitting-time data: power law and exponential.

Both models are straight lines after a log transform, so the fits are plain
least squares in log space and the residual is reported there too.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MIN_POINTS = 4


class FitModel(enum.Enum):
    POWER_LAW = "power"
    EXPONENTIAL = "exp"


@dataclass(frozen=True)
class FitResult:
    """``y = coefficient * x**exponent`` or ``y = coefficient * exp(exponent * x)``.

    ``exponent`` is the power-law exponent or the exponential rate depending
    on ``model``; ``residual`` is the RMS misfit of ``log y``.
    """

    model: FitModel
    coefficient: float
    exponent: float
    residual: float
    n_points: int


def fit_scaling(points: Iterable[Sequence[float]], model: FitModel) -> FitResult:
    """Least-squares fit of (x, y) pairs to the chosen scaling model.

    Requires at least four points with positive y (and positive x for the
    power law).
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < MIN_POINTS:
        raise ValueError(f"scaling fit needs at least {MIN_POINTS} points, got {len(pts)}")
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if np.any(ys <= 0):
        raise ValueError("scaling fit requires positive y values")
    if model is FitModel.POWER_LAW:
        if np.any(xs <= 0):
            raise ValueError("power-law fit requires positive x values")
        abscissa = np.log(xs)
    else:
        abscissa = xs
    ordinate = np.log(ys)
    slope, intercept = np.polyfit(abscissa, ordinate, 1)
    predicted = slope * abscissa + intercept
    residual = float(np.sqrt(np.mean((ordinate - predicted) ** 2)))
    return FitResult(
        model=model,
        coefficient=float(np.exp(intercept)),
        exponent=float(slope),
        residual=residual,
        n_points=len(pts),
    )
