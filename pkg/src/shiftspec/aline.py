"""Accuracy-on-the-line auditing: probit regression, verdicts, stability.

Accuracies are clamped away from {0, 1}, probit-transformed, and OOD is
regressed on ID by ordinary least squares. A split is flagged well-specified
when the Pearson correlation of the transformed pairs falls below the
configured threshold (0.3 by default), which also captures inverse-line
behavior.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analytic import normal_quantile, pearson_p_value
from .rng import RandomStream
from .util import parallel_map

DEFAULT_CLIP_ALPHA = 1e-4
DEFAULT_THRESHOLD = 0.3


@dataclass(frozen=True)
class AccuracyPair:
    """One classifier's ID and OOD accuracy."""

    model_id: str
    id_acc: float
    ood_acc: float

    def __post_init__(self):
        for name, v in (("id_acc", self.id_acc), ("ood_acc", self.ood_acc)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class AlineFit:
    """Probit-scale regression summary of OOD accuracy on ID accuracy."""

    slope: float
    intercept: float
    pearson_r: float
    p_value: float
    std_err: float
    n: int
    clip_alpha: float

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "pearson_r": self.pearson_r, "p_value": self.p_value,
                "std_err": self.std_err, "n": self.n,
                "clip_alpha": self.clip_alpha}


class Verdict(enum.Enum):
    WELL_SPECIFIED = "well_specified"
    MISSPECIFIED = "misspecified"


def probit_points(pairs: Sequence[AccuracyPair],
                  clip_alpha: float) -> tuple[np.ndarray, np.ndarray]:
    if not 0.0 < clip_alpha < 0.5:
        raise ValueError("clip_alpha must lie in (0, 0.5)")
    ids = np.array([p.id_acc for p in pairs])
    oods = np.array([p.ood_acc for p in pairs])
    ids = np.clip(ids, clip_alpha, 1.0 - clip_alpha)
    oods = np.clip(oods, clip_alpha, 1.0 - clip_alpha)
    return normal_quantile(ids), normal_quantile(oods)


def fit_probit_line(pairs: Sequence[AccuracyPair],
                    clip_alpha: float = DEFAULT_CLIP_ALPHA) -> AlineFit:
    """OLS of probit(ood) on probit(id) with Pearson R and its p-value."""
    if len(pairs) < 3:
        raise ValueError("need at least 3 accuracy pairs")
    x, y = probit_points(pairs, clip_alpha)
    n = len(pairs)
    x_mean = float(x.mean())
    y_mean = float(y.mean())
    sxx = float(np.sum((x - x_mean) ** 2))
    syy = float(np.sum((y - y_mean) ** 2))
    sxy = float(np.sum((x - x_mean) * (y - y_mean)))
    if sxx <= 0.0:
        raise ValueError("degenerate sweep: ID accuracies have zero variance")

    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    if syy <= 0.0:
        r = 0.0
    else:
        r = sxy / math.sqrt(sxx * syy)
        r = max(-1.0, min(1.0, r))
    p = pearson_p_value(r, n)

    resid = y - (intercept + slope * x)
    if n > 2:
        std_err = math.sqrt(float(np.sum(resid ** 2)) / (n - 2) / sxx)
    else:
        std_err = 0.0
    return AlineFit(slope=slope, intercept=intercept, pearson_r=r, p_value=p,
                    std_err=std_err, n=n, clip_alpha=clip_alpha)


def classify_split(fit: AlineFit, threshold: float = DEFAULT_THRESHOLD) -> Verdict:
    """Well-specified iff Pearson R is strictly below the threshold."""
    if threshold <= 0.0:
        raise ValueError("threshold must be positive")
    return Verdict.WELL_SPECIFIED if fit.pearson_r < threshold else Verdict.MISSPECIFIED


def correlation_epsilon(pairs: Sequence[AccuracyPair], a: float,
                        clip_alpha: float = DEFAULT_CLIP_ALPHA) -> float:
    """Smallest eps such that |probit(id) - a probit(ood)| <= eps for all pairs."""
    if not pairs:
        raise ValueError("need at least 1 accuracy pair")
    x, y = probit_points(pairs, clip_alpha)
    return float(np.max(np.abs(x - a * y)))


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    den = math.sqrt(float(np.sum(xc * xc)) * float(np.sum(yc * yc)))
    if den == 0.0:
        return 0.0
    return float(np.sum(xc * yc)) / den


def min_model_count(pairs: Sequence[AccuracyPair], rel_tol: float = 0.01,
                    resamples: int = 1000, confidence: float = 0.95,
                    start: int = 10, step: int = 100,
                    clip_alpha: float = DEFAULT_CLIP_ALPHA,
                    seed: int = 0) -> int | None:
    """First prefix size at which Pearson R is bootstrap-stable, else None.

    At each size s the question is whether R would move by more than rel_tol
    (relatively) when the next `step` models arrive. Each bootstrap draw
    resamples the first s pairs, extends that base with a resample of the
    (s, s+step] block, and compares the two Pearson R values; stability
    requires the `confidence` quantile of the relative change to fall below
    rel_tol. None signals the scan exhausted the list (NotReached).
    """
    if rel_tol <= 0.0:
        raise ValueError("rel_tol must be positive")
    if resamples < 100:
        raise ValueError("need at least 100 bootstrap resamples")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    n = len(pairs)
    if n < start:
        raise ValueError(f"need at least start={start} pairs, got {n}")

    x, y = probit_points(pairs, clip_alpha)
    stream = RandomStream(seed)

    def one_delta(size: int, b: int) -> float:
        sub = stream.substream(size * 1_000_003 + b)
        base = sub.integers(size, size=size)
        ext = size + sub.integers(step, size=step)
        grown = np.concatenate([base, ext])
        r_base = _pearson(x[base], y[base])
        r_grown = _pearson(x[grown], y[grown])
        return (abs(r_grown - r_base) / abs(r_base)
                if r_base != 0.0 else math.inf)

    size = start
    while size + step <= n:
        deltas = parallel_map(lambda b, s=size: one_delta(s, b),
                              list(range(resamples)))
        if float(np.quantile(deltas, confidence)) < rel_tol:
            return size
        size += step
    return None
