"""Evaluators for the well-specification conditions and bound formulas.

Three layers live here: scalar condition checks (reversal margin, SNR
comparison), the concentration-bound evaluators, and the zero-measure
experiment that measures how often a random shift is simultaneously
well-specified and on the accuracy line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .aline import AccuracyPair
from .analytic import normal_cdf, normal_pdf, normal_quantile
from .core import (BoundParams, DomainSpec, LinearClassifier, LinearShift,
                   Mask, ShiftSpec)
from .synthgen import random_shift, sample_domain
from .trainer import OptimizerSettings, fit_logistic
from .util import parallel_map


@dataclass(frozen=True)
class ConditionReport:
    """Evaluated shift conditions for one (classifier, shift) instance."""

    reversal_term: float
    theorem1_margin: float
    theorem1_well_specified: bool
    snr_id: float
    snr_ood: float
    theorem2_well_specified: bool

    def to_dict(self) -> dict:
        return {"reversal_term": self.reversal_term,
                "theorem1_margin": self.theorem1_margin,
                "theorem1_well_specified": self.theorem1_well_specified,
                "snr_id": self.snr_id,
                "snr_ood": self.snr_ood,
                "theorem2_well_specified": self.theorem2_well_specified}


def theorem1_margin(w_e, m_mu_e, l_phi: float, kappa: float, delta: float) -> float:
    """Reversal margin w_e.(M mu_e) + sqrt(2) L_phi kappa ||w_e|| sqrt(log 1/delta).

    Negative values certify a well-specified shift with probability at
    least 1 - delta.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if kappa < 0.0 or l_phi < 0.0:
        raise ValueError("kappa and l_phi must be nonnegative")
    w_e = np.asarray(w_e, dtype=np.float64)
    m_mu_e = np.asarray(m_mu_e, dtype=np.float64)
    penalty = math.sqrt(2.0) * l_phi * kappa * float(np.linalg.norm(w_e))
    return float(w_e @ m_mu_e) + penalty * math.sqrt(math.log(1.0 / delta))


@dataclass(frozen=True)
class Theorem2Result:
    snr_ood: float
    snr_id: float
    well_specified: bool


def theorem2_compare(w_c, mu_c, sigma_c, w_e, m_mu_e, sigma_phi) -> Theorem2Result:
    """Exact SNR comparison: well-specified iff the shifted SNR drops."""
    w_c = np.asarray(w_c, dtype=np.float64)
    w_e = np.asarray(w_e, dtype=np.float64)
    var_c = float(w_c @ np.asarray(sigma_c) @ w_c)
    var_e = float(w_e @ np.asarray(sigma_phi) @ w_e)
    if var_c <= 0.0 or var_c + var_e <= 0.0:
        raise ValueError("degenerate denominators in SNR comparison")
    signal_id = float(w_c @ np.asarray(mu_c))
    snr_id = signal_id / math.sqrt(var_c)
    snr_ood = (signal_id + float(w_e @ np.asarray(m_mu_e))) / math.sqrt(var_c + var_e)
    return Theorem2Result(snr_ood=snr_ood, snr_id=snr_id,
                          well_specified=snr_ood < snr_id)


def lipschitz_of_linear(m) -> float:
    """Operator 2-norm of a matrix by power iteration on M'M."""
    m = np.asarray(m, dtype=np.float64)
    if not np.any(m):
        return 0.0
    dim = m.shape[1]
    v = np.ones(dim) + 1e-3 * np.arange(dim)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(10_000):
        u = m @ v
        w = m.T @ u
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return 0.0
        sigma_new = math.sqrt(float(v @ w))
        v = w / norm_w
        if abs(sigma_new - sigma) <= 1e-10 * max(sigma_new, 1.0):
            return sigma_new
        sigma = sigma_new
    return sigma


def gaussian_kappa(sigma) -> float:
    """Sub-Gaussian parameter for a Gaussian: sqrt of the largest eigenvalue."""
    vals = np.linalg.eigvalsh(np.asarray(sigma, dtype=np.float64))
    return math.sqrt(max(float(vals[-1]), 0.0))


def kappa_of_mixture(components: Sequence[tuple[float, np.ndarray, np.ndarray]]) -> float:
    """Conservative sub-Gaussian parameter for a finite mixture.

    Max component parameter plus the largest deviation of a component mean
    from the mixture mean.
    """
    if not components:
        raise ValueError("mixture must have at least one component")
    weights = np.array([float(w) for w, _, _ in components])
    means = [np.asarray(mu, dtype=np.float64) for _, mu, _ in components]
    mixture_mean = sum(w * mu for w, mu in zip(weights, means))
    kappa_comp = max(gaussian_kappa(cov) for _, _, cov in components)
    spread = max(float(np.linalg.norm(mu - mixture_mean)) for mu in means)
    return kappa_comp + spread


def shift_moments(shift: ShiftSpec, mu_e, sigma_e) -> tuple[np.ndarray, np.ndarray]:
    """Mean matrix and class-conditional covariance of the shifted block.

    For a mixture the covariance picks up the between-component spread of
    the shifted means on top of the weighted within-component covariances.
    """
    mu_e = np.asarray(mu_e, dtype=np.float64)
    sigma_e = np.asarray(sigma_e, dtype=np.float64)
    matrices = shift.matrices(len(mu_e))
    weights = shift.weights()
    m_mean = sum(float(w) * m for w, m in zip(weights, matrices))
    mean_shifted = m_mean @ mu_e
    sigma_phi = np.zeros_like(sigma_e)
    for w, m in zip(weights, matrices):
        comp_mean = m @ mu_e
        dev = comp_mean - mean_shifted
        sigma_phi += float(w) * (m @ sigma_e @ m.T + np.outer(dev, dev))
    return m_mean, sigma_phi


def condition_report(classifier: LinearClassifier, spec: DomainSpec,
                     m: np.ndarray, delta: float,
                     kappa: float | None = None,
                     l_phi: float | None = None,
                     sigma_phi: np.ndarray | None = None) -> ConditionReport:
    """Evaluate both shift conditions for a full classifier under shift M."""
    m = np.asarray(m, dtype=np.float64)
    if kappa is None:
        kappa = gaussian_kappa(spec.sigma_e)
    if l_phi is None:
        l_phi = lipschitz_of_linear(m)
    if sigma_phi is None:
        sigma_phi = m @ spec.sigma_e @ m.T
    m_mu_e = m @ spec.mu_e
    reversal = float(np.asarray(classifier.w_e) @ m_mu_e)
    margin = theorem1_margin(classifier.w_e, m_mu_e, l_phi, kappa, delta)
    t2 = theorem2_compare(classifier.w_c, spec.mu_c, spec.sigma_c,
                          classifier.w_e, m_mu_e, sigma_phi)
    return ConditionReport(reversal_term=reversal,
                           theorem1_margin=margin,
                           theorem1_well_specified=margin < 0.0,
                           snr_id=t2.snr_id,
                           snr_ood=t2.snr_ood,
                           theorem2_well_specified=t2.well_specified)


def aotl_bound(params: BoundParams, w_e, m=None, mu_e=None, sigma_e=None) -> float:
    """Accuracy-on-the-line deviation bound.

    Evaluates L B (||w_e|| eps1 + C sqrt(log 1/delta) + sqrt(eps2)) + zeta
    with C = c kappa max(||w_e||, L_phi ||w_e||) and L the Lipschitz constant
    of the probit on the clipped accuracy interval. eps1/eps2 and L_phi are
    computed from (m, mu_e, sigma_e) when those are supplied, otherwise the
    values in params are used.
    """
    problems = params.validate()
    if problems:
        raise ValueError("invalid params: " + "; ".join(problems))
    w_e = np.asarray(w_e, dtype=np.float64)
    w_norm = float(np.linalg.norm(w_e))

    eps1, eps2, l_phi = params.eps1, params.eps2, params.l_phi
    if m is not None and mu_e is not None:
        mu_e = np.asarray(mu_e, dtype=np.float64)
        m = np.asarray(m, dtype=np.float64)
        eps1 = float(np.linalg.norm(m @ mu_e - mu_e))
        l_phi = lipschitz_of_linear(m)
        if sigma_e is not None:
            sigma_e = np.asarray(sigma_e, dtype=np.float64)
            sigma_phi = m @ sigma_e @ m.T
            eps2 = abs(float(w_e @ sigma_phi @ w_e) - float(w_e @ sigma_e @ w_e))

    lip = probit_lipschitz(params.clip_alpha)
    c_const = params.lemma_c * params.kappa * max(w_norm, l_phi * w_norm)
    zeta = abs(1.0 - params.slope_a) * float(normal_quantile(1.0 - params.clip_alpha))
    core = (w_norm * eps1
            + c_const * math.sqrt(math.log(1.0 / params.delta))
            + math.sqrt(eps2))
    return lip * params.tsybakov_b * core + zeta


def probit_lipschitz(clip_alpha: float) -> float:
    """Lipschitz constant of the probit on [alpha, 1-alpha]."""
    if not 0.0 < clip_alpha < 0.5:
        raise ValueError("clip_alpha must lie in (0, 0.5)")
    edge = float(normal_quantile(1.0 - clip_alpha))
    return 1.0 / float(normal_pdf(edge))


@dataclass(frozen=True)
class TradeoffBound:
    """Lower bound on the probit gap forced by spurious-correlation reversal."""

    bound: float
    mean_shift: float
    mean_shift_lower: float
    reversal_condition_positive: bool


def tradeoff_lower_bound(params: BoundParams, w_e, mu_e, m) -> TradeoffBound:
    """Evaluate C ||w_e|| sqrt(log 1/delta) ||M mu_e - mu_e|| - zeta.

    The folded constant C is params.lemma_c. Also reports the auxiliary
    lower bound (gamma + w_e.mu_e)/||w_e|| on the mean shift and whether
    gamma + w_e.mu_e is strictly positive.
    """
    problems = params.validate()
    if problems:
        raise ValueError("invalid params: " + "; ".join(problems))
    w_e = np.asarray(w_e, dtype=np.float64)
    mu_e = np.asarray(mu_e, dtype=np.float64)
    m = np.asarray(m, dtype=np.float64)
    w_norm = float(np.linalg.norm(w_e))
    mean_shift = float(np.linalg.norm(m @ mu_e - mu_e))
    zeta = abs(1.0 - params.slope_a) * float(normal_quantile(1.0 - params.clip_alpha))
    bound = (params.lemma_c * w_norm * math.sqrt(math.log(1.0 / params.delta))
             * mean_shift - zeta)
    margin_sum = params.gamma + float(w_e @ mu_e)
    lower = margin_sum / w_norm if w_norm > 0.0 else 0.0
    return TradeoffBound(bound=bound, mean_shift=mean_shift,
                         mean_shift_lower=lower,
                         reversal_condition_positive=margin_sum > 0.0)


def reflection_alpha_threshold(w_e, mu_e, sigma_e, delta: float) -> float:
    """Scale above which the reflection shift certifies reversal."""
    w_e = np.asarray(w_e, dtype=np.float64)
    mu_e = np.asarray(mu_e, dtype=np.float64)
    signal = float(w_e @ mu_e)
    if signal <= 0.0:
        raise ValueError("w_e . mu_e must be positive")
    var = float(w_e @ np.asarray(sigma_e) @ w_e)
    return math.sqrt(2.0 * var * math.log(1.0 / delta)) / signal


def accuracy_under_shift(classifier: LinearClassifier, spec: DomainSpec,
                         shift: ShiftSpec | None = None) -> float:
    """Exact accuracy of a linear rule on the spec with the given shift.

    Mixtures decompose into their Gaussian components, so the result is the
    weight-averaged closed form per component.
    """
    shift = spec.shift if shift is None else shift
    w_c = np.asarray(classifier.w_c)
    w_e = np.asarray(classifier.w_e)
    bias = classifier.bias
    signal_c = float(w_c @ spec.mu_c)
    var_c = float(w_c @ spec.sigma_c @ w_c)
    total = 0.0
    matrices = shift.matrices(spec.l)
    weights = shift.weights()
    for weight, m in zip(weights, matrices):
        signal = signal_c + float(w_e @ (m @ spec.mu_e))
        var = var_c + float(w_e @ (m @ spec.sigma_e @ m.T) @ w_e)
        if var <= 0.0:
            raise ValueError("degenerate projection: zero score variance")
        sd = math.sqrt(var)
        # a bias breaks the ±mu symmetry: average the two class-conditional
        # correct-side probabilities
        acc = 0.5 * (float(normal_cdf((signal + bias) / sd))
                     + float(normal_cdf((signal - bias) / sd)))
        total += float(weight) * acc
    return total


def classifier_sweep(spec: DomainSpec, n: int, seed: int,
                     reliance_grid: Sequence[float],
                     l2: float = 1e-3,
                     n_seeds: int = 3,
                     opts: OptimizerSettings = OptimizerSettings()) -> list[LinearClassifier]:
    """Family of full classifiers spanning the spurious-reliance path.

    Each entry is a full logistic fit on a fresh sample of n points with the
    spurious block's ridge scaled by one grid value; large scales approach
    the domain-general fit, small scales lean harder on spurious features.
    """
    if len(reliance_grid) == 0:
        raise ValueError("reliance grid must be nonempty")
    models = []
    task = 0
    for rho in reliance_grid:
        for _ in range(n_seeds):
            data = sample_domain(spec, n, seed * 1_000_003 + task)
            fit_opts = OptimizerSettings(tol=opts.tol, max_iters=opts.max_iters,
                                         bias=opts.bias,
                                         spurious_l2_scale=float(rho))
            models.append(fit_logistic(data, Mask.FULL, l2, fit_opts))
            task += 1
    return models


def sweep_pairs(models: Sequence[LinearClassifier], spec: DomainSpec,
                ood_shift: ShiftSpec) -> list[AccuracyPair]:
    """Analytic (ID, OOD) accuracy pairs for a classifier family."""
    pairs = []
    for i, model in enumerate(models):
        acc_id = accuracy_under_shift(model, spec)
        acc_ood = accuracy_under_shift(model, spec, ood_shift)
        pairs.append(AccuracyPair(model_id=f"model_{i:04d}",
                                  id_acc=acc_id, ood_acc=acc_ood))
    return pairs


DEFAULT_RELIANCE_GRID = tuple(float(x) for x in np.geomspace(1e-3, 1e3, 13))


@dataclass(frozen=True)
class ZeroMeasureResult:
    """Empirical fractions of shifts inside the well-specified-and-on-the-line set."""

    eps_grid: tuple[float, ...]
    fractions: tuple[float, ...]
    margins: tuple[float, ...]
    residuals: tuple[float, ...]
    trials: int

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.eps_grid, self.fractions))

    def to_csv(self) -> str:
        lines = ["eps,fraction_well_specified_on_line"]
        lines += [f"{eps:.17g},{frac:.17g}" for eps, frac in self.rows()]
        return "\n".join(lines) + "\n"


def zero_measure_experiment(spec: DomainSpec, eps_grid: Sequence[float],
                            trials: int, n_per_domain: int, seed: int,
                            delta: float = 0.1, shift_scale: float = 2.0,
                            reliance_grid: Sequence[float] = DEFAULT_RELIANCE_GRID,
                            n_seeds: int = 2) -> ZeroMeasureResult:
    """Estimate how often a random shift is well-specified yet on the line.

    For each sampled shift the reversal margin is tested on the reference
    full fit and the per-sweep slope is fit by zero-intercept least squares
    on the probit scale; the max probit residual over the sweep is the
    smallest eps the shift supports. Fractions are nondecreasing in eps by
    construction because every trial shares one (margin, residual) pair.
    """
    if trials < 100:
        raise ValueError("trials must be at least 100")
    if any(e < 0 for e in eps_grid):
        raise ValueError("eps grid must be nonnegative")

    models = classifier_sweep(spec, n_per_domain, seed, reliance_grid,
                              n_seeds=n_seeds)
    reference = fit_logistic(sample_domain(spec, n_per_domain, seed ^ 0x5EED),
                             Mask.FULL, 1e-3)
    kappa = gaussian_kappa(spec.sigma_e)

    acc_id = np.array([accuracy_under_shift(mdl, spec) for mdl in models])
    if float(np.ptp(acc_id)) < 1e-12:
        raise ValueError("degenerate sweep: all accuracies equal")
    probit_id = normal_quantile(np.clip(acc_id, 1e-12, 1.0 - 1e-12))

    sxx = float(probit_id @ probit_id)
    if sxx <= 0.0:
        raise ValueError("degenerate sweep: zero probit variance")

    def run_trial(t: int) -> tuple[float, float]:
        m = random_shift(spec.l, shift_scale, seed * 7_919 + t)
        margin = theorem1_margin(reference.w_e, m @ spec.mu_e,
                                 lipschitz_of_linear(m), kappa, delta)
        acc_ood = np.array([accuracy_under_shift(mdl, spec, LinearShift(m))
                            for mdl in models])
        probit_ood = normal_quantile(np.clip(acc_ood, 1e-12, 1.0 - 1e-12))
        slope = float(probit_ood @ probit_id) / sxx
        residual = float(np.max(np.abs(probit_ood - slope * probit_id)))
        return margin, residual

    outcomes = parallel_map(run_trial, list(range(trials)))
    margins = np.array([m for m, _ in outcomes])
    residuals = np.array([r for _, r in outcomes])

    fractions = []
    for eps in eps_grid:
        inside = (margins < 0.0) & (residuals <= eps)
        fractions.append(float(np.mean(inside)))
    return ZeroMeasureResult(eps_grid=tuple(float(e) for e in eps_grid),
                             fractions=tuple(fractions),
                             margins=tuple(margins.tolist()),
                             residuals=tuple(residuals.tolist()),
                             trials=trials)
