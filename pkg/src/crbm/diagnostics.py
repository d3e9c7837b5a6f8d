"""Free-energy surveillance and real-versus-synthetic fidelity measures.

The conditional free energy of each observation given its history is a
scalar anomaly score: rows the model finds improbable get high values. Its
two components localize the surprise. The quadratic term grows when the
observation itself sits far from the predicted center (a shock in the
values); the structural term moves when the hidden units stop recognizing
the joint pattern (a change in dependence structure). A rolling z-score
rule turns the total into regime flags.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .data import EncodedSeries
from .dynamics import build_windows, conditional_free_energy_terms
from .generation import _safe_correlation
from .model import ModelParams

FLAG_WINDOW = 60
FLAG_THRESHOLD = 4.0


@dataclass
class FreeEnergySeries:
    """Per-row free energy and its decomposition, total = quadratic +
    structural (exactly, both are computed from the same intermediates).

    For a Bernoulli model the ``quadratic`` slot carries the linear
    visible-bias term, the only non-softplus part of its free energy; the
    name follows the Gaussian case that diagnostics target. ``labels``
    aligns rows with input dates (or step indices when dates are unknown).
    """

    labels: list
    total: np.ndarray
    quadratic: np.ndarray
    structural: np.ndarray

    def __len__(self) -> int:
        return self.total.shape[0]


def free_energy_series(encoded: EncodedSeries, m: ModelParams,
                       labels=None) -> FreeEnergySeries:
    """Score every row of an encoded series under its own history.

    The first ``m.lag`` rows only seed histories and receive no score.
    ``labels`` (optional) must cover the full series; the first lag entries
    are dropped to stay aligned.
    """
    windows, targets = build_windows(encoded, m.lag)
    quadratic, structural = conditional_free_energy_terms(targets, windows, m)
    quadratic = np.atleast_1d(quadratic)
    structural = np.atleast_1d(structural)
    if labels is None:
        if encoded.dates is not None:
            labels = list(encoded.dates)
        else:
            labels = list(range(encoded.n_rows))
    if len(labels) != encoded.n_rows:
        raise ValueError("label count does not match series length")
    return FreeEnergySeries(labels=list(labels[m.lag:]), total=quadratic + structural,
                            quadratic=quadratic, structural=structural)


def regime_flags(total: np.ndarray, window: int = FLAG_WINDOW,
                 threshold: float = FLAG_THRESHOLD) -> np.ndarray:
    """Flag rows whose score exceeds a rolling mean + threshold * std.

    The statistics come from the ``window`` scores strictly before each
    row, so a flagged row never contaminates its own baseline. The first
    ``window`` rows have no full baseline and are never flagged.
    """
    total = np.asarray(total, dtype=np.float64)
    if total.ndim != 1:
        raise ValueError("expected a 1-D score array")
    if window < 2:
        raise ValueError("window must be >= 2")
    flags = np.zeros(total.shape[0], dtype=bool)
    if total.shape[0] <= window:
        return flags
    prior = sliding_window_view(total[:-1], window)
    cutoff = prior.mean(axis=1) + threshold * prior.std(axis=1)
    # threshold=inf with a zero std makes the cutoff NaN; treat as no flag
    with np.errstate(invalid="ignore"):
        flags[window:] = total[window:] > cutoff
    return flags


@dataclass
class CorrelationFidelity:
    """How well the synthetic series reproduces cross-asset correlations.

    ``difference`` is synthetic minus real, entrywise; ``score`` is the
    mean absolute off-diagonal difference (0.0 for a single asset, NaN
    pairs from constant columns excluded).
    """

    real: np.ndarray
    synthetic: np.ndarray
    difference: np.ndarray
    score: float


def correlation_fidelity(real: np.ndarray, synthetic: np.ndarray) -> CorrelationFidelity:
    real = np.asarray(real, dtype=np.float64)
    synthetic = np.asarray(synthetic, dtype=np.float64)
    if real.ndim != 2 or synthetic.ndim != 2:
        raise ValueError("expected 2-D value matrices")
    if real.shape[1] != synthetic.shape[1]:
        raise ValueError("real and synthetic series have different asset counts")
    corr_real = _safe_correlation(real)
    corr_synth = _safe_correlation(synthetic)
    diff = corr_synth - corr_real
    off = ~np.eye(diff.shape[0], dtype=bool)
    valid = off & np.isfinite(diff)
    score = float(np.mean(np.abs(diff[valid]))) if np.any(valid) else 0.0
    return CorrelationFidelity(corr_real, corr_synth, diff, score)


@dataclass
class QQTable:
    """Matched quantiles of a real and a synthetic sample, for Q-Q plots."""

    levels: np.ndarray
    real: np.ndarray
    synthetic: np.ndarray


def qq_table(real: np.ndarray, synthetic: np.ndarray, n_quantiles: int = 99) -> QQTable:
    """Quantiles at levels k / (n_quantiles + 1), k = 1..n_quantiles."""
    real = np.asarray(real, dtype=np.float64).ravel()
    synthetic = np.asarray(synthetic, dtype=np.float64).ravel()
    if n_quantiles < 1:
        raise ValueError("n_quantiles must be >= 1")
    if real.shape[0] < n_quantiles or synthetic.shape[0] < n_quantiles:
        raise ValueError("need at least n_quantiles values in each sample")
    levels = np.arange(1, n_quantiles + 1) / (n_quantiles + 1)
    return QQTable(levels=levels, real=np.quantile(real, levels),
                   synthetic=np.quantile(synthetic, levels))
