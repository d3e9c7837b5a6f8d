"""Autoregressive conditioning: history windows and dynamic biases.

A history window is the flattened concatenation of the previous ``lag``
observations, oldest first. Conditioning shifts the static biases by an
affine function of that window; everything downstream then behaves as a
static RBM with per-date biases. Connections from the past are directed,
so the window never depends on the target it conditions.
"""

import numpy as np

from .data import EncodedSeries
from .model import ModelParams, free_energy, free_energy_terms


def build_windows(encoded, lag: int,
                  context: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Pair each target row with its flattened history window.

    ``encoded`` may be an EncodedSeries or a plain T x D' matrix. Returns
    ``(windows, targets)`` with shapes (P, lag * D') and (P, D') where
    P = T - lag: row t of the input becomes a target once rows
    t - lag .. t - 1 exist to form its window. With lag = 0 every row is a
    target and windows are empty. ``context`` may supply exactly ``lag``
    extra rows prepended as history (e.g. the tail of a contiguous training
    split) so that no leading targets are dropped.

    Raises ValueError when fewer than lag + 1 rows are available.
    """
    matrix = encoded.matrix if isinstance(encoded, EncodedSeries) else np.asarray(encoded, dtype=np.float64)
    if lag < 0:
        raise ValueError("lag must be >= 0")
    if context is not None:
        context = np.asarray(context, dtype=np.float64)
        if context.shape != (lag, matrix.shape[1]):
            raise ValueError(f"context must be exactly {lag} rows of width {matrix.shape[1]}")
        full = np.vstack([context, matrix])
    else:
        full = matrix
    n_rows, width = full.shape
    n_pairs = n_rows - lag
    if n_pairs < 1:
        raise ValueError(f"need more than lag={lag} rows, got {n_rows}")
    if lag == 0:
        return np.zeros((n_pairs, 0)), full.copy()
    starts = np.arange(n_pairs)[:, None] + np.arange(lag)[None, :]
    windows = full[starts].reshape(n_pairs, lag * width)
    targets = full[lag:].copy()
    return windows, targets


def dynamic_hidden_bias(window: np.ndarray, m: ModelParams) -> np.ndarray:
    """b + B' w for a single window or a batch of window rows.

    With no autoregressive hidden weights the static bias is returned
    as-is, which keeps the static reduction bit-identical.
    """
    if m.B.size == 0:
        return m.b
    window = np.asarray(window, dtype=np.float64)
    if window.shape[-1] != m.window_size:
        raise ValueError(f"window length {window.shape[-1]} != lag * n_visible = {m.window_size}")
    return m.b + window @ m.B


def dynamic_visible_bias(window: np.ndarray, m: ModelParams) -> np.ndarray:
    """a + A' w, analogous to dynamic_hidden_bias."""
    if m.A.size == 0:
        return m.a
    window = np.asarray(window, dtype=np.float64)
    if window.shape[-1] != m.window_size:
        raise ValueError(f"window length {window.shape[-1]} != lag * n_visible = {m.window_size}")
    return m.a + window @ m.A


def conditional_free_energy(v: np.ndarray, window: np.ndarray, m: ModelParams) -> np.ndarray:
    """Free energy of v evaluated at the window's dynamic biases."""
    return free_energy(v, m, dynamic_visible_bias(window, m), dynamic_hidden_bias(window, m))


def conditional_free_energy_terms(v: np.ndarray, window: np.ndarray,
                                  m: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """(visible term, structural term) at the window's dynamic biases."""
    return free_energy_terms(v, m, dynamic_visible_bias(window, m),
                             dynamic_hidden_bias(window, m))
