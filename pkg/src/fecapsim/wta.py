"""Stochastic winner-take-all softmax approximation.

Each firing event selects argmax(scores + sigma * N(0, 1)); the support is
the top support_width indices by winner frequency over the ensemble, and the
output weights are the exact softmax of the raw scores restricted to that
support.  The comparator count per query drops from T to
support_width * ensemble_size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import stream


@dataclass(frozen=True)
class WtaConfig:
    """Sampler operating point.

    score_noise: standard deviation added to scores per firing event
    support_width: number of winners kept (top-k width)
    ensemble_size: independent firing events averaged per query
    """

    score_noise: float = 0.5
    support_width: int = 8
    ensemble_size: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.score_noise < 0:
            raise ValueError("score_noise must be non-negative")
        if self.support_width < 1 or self.ensemble_size < 1:
            raise ValueError("support_width and ensemble_size must be >= 1")


def noisy_argmax_counts(scores: np.ndarray, score_noise: float, n_events: int, seed: int) -> np.ndarray:
    """Winner counts over n_events independent noisy-argmax firings."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.size < 1:
        raise ValueError("scores must be a non-empty vector")
    if score_noise == 0:
        counts = np.zeros(scores.size, dtype=np.int64)
        counts[int(np.argmax(scores))] = n_events
        return counts
    gen = stream(seed, "wta-fire")
    noisy = scores[None, :] + score_noise * gen.standard_normal((n_events, scores.size))
    winners = np.argmax(noisy, axis=1)
    return np.bincount(winners, minlength=scores.size)


def wta_softmax(scores: np.ndarray, cfg: WtaConfig) -> np.ndarray:
    """Sparse softmax approximation from an ensemble of noisy argmax events.

    Support selection ranks indices by winner frequency, breaking ties by
    raw score and then by lowest index, so the result is deterministic given
    the seed.  Weights are the exact softmax of the raw scores renormalized
    on the support; they are non-negative and sum to 1.
    """
    scores = np.asarray(scores, dtype=np.float64)
    counts = noisy_argmax_counts(scores, cfg.score_noise, cfg.ensemble_size, cfg.seed)
    order = np.lexsort((np.arange(scores.size), -scores, -counts))
    support = order[: min(cfg.support_width, scores.size)]
    shifted = scores[support] - scores[support].max()
    masses = np.exp(shifted)
    weights = np.zeros_like(scores)
    weights[support] = masses / masses.sum()
    return weights


def wta_energy_reduction(context_tokens: int, cfg: WtaConfig) -> float:
    """Comparator-count reduction T / (support_width * ensemble_size)."""
    if context_tokens < 1:
        raise ValueError("context_tokens must be >= 1")
    return context_tokens / (cfg.support_width * cfg.ensemble_size)


def exact_softmax(scores: np.ndarray) -> np.ndarray:
    scores = np.asarray(scores, dtype=np.float64)
    shifted = scores - scores.max()
    weights = np.exp(shifted)
    return weights / weights.sum()


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Total-variation distance between two distributions."""
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def tv_vs_ensemble(
    ensemble_sizes,
    n_rows: int = 200,
    length: int = 64,
    score_noise: float = 0.5,
    support_width: int = 8,
    seed: int = 0,
) -> list[tuple[int, float]]:
    """Mean TV distance to the exact softmax as the ensemble grows.

    Desk-scale demonstration on unit-scale random score rows.
    """
    gen = stream(seed, "demo-wta")
    rows = gen.standard_normal((n_rows, length))
    curve = []
    for k_ens in ensemble_sizes:
        distances = []
        for i in range(n_rows):
            cfg = WtaConfig(score_noise=score_noise, support_width=support_width, ensemble_size=k_ens, seed=seed + i)
            distances.append(tv_distance(wta_softmax(rows[i], cfg), exact_softmax(rows[i])))
        curve.append((int(k_ens), float(np.mean(distances))))
    return curve


def tv_vs_support(
    support_widths,
    n_rows: int = 200,
    length: int = 64,
    score_noise: float = 0.5,
    ensemble_size: int = 4,
    seed: int = 0,
) -> list[tuple[int, float]]:
    """Mean TV distance to the exact softmax as the support widens.

    Supports are nested prefixes of the same ranking, so the captured
    softmax mass grows and the distance strictly decreases.
    """
    gen = stream(seed, "demo-wta")
    rows = gen.standard_normal((n_rows, length))
    curve = []
    for k_eff in support_widths:
        distances = []
        for i in range(n_rows):
            cfg = WtaConfig(score_noise=score_noise, support_width=k_eff, ensemble_size=ensemble_size, seed=seed + i)
            distances.append(tv_distance(wta_softmax(rows[i], cfg), exact_softmax(rows[i])))
        curve.append((int(k_eff), float(np.mean(distances))))
    return curve
