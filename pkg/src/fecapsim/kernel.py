"""Numeric emulation of the noisy quantized charge-domain compute path.

Matrix multiplies are routed through a DAC/ADC pair with per-row
absolute-max rescaling and an additive Gaussian term whose standard
deviation is the configured noise fraction of the per-row output full
scale.  Attention modes select which multiply sites run through the analog
path; the softmax always stays exact.  Every noise draw comes from a
counter-based stream keyed by (seed, site, head, row), so concurrent
per-row or per-head execution is schedule-invariant.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .rng import stream


@dataclass(frozen=True)
class QuantNoiseConfig:
    """Quantization and additive-noise settings of the analog path."""

    noise_fraction: float = 0.015
    dac_bits: int = 8
    adc_bits: int = 8
    seed: int = 0
    rescale: bool = True

    def __post_init__(self) -> None:
        if self.noise_fraction < 0:
            raise ValueError("noise_fraction must be non-negative")
        for name in ("dac_bits", "adc_bits"):
            if not 1 <= getattr(self, name) <= 16:
                raise ValueError(f"{name} must lie in [1, 16]")


class AttentionMode(enum.Enum):
    """Which multiply sites run through the analog path."""

    REFERENCE = "reference"
    PROJECTIONS_ONLY = "projections_only"
    MATMUL_ONLY = "matmul_only"
    END_TO_END = "end_to_end"

    @classmethod
    def from_label(cls, label: str) -> "AttentionMode":
        aliases = {
            "c0": cls.REFERENCE,
            "c1": cls.PROJECTIONS_ONLY,
            "c5": cls.MATMUL_ONLY,
            "c4": cls.END_TO_END,
        }
        key = label.strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown attention mode {label!r}") from None

    @property
    def noisy_projections(self) -> bool:
        return self in (AttentionMode.PROJECTIONS_ONLY, AttentionMode.END_TO_END)

    @property
    def noisy_matmuls(self) -> bool:
        return self in (AttentionMode.MATMUL_ONLY, AttentionMode.END_TO_END)


def quantize(x: np.ndarray, bits: int, rescale: bool = True) -> np.ndarray:
    """Uniform symmetric quantization with per-row absolute-max scaling.

    Each row (last axis) maps its own max|x| to the top code; all-zero rows
    pass through as zeros.  With rescale disabled a global max|x| scale is
    used instead.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    x = np.asarray(x, dtype=np.float64)
    levels = max(2 ** (bits - 1) - 1, 1)
    if rescale:
        amax = np.max(np.abs(x), axis=-1, keepdims=True)
    else:
        amax = np.max(np.abs(x))
    scale = np.where(amax > 0, amax / levels, 1.0)
    return np.round(x / scale) * scale


def analog_matmul(
    a: np.ndarray,
    b: np.ndarray,
    cfg: QuantNoiseConfig,
    stream_path: tuple = ("matmul",),
) -> np.ndarray:
    """Noisy quantized product of a (m, k) and b (k, n).

    Both operands pass through the DAC quantizer, the product is exact, the
    additive Gaussian noise has sigma = noise_fraction * max|row| per output
    row, and the result passes through the ADC quantizer.  At zero noise
    fraction the noise path is not executed at all.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"incompatible matmul shapes {a.shape} x {b.shape}")
    qa = quantize(a, cfg.dac_bits, cfg.rescale)
    qb = quantize(b, cfg.dac_bits, cfg.rescale)
    y = qa @ qb
    if cfg.noise_fraction > 0:
        full_scale = np.max(np.abs(y), axis=-1)
        for row in range(y.shape[0]):
            sigma = cfg.noise_fraction * full_scale[row]
            if sigma > 0:
                gen = stream(cfg.seed, *stream_path, row)
                y[row] += sigma * gen.standard_normal(y.shape[1])
    return quantize(y, cfg.adc_bits, cfg.rescale)


def _site_matmul(
    a: np.ndarray,
    b: np.ndarray,
    analog: bool,
    cfg: QuantNoiseConfig,
    stream_path: tuple,
) -> np.ndarray:
    if analog:
        return analog_matmul(a, b, cfg, stream_path)
    return a @ b


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    weights = np.exp(shifted)
    return weights / weights.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class AttentionWeights:
    """Projection weights of one grouped-query attention block.

    wq: (d_model, n_heads * d_head); wk, wv: (d_model, n_kv_heads * d_head);
    wo: (n_heads * d_head, d_model).
    """

    wq: np.ndarray
    wk: np.ndarray
    wv: np.ndarray
    wo: np.ndarray
    n_heads: int
    n_kv_heads: int

    def __post_init__(self) -> None:
        if self.n_heads % self.n_kv_heads != 0:
            raise ValueError("n_heads must be a multiple of n_kv_heads")
        if self.wq.shape[1] % self.n_heads != 0:
            raise ValueError("wq width must split evenly across heads")
        d_head = self.wq.shape[1] // self.n_heads
        if self.wk.shape != (self.wq.shape[0], self.n_kv_heads * d_head):
            raise ValueError(f"wk shape {self.wk.shape} inconsistent with {self.n_kv_heads} kv heads")
        if self.wv.shape != self.wk.shape:
            raise ValueError("wv shape must match wk")
        if self.wo.shape != (self.n_heads * d_head, self.wq.shape[0]):
            raise ValueError(f"wo shape {self.wo.shape} does not invert wq")

    @property
    def d_head(self) -> int:
        return self.wq.shape[1] // self.n_heads

    @classmethod
    def random(cls, d_model: int, n_heads: int, n_kv_heads: int, d_head: int, seed: int) -> "AttentionWeights":
        gen = stream(seed, "attn-weights")
        scale = 1.0 / np.sqrt(d_model)
        return cls(
            wq=scale * gen.standard_normal((d_model, n_heads * d_head)),
            wk=scale * gen.standard_normal((d_model, n_kv_heads * d_head)),
            wv=scale * gen.standard_normal((d_model, n_kv_heads * d_head)),
            wo=scale * gen.standard_normal((n_heads * d_head, d_model)),
            n_heads=n_heads,
            n_kv_heads=n_kv_heads,
        )


def attention_head_outputs(
    x: np.ndarray,
    weights: AttentionWeights,
    mode: AttentionMode,
    cfg: QuantNoiseConfig,
    causal: bool = True,
    head_keys: tuple[int, ...] | None = None,
    kv_head_keys: tuple[int, ...] | None = None,
) -> np.ndarray:
    """Per-head context tensors (n_heads, T, d_head) before output projection.

    Noise streams are keyed by the head's stream key rather than its
    position, so permuting heads together with their keys permutes the
    outputs identically.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("x must be (tokens, d_model)")
    n_heads, n_kv = weights.n_heads, weights.n_kv_heads
    d_head = weights.d_head
    group = n_heads // n_kv
    head_keys = tuple(range(n_heads)) if head_keys is None else head_keys
    kv_head_keys = tuple(range(n_kv)) if kv_head_keys is None else kv_head_keys
    if len(head_keys) != n_heads or len(kv_head_keys) != n_kv:
        raise ValueError("stream key lists must match head counts")

    noisy_proj = mode.noisy_projections
    noisy_mm = mode.noisy_matmuls

    keys = np.empty((n_kv, x.shape[0], d_head))
    vals = np.empty((n_kv, x.shape[0], d_head))
    for kv in range(n_kv):
        sl = slice(kv * d_head, (kv + 1) * d_head)
        keys[kv] = _site_matmul(x, weights.wk[:, sl], noisy_proj, cfg, ("attn", "proj_k", kv_head_keys[kv]))
        vals[kv] = _site_matmul(x, weights.wv[:, sl], noisy_proj, cfg, ("attn", "proj_v", kv_head_keys[kv]))

    tokens = x.shape[0]
    mask = np.triu(np.full((tokens, tokens), -np.inf), k=1) if causal else 0.0

    out = np.empty((n_heads, tokens, d_head))
    for h in range(n_heads):
        key = head_keys[h]
        sl = slice(h * d_head, (h + 1) * d_head)
        q = _site_matmul(x, weights.wq[:, sl], noisy_proj, cfg, ("attn", "proj_q", key))
        kv = h // group
        scores = _site_matmul(q, keys[kv].T, noisy_mm, cfg, ("attn", "scores", key)) / np.sqrt(d_head)
        probs = _softmax(scores + mask)
        out[h] = _site_matmul(probs, vals[kv], noisy_mm, cfg, ("attn", "values", key))
    return out


def matmul_error_vs_nf(
    nf_values,
    shape: tuple[int, int, int] = (64, 48, 32),
    n_seeds: int = 20,
    base_seed: int = 0,
    bits: int = 8,
) -> list[tuple[float, float]]:
    """Mean relative Frobenius error of the analog matmul per noise fraction.

    Desk-scale demonstration on one fixed random matrix pair; the error is
    averaged over independent noise seeds.
    """
    m, k, n = shape
    gen = stream(base_seed, "demo-matmul")
    a = gen.standard_normal((m, k))
    b = gen.standard_normal((k, n))
    exact = a @ b
    ref_norm = float(np.linalg.norm(exact))
    curve = []
    for nf in nf_values:
        errs = []
        for offset in range(n_seeds):
            cfg = QuantNoiseConfig(noise_fraction=nf, dac_bits=bits, adc_bits=bits, seed=base_seed + offset)
            noisy = analog_matmul(a, b, cfg)
            errs.append(float(np.linalg.norm(noisy - exact)) / ref_norm)
        curve.append((float(nf), float(np.mean(errs))))
    return curve


def analog_attention(
    x: np.ndarray,
    weights: AttentionWeights,
    mode: AttentionMode,
    cfg: QuantNoiseConfig,
    causal: bool = True,
    head_keys: tuple[int, ...] | None = None,
    kv_head_keys: tuple[int, ...] | None = None,
) -> np.ndarray:
    """Grouped-query attention with mode-selected analog multiply sites.

    reference: all sites exact; projections_only: q/k/v/o projections analog;
    matmul_only: score and value matmuls analog; end_to_end: both groups.
    The softmax is exact in every mode.
    """
    heads = attention_head_outputs(x, weights, mode, cfg, causal, head_keys, kv_head_keys)
    n_heads, d_head = weights.n_heads, weights.d_head
    head_keys = tuple(range(n_heads)) if head_keys is None else head_keys
    out = np.zeros((x.shape[0], weights.wo.shape[1]))
    for h in range(n_heads):
        wo_h = weights.wo[h * d_head : (h + 1) * d_head, :]
        out += _site_matmul(heads[h], wo_h, mode.noisy_projections, cfg, ("attn", "proj_o", head_keys[h]))
    return out
