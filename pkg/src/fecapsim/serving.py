"""Per-served-token energy simulation across workloads and substrates.

A served token pays three kinds of energy: decode compute, residency (idle,
refresh, or leakage while the session's KV cache stays available), and
fixed serving overhead.  The simulator evaluates a measured-GPU baseline
under four serving strategies and an attention-coprocessor hybrid in which
the analog substrate holds the KV cache and executes the attention matmuls
while the GPU runs the rest of decode.

Strategies:
    G0  single-user GPU, full idle power billed to the session
    G1  batched serving, idle power shared across concurrent sessions
    G2  KV cache parked to NVMe, GPU power-gated, reload on reactivation
    G3  GPU power-gated with HBM-resident KV, fixed wake-up on reactivation
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

from .tile import PER_MAC_PWM, PER_MAC_VDAC, AttentionShape, attention_macs_per_token

STRATEGIES = ("G0", "G1", "G2", "G3")

VOLATILITY_CLASSES = ("nonvolatile", "sram_resident", "gain_cell")


class ServingConfigError(ValueError):
    """Raised for unusable serving configuration or fixtures."""


@dataclass(frozen=True)
class Workload:
    """One serving scenario: context size, residency, and session length."""

    name: str
    context_tokens: int
    residency_s: float
    decode_tokens: int
    description: str = ""

    def __post_init__(self) -> None:
        if self.context_tokens <= 0 or self.decode_tokens <= 0 or self.residency_s <= 0:
            raise ValueError("workload parameters must be positive")


# The five canonical workloads.  Context and residency are published values;
# decode_tokens are derived by inverting the single-user GPU column with
# 70 W idle and the 4.70 J/token decode energy, then integer-rounding.
CANONICAL_WORKLOADS = (
    Workload("chat", 8192, 30.0, 100, "interactive chat turn"),
    Workload("qa", 32768, 60.0, 256, "long-context question answering"),
    Workload("rag", 8192, 3600.0, 2560, "retrieval-augmented generation, persistent KV"),
    Workload("agent", 16384, 28800.0, 10000, "tool-calling agent loop over 8 h"),
    Workload("parked", 8192, 100800.0, 64, "session parked 28 h between turns"),
)


@dataclass(frozen=True)
class GpuDecodeRow:
    precision: str
    context_tokens: int
    j_per_token: float
    tokens_per_s: float
    avg_w: float


@dataclass(frozen=True)
class GpuFixture:
    """Measured end-to-end GPU decode energies, consumed verbatim."""

    rows: tuple[GpuDecodeRow, ...]
    idle_power_w: float = 70.0

    def __post_init__(self) -> None:
        if not self.rows:
            raise ServingConfigError("GPU fixture has no rows")
        if any(r.j_per_token <= 0 for r in self.rows):
            raise ServingConfigError("GPU fixture energies must be positive")

    @classmethod
    def from_csv(cls, path: str | Path, idle_power_w: float = 70.0) -> "GpuFixture":
        rows = []
        with open(path, newline="", encoding="utf-8") as handle:
            for record in csv.DictReader(handle):
                rows.append(
                    GpuDecodeRow(
                        precision=record["precision"].strip().lower(),
                        context_tokens=int(record["T"]),
                        j_per_token=float(record["J_per_token"]),
                        tokens_per_s=float(record["tokens_per_s"]),
                        avg_w=float(record["avg_W"]),
                    )
                )
        return cls(rows=tuple(rows), idle_power_w=idle_power_w)

    def decode_energy(self, context_tokens: int, precision: str = "int4") -> float:
        """Decode energy of the nearest-context row at the given precision (J).

        The measured table is sparse and nearly flat in T, so the nearest row
        is used rather than interpolation; ties resolve to the larger T.
        """
        candidates = [r for r in self.rows if r.precision == precision]
        if not candidates:
            raise ServingConfigError(f"no {precision!r} rows in GPU fixture")
        best = min(candidates, key=lambda r: (abs(r.context_tokens - context_tokens), -r.context_tokens))
        return best.j_per_token


@dataclass(frozen=True)
class SubstrateModel:
    """Attention-coprocessor substrate: per-MAC cost, sparsity, idle law.

    idle_power_w is the standing power; for sram_resident substrates it is
    interpreted per 8192 context tokens (leakage grows with cache size),
    otherwise as a constant chip idle.
    """

    name: str
    per_mac_j: float
    active_fraction: float
    idle_power_w: float
    volatility: str = "nonvolatile"

    def __post_init__(self) -> None:
        if not 0 < self.active_fraction <= 1:
            raise ValueError("active_fraction must lie in (0, 1]")
        if self.volatility not in VOLATILITY_CLASSES:
            raise ValueError(f"volatility must be one of {VOLATILITY_CLASSES}")

    def standing_power(self, context_tokens: int) -> float:
        if self.volatility == "sram_resident":
            return self.idle_power_w * context_tokens / 8192.0
        return self.idle_power_w


SUBSTRATES = {
    "fecap-vdac": SubstrateModel("fecap-vdac", PER_MAC_VDAC, 1.0, 0.05, "nonvolatile"),
    "fecap-pwm": SubstrateModel("fecap-pwm", PER_MAC_PWM, 1.0, 0.05, "nonvolatile"),
    "unicaim-like": SubstrateModel("unicaim-like", 0.5e-15, 0.25, 0.05, "nonvolatile"),
    "xformer-like": SubstrateModel("xformer-like", 0.08e-15, 0.10, 1.0, "sram_resident"),
}


@dataclass(frozen=True)
class ServingConfig:
    """Serving-model parameters; energies in J, powers in W, times in s.

    serve_overhead_j is the single calibrated per-served-token constant; it
    applies to every serving mode that parks and reactivates state (the
    hybrid and the G2/G3 baselines), not to the always-on G0/G1 GPU modes.
    park_extra_power_w is the CPU+NVMe subsystem held awake while the GPU is
    gated in the NVMe-park strategy.
    """

    shape: AttentionShape = AttentionShape()
    attention_share: float = 0.15
    serve_overhead_j: float = 1.66
    batch_sessions: int = 32
    gate_power_w: float = 5.0
    park_extra_power_w: float = 2.2
    wake_time_s: float = 1.5
    wake_power_w: float = 70.0
    nvme_bandwidth_bps: float = 3e9
    reload_power_w: float = 250.0
    substrate_idle_w: float = 0.05
    kv_write_energy_j: float = 5e-14
    kv_bytes_per_value: int = 2
    gpu_precision: str = "int4"

    def __post_init__(self) -> None:
        if not 0 <= self.attention_share <= 1:
            raise ValueError("attention_share must lie in [0, 1]")
        for name in ("gate_power_w", "park_extra_power_w", "wake_power_w", "substrate_idle_w", "serve_overhead_j"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.batch_sessions < 1:
            raise ValueError("batch_sessions must be >= 1")
        if self.nvme_bandwidth_bps <= 0 or self.reload_power_w < 0:
            raise ValueError("nvme_bandwidth_bps must be positive, reload_power_w non-negative")

    def kv_bytes(self, context_tokens: int) -> int:
        """KV cache size: T * layers * kv_heads * d_head * 2 tensors * bytes."""
        s = self.shape
        return context_tokens * s.n_layers * s.n_kv_heads * s.d_head * 2 * self.kv_bytes_per_value


def gpu_g0_energy(workload: Workload, fixture: GpuFixture, cfg: ServingConfig = ServingConfig()) -> float:
    """Single-user GPU per-served-token energy: decode + billed idle (J)."""
    decode = fixture.decode_energy(workload.context_tokens, cfg.gpu_precision)
    return decode + fixture.idle_power_w * workload.residency_s / workload.decode_tokens


def hybrid_energy(
    workload: Workload,
    substrate: SubstrateModel,
    cfg: ServingConfig,
    fixture: GpuFixture,
) -> float:
    """Attention-coprocessor per-served-token energy (J).

    The GPU keeps (1 - attention_share) of its decode energy; the substrate
    pays its attention MACs, the KV-append write, and its standing power
    over the residency; the calibrated serving overhead is added once.
    """
    decode = fixture.decode_energy(workload.context_tokens, cfg.gpu_precision)
    macs = attention_macs_per_token(workload.context_tokens, cfg.shape) * cfg.shape.n_layers
    attention = substrate.active_fraction * substrate.per_mac_j * macs
    kv_append_cells = 2 * cfg.shape.n_layers * cfg.shape.n_kv_heads * cfg.shape.d_head
    kv_append = kv_append_cells * cfg.kv_write_energy_j
    idle = substrate.standing_power(workload.context_tokens) * workload.residency_s / workload.decode_tokens
    return (1.0 - cfg.attention_share) * decode + attention + kv_append + idle + cfg.serve_overhead_j


def baseline_energy(
    workload: Workload,
    strategy: str,
    cfg: ServingConfig,
    fixture: GpuFixture,
) -> float:
    """GPU-side per-served-token energy under a serving strategy (J)."""
    decode = fixture.decode_energy(workload.context_tokens, cfg.gpu_precision)
    residency_per_token = workload.residency_s / workload.decode_tokens
    if strategy == "G0":
        return decode + fixture.idle_power_w * residency_per_token
    if strategy == "G1":
        return decode + (fixture.idle_power_w / cfg.batch_sessions) * residency_per_token
    if strategy == "G2":
        reload_energy = cfg.kv_bytes(workload.context_tokens) / cfg.nvme_bandwidth_bps * cfg.reload_power_w
        park_power = cfg.gate_power_w + cfg.park_extra_power_w
        return (
            decode
            + park_power * residency_per_token
            + reload_energy / workload.decode_tokens
            + cfg.serve_overhead_j
        )
    if strategy == "G3":
        wake_energy = cfg.wake_power_w * cfg.wake_time_s
        return (
            decode
            + cfg.gate_power_w * residency_per_token
            + wake_energy / workload.decode_tokens
            + cfg.serve_overhead_j
        )
    raise ServingConfigError(f"unknown strategy {strategy!r}")


@dataclass(frozen=True)
class RatioCell:
    baseline_j: float
    hybrid_j: float

    @property
    def ratio(self) -> float:
        return self.baseline_j / self.hybrid_j


def ratio_table(
    cfg: ServingConfig,
    fixture: GpuFixture,
    workloads: tuple[Workload, ...] = CANONICAL_WORKLOADS,
    strategies: tuple[str, ...] = STRATEGIES,
    substrate: SubstrateModel = SUBSTRATES["fecap-vdac"],
) -> dict[str, dict[str, RatioCell]]:
    """Baseline-over-hybrid ratio grid; >1 means the hybrid wins."""
    grid: dict[str, dict[str, RatioCell]] = {}
    for w in workloads:
        hybrid = hybrid_energy(w, substrate, cfg, fixture)
        grid[w.name] = {
            s: RatioCell(baseline_j=baseline_energy(w, s, cfg, fixture), hybrid_j=hybrid) for s in strategies
        }
    return grid


def comparator_ratios(
    cfg: ServingConfig,
    fixture: GpuFixture,
    workloads: tuple[Workload, ...] = CANONICAL_WORKLOADS,
    substrate_names: tuple[str, ...] = ("unicaim-like", "xformer-like", "fecap-pwm"),
) -> dict[str, dict[str, float]]:
    """Single-user-GPU over coprocessor-hybrid ratios per substrate."""
    out: dict[str, dict[str, float]] = {}
    for w in workloads:
        g0 = gpu_g0_energy(w, fixture, cfg)
        out[w.name] = {
            name: g0 / hybrid_energy(w, SUBSTRATES[name], cfg, fixture) for name in substrate_names
        }
    return out


@dataclass(frozen=True)
class AlphaSensitivity:
    workload: str
    nominal_ratio: float
    min_ratio: float
    max_ratio: float

    @property
    def max_adverse_change(self) -> float:
        """Largest downward move of the advantage across the sweep."""
        return (self.nominal_ratio - self.min_ratio) / self.nominal_ratio


@dataclass(frozen=True)
class SensitivityReport:
    alpha: dict[str, AlphaSensitivity]
    idle_parked_ratio: dict[float, float]
    write_energy_max_change: float


def sensitivity_sweep(
    cfg: ServingConfig,
    fixture: GpuFixture,
    alpha_range: tuple[float, float] = (0.05, 0.30),
    alpha_steps: int = 11,
    idle_points: tuple[float, ...] = (0.05, 0.10, 0.20),
    write_energy_points: tuple[float, ...] = (1e-15, 100e-15),
) -> SensitivityReport:
    """Bound the assumption-sensitive inputs of the serving comparison.

    (i) attention share swept over alpha_range: reports the nominal/min/max
    single-user-GPU ratio per workload; (ii) substrate idle power swept at
    the parked workload; (iii) KV write energy swept: reports the largest
    relative ratio change across all workloads.
    """
    substrate = SUBSTRATES["fecap-vdac"]

    alpha: dict[str, AlphaSensitivity] = {}
    lo, hi = alpha_range
    grid = [lo + (hi - lo) * i / (alpha_steps - 1) for i in range(alpha_steps)]
    for w in CANONICAL_WORKLOADS:
        g0 = gpu_g0_energy(w, fixture, cfg)
        nominal = g0 / hybrid_energy(w, substrate, cfg, fixture)
        ratios = [g0 / hybrid_energy(w, substrate, replace(cfg, attention_share=a), fixture) for a in grid]
        alpha[w.name] = AlphaSensitivity(w.name, nominal, min(ratios), max(ratios))

    parked = next(w for w in CANONICAL_WORKLOADS if w.name == "parked")
    g0_parked = gpu_g0_energy(parked, fixture, cfg)
    idle_parked = {}
    for idle in idle_points:
        sub = replace(substrate, idle_power_w=idle)
        idle_parked[idle] = g0_parked / hybrid_energy(parked, sub, cfg, fixture)

    write_change = 0.0
    for w in CANONICAL_WORKLOADS:
        g0 = gpu_g0_energy(w, fixture, cfg)
        ratios = [
            g0 / hybrid_energy(w, substrate, replace(cfg, kv_write_energy_j=e), fixture)
            for e in write_energy_points
        ]
        write_change = max(write_change, abs(max(ratios) - min(ratios)) / min(ratios))

    return SensitivityReport(alpha=alpha, idle_parked_ratio=idle_parked, write_energy_max_change=write_change)


def ordering_by_residency(grid: dict[str, dict[str, RatioCell]], strategies: tuple[str, ...] = STRATEGIES) -> dict[str, bool]:
    """Whether ratios decrease along parked > agent > rag > qa > chat per column."""
    chain = ("parked", "agent", "rag", "qa", "chat")
    out = {}
    for s in strategies:
        values = [grid[name][s].ratio for name in chain if name in grid]
        out[s] = all(a > b for a, b in zip(values, values[1:]))
    return out
