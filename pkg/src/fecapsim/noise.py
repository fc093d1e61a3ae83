"""Column-referred noise accounting for the analog read path.

Three per-read noise sources are bounded analytically (thermal kT/C, sense-amp
flicker, capacitance mismatch) and combined with the NC read-path propagation
rule.  The tile-level noise fraction nf = sigma / Q_FS is additionally
verified by a seeded Monte-Carlo re-estimate of the additive column model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import k as k_boltzmann

from .rng import normal_block

ROOM_TEMPERATURE = 300.0  # K

# Noise-fraction window accepted for tile operating points.
NF_RANGE = (0.0, 0.1)

# Reference cell capacitance used for the column full-scale charge (F).
DEFAULT_CELL_CAPACITANCE = 69.17e-18

MIN_RECOMMENDED_SAMPLES = 10_000


@dataclass(frozen=True)
class NoiseComponents:
    """Column-referred noise budget entries (all non-negative).

    v_ktc / v_flicker: voltages (V); mismatch_fraction: dimensionless;
    correlated_floor: single bound for the terms that do not average over
    rows (reset, comparator offset, drift), default 0.
    """

    v_ktc: float
    v_flicker: float
    mismatch_fraction: float
    correlated_floor: float = 0.0

    def __post_init__(self) -> None:
        for name in ("v_ktc", "v_flicker", "mismatch_fraction", "correlated_floor"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class NcPropagation:
    """Inputs to the conservative input-referred NC noise combination.

    sigma_cell, sigma_read_fet, sigma_sense, sigma_nc_jitter: voltages (V)
    gain: read-path voltage gain |A_v| (1.0 = no-gain mode)
    gain_spread_rel: sigma_Av / A_v
    signal: input signal amplitude x the gain spread multiplies (V)
    """

    sigma_cell: float
    sigma_read_fet: float
    sigma_sense: float
    sigma_nc_jitter: float = 0.0
    gain: float = 1.0
    gain_spread_rel: float = 0.0
    signal: float = 0.0

    def __post_init__(self) -> None:
        if self.gain <= 0:
            raise ValueError("gain must be positive")


@dataclass(frozen=True)
class TileOperatingPoint:
    """Column readout geometry and its calibrated noise fraction.

    rows: rows read in parallel; read_voltage (V); integration_cap (F);
    noise_fraction: sigma / Q_FS of the additive column noise model.
    """

    label: str
    rows: int
    read_voltage: float
    integration_cap: float
    noise_fraction: float

    def __post_init__(self) -> None:
        if self.rows < 1:
            raise ValueError("rows must be >= 1")
        if self.read_voltage <= 0 or self.integration_cap <= 0:
            raise ValueError("read_voltage and integration_cap must be positive")
        lo, hi = NF_RANGE
        if not lo <= self.noise_fraction < hi:
            raise ValueError(f"noise_fraction must lie in [{lo}, {hi})")

    def full_scale_charge(self, cell_capacitance: float = DEFAULT_CELL_CAPACITANCE) -> float:
        """Column full-scale charge Q_FS = rows * C0 * V_read (C)."""
        return self.rows * cell_capacitance * self.read_voltage


# The three calibrated tile geometries; the closed-form component budget does
# not pin these down by itself, so they ship as fixtures.
OPERATING_POINTS = {
    "aggressive": TileOperatingPoint("aggressive", rows=256, read_voltage=0.100, integration_cap=100e-15, noise_fraction=0.035),
    "nominal": TileOperatingPoint("nominal", rows=256, read_voltage=0.100, integration_cap=400e-15, noise_fraction=0.015),
    "conservative": TileOperatingPoint("conservative", rows=1024, read_voltage=0.200, integration_cap=400e-15, noise_fraction=0.009),
}


@dataclass(frozen=True)
class McNoiseResult:
    """Monte-Carlo re-estimate of a configured noise fraction."""

    configured_nf: float
    estimated_nf: float
    stderr: float
    n_samples: int
    seed: int
    warning: str | None = None


def ktc_noise(cell_capacitance: float, temperature: float, n_rows: int) -> float:
    """Thermal sampling noise sqrt(kT/C0) averaged over the column (V)."""
    if cell_capacitance <= 0:
        raise ValueError("cell_capacitance must be positive")
    if n_rows < 1:
        raise ValueError("n_rows must be >= 1")
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    return math.sqrt(k_boltzmann * temperature / cell_capacitance) / math.sqrt(n_rows)


def flicker_noise(amplitude_at_1hz: float, f_lo: float, f_hi: float) -> float:
    """1/f amplifier noise integrated over the read bandwidth (V).

    amplitude_at_1hz is the spectral density in V/sqrt(Hz) at 1 Hz; the
    integral of a 1/f power density from f_lo to f_hi gives
    amplitude * sqrt(ln(f_hi / f_lo)).
    """
    if not f_hi > f_lo > 0:
        raise ValueError("need f_hi > f_lo > 0")
    return amplitude_at_1hz * math.sqrt(math.log(f_hi / f_lo))


def mismatch_effective(sigma_c_over_c: float, n_rows: int, independent: bool = True) -> float:
    """Effective column-level mismatch fraction.

    Per-cell mismatch averages as 1/sqrt(rows) only when residual errors are
    independent after calibration; the correlated case passes through
    unchanged.
    """
    if not 0 <= sigma_c_over_c <= 0.5:
        raise ValueError("sigma_c_over_c must lie in [0, 0.5]")
    if n_rows < 1:
        raise ValueError("n_rows must be >= 1")
    if independent:
        return sigma_c_over_c / math.sqrt(n_rows)
    return sigma_c_over_c


def nc_input_referred(p: NcPropagation) -> float:
    """Conservative input-referred noise of the NC read path (V).

    Only the sense-amp term sits downstream of the gain and divides by A_v;
    cell, read-FET, and polarization-jitter noise are upstream and pass
    through unchanged.  The gain-spread term scales with the signal.
    """
    variance = (
        p.sigma_cell**2
        + p.sigma_read_fet**2
        + (p.sigma_sense / p.gain) ** 2
        + (p.gain_spread_rel * p.signal) ** 2
        + p.sigma_nc_jitter**2
    )
    return math.sqrt(variance)


def monte_carlo_nf(
    op_point: TileOperatingPoint,
    n_samples: int,
    seed: int,
    cell_capacitance: float = DEFAULT_CELL_CAPACITANCE,
    n_tasks: int = 1,
) -> McNoiseResult:
    """Re-estimate the configured noise fraction from sampled column reads.

    Column outputs follow the additive model q = q_signal + N(0, nf * Q_FS).
    Samples are addressed by absolute counter position, so splitting the run
    across n_tasks blocks changes neither the sample set nor the estimate.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    if n_tasks < 1:
        raise ValueError("n_tasks must be >= 1")
    warning = None
    if n_samples < MIN_RECOMMENDED_SAMPLES:
        warning = f"n_samples={n_samples} below recommended {MIN_RECOMMENDED_SAMPLES}; estimate is low-precision"

    q_fs = op_point.full_scale_charge(cell_capacitance)
    sigma = op_point.noise_fraction * q_fs
    signal = 0.5 * q_fs  # mid-scale read; the estimator subtracts it exactly

    block = (n_samples + n_tasks - 1) // n_tasks
    residuals = np.empty(n_samples)
    for task in range(n_tasks):
        start = task * block
        stop = min(start + block, n_samples)
        if start >= stop:
            break
        draws = normal_block(seed, start, stop - start, "column-noise", op_point.label)
        residuals[start:stop] = (signal + sigma * draws) - signal

    estimated_sigma = float(np.std(residuals, ddof=1))
    estimated_nf = estimated_sigma / q_fs
    stderr = estimated_nf / math.sqrt(2.0 * (n_samples - 1))
    return McNoiseResult(
        configured_nf=op_point.noise_fraction,
        estimated_nf=estimated_nf,
        stderr=stderr,
        n_samples=n_samples,
        seed=seed,
        warning=warning,
    )
