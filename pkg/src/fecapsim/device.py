"""Closed-form physics of the planar HZO storage cell and its read path.

All quantities are SI.  The cell is a parallel-plate ferroelectric capacitor
read sub-coercively through an access transistor; the optional series
negative-capacitance (NC) element is modeled as a capacitive divider.  Read
disturb uses the nucleation-limited-switching (Merz/NLS) attempt-rate bound.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.constants import epsilon_0

# Thickness window of the published sweep; values outside it are physically
# plausible but unvalidated, values outside the hard bounds are rejected.
SWEEP_THICKNESS_RANGE = (6e-9, 12e-9)
HARD_THICKNESS_RANGE = (4e-9, 20e-9)

# Reference thickness of the measured-capacitor anchor (m).
ANCHOR_THICKNESS = 10e-9


@dataclass(frozen=True)
class CellGeometry:
    """Planar 1T-1C cell geometry and material parameters.

    pitch: electrode pitch (m); electrode_area defaults to pitch**2
    hzo_thickness: ferroelectric layer thickness (m)
    permittivity: relative permittivity of the storage dielectric
    coercive_field: polarization switching field (V/m)
    remanent_polarization: remanent polarization (C/m^2)
    """

    pitch: float
    hzo_thickness: float
    permittivity: float
    coercive_field: float
    remanent_polarization: float
    electrode_area: float | None = None

    def __post_init__(self) -> None:
        for name in ("pitch", "hzo_thickness", "permittivity", "coercive_field", "remanent_polarization"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.electrode_area is not None and self.electrode_area <= 0:
            raise ValueError("electrode_area must be strictly positive")
        # one-ulp slack so grid points built as d * 1e-9 land inside bounds
        lo, hi = HARD_THICKNESS_RANGE
        if not lo * (1 - 1e-12) <= self.hzo_thickness <= hi * (1 + 1e-12):
            raise ValueError(
                f"hzo_thickness {self.hzo_thickness:.3g} m outside accepted range [{lo:.3g}, {hi:.3g}] m"
            )
        slo, shi = SWEEP_THICKNESS_RANGE
        if not slo * (1 - 1e-12) <= self.hzo_thickness <= shi * (1 + 1e-12):
            warnings.warn(
                f"hzo_thickness {self.hzo_thickness:.3g} m outside the validated "
                f"[{slo:.3g}, {shi:.3g}] m sweep range",
                stacklevel=2,
            )

    @property
    def area(self) -> float:
        """Electrode area (m^2), pitch**2 unless given explicitly."""
        return self.electrode_area if self.electrode_area is not None else self.pitch**2

    def with_thickness(self, thickness: float) -> "CellGeometry":
        return CellGeometry(
            pitch=self.pitch,
            hzo_thickness=thickness,
            permittivity=self.permittivity,
            coercive_field=self.coercive_field,
            remanent_polarization=self.remanent_polarization,
            electrode_area=self.electrode_area,
        )


@dataclass(frozen=True)
class DisturbParams:
    """Inputs to the Merz/NLS read-disturb bound.

    pulse_width: read pulse duration (s)
    attempt_time: switching attempt time tau_inf (s)
    activation_field: NLS activation field (V/m)
    effective_field: field across the storage layer during the read (V/m)
    vulnerable_domains: number of domains that could flip per cell
    """

    pulse_width: float
    attempt_time: float
    activation_field: float
    effective_field: float
    vulnerable_domains: int = 10

    def __post_init__(self) -> None:
        if self.pulse_width <= 0 or self.attempt_time <= 0:
            raise ValueError("pulse_width and attempt_time must be positive")
        if self.vulnerable_domains < 1:
            raise ValueError("vulnerable_domains must be >= 1")
        if self.effective_field < 0:
            raise ValueError("effective_field must be non-negative")
        if self.activation_field <= 0:
            raise ValueError("activation_field must be positive")


@dataclass(frozen=True)
class NcDesignPoint:
    """Series-load operating point of the NC read path.

    cap_ratio: r = C_series / |C_ferroelectric| at nominal process
    process_shift: signed fractional shift applied to |C_ferroelectric|
    """

    cap_ratio: float
    process_shift: float = 0.0

    def __post_init__(self) -> None:
        if self.cap_ratio <= 0:
            raise ValueError("cap_ratio must be positive")
        if self.process_shift <= -1.0:
            raise ValueError("process_shift must be > -100%")


@dataclass(frozen=True)
class NcGainResult:
    """Small-signal voltage gain of the capacitive-divider read path.

    magnitude: |A_v|
    shifted_ratio: r' = r / (1 + process_shift)
    boundary_crossed: the process shift moved r' across the r' = 1 singularity
    """

    magnitude: float
    shifted_ratio: float
    boundary_crossed: bool

    @property
    def peak_gain_side(self) -> bool:
        """True on the matching-critical (r' < 1) branch of the gain curve."""
        return self.shifted_ratio < 1.0


@dataclass(frozen=True)
class ThicknessPoint:
    """One row of the storage-layer thickness sweep (SI units)."""

    thickness: float
    capacitance: float
    read_energy: float
    ktc_scale: float  # thermal-noise voltage scale relative to the 10 nm anchor
    field_ratio: float  # E_read / E_coercive
    flip_probability: float


def cell_capacitance(geometry: CellGeometry) -> float:
    """Parallel-plate capacitance eps0 * eps_r * A / d (F)."""
    if geometry.hzo_thickness <= 0:
        raise ValueError("thickness must be positive")
    return epsilon_0 * geometry.permittivity * geometry.area / geometry.hzo_thickness


def intrinsic_read_energy(capacitance: float, read_voltage: float, accounting: str = "half_cv2") -> float:
    """Per-cell read energy: half_cv2 -> C V^2 / 2, supply_cv2 -> C V^2 (J)."""
    if capacitance < 0:
        raise ValueError("capacitance must be non-negative")
    if accounting == "half_cv2":
        return 0.5 * capacitance * read_voltage**2
    if accounting == "supply_cv2":
        return capacitance * read_voltage**2
    raise ValueError(f"unknown accounting {accounting!r}")


def read_field_ratio(read_voltage: float, thickness: float, coercive_field: float) -> float:
    """Read field over coercive field, (V_rd / d) / E_c."""
    if thickness <= 0 or coercive_field <= 0:
        raise ValueError("thickness and coercive_field must be positive")
    return (read_voltage / thickness) / coercive_field


def disturb_probability(params: DisturbParams) -> float:
    """Per-read flip probability bound N_dom * (tau_rd / tau_inf) * exp(-E_a / E_eff).

    Returns 0 for zero effective field (infinite barrier) and clamps at 1;
    all in-range operating points sit far below the clamp.
    """
    if params.effective_field == 0:
        return 0.0
    attempts = params.vulnerable_domains * (params.pulse_width / params.attempt_time)
    return min(1.0, attempts * math.exp(-params.activation_field / params.effective_field))


def required_activation_field(
    p_target: float,
    pulse_width: float,
    attempt_time: float,
    vulnerable_domains: int,
    effective_field: float,
) -> float:
    """Activation field needed to keep the disturb bound at p_target (V/m).

    Inverts the Merz/NLS bound: E_a = E_eff * ln(N_dom * tau_rd / tau_inf / p_target).
    """
    attempts = vulnerable_domains * (pulse_width / attempt_time)
    if not 0 < p_target <= attempts:
        raise ValueError(f"p_target must be in (0, {attempts:g}]")
    return effective_field * math.log(attempts / p_target)


def nc_gain(point: NcDesignPoint) -> NcGainResult:
    """Capacitive-divider gain magnitude |A_v| = r' / |1 - r'|.

    The process shift acts on the ferroelectric capacitance (denominator of
    the ratio), so r' = r / (1 + shift).  r' = 1 is the divider singularity;
    a shift that moves the operating point across it is flagged.
    """
    shifted = point.cap_ratio / (1.0 + point.process_shift)
    if shifted == 1.0:
        raise ValueError("shifted ratio sits exactly on the r' = 1 stability boundary")
    crossed = (point.cap_ratio < 1.0) != (shifted < 1.0)
    return NcGainResult(
        magnitude=shifted / abs(1.0 - shifted),
        shifted_ratio=shifted,
        boundary_crossed=crossed,
    )


def switching_work(voltage: float, geometry: CellGeometry) -> float:
    """Intrinsic polarization switching work V * 2 * P_r * A (J)."""
    return voltage * 2.0 * geometry.remanent_polarization * geometry.area


def thickness_sweep(
    thicknesses: list[float],
    base: CellGeometry,
    read_voltage: float,
    attempt_time: float = 1e-10,
    pulse_width: float = 5e-9,
    activation_field: float = 9e8,
    vulnerable_domains: int = 10,
) -> list[ThicknessPoint]:
    """Sweep the storage-layer thickness at fixed read voltage.

    Capacitance and read energy scale exactly as 1/d; the kT/C noise voltage
    scale relative to the 10 nm anchor goes as sqrt(d).  The per-pulse flip
    probability is evaluated at each thickness's own read field.
    """
    points = []
    for d in thicknesses:
        if d <= 0:
            raise ValueError("thicknesses must be positive")
        geom = base.with_thickness(d)
        c0 = cell_capacitance(geom)
        points.append(
            ThicknessPoint(
                thickness=d,
                capacitance=c0,
                read_energy=intrinsic_read_energy(c0, read_voltage),
                ktc_scale=math.sqrt(d / ANCHOR_THICKNESS),
                field_ratio=read_field_ratio(read_voltage, d, base.coercive_field),
                flip_probability=disturb_probability(
                    DisturbParams(
                        pulse_width=pulse_width,
                        attempt_time=attempt_time,
                        activation_field=activation_field,
                        effective_field=read_voltage / d,
                        vulnerable_domains=vulnerable_domains,
                    )
                ),
            )
        )
    return points
