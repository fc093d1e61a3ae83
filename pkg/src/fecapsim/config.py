"""Workbench configuration: TOML with explicit unit suffixes, checked schema.

Every dimensioned value is a quoted string like "158 mV" and is normalized
to SI on load.  Unknown keys are rejected so typos cannot silently fall back
to defaults; schema errors carry the offending line number where it can be
found in the source text.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .cache import CacheParams
from .device import CellGeometry, DisturbParams
from .kernel import QuantNoiseConfig
from .noise import OPERATING_POINTS, TileOperatingPoint
from .serving import GpuFixture, ServingConfig
from .tile import AttentionShape, TileEnergyConfig
from .units import UnitError, si
from .wta import WtaConfig


class ConfigError(ValueError):
    """Config schema violation; collects all messages before raising."""

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("; ".join(errors))


# key -> (kind, default).  kind is a dimension name, or int/float/str/bool.
_SCHEMA = {
    "": {
        "seed": ("int", 7),
        "output_dir": ("str", "out"),
    },
    "cell": {
        "pitch": ("length", "50 nm"),
        "hzo_thickness": ("length", "8 nm"),
        "permittivity": ("float", 25.0),
        "coercive_field": ("field", "1 MV/cm"),
        "remanent_polarization": ("charge_density", "25 uC/cm^2"),
        "read_voltage": ("voltage", "158 mV"),
        "write_voltage": ("voltage", "1.2 V"),
    },
    "disturb": {
        "pulse_width": ("time", "5 ns"),
        "attempt_time": ("time", "0.1 ns"),
        "activation_field": ("field", "9 MV/cm"),
        "vulnerable_domains": ("int", 10),
    },
    "noise": {
        "temperature": ("temperature", "300 K"),
        "flicker_amplitude_1hz": ("voltage", "10 uV"),
        "flicker_f_lo": ("frequency", "1 Hz"),
        "flicker_f_hi": ("frequency", "1 GHz"),
        "mismatch_sigma": ("float", 0.05),
    },
    "operating_points": None,  # array of tables, validated separately
    "tile": {
        "rows": ("int", 256),
        "active_cols": ("int", 64),
        "total_cols": ("int", 256),
        "dac_variant": ("str", "vdac"),
        "dac_bits": ("int", 4),
        "adc_bits": ("int", 4),
        "adcs_per_tile": ("int", 128),
        "read_voltage": ("voltage", "100 mV"),
    },
    "attention": {
        "n_heads": ("int", 32),
        "d_head": ("int", 128),
        "n_kv_heads": ("int", 8),
        "n_layers": ("int", 32),
    },
    "cache": {
        "gain_cell_write_energy": ("energy", "50 fJ"),
        "refresh_interval": ("time", "1 ms"),
        "substrate_write_energy": ("energy", "100 fJ"),
        "read_event_energy": ("energy", "5.88 pJ"),
        "head_dim": ("int", 64),
    },
    "serving": {
        "attention_share": ("float", 0.15),
        "serve_overhead": ("energy", "1.66 J"),
        "batch_sessions": ("int", 32),
        "gate_power": ("power", "5 W"),
        "park_extra_power": ("power", "2.2 W"),
        "wake_time": ("time", "1.5 s"),
        "wake_power": ("power", "70 W"),
        "gpu_idle_power": ("power", "70 W"),
        "nvme_bandwidth": ("bandwidth", "3 GB/s"),
        "reload_power": ("power", "250 W"),
        "substrate_idle_power": ("power", "50 mW"),
        "kv_write_energy": ("energy", "50 fJ"),
        "kv_bytes_per_value": ("int", 2),
        "gpu_precision": ("str", "int4"),
    },
    "kernel": {
        "noise_fraction": ("float", 0.015),
        "dac_bits": ("int", 8),
        "adc_bits": ("int", 8),
        "rescale": ("bool", True),
    },
    "wta": {
        "score_noise": ("float", 0.5),
        "support_width": ("int", 8),
        "ensemble_size": ("int", 4),
    },
    "fixtures": {
        "gpu_decode": ("str", ""),
    },
}

_OPERATING_POINT_SCHEMA = {
    "label": ("str", None),
    "rows": ("int", None),
    "read_voltage": ("voltage", None),
    "integration_cap": ("capacitance", None),
    "noise_fraction": ("float", None),
}


@dataclass(frozen=True)
class NoiseSection:
    temperature: float
    flicker_amplitude_1hz: float
    flicker_f_lo: float
    flicker_f_hi: float
    mismatch_sigma: float


@dataclass(frozen=True)
class WorkbenchConfig:
    """Fully validated workbench configuration in SI units."""

    seed: int
    output_dir: str
    cell: CellGeometry
    read_voltage: float
    write_voltage: float
    disturb: DisturbParams
    noise: NoiseSection
    operating_points: dict[str, TileOperatingPoint]
    tile: TileEnergyConfig
    shape: AttentionShape
    cache: CacheParams
    serving: ServingConfig
    gpu_idle_power: float
    kernel: QuantNoiseConfig
    wta: WtaConfig
    gpu_fixture_path: str = ""
    source_path: str = field(default="", compare=False)

    def gpu_fixture(self) -> GpuFixture:
        """Load the measured GPU decode fixture (packaged default if unset)."""
        if self.gpu_fixture_path:
            path = Path(self.gpu_fixture_path)
            if not path.is_absolute() and self.source_path:
                path = Path(self.source_path).parent / path
            return GpuFixture.from_csv(path, idle_power_w=self.gpu_idle_power)
        packaged = resources.files("fecapsim").joinpath("data/gpu_decode_a40.csv")
        with resources.as_file(packaged) as path:
            return GpuFixture.from_csv(path, idle_power_w=self.gpu_idle_power)


def _line_of(raw: str, key: str) -> int | None:
    for number, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith(f"{key} ") or stripped.startswith(f"{key}="):
            return number
    return None


def _convert(section: str, key: str, kind, value, raw: str, errors: list[str]):
    where = f"{section}.{key}" if section else key
    line = _line_of(raw, key)
    loc = f" (line {line})" if line else ""
    try:
        if kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise UnitError(f"expected integer, got {value!r}")
            return value
        if kind == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise UnitError(f"expected number, got {value!r}")
            return float(value)
        if kind == "str":
            if not isinstance(value, str):
                raise UnitError(f"expected string, got {value!r}")
            return value
        if kind == "bool":
            if not isinstance(value, bool):
                raise UnitError(f"expected boolean, got {value!r}")
            return value
        return si(value, kind)
    except UnitError as exc:
        errors.append(f"{where}{loc}: {exc}")
        return None


def _read_section(name: str, data: dict, raw: str, errors: list[str]) -> dict:
    schema = _SCHEMA[name]
    given = data.get(name, {}) if name else {k: v for k, v in data.items() if not isinstance(v, (dict, list))}
    if not isinstance(given, dict):
        errors.append(f"section [{name}] must be a table")
        given = {}
    for key in given:
        if key not in schema:
            line = _line_of(raw, key)
            loc = f" (line {line})" if line else ""
            errors.append(f"unknown key {name + '.' if name else ''}{key}{loc}")
    out = {}
    for key, (kind, default) in schema.items():
        if key in given:
            out[key] = _convert(name, key, kind, given[key], raw, errors)
        else:
            out[key] = _convert(name, key, kind, default, raw, errors) if isinstance(default, str) and kind not in ("str",) else default
    return out


def _read_operating_points(data: dict, raw: str, errors: list[str]) -> dict[str, TileOperatingPoint]:
    entries = data.get("operating_points")
    if entries is None:
        return dict(OPERATING_POINTS)
    if not isinstance(entries, list):
        errors.append("operating_points must be an array of tables")
        return dict(OPERATING_POINTS)
    points: dict[str, TileOperatingPoint] = {}
    for i, entry in enumerate(entries):
        fields = {}
        for key in entry:
            if key not in _OPERATING_POINT_SCHEMA:
                errors.append(f"unknown key operating_points[{i}].{key}")
        ok = True
        for key, (kind, _) in _OPERATING_POINT_SCHEMA.items():
            if key not in entry:
                errors.append(f"operating_points[{i}] missing {key}")
                ok = False
                continue
            fields[key] = _convert(f"operating_points[{i}]", key, kind, entry[key], raw, errors)
            ok = ok and fields[key] is not None
        if ok:
            try:
                point = TileOperatingPoint(
                    label=fields["label"],
                    rows=fields["rows"],
                    read_voltage=fields["read_voltage"],
                    integration_cap=fields["integration_cap"],
                    noise_fraction=fields["noise_fraction"],
                )
                points[point.label] = point
            except ValueError as exc:
                errors.append(f"operating_points[{i}]: {exc}")
    return points if points else dict(OPERATING_POINTS)


def load_config(path: str | Path | None = None) -> WorkbenchConfig:
    """Load and validate a workbench config; None loads the packaged default."""
    if path is None:
        packaged = resources.files("fecapsim").joinpath("data/default.toml")
        raw = packaged.read_text(encoding="utf-8")
        source = ""
    else:
        raw = Path(path).read_text(encoding="utf-8")
        source = str(path)
    try:
        data = tomllib.loads(raw)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"TOML parse error: {exc}"]) from exc

    errors: list[str] = []
    for key, value in data.items():
        if isinstance(value, (dict, list)) and key not in _SCHEMA:
            errors.append(f"unknown section [{key}]")

    top = _read_section("", data, raw, errors)
    cell = _read_section("cell", data, raw, errors)
    disturb = _read_section("disturb", data, raw, errors)
    noise = _read_section("noise", data, raw, errors)
    tile = _read_section("tile", data, raw, errors)
    attention = _read_section("attention", data, raw, errors)
    cache = _read_section("cache", data, raw, errors)
    serving = _read_section("serving", data, raw, errors)
    kernel = _read_section("kernel", data, raw, errors)
    wta = _read_section("wta", data, raw, errors)
    fixtures = _read_section("fixtures", data, raw, errors)
    points = _read_operating_points(data, raw, errors)

    if errors:
        raise ConfigError(errors)

    try:
        cell_geometry = CellGeometry(
            pitch=cell["pitch"],
            hzo_thickness=cell["hzo_thickness"],
            permittivity=cell["permittivity"],
            coercive_field=cell["coercive_field"],
            remanent_polarization=cell["remanent_polarization"],
        )
        disturb_params = DisturbParams(
            pulse_width=disturb["pulse_width"],
            attempt_time=disturb["attempt_time"],
            activation_field=disturb["activation_field"],
            effective_field=cell["read_voltage"] / cell["hzo_thickness"],
            vulnerable_domains=disturb["vulnerable_domains"],
        )
        shape = AttentionShape(
            n_heads=attention["n_heads"],
            d_head=attention["d_head"],
            n_kv_heads=attention["n_kv_heads"],
            n_layers=attention["n_layers"],
        )
        config = WorkbenchConfig(
            seed=top["seed"],
            output_dir=top["output_dir"],
            cell=cell_geometry,
            read_voltage=cell["read_voltage"],
            write_voltage=cell["write_voltage"],
            disturb=disturb_params,
            noise=NoiseSection(
                temperature=noise["temperature"],
                flicker_amplitude_1hz=noise["flicker_amplitude_1hz"],
                flicker_f_lo=noise["flicker_f_lo"],
                flicker_f_hi=noise["flicker_f_hi"],
                mismatch_sigma=noise["mismatch_sigma"],
            ),
            operating_points=points,
            tile=TileEnergyConfig(
                rows=tile["rows"],
                active_cols=tile["active_cols"],
                total_cols=tile["total_cols"],
                dac_variant=tile["dac_variant"],
                dac_bits=tile["dac_bits"],
                adc_bits=tile["adc_bits"],
                adcs_per_tile=tile["adcs_per_tile"],
                read_voltage=tile["read_voltage"],
            ),
            shape=shape,
            cache=CacheParams(
                gain_cell_write_energy=cache["gain_cell_write_energy"],
                refresh_interval=cache["refresh_interval"],
                substrate_write_energy=cache["substrate_write_energy"],
                read_event_energy=cache["read_event_energy"],
                head_dim=cache["head_dim"],
            ),
            serving=ServingConfig(
                shape=shape,
                attention_share=serving["attention_share"],
                serve_overhead_j=serving["serve_overhead"],
                batch_sessions=serving["batch_sessions"],
                gate_power_w=serving["gate_power"],
                park_extra_power_w=serving["park_extra_power"],
                wake_time_s=serving["wake_time"],
                wake_power_w=serving["wake_power"],
                nvme_bandwidth_bps=serving["nvme_bandwidth"],
                reload_power_w=serving["reload_power"],
                substrate_idle_w=serving["substrate_idle_power"],
                kv_write_energy_j=serving["kv_write_energy"],
                kv_bytes_per_value=serving["kv_bytes_per_value"],
                gpu_precision=serving["gpu_precision"],
            ),
            gpu_idle_power=serving["gpu_idle_power"],
            kernel=QuantNoiseConfig(
                noise_fraction=kernel["noise_fraction"],
                dac_bits=kernel["dac_bits"],
                adc_bits=kernel["adc_bits"],
                seed=top["seed"],
                rescale=kernel["rescale"],
            ),
            wta=WtaConfig(
                score_noise=wta["score_noise"],
                support_width=wta["support_width"],
                ensemble_size=wta["ensemble_size"],
                seed=top["seed"],
            ),
            gpu_fixture_path=fixtures["gpu_decode"],
            source_path=source,
        )
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc
    return config


def dump_config(cfg: WorkbenchConfig) -> str:
    """Serialize a config back to TOML; floats round-trip bit-exactly."""

    def q(value: float, unit: str) -> str:
        return f'"{value!r} {unit}"'

    points = "\n".join(
        "\n".join(
            (
                "[[operating_points]]",
                f'label = "{p.label}"',
                f"rows = {p.rows}",
                f"read_voltage = {q(p.read_voltage, 'V')}",
                f"integration_cap = {q(p.integration_cap, 'F')}",
                f"noise_fraction = {p.noise_fraction!r}",
                "",
            )
        )
        for p in cfg.operating_points.values()
    )
    s = cfg.serving
    return "\n".join(
        (
            f"seed = {cfg.seed}",
            f'output_dir = "{cfg.output_dir}"',
            "",
            "[cell]",
            f"pitch = {q(cfg.cell.pitch, 'm')}",
            f"hzo_thickness = {q(cfg.cell.hzo_thickness, 'm')}",
            f"permittivity = {cfg.cell.permittivity!r}",
            f"coercive_field = {q(cfg.cell.coercive_field, 'V/m')}",
            f"remanent_polarization = {q(cfg.cell.remanent_polarization, 'C/m^2')}",
            f"read_voltage = {q(cfg.read_voltage, 'V')}",
            f"write_voltage = {q(cfg.write_voltage, 'V')}",
            "",
            "[disturb]",
            f"pulse_width = {q(cfg.disturb.pulse_width, 's')}",
            f"attempt_time = {q(cfg.disturb.attempt_time, 's')}",
            f"activation_field = {q(cfg.disturb.activation_field, 'V/m')}",
            f"vulnerable_domains = {cfg.disturb.vulnerable_domains}",
            "",
            "[noise]",
            f"temperature = {q(cfg.noise.temperature, 'K')}",
            f"flicker_amplitude_1hz = {q(cfg.noise.flicker_amplitude_1hz, 'V')}",
            f"flicker_f_lo = {q(cfg.noise.flicker_f_lo, 'Hz')}",
            f"flicker_f_hi = {q(cfg.noise.flicker_f_hi, 'Hz')}",
            f"mismatch_sigma = {cfg.noise.mismatch_sigma!r}",
            "",
            points,
            "[tile]",
            f"rows = {cfg.tile.rows}",
            f"active_cols = {cfg.tile.active_cols}",
            f"total_cols = {cfg.tile.total_cols}",
            f'dac_variant = "{cfg.tile.dac_variant}"',
            f"dac_bits = {cfg.tile.dac_bits}",
            f"adc_bits = {cfg.tile.adc_bits}",
            f"adcs_per_tile = {cfg.tile.adcs_per_tile}",
            f"read_voltage = {q(cfg.tile.read_voltage, 'V')}",
            "",
            "[attention]",
            f"n_heads = {cfg.shape.n_heads}",
            f"d_head = {cfg.shape.d_head}",
            f"n_kv_heads = {cfg.shape.n_kv_heads}",
            f"n_layers = {cfg.shape.n_layers}",
            "",
            "[cache]",
            f"gain_cell_write_energy = {q(cfg.cache.gain_cell_write_energy, 'J')}",
            f"refresh_interval = {q(cfg.cache.refresh_interval, 's')}",
            f"substrate_write_energy = {q(cfg.cache.substrate_write_energy, 'J')}",
            f"read_event_energy = {q(cfg.cache.read_event_energy, 'J')}",
            f"head_dim = {cfg.cache.head_dim}",
            "",
            "[serving]",
            f"attention_share = {s.attention_share!r}",
            f"serve_overhead = {q(s.serve_overhead_j, 'J')}",
            f"batch_sessions = {s.batch_sessions}",
            f"gate_power = {q(s.gate_power_w, 'W')}",
            f"park_extra_power = {q(s.park_extra_power_w, 'W')}",
            f"wake_time = {q(s.wake_time_s, 's')}",
            f"wake_power = {q(s.wake_power_w, 'W')}",
            f"gpu_idle_power = {q(cfg.gpu_idle_power, 'W')}",
            f"nvme_bandwidth = {q(s.nvme_bandwidth_bps, 'B/s')}",
            f"reload_power = {q(s.reload_power_w, 'W')}",
            f"substrate_idle_power = {q(s.substrate_idle_w, 'W')}",
            f"kv_write_energy = {q(s.kv_write_energy_j, 'J')}",
            f"kv_bytes_per_value = {s.kv_bytes_per_value}",
            f'gpu_precision = "{s.gpu_precision}"',
            "",
            "[kernel]",
            f"noise_fraction = {cfg.kernel.noise_fraction!r}",
            f"dac_bits = {cfg.kernel.dac_bits}",
            f"adc_bits = {cfg.kernel.adc_bits}",
            f"rescale = {'true' if cfg.kernel.rescale else 'false'}",
            "",
            "[wta]",
            f"score_noise = {cfg.wta.score_noise!r}",
            f"support_width = {cfg.wta.support_width}",
            f"ensemble_size = {cfg.wta.ensemble_size}",
            "",
            "[fixtures]",
            f'gpu_decode = "{cfg.gpu_fixture_path}"',
            "",
        )
    )
