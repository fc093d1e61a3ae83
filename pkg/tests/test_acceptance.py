"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances are pinned here, not calibrated.  The criterion-11 ordering check
asserts the full parked > agent > rag > qa > chat chain in every strategy
column exactly as stated; see its body for why the published fixtures make
the final qa > chat link unattainable.
"""

import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from fecapsim import cache, device, kernel, noise, serving, tile, wta
from fecapsim.cli import main
from fecapsim.reproduce import COMPARATORS_PUBLISHED, TABLE3_PUBLISHED, TABLE4_PUBLISHED


def _report(name: str, passed: bool) -> bool:
    print(f"[acceptance] {name}: {'PASS' if passed else 'FAIL'}")
    return passed


def _within(computed: float, expected: float, tol: float) -> bool:
    return abs(computed - expected) <= tol * abs(expected)


def _sig3(x: float) -> float:
    return float(f"{x:.3g}")


def test_c01_cell_physics_goldens(cfg):
    c0 = device.cell_capacitance(cfg.cell)
    e_read = device.intrinsic_read_energy(c0, cfg.read_voltage)
    ratios = {
        d: device.read_field_ratio(cfg.read_voltage, d * 1e-9, cfg.cell.coercive_field) for d in (8, 6, 10)
    }
    ok = (
        _within(c0, 69e-18, 0.01)
        and _within(e_read, 8.6e-19, 0.01)
        and _within(ratios[8], 0.1975, 0.01)
        and _within(ratios[6], 0.26333, 0.01)
        and _within(ratios[10], 0.158, 0.01)
        and (round(ratios[8], 2), round(ratios[6], 2), round(ratios[10], 2)) == (0.20, 0.26, 0.16)
    )
    assert _report("C01 cell physics goldens", ok)


def test_c02_read_disturb_band(cfg):
    field = cfg.read_voltage / cfg.cell.hzo_thickness
    probs = [
        device.disturb_probability(
            device.DisturbParams(cfg.disturb.pulse_width, cfg.disturb.attempt_time, e_a, field, 10)
        )
        for e_a in (9e8, 20e8)
    ]
    e_a = device.required_activation_field(3e-13, cfg.disturb.pulse_width, cfg.disturb.attempt_time, 10, field)
    ok = all(1e-42 <= p <= 1e-17 for p in probs) and 6.9e8 <= e_a <= 7.0e8
    assert _report("C02 read-disturb band and activation bound", ok)


def test_c03_nc_gain_anchors():
    anchors = [
        (device.NcDesignPoint(0.714, 0.0), 2.5),
        (device.NcDesignPoint(0.714, 0.20), 1.47),
        (device.NcDesignPoint(0.714, -0.20), 8.3),
        (device.NcDesignPoint(3.5, 0.0), 1.4),
    ]
    ok = all(_within(device.nc_gain(p).magnitude, expected, 0.01) for p, expected in anchors)
    ok = ok and device.nc_gain(device.NcDesignPoint(0.714, -0.30)).boundary_crossed
    assert _report("C03 NC gain anchors and boundary crossing", ok)


def test_c04_noise_components(cfg):
    c0 = device.cell_capacitance(cfg.cell)
    v_ktc = noise.ktc_noise(c0, cfg.noise.temperature, 256)
    v_flicker = noise.flicker_noise(
        cfg.noise.flicker_amplitude_1hz, cfg.noise.flicker_f_lo, cfg.noise.flicker_f_hi
    )
    ok = _within(v_ktc, 484e-6, 0.01) and 45e-6 <= v_flicker <= 46e-6
    for point in cfg.operating_points.values():
        result = noise.monte_carlo_nf(point, 100_000, seed=cfg.seed)
        ok = ok and 0.95 <= result.estimated_nf / result.configured_nf <= 1.05
    assert _report("C04 noise components and Monte-Carlo agreement", ok)


def test_c05_tile_energy_table(cfg):
    breakdown = tile.tile_read_energy(cfg.tile)
    macs = cfg.tile.macs_per_read
    pwm = tile.tile_read_energy(replace(cfg.tile, dac_variant="pwm"))
    ok = (
        _sig3(breakdown.per_mac_j(macs) * 1e15) == _sig3(19.22)
        and _sig3(pwm.per_mac_j(macs) * 1e15) == _sig3(0.78)
        and _within(breakdown.dac_j / breakdown.array_j, 3.2e4, 0.05)
    )
    assert _report("C05 tile energy split", ok)


def test_c06_per_token_scaling(cfg):
    shape = cfg.shape
    fit_a, fit_b = tile.fit_gpu_affine()
    ok = tile.attention_macs_per_token(1024, shape) == 8_388_608
    ok = ok and _within(tile.token_attention_energy(1024, shape, "vdac"), 1.6e-7, 0.02)
    ok = ok and _within(tile.token_attention_energy(1024, shape, "pwm"), 6.6e-9, 0.02)
    for t, published in tile.GPU_ANALYTIC_POINTS:
        ok = ok and _within(tile.gpu_token_energy_analytic(t), published, 0.01)
        ok = ok and _within(fit_a + fit_b * t, published, 0.01)
    ok = ok and _within(tile.active_mac_ratio(1024, shape, "vdac"), 12.0, 0.05)
    ok = ok and _within(tile.active_mac_ratio(1024, shape, "pwm"), 300.0, 0.05)
    assert _report("C06 corrected per-token scaling", ok)


def test_c07_comparator_normalization():
    table = {e.name: e.normalized_fj_per_mac for e in tile.comparator_table(4)}
    ok = _within(table["sc-sram-28nm"], 2.7, 0.05) and _within(table["sc-sram-diff-2024"], 1.9, 0.05)
    assert _report("C07 comparator precision normalization", ok)


def test_c08_kv_append(cfg):
    result = tile.kv_append_energy(cfg.shape, 5e-14, context_tokens=1024, variant="vdac")
    ok = (
        result.cells_per_token == 65_536
        and _within(result.energy_per_token, 3.3e-9, 0.10)
        and _within(result.attention_fraction, 0.02, 0.10)
    )
    assert _report("C08 KV-append write bound", ok)


def test_c09_cache_model(cfg):
    params = cfg.cache
    high = replace(params, substrate_write_energy=100e-15)
    low = replace(params, substrate_write_energy=1e-15)
    derived = cache.derive_read_event_energy()
    base = replace(params, read_event_energy=derived)
    fast = replace(base, refresh_interval=1e-4)
    ok = (
        _within(cache.parked_advantage(100_800.0, high).advantage, 5.04e7, 0.02)
        and _within(cache.parked_advantage(100_800.0, low).advantage, 5.04e9, 0.02)
        and _within(cache.active_advantage(1.0, base), 9.5, 0.02)
        and _within(cache.active_advantage(1.0, fast), 85.7, 0.02)
    )
    assert _report("C09 cache crossover and active advantage", ok)


def test_c10_serving_table3(cfg, gpu_fixture):
    substrate = serving.SUBSTRATES["fecap-vdac"]
    ok = True
    for w in serving.CANONICAL_WORKLOADS:
        g0 = serving.gpu_g0_energy(w, gpu_fixture, cfg.serving)
        hybrid = serving.hybrid_energy(w, substrate, cfg.serving, gpu_fixture)
        pub_gpu, pub_hybrid, pub_speedup = TABLE3_PUBLISHED[w.name]
        ok = ok and _within(g0, pub_gpu, 0.03)
        ok = ok and _within(hybrid, pub_hybrid, 0.03)
        ok = ok and _within(g0 / hybrid, pub_speedup, 0.10)
    assert _report("C10 serving energies and single-user speedups", ok)


def test_c11_serving_table4_ratios(cfg, gpu_fixture):
    grid = serving.ratio_table(cfg.serving, gpu_fixture)
    ok = True
    for strategy, tol in (("G1", 0.10), ("G2", 0.15), ("G3", 0.15)):
        for name, published in TABLE4_PUBLISHED[strategy].items():
            ok = ok and _within(grid[name][strategy].ratio, published, tol)
    assert _report("C11 strategy-ratio table values", ok)


def test_c11_serving_table4_ordering(cfg, gpu_fixture):
    # Stated criterion: parked > agent > rag > qa > chat in every column.
    # The final qa > chat link contradicts the published fixtures themselves
    # (chat amortizes idle over 100 tokens vs qa's 256, so chat's ratio is
    # the larger in the published G0/G1/G3 columns too); it holds only in
    # the NVMe-park column, where qa pays a 4x larger reload.  Asserted as
    # stated; an honest failure.
    grid = serving.ratio_table(cfg.serving, gpu_fixture)
    ordering = serving.ordering_by_residency(grid)
    ok = all(ordering.values())
    assert _report("C11 strategy-ratio residency ordering", ok)


def test_c12_sensitivity_bounds(cfg, gpu_fixture):
    report = serving.sensitivity_sweep(cfg.serving, gpu_fixture)
    ok = (
        _within(report.idle_parked_ratio[0.10], 650.0, 0.10)
        and _within(report.idle_parked_ratio[0.20], 325.0, 0.10)
        and report.alpha["chat"].max_adverse_change < 0.15
        and report.alpha["agent"].max_adverse_change < 0.10
        and report.write_energy_max_change < 0.01
    )
    assert _report("C12 serving sensitivity bounds", ok)


def test_c13_substrate_comparators(cfg, gpu_fixture):
    ratios = serving.comparator_ratios(cfg.serving, gpu_fixture)
    substrate = serving.SUBSTRATES["fecap-vdac"]
    ok = True
    for w in serving.CANONICAL_WORKLOADS:
        vdac = serving.gpu_g0_energy(w, gpu_fixture, cfg.serving) / serving.hybrid_energy(
            w, substrate, cfg.serving, gpu_fixture
        )
        ok = ok and _within(ratios[w.name]["unicaim-like"], vdac, 0.01)
    ok = ok and _within(ratios["parked"]["xformer-like"], COMPARATORS_PUBLISHED["xformer-like"]["parked"], 0.10)
    assert _report("C13 comparator substrates", ok)


def test_c14_kernel_properties(cfg):
    gen = np.random.default_rng(23)
    a = gen.standard_normal((48, 32))
    b = gen.standard_normal((32, 40))
    exact = a @ b

    clean = kernel.QuantNoiseConfig(noise_fraction=0.0, dac_bits=16, adc_bits=16, seed=0)
    transparent = np.linalg.norm(kernel.analog_matmul(a, b, clean) - exact) / np.linalg.norm(exact)
    ok = transparent < 1e-4

    nf_values = np.array([0.005, 0.015, 0.03])
    mses = []
    for nf in nf_values:
        errs = [
            np.mean((kernel.analog_matmul(a, b, kernel.QuantNoiseConfig(float(nf), 8, 8, seed=s)) - exact) ** 2)
            for s in range(60)
        ]
        mses.append(np.mean(errs))
    slope, intercept = np.polyfit(nf_values**2, mses, 1)
    predicted = slope * nf_values**2 + intercept
    r2 = 1 - np.sum((mses - predicted) ** 2) / np.sum((mses - np.mean(mses)) ** 2)
    ok = ok and slope > 0 and r2 > 0.99

    weights = kernel.AttentionWeights.random(d_model=64, n_heads=4, n_kv_heads=2, d_head=16, seed=1)
    x = gen.standard_normal((20, 64))
    reference = kernel.analog_attention(x, weights, kernel.AttentionMode.REFERENCE, clean)
    c4_errs, c5_errs = [], []
    for s in range(100):
        noisy = kernel.QuantNoiseConfig(0.015, 8, 8, seed=s)
        c4 = kernel.analog_attention(x, weights, kernel.AttentionMode.END_TO_END, noisy)
        c5 = kernel.analog_attention(x, weights, kernel.AttentionMode.MATMUL_ONLY, noisy)
        c4_errs.append(np.linalg.norm(c4 - reference))
        c5_errs.append(np.linalg.norm(c5 - reference))
    ok = ok and np.mean(c4_errs) >= np.mean(c5_errs) > 0

    wta_cfg = replace(cfg.wta, seed=cfg.seed)
    for _ in range(50):
        w = wta.wta_softmax(gen.standard_normal(64), wta_cfg)
        ok = ok and abs(w.sum() - 1.0) < 1e-12 and (w >= 0).all() and (w > 0).sum() <= wta_cfg.support_width

    tv_curve = dict(wta.tv_vs_support((1, 8, 64), n_rows=1000, length=64, seed=cfg.seed))
    ok = ok and tv_curve[1] > tv_curve[8] > tv_curve[64]

    from scipy.special import ndtr

    scores = np.array([0.3, -0.1, 0.8, 0.0])
    counts = wta.noisy_argmax_counts(scores, 0.5, 100_000, seed=cfg.seed)
    empirical = counts / counts.sum()
    nodes, quad_w = np.polynomial.hermite.hermgauss(120)
    z = math.sqrt(2.0) * nodes
    analytic = np.array(
        [
            np.sum(
                quad_w
                * np.prod([ndtr((scores[i] - scores[j]) / 0.5 + z) for j in range(4) if j != i], axis=0)
            )
            / math.sqrt(math.pi)
            for i in range(4)
        ]
    )
    analytic = analytic / analytic.sum()
    ok = ok and wta.tv_distance(empirical, analytic) < 0.01

    ok = ok and wta.wta_energy_reduction(1024, wta.WtaConfig(support_width=8, ensemble_size=4)) == 32.0
    ok = ok and wta.wta_energy_reduction(8192, wta.WtaConfig(support_width=8, ensemble_size=4)) == 256.0
    assert _report("C14 analog kernel properties", ok)


def test_c15_reproduce_determinism(tmp_path, capsys):
    first, second = tmp_path / "r1", tmp_path / "r2"
    code1 = main(["--out", str(first), "reproduce", "--target", "all"])
    code2 = main(["--out", str(second), "reproduce", "--target", "all"])
    capsys.readouterr()

    def tree(root: Path) -> dict[str, bytes]:
        return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}

    ok = code1 == 0 and code2 == 0 and tree(first) == tree(second)
    assert _report("C15 byte-identical reproduction", ok)
