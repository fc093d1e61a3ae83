import math

import pytest
from scipy.constants import epsilon_0

from fecapsim.device import (
    CellGeometry,
    DisturbParams,
    NcDesignPoint,
    cell_capacitance,
    disturb_probability,
    intrinsic_read_energy,
    nc_gain,
    read_field_ratio,
    required_activation_field,
    switching_work,
    thickness_sweep,
)

CELL = CellGeometry(
    pitch=50e-9,
    hzo_thickness=8e-9,
    permittivity=25.0,
    coercive_field=1e8,
    remanent_polarization=0.25,
)
V_READ = 0.158


class TestCellCapacitance:
    def test_anchor_value(self):
        assert cell_capacitance(CELL) == pytest.approx(69e-18, rel=0.01)

    def test_parallel_plate_at_10nm(self):
        # direct formula evaluation is the oracle
        geom = CELL.with_thickness(10e-9)
        expected = epsilon_0 * 25.0 * (50e-9) ** 2 / 10e-9
        assert cell_capacitance(geom) == expected
        assert expected == pytest.approx(55.3e-18, rel=1e-3)

    def test_vanishing_permittivity_limit(self):
        tiny = CellGeometry(50e-9, 8e-9, 1e-9, 1e8, 0.25)
        assert cell_capacitance(tiny) < 1e-25

    def test_homogeneity(self):
        doubled_area = CellGeometry(50e-9, 8e-9, 25.0, 1e8, 0.25, electrode_area=2 * CELL.area)
        assert cell_capacitance(doubled_area) == 2 * cell_capacitance(CELL)
        assert cell_capacitance(CELL.with_thickness(12e-9)) == cell_capacitance(CELL.with_thickness(6e-9)) / 2

    def test_invalid_geometry(self):
        with pytest.raises(ValueError):
            CellGeometry(50e-9, -8e-9, 25.0, 1e8, 0.25)
        with pytest.raises(ValueError):
            CellGeometry(50e-9, 8e-9, 0.0, 1e8, 0.25)
        with pytest.raises(ValueError):
            CellGeometry(50e-9, 30e-9, 25.0, 1e8, 0.25)  # beyond accepted range

    def test_out_of_sweep_range_warns(self):
        with pytest.warns(UserWarning):
            CellGeometry(50e-9, 5e-9, 25.0, 1e8, 0.25)


class TestReadEnergy:
    def test_half_cv2_anchor(self):
        c0 = cell_capacitance(CELL)
        assert intrinsic_read_energy(c0, V_READ) == pytest.approx(8.6e-19, rel=0.01)

    def test_zero_voltage(self):
        assert intrinsic_read_energy(69e-18, 0.0) == 0.0

    def test_supply_accounting_is_twice(self):
        c0 = cell_capacitance(CELL)
        half = intrinsic_read_energy(c0, V_READ, "half_cv2")
        supply = intrinsic_read_energy(c0, V_READ, "supply_cv2")
        assert supply == 2 * half
        assert supply == pytest.approx(1.72e-18, rel=0.01)

    def test_rejects_negative_capacitance(self):
        with pytest.raises(ValueError):
            intrinsic_read_energy(-1e-18, 0.1)


class TestReadField:
    @pytest.mark.parametrize(
        "thickness,expected",
        [(8e-9, 0.1975), (6e-9, 0.26333), (10e-9, 0.158)],
    )
    def test_anchors(self, thickness, expected):
        assert read_field_ratio(V_READ, thickness, 1e8) == pytest.approx(expected, rel=1e-3)

    def test_invalid(self):
        with pytest.raises(ValueError):
            read_field_ratio(V_READ, 0.0, 1e8)


class TestDisturb:
    def _params(self, e_a, e_eff=0.1975e8):
        return DisturbParams(5e-9, 1e-10, e_a, e_eff, 10)

    def test_band_at_ea9(self):
        p = disturb_probability(self._params(9e8))
        assert p == pytest.approx(8e-18, rel=0.05)
        assert 1e-41 <= p <= 1e-17

    def test_band_at_ea20(self):
        # direct exponent evaluation: 500 * exp(-20 / 0.1975)
        expected = 500.0 * math.exp(-20e8 / 0.1975e8)
        p = disturb_probability(self._params(20e8))
        assert p == expected
        assert p == pytest.approx(5e-42, rel=0.1)

    def test_zero_field_is_zero(self):
        assert disturb_probability(self._params(9e8, 0.0)) == 0.0

    def test_monotonicity(self):
        base = disturb_probability(self._params(9e8))
        assert disturb_probability(self._params(10e8)) < base
        assert disturb_probability(self._params(9e8, 0.25e8)) > base
        assert disturb_probability(DisturbParams(10e-9, 1e-10, 9e8, 0.1975e8, 10)) > base
        assert disturb_probability(DisturbParams(5e-9, 1e-10, 9e8, 0.1975e8, 20)) > base

    def test_clamped_at_one(self):
        assert disturb_probability(DisturbParams(5e-3, 1e-10, 1e6, 1e8, 10)) == 1.0


class TestRequiredActivation:
    def test_anchor(self):
        e_a = required_activation_field(3e-13, 5e-9, 1e-10, 10, 0.20e8)
        assert e_a == pytest.approx(7.0e8, rel=0.01)
        # at the actual 8 nm read field the bound lands inside 6.9-7.0 MV/cm
        e_a = required_activation_field(3e-13, 5e-9, 1e-10, 10, 0.1975e8)
        assert 6.9e8 <= e_a <= 7.0e8

    def test_linear_in_field(self):
        full = required_activation_field(3e-13, 5e-9, 1e-10, 10, 0.20e8)
        half = required_activation_field(3e-13, 5e-9, 1e-10, 10, 0.10e8)
        assert half == pytest.approx(full / 2, rel=1e-12)
        assert half == pytest.approx(3.5e8, rel=0.01)

    def test_saturated_target_gives_zero(self):
        attempts = 10 * (5e-9 / 1e-10)
        assert required_activation_field(attempts, 5e-9, 1e-10, 10, 0.2e8) == 0.0

    def test_out_of_range_target(self):
        with pytest.raises(ValueError):
            required_activation_field(1e3, 5e-9, 1e-10, 10, 0.2e8)
        with pytest.raises(ValueError):
            required_activation_field(0.0, 5e-9, 1e-10, 10, 0.2e8)

    @pytest.mark.parametrize("p_target", [3e-13, 1e-20, 1e-5])
    def test_round_trip_with_disturb(self, p_target):
        e_a = required_activation_field(p_target, 5e-9, 1e-10, 10, 0.1975e8)
        back = disturb_probability(DisturbParams(5e-9, 1e-10, e_a, 0.1975e8, 10))
        assert back == pytest.approx(p_target, rel=1e-12)


class TestNcGain:
    @pytest.mark.parametrize(
        "ratio,shift,expected",
        [(0.714, 0.0, 2.5), (0.714, 0.20, 1.47), (0.714, -0.20, 8.3), (3.5, 0.0, 1.4)],
    )
    def test_anchors(self, ratio, shift, expected):
        assert nc_gain(NcDesignPoint(ratio, shift)).magnitude == pytest.approx(expected, rel=0.01)

    def test_thirty_percent_shift_crosses_boundary(self):
        result = nc_gain(NcDesignPoint(0.714, -0.30))
        assert result.boundary_crossed
        assert not nc_gain(NcDesignPoint(0.714, -0.20)).boundary_crossed
        assert not nc_gain(NcDesignPoint(3.5, 0.30)).boundary_crossed

    def test_gain_above_unity(self):
        for i in range(1, 200):
            r = 0.5 + i * 0.25
            if abs(r - 1.0) < 1e-9:
                continue
            assert nc_gain(NcDesignPoint(r)).magnitude > 1.0

    def test_asymptote(self):
        assert nc_gain(NcDesignPoint(1e6)).magnitude == pytest.approx(1.0, abs=1e-5)

    def test_singularity(self):
        with pytest.raises(ValueError):
            nc_gain(NcDesignPoint(1.0))
        with pytest.raises(ValueError):
            nc_gain(NcDesignPoint(1.2, 0.2))

    def test_monotone_decreasing_beyond_peak(self):
        gains = [nc_gain(NcDesignPoint(r)).magnitude for r in (1.5, 2.0, 3.5, 10.0, 100.0)]
        assert all(a > b for a, b in zip(gains, gains[1:]))


class TestSwitchingWork:
    def test_anchor(self):
        assert switching_work(1.2, CELL) == pytest.approx(1.5e-15, rel=0.01)

    def test_zero_voltage(self):
        assert switching_work(0.0, CELL) == 0.0

    def test_wafer_anchor_polarization(self):
        wafer = CellGeometry(50e-9, 8e-9, 25.0, 1e8, 0.4058)
        # same formula with the measured-wafer remanent polarization
        assert switching_work(1.2, wafer) == pytest.approx(2.435e-15, rel=0.005)


class TestThicknessSweep:
    def test_scaling_anchors(self):
        points = {round(p.thickness * 1e9): p for p in thickness_sweep([8e-9, 10e-9], CELL, V_READ)}
        assert points[8].read_energy / points[10].read_energy == pytest.approx(1.25, rel=1e-12)
        assert points[8].capacitance / points[10].capacitance == pytest.approx(1.25, rel=1e-12)
        assert points[8].ktc_scale / points[10].ktc_scale == pytest.approx(math.sqrt(0.8), rel=1e-12)
        assert points[8].ktc_scale / points[10].ktc_scale == pytest.approx(0.894, rel=1e-3)

    def test_identity_at_anchor(self):
        (point,) = thickness_sweep([10e-9], CELL, V_READ)
        assert point.ktc_scale == pytest.approx(1.0, rel=1e-12)

    def test_sub_coercive_across_sweep(self):
        grid = [d * 1e-9 for d in range(6, 13)]
        points = thickness_sweep(grid, CELL, V_READ)
        assert max(p.field_ratio for p in points) < 0.3

    def test_flip_probability_bounds(self):
        grid = [d * 1e-9 for d in range(6, 13)]
        # the 9 MV/cm barrier keeps every point below 1e-12 (worst case 6 nm);
        # a 12 MV/cm barrier holds the whole sweep below 1e-17
        at9 = thickness_sweep(grid, CELL, V_READ, activation_field=9e8)
        assert max(p.flip_probability for p in at9) < 1e-12
        at12 = thickness_sweep(grid, CELL, V_READ, activation_field=12e8)
        assert max(p.flip_probability for p in at12) < 1e-17

    def test_rejects_bad_thickness(self):
        with pytest.raises(ValueError):
            thickness_sweep([0.0], CELL, V_READ)
