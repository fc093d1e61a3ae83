import json
from pathlib import Path

import pytest

from fecapsim.cli import main


def _tree_bytes(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


class TestExitCodes:
    def test_reproduce_all_passes(self, tmp_path, capsys):
        assert main(["--out", str(tmp_path / "out"), "reproduce", "--target", "all"]) == 0
        out = capsys.readouterr().out
        assert "[FAIL]" not in out
        assert "checks passed" in out

    def test_validation_failure_is_exit_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text("[cell]\nunknown_knob = 1\n")
        assert main(["--config", str(bad), "reproduce"]) == 1
        assert "config error" in capsys.readouterr().err

    def test_missing_config_is_exit_one(self, tmp_path, capsys):
        assert main(["--config", str(tmp_path / "nope.toml"), "device"]) == 1

    def test_tolerance_failure_is_exit_two(self, tmp_path, capsys):
        # permittivity off the anchor shifts the capacitance golden
        off = tmp_path / "off.toml"
        off.write_text('[cell]\npermittivity = 30.0\n')
        code = main(["--config", str(off), "--out", str(tmp_path / "out"), "reproduce", "--target", "cell"])
        assert code == 2
        assert "[FAIL]" in capsys.readouterr().out

    def test_unknown_target_is_exit_one(self, tmp_path, capsys):
        assert main(["--out", str(tmp_path), "reproduce", "--target", "tablezilla"]) == 1


class TestDeterminism:
    def test_reproduce_all_twice_is_byte_identical(self, tmp_path, capsys):
        first, second = tmp_path / "run1", tmp_path / "run2"
        assert main(["--out", str(first), "reproduce", "--target", "all"]) == 0
        assert main(["--out", str(second), "reproduce", "--target", "all"]) == 0
        assert _tree_bytes(first) == _tree_bytes(second)

    def test_seed_changes_monte_carlo_output(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["--out", str(a), "--seed", "1", "noise"]) == 0
        assert main(["--out", str(b), "--seed", "2", "noise"]) == 0
        assert (a / "noise_mc.csv").read_bytes() != (b / "noise_mc.csv").read_bytes()


class TestSubcommands:
    @pytest.mark.parametrize(
        "command,expected",
        [
            (["device"], ["cell_summary.csv", "thickness_sweep.csv"]),
            (["noise"], ["noise_mc.csv"]),
            (["tile-energy"], ["tile_energy.csv", "token_energy_sweep.csv"]),
            (["cache-crossover"], ["cache_crossover.csv"]),
            (["serve"], ["serving_table3.csv", "serving_table4.csv", "serving_comparators.csv"]),
            (["serve", "--sweep"], ["sensitivity_alpha.csv", "sensitivity_idle.csv"]),
            (["kernel", "--size", "32"], ["kernel_error_vs_nf.csv", "kernel_tv_vs_kens.csv", "kernel_tv_vs_keff.csv"]),
            (["sweep", "--axis", "thickness"], ["sweep_thickness.csv"]),
            (["sweep", "--axis", "ewrite"], ["sweep_ewrite.csv"]),
        ],
    )
    def test_produces_expected_files(self, tmp_path, capsys, command, expected):
        out = tmp_path / "out"
        assert main(["--out", str(out), *command]) == 0
        for name in expected:
            assert (out / name).exists(), name
        assert (out / "manifest.json").exists()

    def test_manifest_lists_every_emitted_file(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["--out", str(out), "reproduce", "--target", "all"]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        listed = {entry["path"] for entry in manifest.values()}
        emitted = {p.name for p in out.glob("*.csv")}
        assert emitted == listed

    def test_json_format(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["--out", str(out), "--format", "json", "cache-crossover"]) == 0
        payload = json.loads((out / "cache_crossover.json").read_text())
        assert isinstance(payload, list) and payload

    def test_serve_rejects_unknown_strategy(self, tmp_path, capsys):
        assert main(["--out", str(tmp_path), "serve", "--strategies", "G7"]) == 1

    def test_serve_workload_selection(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["--out", str(out), "serve", "--workloads", "chat,parked"]) == 0
        table = (out / "serving_table3.csv").read_text().splitlines()
        assert len(table) == 3  # header + two workloads
