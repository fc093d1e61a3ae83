"""Command-line front end for the workbench.

Exit codes: 0 success, 1 configuration/validation failure, 2 tolerance
failure in `reproduce`.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import device, kernel, noise, reproduce, serving, tile, wta
from .config import ConfigError, WorkbenchConfig, load_config
from .report import ReportManifest, write_table


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fecapsim",
        description="Device-to-system workbench for a ferroelectric charge-domain attention substrate",
    )
    parser.add_argument("--config", type=Path, default=None, help="workbench config (default: packaged)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", type=Path, default=None, help="output directory (default: config output_dir)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="output file format")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("device", help="cell physics summary and thickness sweep")
    sub.add_parser("noise", help="noise components and Monte-Carlo nf check")
    sub.add_parser("tile-energy", help="tile energy split and per-token sweep")
    sub.add_parser("cache-crossover", help="volatile vs nonvolatile cache advantage sweep")

    serve = sub.add_parser("serve", help="per-served-token energy simulation")
    serve.add_argument("--workloads", default="all", help="comma list of workloads (default all)")
    serve.add_argument("--strategies", default="G0,G1,G2,G3", help="comma list of GPU strategies")
    serve.add_argument(
        "--substrates", default="unicaim-like,xformer-like,fecap-pwm", help="comparator substrates"
    )
    serve.add_argument("--sweep", action="store_true", help="also emit the sensitivity report")

    kern = sub.add_parser("kernel", help="noisy quantized kernel demonstrations")
    kern.add_argument("--size", type=int, default=128, help="matrix size for the error curve (<= 512)")

    repro = sub.add_parser("reproduce", help="regenerate published tables and check tolerances")
    repro.add_argument(
        "--target",
        default="all",
        help=f"comma list of targets (default all): {', '.join(reproduce.TARGETS)}",
    )

    sweep = sub.add_parser("sweep", help="one-axis parameter sweep")
    sweep.add_argument(
        "--axis", required=True, choices=("thickness", "alpha", "idle", "ewrite", "nf"), help="sweep axis"
    )
    return parser


def _apply_overrides(cfg: WorkbenchConfig, args: argparse.Namespace) -> WorkbenchConfig:
    if args.seed is not None:
        cfg = replace(
            cfg,
            seed=args.seed,
            kernel=replace(cfg.kernel, seed=args.seed),
            wta=replace(cfg.wta, seed=args.seed),
        )
    if args.out is not None:
        cfg = replace(cfg, output_dir=str(args.out))
    return cfg


def _run_targets(cfg: WorkbenchConfig, fmt: str, targets: list[str]) -> int:
    manifest, _ = reproduce.run(targets, cfg, cfg.output_dir, fmt)
    for name, entry in manifest.entries.items():
        print(f"wrote {entry['path']} ({name})")
    return 0


def _cmd_serve(cfg: WorkbenchConfig, fmt: str, args: argparse.Namespace) -> int:
    fixture = cfg.gpu_fixture()
    out = Path(cfg.output_dir)
    manifest = ReportManifest()

    names = [w.name for w in serving.CANONICAL_WORKLOADS] if args.workloads == "all" else args.workloads.split(",")
    workloads = tuple(w for w in serving.CANONICAL_WORKLOADS if w.name in names)
    if not workloads:
        print(f"error: no known workloads in {args.workloads!r}", file=sys.stderr)
        return 1
    strategies = tuple(s.strip().upper() for s in args.strategies.split(","))
    for s in strategies:
        if s not in serving.STRATEGIES:
            print(f"error: unknown strategy {s!r}", file=sys.stderr)
            return 1

    substrate = serving.SUBSTRATES["fecap-vdac"]
    rows = []
    for w in workloads:
        g0 = serving.gpu_g0_energy(w, fixture, cfg.serving)
        hybrid = serving.hybrid_energy(w, substrate, cfg.serving, fixture)
        rows.append([w.name, w.context_tokens, w.residency_s, w.decode_tokens, g0, hybrid, g0 / hybrid])
    path = write_table(
        out / "serving_table3.csv",
        ["workload", "T", "T_keep_s", "n_decode", "gpu_J", "hybrid_J", "speedup"],
        rows,
        fmt,
    )
    manifest.add("table3", path, workloads=",".join(names))

    grid = serving.ratio_table(cfg.serving, fixture, workloads, strategies)
    rows = [[w.name] + [grid[w.name][s].ratio for s in strategies] for w in workloads]
    path = write_table(out / "serving_table4.csv", ["workload", *strategies], rows, fmt)
    manifest.add("table4", path, strategies=",".join(strategies))

    substrate_names = tuple(s.strip() for s in args.substrates.split(","))
    for s in substrate_names:
        if s not in serving.SUBSTRATES:
            print(f"error: unknown substrate {s!r}", file=sys.stderr)
            return 1
    ratios = serving.comparator_ratios(cfg.serving, fixture, workloads, substrate_names)
    rows = [[w.name] + [ratios[w.name][s] for s in substrate_names] for w in workloads]
    path = write_table(out / "serving_comparators.csv", ["workload", *substrate_names], rows, fmt)
    manifest.add("comparators", path, substrates=",".join(substrate_names))

    if args.sweep:
        report = serving.sensitivity_sweep(cfg.serving, fixture)
        rows = [
            [name, a.nominal_ratio, a.min_ratio, a.max_ratio, a.max_adverse_change]
            for name, a in sorted(report.alpha.items())
        ]
        path = write_table(
            out / "sensitivity_alpha.csv",
            ["workload", "nominal_ratio", "min_ratio", "max_ratio", "max_adverse_change"],
            rows,
            fmt,
        )
        manifest.add("sensitivity", path, alpha_range="0.05-0.30")
        rows = [[idle, ratio] for idle, ratio in sorted(report.idle_parked_ratio.items())]
        path = write_table(out / "sensitivity_idle.csv", ["substrate_idle_W", "parked_ratio"], rows, fmt)
        manifest.add("sensitivity_idle", path, idle_points="0.05,0.1,0.2")

    manifest.write(out / "manifest.json")
    for name, entry in manifest.entries.items():
        print(f"wrote {entry['path']} ({name})")
    return 0


def _cmd_kernel(cfg: WorkbenchConfig, fmt: str, args: argparse.Namespace) -> int:
    if not 8 <= args.size <= 512:
        print("error: --size must lie in [8, 512]", file=sys.stderr)
        return 1
    out = Path(cfg.output_dir)
    manifest = ReportManifest()

    nf_grid = (0.0, 0.005, 0.01, 0.015, 0.02, 0.03, 0.05)
    curve = kernel.matmul_error_vs_nf(
        nf_grid,
        shape=(args.size, args.size, args.size),
        base_seed=cfg.seed,
        bits=cfg.kernel.dac_bits,
    )
    path = write_table(out / "kernel_error_vs_nf.csv", ["nf", "rel_frobenius_error"], [list(p) for p in curve], fmt)
    manifest.add("kernel_error_vs_nf", path, size=args.size, bits=cfg.kernel.dac_bits, seed=cfg.seed)

    tv_curve = wta.tv_vs_ensemble(
        (1, 2, 4, 8, 16, 32),
        score_noise=cfg.wta.score_noise,
        support_width=cfg.wta.support_width,
        seed=cfg.seed,
    )
    path = write_table(out / "kernel_tv_vs_kens.csv", ["ensemble_size", "mean_tv_to_softmax"], [list(p) for p in tv_curve], fmt)
    manifest.add("kernel_tv_vs_kens", path, score_noise=cfg.wta.score_noise, support_width=cfg.wta.support_width, seed=cfg.seed)

    keff_curve = wta.tv_vs_support(
        (1, 2, 4, 8, 16, 32, 64),
        score_noise=cfg.wta.score_noise,
        ensemble_size=cfg.wta.ensemble_size,
        seed=cfg.seed,
    )
    path = write_table(out / "kernel_tv_vs_keff.csv", ["support_width", "mean_tv_to_softmax"], [list(p) for p in keff_curve], fmt)
    manifest.add("kernel_tv_vs_keff", path, score_noise=cfg.wta.score_noise, ensemble_size=cfg.wta.ensemble_size, seed=cfg.seed)

    manifest.write(out / "manifest.json")
    for name, entry in manifest.entries.items():
        print(f"wrote {entry['path']} ({name})")
    return 0


def _cmd_sweep(cfg: WorkbenchConfig, fmt: str, args: argparse.Namespace) -> int:
    out = Path(cfg.output_dir)
    manifest = ReportManifest()
    fixture = None
    if args.axis in ("alpha", "idle", "ewrite"):
        fixture = cfg.gpu_fixture()

    if args.axis == "thickness":
        grid = [d * 1e-9 for d in range(6, 13)]
        points = device.thickness_sweep(grid, cfg.cell, cfg.read_voltage)
        rows = [[p.thickness, p.capacitance, p.read_energy, p.ktc_scale, p.field_ratio, p.flip_probability] for p in points]
        path = write_table(
            out / "sweep_thickness.csv",
            ["thickness_m", "capacitance_F", "read_energy_J", "ktc_scale", "field_ratio", "flip_probability"],
            rows,
            fmt,
        )
    elif args.axis == "nf":
        grid = (0.0, 0.005, 0.01, 0.015, 0.02, 0.03, 0.05)
        curve = kernel.matmul_error_vs_nf(grid, base_seed=cfg.seed)
        path = write_table(out / "sweep_nf.csv", ["nf", "rel_frobenius_error"], [list(p) for p in curve], fmt)
    elif args.axis == "alpha":
        report = serving.sensitivity_sweep(cfg.serving, fixture)
        rows = [
            [name, a.nominal_ratio, a.min_ratio, a.max_ratio, a.max_adverse_change]
            for name, a in sorted(report.alpha.items())
        ]
        path = write_table(
            out / "sweep_alpha.csv",
            ["workload", "nominal_ratio", "min_ratio", "max_ratio", "max_adverse_change"],
            rows,
            fmt,
        )
    elif args.axis == "idle":
        report = serving.sensitivity_sweep(cfg.serving, fixture)
        rows = [[idle, ratio] for idle, ratio in sorted(report.idle_parked_ratio.items())]
        path = write_table(out / "sweep_idle.csv", ["substrate_idle_W", "parked_ratio"], rows, fmt)
    else:  # ewrite
        points = (1e-15, 2e-15, 5e-15, 1e-14, 2e-14, 5e-14, 1e-13)
        substrate = serving.SUBSTRATES["fecap-vdac"]
        rows = []
        for e in points:
            serving_cfg = replace(cfg.serving, kv_write_energy_j=e)
            row = [e]
            for w in serving.CANONICAL_WORKLOADS:
                g0 = serving.gpu_g0_energy(w, fixture, serving_cfg)
                row.append(g0 / serving.hybrid_energy(w, substrate, serving_cfg, fixture))
            rows.append(row)
        path = write_table(
            out / "sweep_ewrite.csv",
            ["kv_write_energy_J"] + [w.name for w in serving.CANONICAL_WORKLOADS],
            rows,
            fmt,
        )

    manifest.add(f"sweep_{args.axis}", path, seed=cfg.seed)
    manifest.write(out / "manifest.json")
    print(f"wrote {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = _apply_overrides(cfg, args)
    except ConfigError as exc:
        for message in exc.errors:
            print(f"config error: {message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "device":
            return _run_targets(cfg, args.format, ["cell", "fig_thickness_data"])
        if args.command == "noise":
            return _run_targets(cfg, args.format, ["fig3_data"])
        if args.command == "tile-energy":
            return _run_targets(cfg, args.format, ["table2", "tokens"])
        if args.command == "cache-crossover":
            return _run_targets(cfg, args.format, ["cache"])
        if args.command == "serve":
            return _cmd_serve(cfg, args.format, args)
        if args.command == "kernel":
            return _cmd_kernel(cfg, args.format, args)
        if args.command == "sweep":
            return _cmd_sweep(cfg, args.format, args)
        if args.command == "reproduce":
            targets = [t.strip() for t in args.target.split(",")]
            manifest, checks = reproduce.run(targets, cfg, cfg.output_dir, args.format)
            for check in checks:
                print(check.line())
            failures = [c for c in checks if not c.passed]
            print(f"{len(checks) - len(failures)}/{len(checks)} checks passed")
            for name, entry in manifest.entries.items():
                print(f"wrote {entry['path']} ({name})")
            return 2 if failures else 0
        raise AssertionError(f"unhandled command {args.command}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
