"""Command-line front end: ``implinet grow | analyze | sweep | reproduce``.

Data files are written only to paths given by ``--out``; progress goes to
stderr. Exit status is 0 on success, 2 for invalid input, 3 for I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
from dataclasses import replace
from pathlib import Path

from implinet.analysis import (
    EXACT_APL_LIMIT,
    analyze,
    degree_rank,
    paper_n_list,
    round_sig,
    run_sweep,
    sweep_csv,
)
from implinet.graph import SnapshotError, read_graph, write_graph
from implinet.growth import ConfigError, GrowthConfig, RecheckMode, grow

EXIT_OK, EXIT_INPUT, EXIT_IO = 0, 2, 3

REFERENCE_CLUSTERING = 0.77

CONFIG_KEYS = {
    "n_bits": 14,
    "m": 2,
    "initial_labels": None,
    "target_n": 10_000,
    "seed": None,
    "mode": "recompute",
    "trace": False,
    "rank_range": [10, 1000],
    "apl_samples": 1000,
    "apl_mode": "auto",
    "workers": 1,
    "n_list": None,
    "seeds": None,
    "output_dir": None,
}

APL_LIMITS = {"auto": EXACT_APL_LIMIT, "exact": math.inf, "sampled": 0}

MODE_ALIASES = {"recompute": RecheckMode.RECOMPUTE, "prune": RecheckMode.PRUNE_ONLY,
                "prune_only": RecheckMode.PRUNE_ONLY}


class UsageError(Exception):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def load_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise UsageError(f"{path}: unknown config keys {unknown}")
    return data


def _parse_int_list(text: str, what: str) -> list[int]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError(f"{what} is empty")
    try:
        return [int(t) for t in items]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated integers, got {text!r}") from None


def resolve_settings(args) -> dict:
    """Defaults, then the config file, then explicit flags."""
    settings = dict(CONFIG_KEYS)
    if getattr(args, "config", None):
        settings.update(load_config_file(args.config))
    flag_map = {
        "n_bits": "n_bits", "m": "m", "target_n": "target_n", "seed": "seed",
        "initial_label": "initial_labels", "mode": "mode", "workers": "workers",
        "apl_samples": "apl_samples", "apl_mode": "apl_mode", "seeds": "seeds",
    }
    for attr, key in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            settings[key] = value
    if getattr(args, "trace", False):
        settings["trace"] = True
    if getattr(args, "rank_range", None):
        rr = _parse_int_list(args.rank_range, "--rank-range")
        if len(rr) != 2:
            raise UsageError("--rank-range takes min,max")
        settings["rank_range"] = rr
    if getattr(args, "n_list", None):
        settings["n_list"] = _parse_int_list(args.n_list, "--n-list")
    if getattr(args, "paper_n_list", False):
        settings["n_list"] = paper_n_list()
    return settings


def growth_config(settings: dict, *, require_seed: bool = True) -> GrowthConfig:
    seed = settings["seed"]
    if seed is None:
        if require_seed:
            raise UsageError("a seed is required (--seed or config 'seed')")
        seed = 0
    mode = MODE_ALIASES.get(settings["mode"])
    if mode is None:
        raise UsageError(f"unknown mode {settings['mode']!r}")
    try:
        return GrowthConfig(
            n_bits=settings["n_bits"],
            m=settings["m"],
            initial_labels=settings["initial_labels"],
            target_n=settings["target_n"],
            seed=seed,
            recheck_mode=mode,
        )
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _seed_list(settings: dict, default_count: int) -> list[int]:
    count = settings["seeds"]
    if count is None:
        count = default_count
    if not isinstance(count, int) or count < 1:
        raise UsageError(f"--seeds must be a positive integer, got {count!r}")
    base = settings["seed"] if settings["seed"] is not None else 0
    return [base + i for i in range(count)]


def _settings_rank_range(settings: dict) -> tuple:
    lo, hi = settings["rank_range"]
    if lo < 1 or hi < lo:
        raise UsageError(f"bad rank range {lo},{hi}")
    return lo, hi


def _out_path(args, settings: dict, default_name: str) -> Path:
    """``--out`` if given, else ``output_dir`` from the config joined with ``default_name``."""
    if args.out:
        return Path(args.out)
    if settings["output_dir"]:
        return Path(settings["output_dir"]) / default_name
    raise UsageError("no output location: pass --out or set output_dir in the config")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_analysis(g, out_dir: Path, stem: str, settings: dict) -> dict:
    limit = APL_LIMITS.get(settings["apl_mode"])
    if limit is None:
        raise UsageError(f"unknown apl_mode {settings['apl_mode']!r}")
    report = analyze(g, rank_range=_settings_rank_range(settings), workers=settings["workers"],
                     apl_samples=settings["apl_samples"], exact_limit=limit)
    metrics = report.to_dict()
    metrics["sound"] = not report.soundness_violations
    _write_text(out_dir / f"{stem}metrics.json", _dump_json(metrics))
    _write_text(out_dir / f"{stem}rank_out.csv", report.rank_out.to_csv())
    _write_text(out_dir / f"{stem}rank_in.csv", report.rank_in.to_csv())
    _write_text(out_dir / f"{stem}rank_undirected.csv", degree_rank(g, "undirected").to_csv())
    return metrics


def cmd_grow(args) -> int:
    settings = resolve_settings(args)
    cfg = growth_config(settings)
    out = _out_path(args, settings, "graph.snap")
    g, reports = grow(cfg, trace=settings["trace"])
    out.parent.mkdir(parents=True, exist_ok=True)
    write_graph(g, out)
    if settings["trace"]:
        lines = "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in reports)
        _write_text(Path(f"{out}.trace.jsonl"), lines)
    _log(f"grow: {g.node_count} nodes, {g.edge_count} edges -> {out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    settings = resolve_settings(args)
    g = read_graph(args.snapshot)
    out_dir = _out_path(args, settings, "")
    metrics = _write_analysis(g, out_dir, "", settings)
    if metrics["soundness_violations"]:
        _log(f"analyze: {len(metrics['soundness_violations'])} edges violate the implication order")
    if args.print_metrics:
        sys.stdout.write(_dump_json(metrics))
    _log(f"analyze: wrote metrics and rank tables to {out_dir}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    settings = resolve_settings(args)
    n_list = settings["n_list"]
    if not n_list:
        raise UsageError("sweep needs --n-list or --paper-n-list")
    if any(b < a for a, b in zip(n_list, n_list[1:])):
        raise UsageError("--n-list must be ascending")
    template = growth_config(settings, require_seed=False)
    if min(n_list) < template.m:
        raise UsageError(f"every N must be >= m ({template.m})")
    seeds = _seed_list(settings, 1)
    rows = run_sweep(template, n_list, seeds, workers=settings["workers"], timing=args.timing)
    out = _out_path(args, settings, "sweep.csv")
    _write_text(out, sweep_csv(rows))
    _log(f"sweep: {len(rows)} rows -> {out}")
    return EXIT_OK


def _mean_std(values):
    values = [v for v in values if v is not None]
    if not values:
        return {"mean": None, "std": None}
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return {"mean": round_sig(statistics.fmean(values)), "std": round_sig(std)}


def cmd_reproduce(args) -> int:
    settings = resolve_settings(args)
    seeds = _seed_list(settings, 5)
    settings["seed"] = seeds[0]
    base_cfg = growth_config(settings)
    out_dir = _out_path(args, settings, "")
    per_seed = []
    for seed in seeds:
        cfg = replace(base_cfg, seed=seed)
        _log(f"reproduce: canonical run seed={seed} N={cfg.target_n}")
        g, _ = grow(cfg)
        stem = f"seed_{seed}_"
        (out_dir / "canonical").mkdir(parents=True, exist_ok=True)
        write_graph(g, out_dir / "canonical" / f"seed_{seed}.snap")
        m = _write_analysis(g, out_dir / "canonical", stem, settings)
        per_seed.append({
            "seed": seed,
            "slope_out": m["slope_out"], "r2_out": m["r2_out"],
            "slope_in": m["slope_in"], "r2_in": m["r2_in"],
            "clustering_excl": m["clustering_excl"], "clustering_incl0": m["clustering_incl0"],
            "apl": m["apl"], "giant_fraction": m["giant_fraction"],
            "edge_count": m["edge_count"],
        })
    keys = ["slope_out", "r2_out", "slope_in", "r2_in", "clustering_excl",
            "clustering_incl0", "apl", "giant_fraction"]
    summary = {
        "config": base_cfg.to_dict() | {"seeds": seeds, "rank_range": list(_settings_rank_range(settings))},
        "canonical_runs": per_seed,
        "canonical_aggregate": {k: _mean_std([r[k] for r in per_seed]) for k in keys},
        "reference": {"clustering": REFERENCE_CLUSTERING, "apl_curve": "0.8*log10(N)"},
    }
    if not args.skip_sweep:
        n_list = settings["n_list"] or paper_n_list()
        template = replace(base_cfg, seed=seeds[0])
        rows = run_sweep(template, n_list, seeds, workers=settings["workers"], timing=False)
        _write_text(out_dir / "sweep.csv", sweep_csv(rows))
        table = []
        for n in n_list:
            sub = [row for row in rows if row.N == n]
            expected = 0.8 * math.log10(n)
            apl = statistics.fmean(row.apl for row in sub)
            table.append({
                "N": n,
                "clustering_excl_mean": round_sig(statistics.fmean(row.clustering_excl for row in sub)),
                "clustering_incl0_mean": round_sig(statistics.fmean(row.clustering_incl0 for row in sub)),
                "reference_clustering": REFERENCE_CLUSTERING,
                "apl_mean": round_sig(apl),
                "expected_apl": round_sig(expected),
                "apl_relative_error": round_sig(apl / expected - 1.0),
                "giant_fraction_mean": round_sig(statistics.fmean(row.giant_fraction for row in sub)),
            })
        summary["sweep"] = table
    _write_text(out_dir / "summary.json", _dump_json(summary))
    _log(f"reproduce: summary -> {out_dir / 'summary.json'}")
    return EXIT_OK


def _add_growth_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run config; flags override its values")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-bits", dest="n_bits", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--target-n", dest="target_n", type=int)
    p.add_argument("--initial-label", dest="initial_label", action="append",
                   help="bit string for one initial node; repeat m times")
    p.add_argument("--mode", choices=["recompute", "prune"])
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="implinet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grow", help="grow one network and write its snapshot")
    _add_growth_flags(p)
    p.add_argument("--out", help="snapshot path (.json for JSON form)")
    p.add_argument("--trace", action="store_true", help="also write <out>.trace.jsonl")
    p.set_defaults(func=cmd_grow)

    p = sub.add_parser("analyze", help="metrics and degree-rank tables for a snapshot")
    p.add_argument("snapshot")
    p.add_argument("--config")
    p.add_argument("--out", help="output directory")
    p.add_argument("--rank-range", dest="rank_range", help="min,max ranks for slope fits")
    p.add_argument("--workers", type=int)
    p.add_argument("--apl-samples", dest="apl_samples", type=int)
    p.add_argument("--apl-mode", dest="apl_mode", choices=sorted(APL_LIMITS))
    p.add_argument("--print-metrics", dest="print_metrics", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="clustering and path length over a list of N")
    _add_growth_flags(p)
    p.add_argument("--n-list", dest="n_list")
    p.add_argument("--paper-n-list", dest="paper_n_list", action="store_true")
    p.add_argument("--seeds", type=int, help="number of seeds, counting up from --seed (default 0)")
    p.add_argument("--out", help="CSV path")
    p.add_argument("--timing", action="store_true", help="record wall_time_ms (otherwise 0)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="canonical 14-bit trial plus the N sweep")
    _add_growth_flags(p)
    p.add_argument("--seeds", type=int, help="number of canonical runs (default 5)")
    p.add_argument("--n-list", dest="n_list")
    p.add_argument("--rank-range", dest="rank_range")
    p.add_argument("--skip-sweep", dest="skip_sweep", action="store_true")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, SnapshotError, ValueError) as exc:
        _log(f"implinet {args.command}: error: {exc}")
        return EXIT_INPUT
    except OSError as exc:
        _log(f"implinet {args.command}: I/O error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
