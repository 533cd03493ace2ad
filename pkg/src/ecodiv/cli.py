"""Command-line interface.

Subcommands map one-to-one onto the library: ``diversity``, ``profile``,
``bounds``, ``similarity``, ``simulate``, ``monitor`` and ``report``.
Human output rounds to three decimals; ``--json`` emits a fixed envelope
(tool version, echoed command, SHA-256 digests of every input file,
results, warnings) with full-precision numbers, validated by the schema
shipped in ``ecodiv/schemas/cli_output.schema.json``.

Exit codes: 0 success, 1 invalid values, 2 unreadable or malformed
input, 3 at least one alarm fired (``monitor`` only).

JSON output is byte-reproducible: the same inputs and flags always
produce the same bytes, and execution-only flags (``--threads``) are
excluded from the echoed command so they cannot perturb it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .community import Community
from .errors import FileFormatError, InvalidGridError, ValidationError
from .granularity import diversity_interval
from .indices import (
    diversity_profile,
    gini_simpson,
    hill_number,
    richness,
    shannon_entropy,
    simpson_concentration,
    to_effective_number,
)
from .ingest import (
    load_loc,
    load_series,
    load_shared,
    load_similarity,
    load_taxonomy,
    read_snapshot_file,
)
from .monitor import AlarmPolicy, evaluate, series_diversity, trend
from .similarity import similarity_diversity, similarity_from_shared_code
from .survival import SurvivalModel, simulate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_ALARM = 3

_NOMINAL_SUM = {"proportion": 1.0, "percent": 100.0}


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _digest(path) -> dict:
    return {
        "path": str(path),
        "sha256": hashlib.sha256(Path(path).read_bytes()).hexdigest(),
    }


def _envelope(name, parameters, input_paths, results, warnings) -> dict:
    return {
        "tool": {"name": "ecodiv", "version": __version__},
        "command": {"name": name, "parameters": parameters},
        "inputs": [_digest(p) for p in input_paths],
        "results": results,
        "warnings": warnings,
    }


def _emit_json(envelope: dict) -> None:
    print(json.dumps(envelope, indent=2))


def _load_community(path, unit) -> tuple[Community, list[str]]:
    snapshot = read_snapshot_file(path)
    community = snapshot.to_community(unit=unit)
    warnings = []
    nominal = _NOMINAL_SUM.get(unit or snapshot.unit)
    if nominal is not None and snapshot.raw_sum != nominal:
        warnings.append(
            f"raw {unit or snapshot.unit} sum is {snapshot.raw_sum:.6g}; "
            "shares were renormalised to total 1"
        )
    return community, warnings


def _all_indices(community: Community) -> dict:
    h = shannon_entropy(community)
    gs = gini_simpson(community)
    sc = simpson_concentration(community)
    s = richness(community)
    return {
        "richness": {
            "value": s,
            "effective_species": to_effective_number("richness", s),
        },
        "shannon_entropy": {
            "value": h,
            "effective_species": to_effective_number("shannon", h),
        },
        "gini_simpson": {
            "value": gs,
            "effective_species": to_effective_number("gini_simpson", gs),
        },
        "simpson_concentration": {
            "value": sc,
            "effective_species": to_effective_number("simpson_concentration", sc),
        },
    }


_INDEX_TITLES = {
    "richness": "richness",
    "shannon_entropy": "shannon entropy (nats)",
    "gini_simpson": "gini-simpson",
    "simpson_concentration": "simpson concentration",
}


def _indices_table(indices: dict) -> list[str]:
    lines = [f"{'index':<24}{'value':>12}{'effective species':>20}"]
    for key, cells in indices.items():
        lines.append(
            f"{_INDEX_TITLES[key]:<24}"
            f"{_fmt(float(cells['value'])):>12}"
            f"{_fmt(cells['effective_species']):>20}"
        )
    return lines


def _parse_grid(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise InvalidGridError(f"grid {spec!r} is not of the form start:stop:steps")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidGridError(f"grid {spec!r} has non-numeric parts") from None
    if steps < 1:
        raise InvalidGridError(f"grid {spec!r}: steps must be >= 1")
    if stop < start:
        raise InvalidGridError(f"grid {spec!r}: stop is below start")
    if steps == 1:
        return [start]
    return [start + i * (stop - start) / (steps - 1) for i in range(steps)]


def _cmd_diversity(args) -> int:
    community, warnings = _load_community(args.snapshot, args.unit)
    value = hill_number(community, args.q)
    results = {
        "community": community.name,
        "q": args.q,
        "effective_species": value,
    }
    if args.all_indices:
        results["indices"] = _all_indices(community)
    if args.json:
        _emit_json(
            _envelope(
                "diversity",
                {"snapshot": args.snapshot, "unit": args.unit, "q": args.q,
                 "all_indices": args.all_indices},
                [args.snapshot],
                results,
                warnings,
            )
        )
    else:
        print(f"{community.name}: effective species at q={args.q:g}: {_fmt(value)}")
        if args.all_indices:
            print()
            for line in _indices_table(results["indices"]):
                print(line)
        for warning in warnings:
            print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK


def _cmd_profile(args) -> int:
    community, warnings = _load_community(args.snapshot, args.unit)
    grid = _parse_grid(args.q_grid)
    profile = diversity_profile(community, grid)
    points = [{"q": q, "effective_species": v} for q, v in profile.orders]
    if args.plot_csv:
        with open(args.plot_csv, "w", encoding="utf-8") as handle:
            handle.write("q,effective_species\n")
            for q, v in profile.orders:
                handle.write(f"{q!r},{v!r}\n")
        print(f"wrote {len(points)} points to {args.plot_csv}")
    elif args.json:
        _emit_json(
            _envelope(
                "profile",
                {"snapshot": args.snapshot, "unit": args.unit,
                 "q_grid": args.q_grid},
                [args.snapshot],
                {"community": community.name, "points": points},
                warnings,
            )
        )
    else:
        print(f"{community.name}: diversity profile")
        print(f"{'q':>8}{'effective species':>20}")
        for q, v in profile.orders:
            print(f"{q:>8.3f}{_fmt(v):>20}")
    return EXIT_OK


def _cmd_bounds(args) -> int:
    community, warnings = _load_community(args.snapshot, args.unit)
    taxonomy = load_taxonomy(args.taxonomy)
    interval = diversity_interval(community, taxonomy, args.q)
    results = {
        "community": community.name,
        "taxonomy": interval.taxonomy_name,
        "q": interval.q,
        "lower": interval.lower,
        "upper": interval.upper,
    }
    if args.json:
        _emit_json(
            _envelope(
                "bounds",
                {"snapshot": args.snapshot, "unit": args.unit,
                 "taxonomy": args.taxonomy, "q": args.q},
                [args.snapshot, args.taxonomy],
                results,
                warnings,
            )
        )
    else:
        print(
            f"{community.name}: true diversity at q={args.q:g} lies in "
            f"[{_fmt(interval.lower)}, {_fmt(interval.upper)}] "
            f"(coarse grouping: {interval.taxonomy_name})"
        )
    return EXIT_OK


def _cmd_similarity(args) -> int:
    community, warnings = _load_community(args.snapshot, args.unit)
    if args.matrix:
        matrix = load_similarity(args.matrix)
        inputs = [args.snapshot, args.matrix]
    else:
        matrix = similarity_from_shared_code(load_loc(args.loc), load_shared(args.shared))
        inputs = [args.snapshot, args.loc, args.shared]
    adjusted = similarity_diversity(community, matrix, args.q)
    plain = hill_number(community, args.q)
    results = {
        "community": community.name,
        "q": args.q,
        "adjusted_effective_species": adjusted,
        "unadjusted_effective_species": plain,
    }
    if args.json:
        _emit_json(
            _envelope(
                "similarity",
                {"snapshot": args.snapshot, "unit": args.unit, "q": args.q,
                 "matrix": args.matrix, "loc": args.loc, "shared": args.shared},
                inputs,
                results,
                warnings,
            )
        )
    else:
        print(
            f"{community.name}: similarity-adjusted effective species at "
            f"q={args.q:g}: {_fmt(adjusted)} (unadjusted: {_fmt(plain)})"
        )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    community, warnings = _load_community(args.snapshot, args.unit)
    model = SurvivalModel(
        population_size=args.pop,
        shock_rate=args.shock_rate,
        shock_kill_fraction=args.kill_fraction,
        targeting_exponent=args.targeting,
        horizon=args.horizon,
        trials=args.trials,
        seed=args.seed,
    )
    report = simulate(community, model, threads=args.threads)
    results = {
        "community": community.name,
        "model": {
            "population_size": model.population_size,
            "shock_rate": model.shock_rate,
            "shock_kill_fraction": model.shock_kill_fraction,
            "targeting_exponent": model.targeting_exponent,
            "horizon": model.horizon,
            "trials": model.trials,
            "seed": model.seed,
        },
        "report": report.to_dict(),
    }
    if args.json:
        # --threads deliberately left out of the echo: identical flags must
        # give identical bytes whatever the worker count was.
        _emit_json(
            _envelope(
                "simulate",
                {"snapshot": args.snapshot, "unit": args.unit, "pop": args.pop,
                 "shock_rate": args.shock_rate,
                 "kill_fraction": args.kill_fraction,
                 "targeting": args.targeting, "horizon": args.horizon,
                 "trials": args.trials, "seed": args.seed},
                [args.snapshot],
                results,
                warnings,
            )
        )
    else:
        print(
            f"{community.name}: N={model.population_size}, "
            f"trials={model.trials}, horizon={model.horizon}, "
            f"seed={model.seed}"
        )
        print(
            "ecosystem survival (>=2 species alive) at horizon: "
            f"{_fmt(report.ecosystem_survival_probability)}"
        )
        print(
            f"mean diversity: {_fmt(report.diversity_trajectory[0])} initial "
            f"-> {_fmt(report.diversity_trajectory[-1])} final"
        )
        print(f"{'species':<24}{'extinction prob':>18}{'mean steps to extinction':>28}")
        for fate in report.per_species:
            suffix = " (censoring at horizon)" if fate.censored else ""
            print(
                f"{fate.label:<24}"
                f"{_fmt(fate.extinction_probability):>18}"
                f"{fate.mean_time_to_extinction:>28.1f}{suffix}"
            )
    return EXIT_OK


def _cmd_monitor(args) -> int:
    series = load_series(args.series_dir, unit=args.unit)
    points = series_diversity(series, args.q)
    policy = AlarmPolicy(
        q=args.q, threshold=args.threshold, min_consecutive=args.min_consecutive
    )
    alarms = evaluate(series, policy)
    slope = trend(series, args.q) if len(series) >= 2 else None
    results = {
        "series": series.name,
        "q": args.q,
        "points": [
            {"timestamp": ts.strftime("%Y-%m-%dT%H:%M:%SZ"), "effective_species": v}
            for ts, v in points
        ],
        "trend_per_day": slope,
        "threshold": args.threshold,
        "min_consecutive": args.min_consecutive,
        "alarms": [
            {
                "timestamp": a.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
                "observed": a.observed,
                "threshold": a.threshold,
            }
            for a in alarms
        ],
    }
    if args.json:
        snapshot_files = sorted(
            p for p in Path(args.series_dir).iterdir()
            if p.suffix.lower() == ".csv" and p.is_file()
        )
        _emit_json(
            _envelope(
                "monitor",
                {"series_dir": args.series_dir, "unit": args.unit, "q": args.q,
                 "threshold": args.threshold,
                 "min_consecutive": args.min_consecutive},
                snapshot_files,
                results,
                [],
            )
        )
    else:
        print(f"{series.name}: diversity at q={args.q:g}")
        for ts, value in points:
            print(f"  {ts.strftime('%Y-%m-%dT%H:%M:%SZ')}  {_fmt(value)}")
        print(f"trend: {'n/a' if slope is None else _fmt(slope) + ' per day'}")
        if alarms:
            for alarm in alarms:
                print(
                    f"ALARM {alarm.timestamp.strftime('%Y-%m-%dT%H:%M:%SZ')}: "
                    f"diversity {_fmt(alarm.observed)} below "
                    f"threshold {_fmt(alarm.threshold)}"
                )
        else:
            print("no alarms")
    return EXIT_ALARM if alarms else EXIT_OK


def _cmd_report(args) -> int:
    community, warnings = _load_community(args.snapshot, args.unit)
    headline = hill_number(community, 1.0)
    indices = _all_indices(community)
    profile = diversity_profile(community, _parse_grid(args.q_grid))
    results = {
        "community": community.name,
        "headline_effective_species": headline,
        "indices": indices,
        "profile": [
            {"q": q, "effective_species": v} for q, v in profile.orders
        ],
    }
    inputs = [args.snapshot]
    interval = None
    if args.taxonomy:
        taxonomy = load_taxonomy(args.taxonomy)
        interval = diversity_interval(community, taxonomy, 1.0)
        results["bounds"] = {
            "taxonomy": interval.taxonomy_name,
            "q": interval.q,
            "lower": interval.lower,
            "upper": interval.upper,
        }
        inputs.append(args.taxonomy)

    if args.json:
        _emit_json(
            _envelope(
                "report",
                {"snapshot": args.snapshot, "unit": args.unit,
                 "taxonomy": args.taxonomy, "q_grid": args.q_grid},
                inputs,
                results,
                warnings,
            )
        )
        return EXIT_OK

    md = args.markdown
    out = []
    if md:
        out.append(f"# Diversity report: {community.name}")
        out.append("")
        out.append(f"Headline: **{_fmt(headline)} effective species** (q=1).")
        out.append("")
        out.append("## Indices")
        out.append("")
        out.append("| index | value | effective species |")
        out.append("| --- | ---: | ---: |")
        for key, cells in indices.items():
            out.append(
                f"| {_INDEX_TITLES[key]} | {_fmt(float(cells['value']))} "
                f"| {_fmt(cells['effective_species'])} |"
            )
        out.append("")
        out.append("## Diversity profile")
        out.append("")
        out.append("| q | effective species |")
        out.append("| ---: | ---: |")
        for q, v in profile.orders:
            out.append(f"| {q:.3f} | {_fmt(v)} |")
        if interval is not None:
            out.append("")
            out.append("## Granularity bounds")
            out.append("")
            out.append(
                f"With the coarse grouping `{interval.taxonomy_name}`, true "
                f"diversity at q=1 lies between **{_fmt(interval.lower)}** "
                f"and **{_fmt(interval.upper)}** effective species."
            )
    else:
        out.append(f"Diversity report: {community.name}")
        out.append(f"headline: {_fmt(headline)} effective species (q=1)")
        out.append("")
        out.extend(_indices_table(indices))
        out.append("")
        out.append(f"{'q':>8}{'effective species':>20}")
        for q, v in profile.orders:
            out.append(f"{q:>8.3f}{_fmt(v):>20}")
        if interval is not None:
            out.append("")
            out.append(
                f"granularity bounds ({interval.taxonomy_name}, q=1): "
                f"[{_fmt(interval.lower)}, {_fmt(interval.upper)}]"
            )
    print("\n".join(out))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecodiv",
        description=(
            "Diversity analytics for software ecosystems and other "
            "categorical populations, in effective-number-of-species units."
        ),
    )
    parser.add_argument("--version", action="version", version=f"ecodiv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_snapshot_args(p):
        p.add_argument("snapshot", help="snapshot CSV (header: species,share)")
        p.add_argument(
            "--unit",
            choices=["proportion", "percent", "count"],
            help="override the snapshot's '# unit:' directive",
        )

    p = sub.add_parser("diversity", help="effective species number of one snapshot")
    add_snapshot_args(p)
    p.add_argument("--q", type=float, default=1.0, help="diversity order (default 1)")
    p.add_argument(
        "--all-indices",
        action="store_true",
        help="also print the raw indices and their effective-number conversions",
    )
    p.add_argument("--json", action="store_true", help="emit the JSON envelope")
    p.set_defaults(handler=_cmd_diversity)

    p = sub.add_parser("profile", help="diversity across a grid of orders q")
    add_snapshot_args(p)
    p.add_argument(
        "--q-grid",
        default="0:5:51",
        help="grid as start:stop:steps (default 0:5:51)",
    )
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", action="store_true", help="emit the JSON envelope")
    group.add_argument(
        "--plot-csv",
        metavar="PATH",
        help="write plot-ready CSV (header: q,effective_species) to PATH",
    )
    p.set_defaults(handler=_cmd_profile)

    p = sub.add_parser(
        "bounds", help="bracket diversity between fine and coarse classifications"
    )
    add_snapshot_args(p)
    p.add_argument(
        "--taxonomy", required=True, help="taxonomy CSV (header: fine,coarse)"
    )
    p.add_argument("--q", type=float, default=1.0, help="diversity order (default 1)")
    p.add_argument("--json", action="store_true", help="emit the JSON envelope")
    p.set_defaults(handler=_cmd_bounds)

    p = sub.add_parser(
        "similarity", help="diversity discounted by shared-code kinship"
    )
    add_snapshot_args(p)
    p.add_argument("--matrix", help="similarity CSV (header: a,b,z)")
    p.add_argument("--loc", help="code sizes CSV (header: species,total_lines)")
    p.add_argument("--shared", help="shared lines CSV (header: a,b,shared_lines)")
    p.add_argument("--q", type=float, default=1.0, help="diversity order (default 1)")
    p.add_argument("--json", action="store_true", help="emit the JSON envelope")
    p.set_defaults(handler=_cmd_similarity)

    p = sub.add_parser(
        "simulate", help="Monte Carlo extinction / survival probabilities"
    )
    add_snapshot_args(p)
    p.add_argument("--pop", type=int, default=100, help="population size N")
    p.add_argument("--shock-rate", type=float, default=0.0,
                   help="per-step probability of a shock event")
    p.add_argument("--kill-fraction", type=float, default=0.5,
                   help="fraction of the target species a shock removes")
    p.add_argument("--targeting", type=float, default=0.0,
                   help="shock targets species i with probability ~ p_i^tau")
    p.add_argument("--horizon", type=int, default=1000, help="steps per trial")
    p.add_argument("--trials", type=int, default=10000, help="number of trials")
    p.add_argument("--seed", type=int, default=0, help="64-bit stream seed")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (wall time only; never changes results)")
    p.add_argument("--json", action="store_true", help="emit the JSON envelope")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("monitor", help="evaluate a time series against a threshold")
    p.add_argument("series_dir", help="directory of YYYYMMDDThhmmssZ.csv snapshots")
    p.add_argument(
        "--unit",
        choices=["proportion", "percent", "count"],
        help="override the snapshots' '# unit:' directives",
    )
    p.add_argument("--q", type=float, default=1.0, help="diversity order (default 1)")
    p.add_argument("--threshold", type=float, required=True,
                   help="alarm when diversity drops below this many species")
    p.add_argument("--min-consecutive", type=int, default=1,
                   help="violating snapshots in a row before alarming (default 1)")
    p.add_argument("--json", action="store_true", help="emit the JSON envelope")
    p.set_defaults(handler=_cmd_monitor)

    p = sub.add_parser("report", help="single document with indices, profile, bounds")
    add_snapshot_args(p)
    p.add_argument("--taxonomy", help="optional taxonomy for a bounds section")
    p.add_argument("--q-grid", default="0:5:51",
                   help="profile grid as start:stop:steps (default 0:5:51)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", action="store_true", help="emit the JSON envelope")
    group.add_argument("--markdown", action="store_true", help="emit Markdown")
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "similarity":
        if bool(args.matrix) == bool(args.loc and args.shared):
            parser.error("provide either --matrix or both --loc and --shared")
    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
