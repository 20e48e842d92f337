"""Command-line pipeline from transcript export to engagement artifacts.

Every run writes a manifest.json recording the command, effective parameter
values, and SHA-256 digests of the inputs; rerunning with the same config and
inputs reproduces every artifact byte for byte. All artifact writes are
atomic (write temp, then rename), timestamps in artifacts are UTC epoch
seconds, and floats are written in shortest round-trip form.

Exit codes: 0 ok, 2 usage or bad parameter, 3 parse/ordering error,
4 schema error, 5 insufficient data, 6 I/O failure. Failures print a
single-line JSON diagnostic to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__, _kernels
from .chatlog import (
    anonymize,
    dump_log,
    load_log,
    parse_transcript,
    read_mapping,
    utc_timestamp,
)
from .ensemble import (
    AVG_PRESENT,
    AVG_ZERO,
    STD_POPULATION,
    STD_SAMPLE,
    EngagementClass,
    centrality_table,
    conversation_metrics,
    ensemble_stats,
    rank_users,
    zscore_classify,
    zscore_histogram,
)
from .engagement import node_centralities
from .errors import (
    InsufficientDataError,
    NotAConversationError,
    ParameterError,
    ParseError,
    SchemaError,
)
from .netbuild import WindowSpec, build_ensemble, dump_ensemble, load_ensemble
from .synth import Regime, dump_ground_truth, generate
from .temporal import period_compare, user_series

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_SCHEMA = 4
EXIT_INSUFFICIENT = 5
EXIT_IO = 6

_STD_MODES = {"pop": STD_POPULATION, "sample": STD_SAMPLE}
_RANKED_SCOPES = (
    EngagementClass.GLOBAL,
    EngagementClass.HIGH,
    EngagementClass.MEDIUM,
    EngagementClass.LOW,
)


def _write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(
    outdir: Path, command: str, params: dict, inputs: list[Path], outputs: list[str]
) -> None:
    doc = {
        "command": command,
        "version": __version__,
        "kernel_backend": _kernels.BACKEND,
        "parameters": params,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": sorted(outputs),
    }
    _write_text(outdir / "manifest.json", json.dumps(doc, indent=2) + "\n")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_thresholds(text: str) -> tuple[float, float]:
    try:
        lo_raw, hi_raw = text.split(",")
        lo, hi = float(lo_raw), float(hi_raw)
    except ValueError as exc:
        raise ParameterError(f"--thresholds wants 'lo,hi', got {text!r}") from exc
    if lo >= hi:
        raise ParameterError(f"--thresholds wants lo < hi, got {text!r}")
    return lo, hi


def _when(text: str | None) -> int | None:
    if text is None:
        return None
    try:
        return utc_timestamp(text)
    except ValueError as exc:
        raise ParameterError(f"bad ISO date/datetime {text!r}") from exc


def _window_spec(args) -> WindowSpec:
    return WindowSpec(
        delta_t=args.interval * 60,
        alignment=args.align,
        time_range=(_when(args.from_when), _when(args.to_when)),
    )


# ---------------------------------------------------------------------------
# artifact emitters (shared between the step commands and `report`)

def _emit_ensemble(outdir: Path, ens) -> list[str]:
    _write_text(outdir / "ensemble.jsonl", dump_ensemble(ens))
    return ["ensemble.jsonl"]


def _emit_metrics(outdir: Path, ens):
    wms = conversation_metrics(ens)
    mlines = ["window_start,window_index,n,total_weight,equality,intensity,ei"]
    for w in wms:
        m = w.metrics
        mlines.append(
            f"{w.window_start},{w.window_index},{m.n},{m.total_weight},"
            f"{m.equality!r},{m.intensity!r},{m.ei!r}"
        )
    clines = ["window_start,user_id,strength,ei_centrality"]
    for net, w in zip(ens.conversations, wms):
        for ne in node_centralities(net, w.metrics):
            clines.append(
                f"{net.window_start},{ne.user},{ne.strength},{ne.ei_centrality!r}"
            )
    _write_text(outdir / "metrics.csv", "\n".join(mlines) + "\n")
    _write_text(outdir / "centralities.csv", "\n".join(clines) + "\n")
    return ["metrics.csv", "centralities.csv"], wms


def _emit_classify(outdir: Path, wms, std: str, low: float, high: float):
    stats = ensemble_stats(wms, std=std)
    classified = zscore_classify(wms, stats, low=low, high=high)
    lines = ["window_index,ei,z,label"]
    for c in classified:
        lines.append(f"{c.window_index},{c.ei!r},{c.z!r},{c.label.value}")
    _write_text(outdir / "classified.csv", "\n".join(lines) + "\n")
    hist = zscore_histogram(classified)
    _write_text(outdir / "histogram.json", json.dumps(hist) + "\n")
    return ["classified.csv", "histogram.json"], classified


def _emit_rankings(outdir: Path, ens, classified, top_k: int, avg: str, table):
    files = []
    for scope in _RANKED_SCOPES:
        ranking = rank_users(ens, classified, scope, top_k, avg=avg, table=table)
        lines = ["rank,user_id,mean_ei_centrality"]
        for rank, (user, mean) in enumerate(ranking.entries, start=1):
            lines.append(f"{rank},{user},{mean!r}")
        name = f"ranking_{scope.value}.csv"
        _write_text(outdir / name, "\n".join(lines) + "\n")
        files.append(name)
    return files


def _emit_series(outdir: Path, ens, users: list[int], table):
    files = []
    for user in users:
        series = user_series(ens, user, table=table)
        lines = ["window_start,ei_centrality"]
        for start, value in series.points:
            lines.append(f"{start},{value!r}")
        name = f"series_{user}.csv"
        _write_text(outdir / name, "\n".join(lines) + "\n")
        files.append(name)
    return files


def _emit_compare(outdir: Path, ens, split: int, top_k: int | None, avg: str, table):
    cmp = period_compare(ens, split, top_k=top_k, avg=avg, table=table)
    lines = ["user_id,whole,p1,p2,diff"]
    for r in cmp.rows:
        lines.append(f"{r.user},{r.whole!r},{r.p1!r},{r.p2!r},{r.diff!r}")
    _write_text(outdir / "period_compare.csv", "\n".join(lines) + "\n")
    plot = {
        "split": cmp.split,
        "users": [r.user for r in cmp.rows],
        "whole": [r.whole for r in cmp.rows],
        "p1": [r.p1 for r in cmp.rows],
        "p2": [r.p2 for r in cmp.rows],
        "diff": [r.diff for r in cmp.rows],
    }
    _write_text(outdir / "period_compare_plot.json", json.dumps(plot) + "\n")
    return ["period_compare.csv", "period_compare_plot.json"]


# ---------------------------------------------------------------------------
# commands

def _cmd_parse(args) -> int:
    outdir = _outdir(args)
    input_path = Path(args.input)
    text = input_path.read_text(encoding="utf-8")
    parsed = parse_transcript(
        text,
        tz=args.tz,
        profile=args.profile,
        group_name=args.group_name or input_path.stem,
        slack=args.slack,
    )
    prior = read_mapping(args.mapping_in) if args.mapping_in else None
    if args.salt is not None:
        try:
            salt = bytes.fromhex(args.salt)
        except ValueError as exc:
            raise ParameterError(f"--salt must be hex, got {args.salt!r}") from exc
    else:
        salt = None
    anon = anonymize(parsed, salt=salt, prior_mapping=prior)

    log_name = f"log.{args.format}"
    _write_text(outdir / log_name, dump_log(anon.log, args.format))
    mlines = ["hashed_sender,user_id"]
    for digest, user_id in sorted(anon.mapping.items(), key=lambda kv: kv[1]):
        mlines.append(f"{digest},{user_id}")
    _write_text(outdir / "mapping.csv", "\n".join(mlines) + "\n")

    params = {
        "input": str(args.input),
        "out": str(args.out),
        "profile": args.profile,
        "tz": args.tz,
        "group_name": args.group_name,
        "slack": args.slack,
        "format": args.format,
        "salt": anon.salt.hex(),
        "mapping_in": args.mapping_in,
    }
    inputs = [input_path] + ([Path(args.mapping_in)] if args.mapping_in else [])
    _write_manifest(outdir, "parse", params, inputs, [log_name, "mapping.csv"])
    return EXIT_OK


def _build_params(args) -> dict:
    return {
        "input": str(args.input),
        "out": str(args.out),
        "interval": args.interval,
        "align": args.align,
        "from": args.from_when,
        "to": args.to_when,
        "group_name": args.group_name,
    }


def _cmd_build(args) -> int:
    outdir = _outdir(args)
    log = load_log(args.input, group_name=args.group_name)
    ens = build_ensemble(log, _window_spec(args))
    files = _emit_ensemble(outdir, ens)
    _write_manifest(outdir, "build", _build_params(args), [Path(args.input)], files)
    return EXIT_OK


def _cmd_metrics(args) -> int:
    outdir = _outdir(args)
    ens = load_ensemble(args.input)
    files, _ = _emit_metrics(outdir, ens)
    params = {"input": str(args.input), "out": str(args.out)}
    _write_manifest(outdir, "metrics", params, [Path(args.input)], files)
    return EXIT_OK


def _cmd_classify(args) -> int:
    outdir = _outdir(args)
    ens = load_ensemble(args.input)
    low, high = _parse_thresholds(args.thresholds)
    wms = conversation_metrics(ens)
    files, _ = _emit_classify(outdir, wms, _STD_MODES[args.std], low, high)
    params = {
        "input": str(args.input),
        "out": str(args.out),
        "thresholds": args.thresholds,
        "std": args.std,
    }
    _write_manifest(outdir, "classify", params, [Path(args.input)], files)
    return EXIT_OK


def _cmd_rank(args) -> int:
    outdir = _outdir(args)
    ens = load_ensemble(args.input)
    low, high = _parse_thresholds(args.thresholds)
    wms = conversation_metrics(ens)
    stats = ensemble_stats(wms, std=_STD_MODES[args.std])
    classified = zscore_classify(wms, stats, low=low, high=high)
    table = centrality_table(ens)
    files = _emit_rankings(outdir, ens, classified, args.top_k, args.avg, table)
    params = {
        "input": str(args.input),
        "out": str(args.out),
        "top_k": args.top_k,
        "avg": args.avg,
        "thresholds": args.thresholds,
        "std": args.std,
    }
    _write_manifest(outdir, "rank", params, [Path(args.input)], files)
    return EXIT_OK


def _cmd_series(args) -> int:
    outdir = _outdir(args)
    ens = load_ensemble(args.input)
    table = centrality_table(ens)
    files = _emit_series(outdir, ens, args.user, table)
    params = {"input": str(args.input), "out": str(args.out), "user": args.user}
    _write_manifest(outdir, "series", params, [Path(args.input)], files)
    return EXIT_OK


def _cmd_compare(args) -> int:
    outdir = _outdir(args)
    ens = load_ensemble(args.input)
    split = _when(args.split)
    table = centrality_table(ens)
    files = _emit_compare(outdir, ens, split, args.top_k, args.avg, table)
    params = {
        "input": str(args.input),
        "out": str(args.out),
        "split": args.split,
        "top_k": args.top_k,
        "avg": args.avg,
    }
    _write_manifest(outdir, "compare", params, [Path(args.input)], files)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    outdir = _outdir(args)
    regime = Regime(
        kind=args.regime,
        users=args.users,
        rate=args.rate,
        windows=args.windows,
        seed=args.seed,
        dropouts=args.dropouts,
        split_window=args.split_window,
    )
    result = generate(regime, WindowSpec(delta_t=args.interval * 60))
    log_name = f"log.{args.format}"
    _write_text(outdir / log_name, dump_log(result.log, args.format))
    _write_text(outdir / "ground_truth.jsonl", dump_ground_truth(result))
    params = {
        "out": str(args.out),
        "regime": args.regime,
        "users": args.users,
        "rate": args.rate,
        "windows": args.windows,
        "seed": args.seed,
        "dropouts": args.dropouts,
        "split_window": args.split_window,
        "interval": args.interval,
        "format": args.format,
    }
    _write_manifest(
        outdir, "simulate", params, [], [log_name, "ground_truth.jsonl"]
    )
    return EXIT_OK


def _cmd_report(args) -> int:
    outdir = _outdir(args)
    log = load_log(args.input, group_name=args.group_name)
    ens = build_ensemble(log, _window_spec(args))
    low, high = _parse_thresholds(args.thresholds)

    files = _emit_ensemble(outdir, ens)
    metric_files, wms = _emit_metrics(outdir, ens)
    files += metric_files
    classify_files, classified = _emit_classify(
        outdir, wms, _STD_MODES[args.std], low, high
    )
    files += classify_files
    table = centrality_table(ens)
    files += _emit_rankings(outdir, ens, classified, args.top_k, args.avg, table)
    if args.split is not None:
        files += _emit_compare(outdir, ens, _when(args.split), None, args.avg, table)

    params = _build_params(args) | {
        "thresholds": args.thresholds,
        "std": args.std,
        "avg": args.avg,
        "top_k": args.top_k,
        "split": args.split,
    }
    _write_manifest(outdir, "report", params, [Path(args.input)], files)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_out(sp) -> None:
    sp.add_argument("--out", required=True, help="output directory")


def _add_window_flags(sp) -> None:
    sp.add_argument("--interval", type=int, default=10, metavar="MINUTES",
                    help="window length in minutes (default 10)")
    sp.add_argument("--align", choices=["wall", "first"], default="wall",
                    help="window alignment: wall clock or first message")
    sp.add_argument("--from", dest="from_when", default=None, metavar="ISO",
                    help="keep events at/after this UTC date or datetime")
    sp.add_argument("--to", dest="to_when", default=None, metavar="ISO",
                    help="keep events before this UTC date or datetime")
    sp.add_argument("--group-name", default=None)


def _add_class_flags(sp) -> None:
    sp.add_argument("--thresholds", default="-1,1", metavar="LO,HI",
                    help="z-score class boundaries (default -1,1)")
    sp.add_argument("--std", choices=sorted(_STD_MODES), default="pop",
                    help="standard deviation mode (default pop)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chatpulse",
        description="Engagement analytics for group chats from (user, timestamp) "
        "metadata: per-window interaction networks, engagement index, z-score "
        "classes, user rankings, and period comparison.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse a transcript export into an anonymized log")
    sp.add_argument("input", help="transcript text export")
    _add_out(sp)
    sp.add_argument("--profile", default="whatsapp-en-dash",
                    choices=["whatsapp-en-dash", "whatsapp-us-dash", "whatsapp-bracket"])
    sp.add_argument("--tz", default="UTC", help="timezone of the export (default UTC)")
    sp.add_argument("--group-name", default=None)
    sp.add_argument("--slack", type=int, default=0, metavar="SECONDS",
                    help="tolerated backward timestamp jitter (default 0)")
    sp.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    sp.add_argument("--salt", default=None, metavar="HEX",
                    help="anonymization salt; generated when omitted")
    sp.add_argument("--mapping-in", default=None, metavar="PATH",
                    help="prior mapping.csv whose IDs must be preserved")
    sp.set_defaults(handler=_cmd_parse)

    sp = sub.add_parser("build", help="slice a log into windows and build networks")
    sp.add_argument("input", help="canonical log (csv or jsonl)")
    _add_out(sp)
    _add_window_flags(sp)
    sp.set_defaults(handler=_cmd_build)

    sp = sub.add_parser("metrics", help="per-window engagement metrics and centralities")
    sp.add_argument("input", help="ensemble.jsonl")
    _add_out(sp)
    sp.set_defaults(handler=_cmd_metrics)

    sp = sub.add_parser("classify", help="z-score classes per conversation network")
    sp.add_argument("input", help="ensemble.jsonl")
    _add_out(sp)
    _add_class_flags(sp)
    sp.set_defaults(handler=_cmd_classify)

    sp = sub.add_parser("rank", help="user rankings per engagement class")
    sp.add_argument("input", help="ensemble.jsonl")
    _add_out(sp)
    _add_class_flags(sp)
    sp.add_argument("--top-k", type=int, default=10)
    sp.add_argument("--avg", choices=[AVG_ZERO, AVG_PRESENT], default=AVG_ZERO,
                    help="absent users count as zero, or average over appearances")
    sp.set_defaults(handler=_cmd_rank)

    sp = sub.add_parser("series", help="per-user engagement time series")
    sp.add_argument("input", help="ensemble.jsonl")
    _add_out(sp)
    sp.add_argument("--user", type=int, action="append", required=True,
                    help="user ID (repeatable)")
    sp.set_defaults(handler=_cmd_series)

    sp = sub.add_parser("compare", help="period-over-period engagement differences")
    sp.add_argument("input", help="ensemble.jsonl")
    _add_out(sp)
    sp.add_argument("--split", required=True, metavar="ISO",
                    help="boundary date; the boundary belongs to the second period")
    sp.add_argument("--top-k", type=int, default=None)
    sp.add_argument("--avg", choices=[AVG_ZERO, AVG_PRESENT], default=AVG_ZERO)
    sp.set_defaults(handler=_cmd_compare)

    sp = sub.add_parser("simulate", help="generate a synthetic log with ground truth")
    _add_out(sp)
    sp.add_argument("--regime", required=True,
                    choices=["round-robin", "broadcaster", "dominant-pair",
                             "uniform-random", "planted-dropout"])
    sp.add_argument("--users", type=int, required=True)
    sp.add_argument("--rate", type=int, required=True, help="messages per window")
    sp.add_argument("--windows", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dropouts", type=int, default=0)
    sp.add_argument("--split-window", type=int, default=None)
    sp.add_argument("--interval", type=int, default=10, metavar="MINUTES")
    sp.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    sp.set_defaults(handler=_cmd_simulate)

    sp = sub.add_parser("report", help="full pipeline: build, metrics, classify, rank")
    sp.add_argument("input", help="canonical log (csv or jsonl)")
    _add_out(sp)
    _add_window_flags(sp)
    _add_class_flags(sp)
    sp.add_argument("--top-k", type=int, default=10)
    sp.add_argument("--avg", choices=[AVG_ZERO, AVG_PRESENT], default=AVG_ZERO)
    sp.add_argument("--split", default=None, metavar="ISO",
                    help="also emit period comparison artifacts")
    sp.set_defaults(handler=_cmd_report)

    return parser


def _fail(kind: str, exc: Exception, code: int) -> int:
    print(json.dumps({"error": kind, "detail": str(exc)}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ParseError as exc:  # includes OrderingError
        return _fail("parse", exc, EXIT_PARSE)
    except SchemaError as exc:  # includes MappingConflictError
        return _fail("schema", exc, EXIT_SCHEMA)
    except (InsufficientDataError, NotAConversationError) as exc:
        return _fail("insufficient-data", exc, EXIT_INSUFFICIENT)
    except ParameterError as exc:
        return _fail("parameter", exc, EXIT_USAGE)
    except OSError as exc:
        return _fail("io", exc, EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())
