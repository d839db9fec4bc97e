"""Command-line entry point.

Exit codes: 0 success, 2 input or IO error, 3 no trust available (``trust`` only).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from ._rational import format_decimal
from .engine import EngineConfig, EventError, load_config, read_events, replay, dump_jsonl
from .graph import GraphError, SnapshotError, SocialGraph
from .simulation import load_scenario, run_simulation
from .trust import direct_trust, infer_trust

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_TRUST = 3


class InputError(Exception):
    pass


def _load_snapshot(path: str) -> SocialGraph:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read snapshot {path}: {exc.strerror}") from None
    try:
        return SocialGraph.load(data)
    except SnapshotError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_config(path: str | None, echo: bool) -> EngineConfig:
    try:
        cfg = load_config(path)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: bad config: {exc}") from None
    if echo:
        print(json.dumps(cfg.to_dict(), sort_keys=True))
    return cfg


def cmd_replay(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, args.print_config)
    try:
        events = read_events(args.events)
    except OSError as exc:
        raise InputError(f"cannot read events {args.events}: {exc.strerror}") from None
    except EventError as exc:
        raise InputError(f"{args.events}: {exc}") from None
    decisions, graph = replay(events, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "decisions.jsonl").write_text(dump_jsonl(decisions), encoding="utf-8")
    (out / "snapshot.json").write_bytes(graph.snapshot())
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        raise InputError(f"cannot read scenario {args.scenario}: {exc.strerror}") from None
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{args.scenario}: bad scenario: {exc}") from None
    try:
        result = run_simulation(scenario)
    except ValueError as exc:
        raise InputError(f"{args.scenario}: {exc}") from None
    result.write(args.out)
    return EXIT_OK


def cmd_trust(args: argparse.Namespace) -> int:
    graph = _load_snapshot(args.snapshot)
    cfg = _load_config(args.config, args.print_config)
    x, y = args.x, args.y
    for pid in (x, y):
        if pid not in graph:
            raise InputError(f"unknown profile {pid!r}")
    if x == y:
        raise InputError("x and y must differ")
    if graph.is_connected(x, y):
        print(direct_trust(graph, x, y, cfg.trust))
        return EXIT_OK
    score = infer_trust(graph, x, y, cfg.trust)
    if score is None:
        print("fallback")
        return EXIT_NO_TRUST
    print(score)
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    graph = _load_snapshot(args.snapshot)
    rows = list(graph.iter_rows())
    stats = {
        "profiles": len(graph),
        "edges": len(graph.edges()),
        "rows": len(rows),
        "accepted_interactions": sum(r.incoming for _, _, r in rows),
        "rejected_interactions": sum(r.rejected for _, _, r in rows),
    }
    for key, value in stats.items():
        print(f"{key} {value}")
    return EXIT_OK


def cmd_export_weights(args: argparse.Namespace) -> int:
    graph = _load_snapshot(args.snapshot)
    cfg = _load_config(args.config, args.print_config)
    lines = ["src,dst,trust"]
    directed = []
    for a, b, _ in graph.edges():
        directed.append((a, b))
        directed.append((b, a))
    for src, dst in sorted(directed):
        lines.append(f"{src},{dst},{format_decimal(direct_trust(graph, src, dst, cfg.trust).value)}")
    try:
        out = Path(args.out)
        if out.parent != Path(""):
            out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trustfilter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def config_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="engine config JSON (all fields optional)")
        p.add_argument("--print-config", action="store_true", help="echo the effective config before running")

    p = sub.add_parser("replay", help="run the filter over a JSON Lines event log")
    p.add_argument("events")
    config_opts(p)
    p.add_argument("--out", required=True, help="directory for decisions.jsonl and snapshot.json")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("simulate", help="run an agent-based scenario")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("trust", help="print X's trust in Y")
    p.add_argument("snapshot")
    p.add_argument("x")
    p.add_argument("y")
    config_opts(p)
    p.set_defaults(func=cmd_trust)

    p = sub.add_parser("stats", help="summarize a snapshot")
    p.add_argument("snapshot")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export-weights", help="write directed edge weights as CSV")
    p.add_argument("snapshot")
    config_opts(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_weights)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, GraphError) as exc:
        print(f"trustfilter: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"trustfilter: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
