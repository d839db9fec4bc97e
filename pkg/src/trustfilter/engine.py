"""Per-event accept/reject decisions, replay and the from-scratch oracle.

Resolution order for an event ``src -> dst``:

1. connected pair: dst's direct trust in src against the threshold;
2. unconnected: trust borrowed from dst's best qualifying intermediary;
3. neither: the configured fallback policy.

Acceptance means ``trust >= threshold``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import _kernels
from ._rational import format_rational, parse_rational
from .graph import DEFAULT_KIND, SocialGraph, validate_profile_id
from .trust import Basis, TrustConfig, infer_trust, trust_value

MESSAGE = "message"
FRIEND_REQUEST = "friend_request"
COMMENT = "comment"

_EVENT_FIELDS = ("seq", "ts", "kind", "src", "dst")


class EventError(ValueError):
    """A malformed or out-of-order event. ``seq`` and ``line`` locate it when known."""

    def __init__(self, message: str, seq: int | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if seq is not None:
            where.append(f"seq {seq}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.seq = seq
        self.line = line


class Verdict(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"


class DecisionBasis(str, Enum):
    DIRECT = "direct"
    INFERRED = "inferred"
    DEFAULT = "default"
    FALLBACK = "fallback"


class FallbackPolicy(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"


def _require_int(doc: dict, key: str) -> int:
    v = doc[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise ValueError(f"{key} must be a non-negative integer, got {v!r}")
    return v


@dataclass(frozen=True, slots=True)
class InteractionEvent:
    seq: int
    ts: int
    kind: str
    src: str
    dst: str

    def validate(self) -> None:
        seq = self.seq if type(self.seq) is int else None
        for key in ("seq", "ts"):
            v = getattr(self, key)
            if type(v) is not int or v < 0:
                raise EventError(f"{key} must be a non-negative integer, got {v!r}", seq=seq)
        if not isinstance(self.kind, str) or not self.kind:
            raise EventError(f"kind must be a non-empty string, got {self.kind!r}", seq=seq)
        try:
            validate_profile_id(self.src)
            validate_profile_id(self.dst)
        except ValueError as exc:
            raise EventError(str(exc), seq=seq) from None
        if self.src == self.dst:
            raise EventError(f"src and dst are both {self.src!r}", seq=seq)

    @classmethod
    def from_dict(cls, doc: Any) -> InteractionEvent:
        if not isinstance(doc, dict):
            raise EventError("event must be a JSON object")
        unknown = set(doc) - set(_EVENT_FIELDS)
        if unknown:
            raise EventError(f"unknown field(s) {sorted(unknown)}")
        missing = [k for k in _EVENT_FIELDS if k not in doc]
        if missing:
            raise EventError(f"missing field(s) {missing}")
        ev = cls(doc["seq"], doc["ts"], doc["kind"], doc["src"], doc["dst"])
        ev.validate()
        return ev

    def to_dict(self) -> dict[str, Any]:
        return {"seq": self.seq, "ts": self.ts, "kind": self.kind, "src": self.src, "dst": self.dst}


@dataclass(frozen=True, slots=True)
class Decision:
    event_seq: int
    verdict: Verdict
    basis: DecisionBasis
    trust: Fraction | None = None
    via: str | None = None

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPT

    def to_dict(self) -> dict[str, Any]:
        return {
            "seq": self.event_seq,
            "verdict": self.verdict.value,
            "basis": self.basis.value,
            "via": self.via,
            "trust": None if self.trust is None else format_rational(self.trust),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> Decision:
        if set(doc) != {"seq", "verdict", "basis", "via", "trust"}:
            raise ValueError(f"decision fields must be seq, verdict, basis, via, trust; got {sorted(doc)}")
        trust = doc["trust"]
        return cls(
            event_seq=_require_int(doc, "seq"),
            verdict=Verdict(doc["verdict"]),
            basis=DecisionBasis(doc["basis"]),
            trust=None if trust is None else parse_rational(trust, "trust"),
            via=doc["via"],
        )


@dataclass(frozen=True)
class EngineConfig:
    trust: TrustConfig = field(default_factory=TrustConfig)
    fallback_policy: FallbackPolicy = FallbackPolicy.ACCEPT
    friend_request_connects: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "fallback_policy", FallbackPolicy(self.fallback_policy))
        if not isinstance(self.friend_request_connects, bool):
            raise ValueError("friend_request_connects must be a boolean")

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> EngineConfig:
        if not isinstance(doc, dict):
            raise ValueError("engine config must be an object")
        unknown = set(doc) - {"trust", "fallback_policy", "friend_request_connects"}
        if unknown:
            raise ValueError(f"unknown engine config field(s): {sorted(unknown)}")
        kwargs = dict(doc)
        if "trust" in kwargs:
            if not isinstance(kwargs["trust"], dict):
                raise ValueError("trust must be an object")
            kwargs["trust"] = TrustConfig.from_dict(kwargs["trust"])
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "trust": self.trust.to_dict(),
            "fallback_policy": self.fallback_policy.value,
            "friend_request_connects": self.friend_request_connects,
        }


def load_config(path: str | Path | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return EngineConfig.from_dict(doc)


# -- decision procedure ---------------------------------------------------------


def decide(graph: SocialGraph, event: InteractionEvent, cfg: EngineConfig) -> Decision:
    """Verdict for ``event`` against the current graph. Never mutates ``graph``."""
    src, dst = event.src, event.dst
    if src == dst:
        raise EventError(f"src and dst are both {src!r}", seq=event.seq)
    tcfg = cfg.trust
    via = None
    if graph.is_connected(dst, src):
        rec = graph.row(dst, src)
        value, basis = trust_value(rec.outgoing, rec.incoming, tcfg)
        dbasis = DecisionBasis.DIRECT if basis is Basis.DIRECT else DecisionBasis.DEFAULT
    else:
        inferred = infer_trust(graph, dst, src, tcfg)
        if inferred is None:
            verdict = Verdict.ACCEPT if cfg.fallback_policy is FallbackPolicy.ACCEPT else Verdict.REJECT
            return Decision(event.seq, verdict, DecisionBasis.FALLBACK)
        value, dbasis, via = inferred.value, DecisionBasis.INFERRED, inferred.via
    threshold = tcfg.threshold
    ok = value.numerator * threshold.denominator >= threshold.numerator * value.denominator
    return Decision(event.seq, Verdict.ACCEPT if ok else Verdict.REJECT, dbasis, value, via)


class FilterEngine:
    """Sequential event processor owning one graph.

    Enforces strictly increasing ``seq`` and non-decreasing ``ts``; unknown
    profiles are registered on first sight.
    """

    def __init__(self, cfg: EngineConfig | None = None, graph: SocialGraph | None = None):
        self.cfg = cfg or EngineConfig()
        self.graph = graph if graph is not None else SocialGraph()
        self.last_seq: int | None = None
        self.last_ts: int | None = None

    def process(self, event: InteractionEvent) -> Decision:
        event.validate()
        if self.last_seq is not None:
            if event.seq <= self.last_seq:
                raise EventError(f"seq not after previous seq {self.last_seq}", seq=event.seq)
            if event.ts < self.last_ts:
                raise EventError(f"ts {event.ts} earlier than previous ts {self.last_ts}", seq=event.seq)
        g = self.graph
        g.add_profile(event.src)
        g.add_profile(event.dst)
        d = decide(g, event, self.cfg)
        if d.verdict is Verdict.ACCEPT:
            if (
                event.kind == FRIEND_REQUEST
                and self.cfg.friend_request_connects
                and not g.is_connected(event.src, event.dst)
            ):
                g.connect(event.src, event.dst, DEFAULT_KIND)
            g.apply_accepted_interaction(event.src, event.dst)
        else:
            g.record_rejected(event.src, event.dst)
        self.last_seq = event.seq
        self.last_ts = event.ts
        return d


def replay(
    events: Iterable[InteractionEvent],
    cfg: EngineConfig | None = None,
    graph: SocialGraph | None = None,
) -> tuple[list[Decision], SocialGraph]:
    """Fold the engine over ``events``; the first malformed event aborts with its seq."""
    engine = FilterEngine(cfg, graph.copy() if graph is not None else None)
    decisions = [engine.process(ev) for ev in events]
    return decisions, engine.graph


def oracle_state(
    events: Sequence[InteractionEvent],
    decisions: Sequence[Decision],
    *,
    initial: SocialGraph | None = None,
    friend_request_connects: bool = True,
) -> SocialGraph:
    """Rebuild the final graph by counting events per (pair, direction, verdict).

    Shares no code path with :class:`FilterEngine`; counters come from a bulk
    tally over the logs.
    """
    if len(events) != len(decisions):
        raise ValueError(f"log lengths differ: {len(events)} events vs {len(decisions)} decisions")
    for i, (ev, d) in enumerate(zip(events, decisions)):
        if ev.seq != d.event_seq:
            raise ValueError(f"logs misaligned at position {i}: event seq {ev.seq} vs decision seq {d.event_seq}")

    g = initial.copy() if initial is not None else SocialGraph()
    ids = sorted({ev.src for ev in events} | {ev.dst for ev in events})
    for pid in ids:
        g.add_profile(pid)
    if not events:
        return g

    index = {pid: i for i, pid in enumerate(ids)}
    n = len(ids)
    src = np.fromiter((index[ev.src] for ev in events), dtype=np.int64, count=len(events))
    dst = np.fromiter((index[ev.dst] for ev in events), dtype=np.int64, count=len(events))
    accepted = np.fromiter((d.verdict is Verdict.ACCEPT for d in decisions), dtype=np.bool_, count=len(events))

    if friend_request_connects:
        for ev, ok in zip(events, accepted):
            if ok and ev.kind == FRIEND_REQUEST and not g.is_connected(ev.src, ev.dst):
                g.connect(ev.src, ev.dst, DEFAULT_KIND)

    keys, n_acc, n_rej = _kernels.tally_pairs(src, dst, accepted, n)
    for key, acc, rej in zip(keys.tolist(), n_acc.tolist(), n_rej.tolist()):
        s, t = ids[key // n], ids[key % n]
        out_rec, in_rec = g._ensure_rows(s, t)
        out_rec.outgoing += acc
        in_rec.incoming += acc
        in_rec.rejected += rej
    return g


# -- JSON Lines framing ---------------------------------------------------------


def parse_events(lines: Iterable[str]) -> list[InteractionEvent]:
    """Parse a JSON Lines event log, checking order. Blank lines are skipped."""
    events: list[InteractionEvent] = []
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise EventError(f"invalid JSON ({exc.msg})", line=lineno) from None
        try:
            ev = InteractionEvent.from_dict(doc)
        except EventError as exc:
            raise EventError(str(exc), seq=exc.seq, line=lineno) from None
        if events:
            prev = events[-1]
            if ev.seq <= prev.seq:
                raise EventError(f"seq not after previous seq {prev.seq}", seq=ev.seq, line=lineno)
            if ev.ts < prev.ts:
                raise EventError(f"ts {ev.ts} earlier than previous ts {prev.ts}", seq=ev.seq, line=lineno)
        events.append(ev)
    return events


def read_events(path: str | Path) -> list[InteractionEvent]:
    with open(path, encoding="utf-8") as fh:
        return parse_events(fh)


def dump_jsonl(records: Iterable[InteractionEvent | Decision]) -> str:
    return "".join(json.dumps(r.to_dict(), ensure_ascii=False, separators=(",", ":")) + "\n" for r in records)


def parse_decisions(lines: Iterable[str]) -> list[Decision]:
    out = []
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            out.append(Decision.from_dict(json.loads(raw)))
        except (ValueError, TypeError) as exc:
            raise EventError(f"bad decision record ({exc})", line=lineno) from None
    return out
