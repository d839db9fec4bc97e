"""Agent-based spam scenarios over a generated social graph.

Each tick has two phases, both walking agents in id order:

* replies: every Reciprocal agent answers, with its reply probability, each
  initiation accepted for it during the previous tick;
* initiations: Reciprocal agents may message one random neighbour, Spammers
  emit their burst (a friend request when not yet connected to the target,
  a message otherwise).

Every event goes straight through :class:`~trustfilter.engine.FilterEngine`,
so agents always act on the current graph. Ground truth is by source: an
event is spam iff its sender is a Spammer.
"""

from __future__ import annotations

import hashlib
import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence, Union

import numpy as np

from . import _kernels
from ._rational import format_decimal, parse_rational
from .engine import (
    FRIEND_REQUEST,
    MESSAGE,
    Decision,
    EngineConfig,
    FilterEngine,
    InteractionEvent,
    dump_jsonl,
)
from .graph import SocialGraph, validate_profile_id

METRICS_HEADER = (
    "spam_block_rate,false_positive_rate,mean_messages_before_block,"
    "spam_total,spam_rejected,legit_total,legit_rejected"
)


def _probability(value: Any, name: str) -> Fraction:
    p = parse_rational(value, name)
    if not 0 <= p <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


# -- agents -----------------------------------------------------------------------


@dataclass(frozen=True)
class Reciprocal:
    """Answers accepted initiations and occasionally messages a neighbour."""

    reply_probability: Fraction = Fraction(1)
    initiate_probability: Fraction = Fraction(1, 2)

    def __post_init__(self) -> None:
        object.__setattr__(self, "reply_probability", _probability(self.reply_probability, "reply_probability"))
        object.__setattr__(
            self, "initiate_probability", _probability(self.initiate_probability, "initiate_probability")
        )


@dataclass(frozen=True)
class Spammer:
    """Sends ``burst_per_tick`` events per tick; ``targets=None`` picks victims at random."""

    burst_per_tick: int = 1
    targets: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.burst_per_tick, int) or isinstance(self.burst_per_tick, bool) or self.burst_per_tick < 1:
            raise ValueError(f"burst_per_tick must be a positive integer, got {self.burst_per_tick!r}")
        if self.targets is not None:
            targets = tuple(validate_profile_id(t) for t in self.targets)
            if not targets:
                raise ValueError("a fixed target list must not be empty")
            object.__setattr__(self, "targets", targets)


@dataclass(frozen=True)
class Silent:
    pass


Behavior = Union[Reciprocal, Spammer, Silent]


@dataclass(frozen=True)
class AgentSpec:
    id: str
    behavior: Behavior

    def __post_init__(self) -> None:
        validate_profile_id(self.id)


# -- topology -----------------------------------------------------------------------


@dataclass(frozen=True)
class ErdosRenyi:
    n: int
    edge_probability: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "edge_probability", _probability(self.edge_probability, "edge_probability"))


@dataclass(frozen=True)
class BarabasiAlbert:
    n: int
    attachments_per_node: int


@dataclass(frozen=True)
class ExplicitEdgeList:
    edges: tuple[tuple[str, str], ...]


Topology = Union[ErdosRenyi, BarabasiAlbert, ExplicitEdgeList]


def substream(seed: int, label: str) -> np.random.Generator:
    """Independent generator for ``label``, so adding agents leaves others' draws intact."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest[:16], "little")))


def _generated_ids(n: int) -> list[str]:
    width = len(str(n - 1))
    return [f"u{i:0{width}d}" for i in range(n)]


def generate_network(topology: Topology, seed: int) -> tuple[list[str], list[tuple[str, str]]]:
    """Profiles and undirected edges (``a < b``, sorted) for ``topology``."""
    if isinstance(topology, ExplicitEdgeList):
        nodes: set[str] = set()
        edges = set()
        for a, b in topology.edges:
            validate_profile_id(a)
            validate_profile_id(b)
            if a == b:
                raise ValueError(f"self-edge on {a!r} in edge list")
            nodes.update((a, b))
            edges.add((min(a, b), max(a, b)))
        return sorted(nodes), sorted(edges)

    n = topology.n
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValueError(f"topology needs n >= 2, got {n!r}")
    ids = _generated_ids(n)
    rng = substream(seed, "__topology__")

    if isinstance(topology, ErdosRenyi):
        p = float(topology.edge_probability)
        out = []
        for i in range(n):
            draws = rng.random(n - i - 1)
            for j, u in zip(range(i + 1, n), draws):
                if u < p:
                    out.append((ids[i], ids[j]))
        return ids, out

    if isinstance(topology, BarabasiAlbert):
        m = topology.attachments_per_node
        if not isinstance(m, int) or isinstance(m, bool) or not 1 <= m < n:
            raise ValueError(f"attachments_per_node must satisfy 1 <= m < n, got {m!r}")
        pairs: set[tuple[int, int]] = set()
        stubs: list[int] = []
        for i in range(m + 1):
            for j in range(i + 1, m + 1):
                pairs.add((i, j))
                stubs += (i, j)
        for new in range(m + 1, n):
            chosen: set[int] = set()
            while len(chosen) < m:
                chosen.add(stubs[int(rng.integers(len(stubs)))])
            for t in sorted(chosen):
                pairs.add((t, new))
                stubs += (t, new)
        return ids, sorted((ids[a], ids[b]) for a, b in pairs)

    raise TypeError(f"unknown topology {topology!r}")


# -- configuration --------------------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    topology: Topology
    agents: tuple[AgentSpec, ...] = ()
    ticks: int = 10
    seed: int = 0
    engine: EngineConfig = field(default_factory=EngineConfig)
    population: Behavior = field(default_factory=Reciprocal)

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(self.agents))
        if not isinstance(self.ticks, int) or isinstance(self.ticks, bool) or self.ticks < 1:
            raise ValueError(f"ticks must be a positive integer, got {self.ticks!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise ValueError("agent ids must be distinct")

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> SimConfig:
        if not isinstance(doc, dict):
            raise ValueError("scenario must be an object")
        unknown = set(doc) - {"topology", "agents", "ticks", "seed", "engine", "population"}
        if unknown:
            raise ValueError(f"unknown scenario field(s): {sorted(unknown)}")
        if "topology" not in doc:
            raise ValueError("scenario needs a topology")
        kwargs: dict[str, Any] = {"topology": _topology_from_dict(doc["topology"])}
        if "agents" in doc:
            kwargs["agents"] = tuple(_agent_from_dict(a) for a in doc["agents"])
        if "population" in doc:
            kwargs["population"] = _behavior_from_dict(doc["population"])
        if "engine" in doc:
            kwargs["engine"] = EngineConfig.from_dict(doc["engine"])
        for key in ("ticks", "seed"):
            if key in doc:
                kwargs[key] = doc[key]
        return cls(**kwargs)


def _expect_keys(doc: Any, allowed: set[str], what: str) -> dict[str, Any]:
    if not isinstance(doc, dict):
        raise ValueError(f"{what} must be an object")
    unknown = set(doc) - allowed
    if unknown:
        raise ValueError(f"unknown {what} field(s): {sorted(unknown)}")
    return doc


def _topology_from_dict(doc: Any) -> Topology:
    kind = doc.get("type") if isinstance(doc, dict) else None
    if kind == "erdos_renyi":
        d = _expect_keys(doc, {"type", "n", "edge_probability"}, "topology")
        return ErdosRenyi(d["n"], d["edge_probability"])
    if kind == "barabasi_albert":
        d = _expect_keys(doc, {"type", "n", "attachments_per_node"}, "topology")
        return BarabasiAlbert(d["n"], d["attachments_per_node"])
    if kind == "edge_list":
        d = _expect_keys(doc, {"type", "edges"}, "topology")
        edges = []
        for e in d["edges"]:
            if not isinstance(e, (list, tuple)) or len(e) != 2:
                raise ValueError(f"edge must be a pair, got {e!r}")
            edges.append((e[0], e[1]))
        return ExplicitEdgeList(tuple(edges))
    raise ValueError(f"topology type must be erdos_renyi, barabasi_albert or edge_list, got {kind!r}")


def _behavior_from_dict(doc: Any) -> Behavior:
    kind = doc.get("behavior") if isinstance(doc, dict) else None
    if kind == "reciprocal":
        d = _expect_keys(doc, {"behavior", "reply_probability", "initiate_probability"}, "behavior")
        return Reciprocal(**{k: v for k, v in d.items() if k != "behavior"})
    if kind == "spammer":
        d = _expect_keys(doc, {"behavior", "burst_per_tick", "targets"}, "behavior")
        targets = d.get("targets", "random")
        if targets == "random":
            targets = None
        elif not isinstance(targets, list):
            raise ValueError("targets must be \"random\" or a list of profile ids")
        return Spammer(d.get("burst_per_tick", 1), None if targets is None else tuple(targets))
    if kind == "silent":
        _expect_keys(doc, {"behavior"}, "behavior")
        return Silent()
    raise ValueError(f"behavior must be reciprocal, spammer or silent, got {kind!r}")


def _agent_from_dict(doc: Any) -> AgentSpec:
    if not isinstance(doc, dict) or "id" not in doc:
        raise ValueError("agent needs an id")
    rest = {k: v for k, v in doc.items() if k != "id"}
    return AgentSpec(doc["id"], _behavior_from_dict(rest))


def load_scenario(path: str | Path) -> SimConfig:
    return SimConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# -- metrics ------------------------------------------------------------------------------


@dataclass(frozen=True)
class SimMetrics:
    spam_events_total: int
    spam_events_rejected: int
    legit_events_total: int
    legit_events_rejected: int
    spam_block_rate: Fraction
    false_positive_rate: Fraction
    mean_messages_before_block: Fraction

    def to_csv(self) -> str:
        row = [
            format_decimal(self.spam_block_rate),
            format_decimal(self.false_positive_rate),
            format_decimal(self.mean_messages_before_block),
            str(self.spam_events_total),
            str(self.spam_events_rejected),
            str(self.legit_events_total),
            str(self.legit_events_rejected),
        ]
        return METRICS_HEADER + "\n" + ",".join(row) + "\n"


def _rate(part: int, whole: int) -> Fraction:
    return Fraction(part, whole) if whole else Fraction(0)


def compute_metrics(
    events: Sequence[InteractionEvent],
    decisions: Sequence[Decision],
    labels: Sequence[bool],
) -> SimMetrics:
    """Tally block and false-positive rates; ``labels[i]`` is True for spam events."""
    if not len(events) == len(decisions) == len(labels):
        raise ValueError(f"misaligned inputs: {len(events)} events, {len(decisions)} decisions, {len(labels)} labels")
    for ev, d in zip(events, decisions):
        if ev.seq != d.event_seq:
            raise ValueError(f"event seq {ev.seq} paired with decision seq {d.event_seq}")

    spam = np.asarray(labels, dtype=np.bool_)
    accepted = np.fromiter((d.accepted for d in decisions), dtype=np.bool_, count=len(decisions))
    spam_total = int(spam.sum())
    spam_rejected = int((spam & ~accepted).sum())
    legit_total = len(events) - spam_total
    legit_rejected = int((~spam & ~accepted).sum())

    mean_before = Fraction(0)
    spam_idx = np.flatnonzero(spam)
    if spam_idx.size:
        ids = sorted({events[i].src for i in spam_idx} | {events[i].dst for i in spam_idx})
        index = {p: k for k, p in enumerate(ids)}
        src = np.fromiter((index[events[i].src] for i in spam_idx), dtype=np.int64, count=spam_idx.size)
        dst = np.fromiter((index[events[i].dst] for i in spam_idx), dtype=np.int64, count=spam_idx.size)
        _, prefix = _kernels.accepted_before_block(src, dst, accepted[spam_idx], len(ids))
        blocked = prefix[prefix >= 0]
        if blocked.size:
            mean_before = Fraction(int(blocked.sum()), int(blocked.size))

    return SimMetrics(
        spam_events_total=spam_total,
        spam_events_rejected=spam_rejected,
        legit_events_total=legit_total,
        legit_events_rejected=legit_rejected,
        spam_block_rate=_rate(spam_rejected, spam_total),
        false_positive_rate=_rate(legit_rejected, legit_total),
        mean_messages_before_block=mean_before,
    )


# -- runner ---------------------------------------------------------------------------------


@dataclass
class SimResult:
    events: list[InteractionEvent]
    decisions: list[Decision]
    labels: list[bool]
    metrics: SimMetrics
    graph: SocialGraph
    initial_graph: SocialGraph

    @property
    def snapshot(self) -> bytes:
        return self.graph.snapshot()

    def write(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "events.jsonl").write_text(dump_jsonl(self.events), encoding="utf-8")
        (out / "decisions.jsonl").write_text(dump_jsonl(self.decisions), encoding="utf-8")
        (out / "metrics.csv").write_text(self.metrics.to_csv(), encoding="utf-8")
        (out / "snapshot.json").write_bytes(self.snapshot)


def run_simulation(cfg: SimConfig) -> SimResult:
    nodes, edges = generate_network(cfg.topology, cfg.seed)
    node_set = set(nodes)
    behaviors: dict[str, Behavior] = {p: cfg.population for p in nodes}
    for agent in cfg.agents:
        if agent.id in node_set and not isinstance(cfg.topology, ExplicitEdgeList):
            raise ValueError(f"agent id {agent.id!r} collides with a generated profile id")
        behaviors[agent.id] = agent.behavior
    order = sorted(behaviors)
    for agent in cfg.agents:
        b = agent.behavior
        if isinstance(b, Spammer) and b.targets is not None:
            for t in b.targets:
                if t not in behaviors or t == agent.id:
                    raise ValueError(f"spammer {agent.id!r} targets unknown or self profile {t!r}")

    graph = SocialGraph()
    for pid in order:
        graph.add_profile(pid)
    for a, b in edges:
        graph.connect(a, b)
    initial = graph.copy()

    engine = FilterEngine(cfg.engine, graph)
    rngs = {pid: substream(cfg.seed, pid) for pid in order}
    cursors = dict.fromkeys(order, 0)
    events: list[InteractionEvent] = []
    decisions: list[Decision] = []
    labels: list[bool] = []
    inbox: dict[str, list[str]] = {}

    def emit(src: str, dst: str, kind: str, tick: int, is_reply: bool, outbox: dict[str, list[str]]) -> None:
        ev = InteractionEvent(len(events), tick, kind, src, dst)
        d = engine.process(ev)
        events.append(ev)
        decisions.append(d)
        labels.append(isinstance(behaviors[src], Spammer))
        if d.accepted and not is_reply:
            outbox[dst].append(src)

    for tick in range(cfg.ticks):
        outbox: dict[str, list[str]] = defaultdict(list)
        for pid in order:
            b = behaviors[pid]
            if isinstance(b, Reciprocal):
                p = float(b.reply_probability)
                for sender in inbox.get(pid, ()):
                    if rngs[pid].random() < p:
                        emit(pid, sender, MESSAGE, tick, True, outbox)
        for pid in order:
            b = behaviors[pid]
            rng = rngs[pid]
            if isinstance(b, Reciprocal):
                if rng.random() < float(b.initiate_probability):
                    nbrs = sorted(graph.neighbors(pid))
                    if nbrs:
                        emit(pid, nbrs[int(rng.integers(len(nbrs)))], MESSAGE, tick, False, outbox)
            elif isinstance(b, Spammer):
                others = [q for q in order if q != pid] if b.targets is None else None
                for _ in range(b.burst_per_tick):
                    if b.targets is None:
                        target = others[int(rng.integers(len(others)))]
                    else:
                        target = b.targets[cursors[pid] % len(b.targets)]
                        cursors[pid] += 1
                    kind = MESSAGE if graph.is_connected(pid, target) else FRIEND_REQUEST
                    emit(pid, target, kind, tick, False, outbox)
        inbox = outbox

    metrics = compute_metrics(events, decisions, labels)
    return SimResult(events, decisions, labels, metrics, engine.graph, initial)
