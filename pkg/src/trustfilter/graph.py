"""Social graph with per-profile localized data-sets.

Each profile keeps a table keyed by neighbour id holding three counters:
``incoming`` (accepted interactions the neighbour started toward the owner),
``outgoing`` (accepted interactions the owner started toward the neighbour)
and ``rejected`` (interactions from the neighbour the engine refused).
Edges are undirected and carry a relationship kind but no weight; weights
are trust values derived on demand in :mod:`trustfilter.trust`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Iterator

FORMAT_VERSION = 1
DEFAULT_KIND = "connection"

_ID_RE = re.compile(r"\S+")


class GraphError(ValueError):
    """Invalid mutation or query on a :class:`SocialGraph`."""


class SnapshotError(ValueError):
    """Snapshot document could not be parsed; ``location`` names the offending spot."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def validate_profile_id(pid: object) -> str:
    if not isinstance(pid, str) or _ID_RE.fullmatch(pid) is None:
        raise GraphError(f"malformed profile id {pid!r}: must be a non-empty string without whitespace")
    return pid


@dataclass(slots=True)
class ActivityRecord:
    incoming: int = 0
    outgoing: int = 0
    rejected: int = 0

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.incoming, self.outgoing, self.rejected)


class SocialGraph:
    """Profiles, undirected relationship edges and localized data-sets.

    Mutating methods work in place. Rows are created lazily, always in
    pairs: whenever ``X`` has a row for ``Y``, ``Y`` has one for ``X``.
    """

    def __init__(self) -> None:
        self._adj: dict[str, dict[str, str]] = {}
        self._rows: dict[str, dict[str, ActivityRecord]] = {}

    # -- construction -------------------------------------------------------

    def add_profile(self, pid: str) -> None:
        if pid in self._adj:
            return
        validate_profile_id(pid)
        self._adj[pid] = {}
        self._rows[pid] = {}

    def connect(self, x: str, y: str, kind: str = DEFAULT_KIND) -> None:
        if x == y:
            raise GraphError(f"self-edge on {x!r} is not allowed")
        self._require(x)
        self._require(y)
        if not isinstance(kind, str) or _ID_RE.fullmatch(kind) is None:
            raise GraphError(f"malformed relationship kind {kind!r}")
        existing = self._adj[x].get(y)
        if existing is not None:
            if existing != kind:
                raise GraphError(f"edge {{{x}, {y}}} already has kind {existing!r}")
            return
        self._adj[x][y] = kind
        self._adj[y][x] = kind
        self._ensure_rows(x, y)

    # -- queries ------------------------------------------------------------

    def __contains__(self, pid: object) -> bool:
        return pid in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def profiles(self) -> list[str]:
        return sorted(self._adj)

    def edges(self) -> list[tuple[str, str, str]]:
        """Each undirected edge once as ``(a, b, kind)`` with ``a < b``, sorted."""
        out = [(a, b, kind) for a, nbrs in self._adj.items() for b, kind in nbrs.items() if a < b]
        out.sort()
        return out

    def neighbors(self, pid: str) -> dict[str, str]:
        """Read-only view by convention: neighbour id -> relationship kind."""
        return self._adj.get(pid, {})

    def is_connected(self, x: str, y: str) -> bool:
        nbrs = self._adj.get(x)
        return nbrs is not None and y in nbrs

    def edge_kind(self, x: str, y: str) -> str | None:
        return self._adj.get(x, {}).get(y)

    def row(self, owner: str, neighbor: str) -> ActivityRecord:
        """The owner's counters for ``neighbor``; an absent row reads as zeros."""
        rec = self._rows.get(owner, {}).get(neighbor)
        return ActivityRecord() if rec is None else rec

    def has_row(self, owner: str, neighbor: str) -> bool:
        return neighbor in self._rows.get(owner, {})

    def dataset(self, owner: str) -> dict[str, ActivityRecord]:
        return self._rows.get(owner, {})

    # -- counter updates ----------------------------------------------------

    def apply_accepted_interaction(self, src: str, dst: str) -> None:
        """Count one accepted interaction started by ``src`` toward ``dst``."""
        if src == dst:
            raise GraphError(f"self-interaction on {src!r}")
        self._require(src)
        self._require(dst)
        out_rec, in_rec = self._ensure_rows(src, dst)
        out_rec.outgoing += 1
        in_rec.incoming += 1

    def record_rejected(self, src: str, dst: str) -> None:
        if src == dst:
            raise GraphError(f"self-interaction on {src!r}")
        self._require(src)
        self._require(dst)
        _, in_rec = self._ensure_rows(src, dst)
        in_rec.rejected += 1

    def _ensure_rows(self, a: str, b: str) -> tuple[ActivityRecord, ActivityRecord]:
        rows_a = self._rows[a]
        rec_ab = rows_a.get(b)
        if rec_ab is None:
            rec_ab = rows_a[b] = ActivityRecord()
        rows_b = self._rows[b]
        rec_ba = rows_b.get(a)
        if rec_ba is None:
            rec_ba = rows_b[a] = ActivityRecord()
        return rec_ab, rec_ba

    def _require(self, pid: str) -> None:
        if pid not in self._adj:
            raise GraphError(f"unknown profile {pid!r}")

    # -- equality, copying, serialization -----------------------------------

    def copy(self) -> SocialGraph:
        g = SocialGraph()
        g._adj = {p: dict(n) for p, n in self._adj.items()}
        g._rows = {
            p: {q: ActivityRecord(r.incoming, r.outgoing, r.rejected) for q, r in rows.items()}
            for p, rows in self._rows.items()
        }
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SocialGraph):
            return NotImplemented
        return self._adj == other._adj and self._rows == other._rows

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SocialGraph(profiles={len(self._adj)}, edges={len(self.edges())})"

    def iter_rows(self) -> Iterator[tuple[str, str, ActivityRecord]]:
        for owner in sorted(self._rows):
            rows = self._rows[owner]
            for nbr in sorted(rows):
                yield owner, nbr, rows[nbr]

    def to_dict(self) -> dict[str, Any]:
        return {
            "format_version": FORMAT_VERSION,
            "profiles": self.profiles(),
            "edges": [{"a": a, "b": b, "kind": k} for a, b, k in self.edges()],
            "datasets": {
                owner: {
                    nbr: {"in": r.incoming, "out": r.outgoing, "rej": r.rejected}
                    for nbr, r in rows.items()
                }
                for owner, rows in self._rows.items()
            },
        }

    def snapshot(self) -> bytes:
        """Canonical JSON: sorted keys, UTF-8, newline-terminated."""
        text = json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)
        return (text + "\n").encode("utf-8")

    @classmethod
    def load(cls, data: bytes | str) -> SocialGraph:
        if isinstance(data, bytes):
            try:
                data = data.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise SnapshotError(f"byte {exc.start}", "invalid UTF-8") from None
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SnapshotError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: Any) -> SocialGraph:
        if not isinstance(doc, dict):
            raise SnapshotError("$", "expected an object")
        expected = {"format_version", "profiles", "edges", "datasets"}
        missing = expected - doc.keys()
        if missing:
            raise SnapshotError("$", f"missing field(s) {sorted(missing)}")
        extra = doc.keys() - expected
        if extra:
            raise SnapshotError("$", f"unknown field(s) {sorted(extra)}")
        version = doc["format_version"]
        if version != FORMAT_VERSION or isinstance(version, bool):
            raise SnapshotError("format_version", f"unsupported version {version!r}")

        g = cls()
        profiles = doc["profiles"]
        if not isinstance(profiles, list):
            raise SnapshotError("profiles", "expected a list")
        for i, pid in enumerate(profiles):
            if pid in g._adj:
                raise SnapshotError(f"profiles[{i}]", f"duplicate profile {pid!r}")
            try:
                g.add_profile(pid)
            except GraphError as exc:
                raise SnapshotError(f"profiles[{i}]", str(exc)) from None

        edges = doc["edges"]
        if not isinstance(edges, list):
            raise SnapshotError("edges", "expected a list")
        for i, edge in enumerate(edges):
            loc = f"edges[{i}]"
            if not isinstance(edge, dict) or set(edge) != {"a", "b", "kind"}:
                raise SnapshotError(loc, "expected an object with fields a, b, kind")
            try:
                g.connect(edge["a"], edge["b"], edge["kind"])
            except GraphError as exc:
                raise SnapshotError(loc, str(exc)) from None

        datasets = doc["datasets"]
        if not isinstance(datasets, dict):
            raise SnapshotError("datasets", "expected an object")
        for owner, rows in datasets.items():
            loc = f"datasets.{owner}"
            if owner not in g._adj:
                raise SnapshotError(loc, "unknown profile")
            if not isinstance(rows, dict):
                raise SnapshotError(loc, "expected an object")
            for nbr, rec in rows.items():
                rloc = f"{loc}.{nbr}"
                if nbr not in g._adj or nbr == owner:
                    raise SnapshotError(rloc, "row must reference another known profile")
                if not isinstance(rec, dict) or set(rec) != {"in", "out", "rej"}:
                    raise SnapshotError(rloc, "expected an object with fields in, out, rej")
                for key in ("in", "out", "rej"):
                    v = rec[key]
                    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                        raise SnapshotError(f"{rloc}.{key}", f"expected a non-negative integer, got {v!r}")
                g._rows[owner][nbr] = ActivityRecord(rec["in"], rec["out"], rec["rej"])

        for owner, rows in g._rows.items():
            for nbr, rec in rows.items():
                mirror = g._rows[nbr].get(owner)
                if mirror is None:
                    raise SnapshotError(f"datasets.{nbr}", f"missing mirror row for {owner!r}")
                if rec.outgoing != mirror.incoming:
                    raise SnapshotError(
                        f"datasets.{owner}.{nbr}.out",
                        f"{rec.outgoing} does not match datasets.{nbr}.{owner}.in={mirror.incoming}",
                    )
        for a, nbrs in g._adj.items():
            for b in nbrs:
                if b not in g._rows[a]:
                    raise SnapshotError(f"datasets.{a}", f"edge to {b!r} has no row")
        return g
