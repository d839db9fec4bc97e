"""Direct and inferred trust over localized data-sets.

X's trust in Y is ``O / I`` taken from X's row for Y, where ``O`` counts
accepted interactions X started toward Y and ``I`` those Y started toward X.
All values are exact :class:`~fractions.Fraction` objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

from ._rational import parse_rational
from .graph import GraphError, SocialGraph


class Metric(str, Enum):
    RATIO = "ratio"
    SYMMETRIC = "symmetric"


class Basis(str, Enum):
    DIRECT = "direct"
    INFERRED = "inferred"
    DEFAULT = "default"


@dataclass(frozen=True)
class TrustConfig:
    threshold: Fraction = Fraction(1, 2)
    zero_denominator_trust: Fraction = Fraction(1)
    metric: Metric = Metric.RATIO

    def __post_init__(self) -> None:
        threshold = parse_rational(self.threshold, "threshold")
        zdt = parse_rational(self.zero_denominator_trust, "zero_denominator_trust")
        if not 0 < threshold <= 1:
            raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
        if zdt < threshold:
            raise ValueError(f"zero_denominator_trust ({zdt}) must be >= threshold ({threshold})")
        object.__setattr__(self, "threshold", threshold)
        object.__setattr__(self, "zero_denominator_trust", zdt)
        object.__setattr__(self, "metric", Metric(self.metric))

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> TrustConfig:
        unknown = set(doc) - {"threshold", "zero_denominator_trust", "metric"}
        if unknown:
            raise ValueError(f"unknown trust config field(s): {sorted(unknown)}")
        return cls(**doc)

    def to_dict(self) -> dict[str, Any]:
        return {
            "threshold": f"{self.threshold.numerator}/{self.threshold.denominator}",
            "zero_denominator_trust": (
                f"{self.zero_denominator_trust.numerator}/{self.zero_denominator_trust.denominator}"
            ),
            "metric": self.metric.value,
        }


@dataclass(frozen=True)
class TrustScore:
    value: Fraction
    basis: Basis
    via: str | None = None

    def __str__(self) -> str:
        v = f"{self.value.numerator}/{self.value.denominator}"
        if self.basis is Basis.INFERRED:
            return f"inferred via {self.via} {v}"
        return f"{self.basis.value} {v}"


def trust_value(outgoing: int, incoming: int, cfg: TrustConfig) -> tuple[Fraction, Basis]:
    """Trust from one row's counters; ``incoming == 0`` yields the Default value."""
    if incoming == 0:
        return cfg.zero_denominator_trust, Basis.DEFAULT
    if cfg.metric is Metric.SYMMETRIC and outgoing > incoming:
        return Fraction(incoming, outgoing), Basis.DIRECT
    return Fraction(outgoing, incoming), Basis.DIRECT


def _pair(outgoing: int, incoming: int, symmetric: bool, default: tuple[int, int]) -> tuple[int, int]:
    # unreduced (num, den) with den > 0; compared by cross-multiplication
    if incoming == 0:
        return default
    if symmetric and outgoing > incoming:
        return incoming, outgoing
    return outgoing, incoming


def direct_trust(graph: SocialGraph, x: str, y: str, cfg: TrustConfig) -> TrustScore:
    """X's trust in Y from X's own row for Y (zeros if the row is absent)."""
    if x == y:
        raise GraphError(f"trust of {x!r} in itself is undefined")
    rec = graph.row(x, y)
    value, basis = trust_value(rec.outgoing, rec.incoming, cfg)
    return TrustScore(value, basis)


def infer_trust(graph: SocialGraph, b: str, a: str, cfg: TrustConfig) -> TrustScore | None:
    """B's trust in an unconnected A, borrowed from one trusted intermediary.

    A candidate C is a neighbour of both B and A whose trust from B is
    Direct (B has heard from C) and at least the threshold. The winner has
    the highest T(B, C); ties go to the higher T(C, A), then to the
    smallest id. The returned value is C's own trust in A.
    """
    if a == b:
        raise GraphError(f"cannot infer trust of {a!r} in itself")
    nb = graph.neighbors(b)
    na = graph.neighbors(a)
    if a in nb:
        raise GraphError(f"{b!r} and {a!r} are connected; use direct_trust")
    if len(na) < len(nb):
        common = [c for c in na if c in nb]
    else:
        common = [c for c in nb if c in na]
    if not common:
        return None

    symmetric = cfg.metric is Metric.SYMMETRIC
    zdt = cfg.zero_denominator_trust
    default = (zdt.numerator, zdt.denominator)
    tn, td = cfg.threshold.numerator, cfg.threshold.denominator
    rows_b = graph.dataset(b)
    best: tuple[int, int, int, int, str] | None = None
    for c in common:
        rec = rows_b[c]
        if rec.incoming == 0:
            continue
        n1, d1 = _pair(rec.outgoing, rec.incoming, symmetric, default)
        if n1 * td < tn * d1:
            continue
        crec = graph.row(c, a)
        n2, d2 = _pair(crec.outgoing, crec.incoming, symmetric, default)
        if best is None:
            best = (n1, d1, n2, d2, c)
            continue
        cmp1 = n1 * best[1] - best[0] * d1
        if cmp1 > 0:
            best = (n1, d1, n2, d2, c)
        elif cmp1 == 0:
            cmp2 = n2 * best[3] - best[2] * d2
            if cmp2 > 0 or (cmp2 == 0 and c < best[4]):
                best = (n1, d1, n2, d2, c)
    if best is None:
        return None
    return TrustScore(Fraction(best[2], best[3]), Basis.INFERRED, via=best[4])


def edge_weight(graph: SocialGraph, x: str, y: str, cfg: TrustConfig) -> tuple[TrustScore, TrustScore]:
    """The two directed weights ``(T(x, y), T(y, x))`` of the edge ``{x, y}``."""
    if not graph.is_connected(x, y):
        raise GraphError(f"{x!r} and {y!r} are not connected")
    return direct_trust(graph, x, y, cfg), direct_trust(graph, y, x, cfg)
