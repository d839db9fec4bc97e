"""Reputation-based filtering of social-network interactions."""

from .engine import (
    Decision,
    DecisionBasis,
    EngineConfig,
    EventError,
    FallbackPolicy,
    FilterEngine,
    InteractionEvent,
    Verdict,
    decide,
    oracle_state,
    replay,
)
from .graph import ActivityRecord, GraphError, SnapshotError, SocialGraph
from .simulation import SimConfig, SimMetrics, compute_metrics, generate_network, run_simulation
from .trust import Basis, Metric, TrustConfig, TrustScore, direct_trust, edge_weight, infer_trust

__all__ = [
    "ActivityRecord",
    "Basis",
    "Decision",
    "DecisionBasis",
    "EngineConfig",
    "EventError",
    "FallbackPolicy",
    "FilterEngine",
    "GraphError",
    "InteractionEvent",
    "Metric",
    "SimConfig",
    "SimMetrics",
    "SnapshotError",
    "SocialGraph",
    "TrustConfig",
    "TrustScore",
    "Verdict",
    "compute_metrics",
    "decide",
    "direct_trust",
    "edge_weight",
    "generate_network",
    "infer_trust",
    "oracle_state",
    "replay",
    "run_simulation",
]
