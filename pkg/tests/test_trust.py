from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import build_graph
from inference_cases import CASES, HAND_EXPECTED
from oracles import brute_infer, pair_trust
from trustfilter.graph import GraphError
from trustfilter.trust import Basis, Metric, TrustConfig, TrustScore, direct_trust, edge_weight, infer_trust, trust_value

RATIO = TrustConfig()
SYM = TrustConfig(metric="symmetric")


def _pair_graph(o, i):
    # X's row for Y: outgoing=o, incoming=i
    return build_graph([("X", "Y")], {("X", "Y"): o, ("Y", "X"): i})


def test_one_reply_gives_trust_one():
    assert direct_trust(_pair_graph(1, 1), "X", "Y", RATIO) == TrustScore(Fraction(1), Basis.DIRECT)


def test_zero_history_is_default():
    assert direct_trust(_pair_graph(0, 0), "X", "Y", RATIO) == TrustScore(Fraction(1), Basis.DEFAULT)


def test_spam_ratio_one_third():
    assert direct_trust(_pair_graph(1, 3), "X", "Y", RATIO) == TrustScore(Fraction(1, 3), Basis.DIRECT)


def test_symmetric_metric():
    assert direct_trust(_pair_graph(3, 1), "X", "Y", SYM).value == Fraction(1, 3)
    assert direct_trust(_pair_graph(0, 2), "X", "Y", SYM).value == 0


def test_direct_trust_self_is_error():
    with pytest.raises(GraphError):
        direct_trust(_pair_graph(1, 1), "X", "X", RATIO)


def test_direct_trust_absent_row():
    g = build_graph([], {}, profiles=["X", "Y"])
    assert direct_trust(g, "X", "Y", RATIO).basis is Basis.DEFAULT


@pytest.mark.parametrize(
    "kwargs",
    [
        {"threshold": 0},
        {"threshold": "3/2"},
        {"threshold": 1, "zero_denominator_trust": "1/2"},
        {"metric": "geometric"},
        {"threshold": True},
    ],
)
def test_trust_config_validation(kwargs):
    with pytest.raises(ValueError):
        TrustConfig(**kwargs)


def test_trust_config_roundtrip_and_coercion():
    cfg = TrustConfig(threshold=0.4, zero_denominator_trust="3/2", metric="symmetric")
    assert cfg.threshold == Fraction(2, 5)
    assert cfg.metric is Metric.SYMMETRIC
    assert TrustConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        TrustConfig.from_dict({"thresh": 1})


def test_edge_weight_symmetric_history():
    g = build_graph([("A", "B")], {("A", "B"): 2, ("B", "A"): 2})
    w = edge_weight(g, "A", "B", RATIO)
    assert (w[0].value, w[1].value) == (1, 1)


def test_edge_weight_spam_scenario():
    # A sent 3 accepted, B replied once
    g = build_graph([("A", "B")], {("A", "B"): 3, ("B", "A"): 1})
    t_ba, t_ab = edge_weight(g, "B", "A", RATIO)
    assert t_ba.value == Fraction(1, 3)
    assert t_ab.value == 3


def test_edge_weight_requires_edge():
    g = build_graph([], {("A", "B"): 1})
    with pytest.raises(GraphError):
        edge_weight(g, "A", "B", RATIO)


def test_infer_examples():
    g = build_graph(
        [("B", "C"), ("C", "A")], {("B", "C"): 9, ("C", "B"): 10, ("C", "A"): 8, ("A", "C"): 10}
    )
    assert infer_trust(g, "B", "A", RATIO) == TrustScore(Fraction(4, 5), Basis.INFERRED, "C")
    g = build_graph([("B", "C"), ("A", "D")], {})
    assert infer_trust(g, "B", "A", RATIO) is None


def test_infer_errors():
    g = build_graph([("A", "B")], {})
    with pytest.raises(GraphError):
        infer_trust(g, "A", "A", RATIO)
    with pytest.raises(GraphError):
        infer_trust(g, "A", "B", RATIO)


def test_infer_unknown_profiles_give_none():
    g = build_graph([("B", "C")], {})
    assert infer_trust(g, "B", "ghost", RATIO) is None


@pytest.mark.parametrize("case", CASES, ids=[c[0] for c in CASES])
def test_hand_built_inference(case):
    name, edges, counts, b, a, threshold, metric = case
    g = build_graph(edges, counts, profiles=[a, b])
    cfg = TrustConfig(threshold=threshold, metric=metric)
    got = infer_trust(g, b, a, cfg)
    got_pair = None if got is None else (got.value, got.via)
    assert got_pair == brute_infer(g.profiles(), edges, counts, b, a, threshold, metric)
    if name in HAND_EXPECTED:
        assert got_pair == HAND_EXPECTED[name]


# -- properties ----------------------------------------------------------------------

counts_st = st.integers(min_value=0, max_value=60)
pos_st = st.integers(min_value=1, max_value=60)


@settings(deadline=None)
@given(o=counts_st, i=pos_st)
def test_ratio_monotone(o, i):
    t = lambda o_, i_: direct_trust(_pair_graph(o_, i_), "X", "Y", RATIO).value  # noqa: E731
    assert t(o + 1, i) > t(o, i)
    if o > 0:
        assert t(o, i + 1) < t(o, i)
    else:
        assert t(o, i + 1) == t(o, i) == 0


@given(o=counts_st, i=pos_st)
def test_symmetric_bounded(o, i):
    v = direct_trust(_pair_graph(o, i), "X", "Y", SYM).value
    assert 0 <= v <= 1
    assert (v == 1) == (o == i)


@given(o=counts_st, num=st.integers(1, 20), den=st.integers(1, 20))
def test_spam_decay_bound(o, num, den):
    if num > den:
        num, den = den, num
    theta = Fraction(num, den)
    cfg = TrustConfig(threshold=theta)
    for i in range(1, 3 * (o + 1) * den + 2):
        below = trust_value(o, i, cfg)[0] < theta
        assert below == (i > o / theta)


@given(metric=st.sampled_from(["ratio", "symmetric"]), zdt=st.sampled_from(["1", "3/2", "5"]))
def test_zero_history_neutral(metric, zdt):
    cfg = TrustConfig(metric=metric, zero_denominator_trust=zdt)
    s = direct_trust(_pair_graph(0, 0), "X", "Y", cfg)
    assert s.basis is Basis.DEFAULT and s.value == Fraction(zdt)


@st.composite
def small_graphs(draw):
    names = ["A", "B", "C", "D", "E"][: draw(st.integers(3, 5))]
    pairs = [(x, y) for i, x in enumerate(names) for y in names[i + 1:]]
    edges = [p for p in pairs if draw(st.booleans()) and p != ("A", "B")]
    counts = {}
    for x in names:
        for y in names:
            if x != y:
                k = draw(st.integers(0, 4))
                if k:
                    counts[(x, y)] = k
    theta = draw(st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(2, 3), Fraction(1)]))
    metric = draw(st.sampled_from(["ratio", "symmetric"]))
    return names, edges, counts, theta, metric


@settings(deadline=None)
@given(small_graphs())
def test_inference_matches_brute_force(case):
    names, edges, counts, theta, metric = case
    g = build_graph(edges, counts, profiles=names)
    cfg = TrustConfig(threshold=theta, metric=metric)
    got = infer_trust(g, "B", "A", cfg)
    expected = brute_infer(names, edges, counts, "B", "A", theta, metric)
    assert (None if got is None else (got.value, got.via)) == expected
    if got is not None:
        # soundness: the intermediary itself clears the threshold on Direct trust
        t_bc, basis = pair_trust(counts, "B", got.via, metric)
        assert basis == "direct" and t_bc >= theta
    assert infer_trust(g.copy(), "B", "A", cfg) == got
