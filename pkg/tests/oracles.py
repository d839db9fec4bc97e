"""Independent reference computations used by the test-suite.

Nothing here imports the trust or engine code paths under test; graphs are
described as plain dicts of accepted-interaction counts.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil


def pair_trust(counts, x, y, metric="ratio", zdt=Fraction(1)):
    """X's trust in Y straight from the definition: (#X->Y) / (#Y->X)."""
    o = counts.get((x, y), 0)
    i = counts.get((y, x), 0)
    if i == 0:
        return zdt, "default"
    if metric == "symmetric":
        if o == 0:
            return Fraction(0), "direct"
        return min(Fraction(o, i), Fraction(i, o)), "direct"
    return Fraction(o, i), "direct"


def brute_infer(profiles, edges, counts, b, a, threshold, metric="ratio", zdt=Fraction(1)):
    """Enumerate every profile as a would-be intermediary, then sort by the full rule.

    Returns ``(value, via)`` or None.
    """
    und = {frozenset(e) for e in edges}
    candidates = []
    for c in profiles:
        if c in (a, b):
            continue
        if frozenset((b, c)) not in und or frozenset((c, a)) not in und:
            continue
        t_bc, basis = pair_trust(counts, b, c, metric, zdt)
        if basis != "direct" or t_bc < threshold:
            continue
        t_ca, _ = pair_trust(counts, c, a, metric, zdt)
        candidates.append((t_bc, t_ca, c))
    if not candidates:
        return None
    candidates.sort(key=lambda t: (-t[0], -t[1], t[2]))
    _, value, via = candidates[0]
    return value, via


def containment_bound(replies: int, threshold: Fraction) -> int:
    """Most accepted spam messages a victim replying ``replies`` times can receive."""
    return ceil(Fraction(replies) / threshold) + 1


def hand_trace_fake_profile(threshold=Fraction(1, 2)):
    """Step-by-step recount of the fake-profile scenario, tracking B's row for A.

    A sends a friend request, B replies once, then A sends four messages.
    Returns a list of (verdict, basis, trust) per event.
    """
    b_in = b_out = 0  # B's row for A
    a_in = a_out = 0  # A's row for B
    connected = False
    out = []
    # 1: A -> B friend request, nobody connected, no intermediary -> fallback accept
    out.append(("accept", "fallback", None))
    connected = True
    a_out += 1
    b_in += 1
    # 2: B -> A reply; A's row for B has I = 0 -> default trust 1
    assert connected and a_in == 0
    out.append(("accept", "default", Fraction(1)))
    b_out += 1
    a_in += 1
    # 3..6: A -> B messages, judged on B's row O(A) / I(A)
    for _ in range(4):
        t = Fraction(b_out, b_in)
        if t >= threshold:
            out.append(("accept", "direct", t))
            b_in += 1
        else:
            out.append(("reject", "direct", t))
    return out
