from __future__ import annotations

import pytest
from hypothesis import settings

from trustfilter.graph import SocialGraph

settings.register_profile("trustfilter", deadline=None)
settings.load_profile("trustfilter")

_criteria: dict[tuple[int, str], bool] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion this test covers")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = (marker.args[0], marker.args[1])
    if rep.when == "call" or rep.failed:
        _criteria[key] = _criteria.get(key, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for (number, title), ok in sorted(_criteria.items()):
        terminalreporter.write_line(f"criterion {number}: {title} ... {'PASS' if ok else 'FAIL'}")


def build_graph(edges, counts, profiles=()):
    """Graph with the given undirected edges and accepted-interaction counts.

    ``counts[(x, y)]`` is the number of accepted interactions x started toward y.
    """
    g = SocialGraph()
    names = set(profiles)
    for x, y in edges:
        names.update((x, y))
    for x, y in counts:
        names.update((x, y))
    for p in sorted(names):
        g.add_profile(p)
    for x, y in edges:
        g.connect(x, y)
    for (x, y), k in sorted(counts.items()):
        for _ in range(k):
            g.apply_accepted_interaction(x, y)
    return g
