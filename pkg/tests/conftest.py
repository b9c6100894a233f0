from __future__ import annotations

import networkx as nx
import pytest

from blowspec import Graph

_ACCEPTANCE: dict[str, dict] = {}


def atlas(max_n: int, connected_only: bool = False, min_n: int = 1) -> list[Graph]:
    """All graphs up to isomorphism on ``min_n..max_n`` vertices."""
    out = []
    for G in nx.graph_atlas_g()[1:]:
        n = G.number_of_nodes()
        if n > max_n:
            break
        if n < min_n or (connected_only and not nx.is_connected(G)):
            continue
        out.append(Graph.from_edges(n, G.edges()))
    return out


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(cid, title): acceptance criterion")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


def pytest_runtest_logreport(report):
    marks = getattr(report, "acceptance", None)
    if marks is None:
        return
    entry = _ACCEPTANCE.setdefault(marks[0], {"title": marks[1], "ok": True, "ran": False})
    if report.when == "call":
        entry["ran"] = True
    if report.failed:
        entry["ok"] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        outcome.get_result().acceptance = mark.args


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE, key=lambda c: int(c.lstrip("AC"))):
        e = _ACCEPTANCE[cid]
        status = "PASS" if e["ok"] and e["ran"] else ("SKIP" if e["ok"] else "FAIL")
        terminalreporter.write_line(f"{cid:<5} {status}  {e['title']}")
