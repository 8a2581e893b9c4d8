from __future__ import annotations

import pytest

from rotgraph.graphs import Graph

ACCEPTANCE_LINES: list[str] = []


def atlas_graphs(min_n: int = 3, max_n: int = 5) -> list[tuple[str, Graph]]:
    """Connected graphs from the networkx atlas, converted to :class:`Graph`."""
    import networkx as nx

    out = []
    for k, g in enumerate(nx.graph_atlas_g()):
        n = g.number_of_nodes()
        if min_n <= n <= max_n and nx.is_connected(g):
            out.append((f"atlas{k}", Graph.from_edges(n, list(g.edges()))))
    return out


@pytest.fixture(scope="session")
def atlas():
    return atlas_graphs()


@pytest.fixture
def acceptance_line():
    def record(criterion: int, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} ({detail})")
        print(ACCEPTANCE_LINES[-1])

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
