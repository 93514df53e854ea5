import os

import pytest

from infowalk.app_graph import CsrGraph, powerlaw_graph, two_cliques
from infowalk.config import AppConfig

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
TOY_GRAPH = os.path.join(DATA_DIR, "toy_graph.txt")


@pytest.fixture(autouse=True)
def fresh_defaults(monkeypatch):
    monkeypatch.delenv("INFOWALK_CONFIG", raising=False)
    monkeypatch.delenv("INFOWALK_THREADS", raising=False)
    AppConfig.reset()
    yield
    AppConfig.reset()


@pytest.fixture
def toy_graph_path() -> str:
    return TOY_GRAPH


@pytest.fixture
def path_graph() -> CsrGraph:
    # 0 - 1 - 2 - 3
    return CsrGraph.from_edges([0, 1, 2], [1, 2, 3])


@pytest.fixture
def triangle_tail() -> CsrGraph:
    # triangle 0-1-2 with a tail 2-3
    return CsrGraph.from_edges([0, 0, 1, 2], [1, 2, 2, 3])


@pytest.fixture
def cliques() -> CsrGraph:
    return two_cliques(6, bridge=True)


@pytest.fixture(scope="session")
def small_powerlaw() -> CsrGraph:
    return powerlaw_graph(300, avg_degree=6, seed=3)


@pytest.fixture
def edge_file(tmp_path):
    """Writes lines to an edge-list file under tmp_path and returns its path."""
    def write(lines, name: str = "g.txt") -> str:
        path = tmp_path / name
        path.write_text("".join(line + "\n" for line in lines))
        return str(path)
    return write
