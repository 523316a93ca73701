"""
Test fixtures and configuration.

This module provides pytest fixtures shared by the unit and integration
tests: the standard graphs the drivers are checked on, closed-form matrices,
certificate documents written to a temporary directory and an HTTP client
bound to the FastAPI app.

Fixtures are scoped appropriately:
- session: immutable graphs, built once
- function: anything that touches the filesystem or the app (default)
"""
from pathlib import Path
from typing import AsyncGenerator

import pytest
from httpx import ASGITransport, AsyncClient

from src.main import app
from src.models.graph import Graph
from src.repositories.graph import GraphRepository
from src.services.graph import GraphService
from tests.factories import CertificateFactory, GraphFactory


# ============================================================================
# Graph Fixtures
# ============================================================================

@pytest.fixture(scope="session")
def path4() -> Graph:
    """P4: 1 - 2 - 3 - 4."""
    return GraphService.path(4)


@pytest.fixture(scope="session")
def star3() -> Graph:
    """K1,3 with the center as node 1."""
    return GraphService.star(3)


@pytest.fixture(scope="session")
def triangle() -> Graph:
    return GraphService.complete(3)


@pytest.fixture(scope="session")
def k4() -> Graph:
    return GraphService.complete(4)


@pytest.fixture(scope="session")
def k23() -> Graph:
    return GraphService.complete_bipartite(2, 3)


@pytest.fixture(scope="session")
def square() -> Graph:
    """C4 in cyclic order 1 - 2 - 3 - 4 - 1."""
    return GraphService.cycle(4)


@pytest.fixture(scope="session")
def squared_heptagon() -> Graph:
    """C7 with its chords of length 2: 7 nodes, 14 edges."""
    return GraphFactory.circulant(7, [1, 2])


@pytest.fixture(scope="session")
def twin_pentagon() -> Graph:
    """C5 with every node doubled into an adjacent twin pair."""
    return GraphFactory.twin_cycle(5)


@pytest.fixture(scope="session")
def disconnected() -> Graph:
    """Two disjoint edges."""
    return GraphFactory.from_one_based(4, [(1, 2), (3, 4)])


# ============================================================================
# File Fixtures
# ============================================================================

@pytest.fixture(scope="function")
def graph_file(tmp_path: Path):
    """
    Write a graph as an edge-list file and return its path.

    Usage:
        path = graph_file(GraphService.path(4))
    """
    def write(g: Graph, name: str = "graph.txt") -> str:
        target = tmp_path / name
        GraphRepository.save(g, str(target))
        return str(target)

    return write


@pytest.fixture(scope="function")
def k4_certificate_file(tmp_path: Path) -> str:
    """The -J4 corank-3 certificate as a JSON document."""
    target = tmp_path / "k4.json"
    target.write_text(CertificateFactory.negative_all_ones_text(4), encoding="utf-8")
    return str(target)


# ============================================================================
# Application Fixtures
# ============================================================================

@pytest.fixture(scope="function")
async def client() -> AsyncGenerator[AsyncClient, None]:
    """
    Provide an HTTP client for testing API endpoints.

    Yields:
        AsyncClient: An HTTP client talking to the app in-process
    """
    async with AsyncClient(
        transport=ASGITransport(app=app),
        base_url="http://test",
        follow_redirects=True
    ) as ac:
        yield ac
