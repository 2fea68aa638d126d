import itertools

import numpy as np
import pytest

from relweights.graph import build_graph, gen_complete, gen_star


def random_connected_graph(rng, m_min=2, m_max=10):
    """Erdos-Renyi graph resampled until connected."""
    while True:
        m = int(rng.integers(m_min, m_max + 1))
        p = rng.uniform(0.2, 0.9)
        edges = [e for e in itertools.combinations(range(m), 2) if rng.random() < p]
        g = build_graph(m, edges)
        if g.connected:
            return g


def random_connected_graphs(count, seed, m_min=2, m_max=10):
    rng = np.random.default_rng(seed)
    return [random_connected_graph(rng, m_min, m_max) for _ in range(count)]


@pytest.fixture
def k5():
    return gen_complete(5)


@pytest.fixture
def star5():
    return gen_star(5)


@pytest.fixture
def path3():
    return build_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def edge2():
    return build_graph(2, [(0, 1)])


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def report(criterion, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
