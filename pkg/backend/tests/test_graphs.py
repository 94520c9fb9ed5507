# tests/test_graphs.py

import pytest

from qcsat.core.errors import InvalidInputError
from qcsat.schemas.graph import Multigraph, TreeDecomposition
from qcsat.services.graphs import (
    connected_components,
    induced_subgraph,
    min_fill_tree_decomposition,
    quotient_graph,
    validate_tree_decomposition,
)


def cycle(n: int) -> Multigraph:
    return Multigraph(n=n, edges=tuple((v, (v + 1) % n, v + 1) for v in range(n)))


def grid(rows: int, cols: int) -> Multigraph:
    edges, label = [], 0
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                label += 1
                edges.append((v, v + 1, label))
            if r + 1 < rows:
                label += 1
                edges.append((v, v + cols, label))
    return Multigraph(n=rows * cols, edges=tuple(edges))


def test_multigraph_rejects_loops_and_repeated_labels():
    with pytest.raises(ValueError):
        Multigraph(n=2, edges=((0, 0, 1),))
    with pytest.raises(ValueError):
        Multigraph(n=3, edges=((0, 1, 1), (1, 2, 1)))


def test_parallel_edges_count_in_degree():
    g = Multigraph(n=2, edges=((0, 1, 1), (0, 1, 2), (1, 0, 3)))
    assert g.degree(0) == 3
    assert g.max_degree == 3


def test_min_fill_widths():
    path = Multigraph(n=4, edges=((0, 1, 1), (1, 2, 2), (2, 3, 3)))
    complete = Multigraph(n=4, edges=((0, 1, 1), (0, 2, 2), (0, 3, 3), (1, 2, 4), (1, 3, 5), (2, 3, 6)))
    assert min_fill_tree_decomposition(path).width == 1
    assert min_fill_tree_decomposition(cycle(6)).width == 2
    assert min_fill_tree_decomposition(complete).width == 3


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_min_fill_decomposition_is_valid(seed):
    g = grid(3, 4)
    td = min_fill_tree_decomposition(g, seed=seed)
    report = validate_tree_decomposition(g, td)
    assert report.valid, report.violations
    assert td.width >= 3


def test_min_fill_is_deterministic_per_seed():
    g = grid(3, 3)
    assert min_fill_tree_decomposition(g, seed=5) == min_fill_tree_decomposition(g, seed=5)


def test_min_fill_rejects_disconnected_graph():
    g = Multigraph(n=4, edges=((0, 1, 1), (2, 3, 2)))
    with pytest.raises(InvalidInputError):
        min_fill_tree_decomposition(g)


def test_validate_tree_decomposition_reports_missing_edge():
    g = cycle(4)
    td = TreeDecomposition(bags=((0, 1, 2), (2, 3)), arcs=((0, 1),), width=2)
    report = validate_tree_decomposition(g, td)
    assert not report.valid
    assert any("arista" in v for v in report.violations)


def test_components_and_subgraphs():
    g = Multigraph(n=5, edges=((0, 1, 1), (3, 4, 2)))
    assert connected_components(g) == [[0, 1], [2], [3, 4]]

    sub = induced_subgraph(grid(2, 2), [1, 3])
    assert sub.names == (1, 3)
    assert sub.m == 1


def test_quotient_keeps_crossing_labels():
    g = cycle(4)
    q = quotient_graph(g, [[0, 1], [2, 3]])
    assert q.n == 2
    assert sorted(label for _, _, label in q.edges) == [2, 4]

    with pytest.raises(InvalidInputError):
        quotient_graph(g, [[0, 1], [1, 2, 3]])
