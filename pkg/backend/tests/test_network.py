# tests/test_network.py

import pytest

from qcsat.core.errors import InvalidInputError
from qcsat.schemas.graph import Multigraph
from qcsat.schemas.network import AbstractNetwork, ContractionTree
from qcsat.services.carving import bfs_caterpillar_carving, build_carving
from qcsat.services.network import (
    build_good_contraction_tree,
    contraction_sequence,
    contraction_tree_from_carving,
    graph_of_network,
    intersect_sets,
    network_of_graph,
    replay_contractions,
    tree_stats,
    validate_contraction_tree,
    validate_network,
    xor_sets,
)

CYCLE = AbstractNetwork(sets=((1, 4), (1, 2), (2, 3), (3, 4)))


def test_set_operations():
    assert xor_sets((1, 2, 3), (2, 4)) == (1, 3, 4)
    assert xor_sets((), (5,)) == (5,)
    assert intersect_sets((1, 2, 3), (2, 3, 9)) == (2, 3)
    assert intersect_sets((1,), (2,)) == ()


def test_index_sets_must_be_increasing():
    with pytest.raises(ValueError):
        AbstractNetwork(sets=((2, 1), (1, 2)))


def test_validate_network():
    assert validate_network(CYCLE).valid

    report = validate_network(AbstractNetwork(sets=((1,), (1,), (1, 2), (2,))))
    assert not report.valid
    assert [(v.index, v.count) for v in report.violations] == [(1, 3)]

    split = validate_network(AbstractNetwork(sets=((1,), (1,), (2,), (2,))))
    assert not split.valid and not split.connected
    assert split.components == [[0, 1], [2, 3]]


def test_graph_of_network_labels_edges_by_index():
    g = graph_of_network(CYCLE)
    assert g.n == 4
    assert sorted(g.edges) == [(0, 1, 1), (0, 3, 4), (1, 2, 2), (2, 3, 3)]
    assert network_of_graph(g) == CYCLE


def test_good_tree_is_valid():
    good = build_good_contraction_tree(CYCLE)
    report = validate_contraction_tree(CYCLE, good.tree)
    assert report.valid, report.violations
    assert good.tree.labels[good.tree.root] == ()
    assert good.rank == good.tree.rank
    assert good.carving.contractive
    assert replay_contractions(CYCLE, good.tree) == [()]


def test_contraction_sequence_follows_postorder():
    good = build_good_contraction_tree(CYCLE)
    steps = contraction_sequence(good.tree)
    assert len(steps) == CYCLE.size - 1
    for step in steps:
        assert intersect_sets(step.left, step.right)
        assert step.result == xor_sets(step.left, step.right)
    assert steps[-1].result == ()


def test_single_set_network():
    network = AbstractNetwork(sets=((),))
    good = build_good_contraction_tree(network)
    assert good.tree.size == 1
    assert tree_stats(network, good.tree) == (0, 0)


def test_non_contractive_carving_is_rejected():
    # Red en camino 0-1-2; unir 0 con 2 primero no comparte índices
    network = AbstractNetwork(sets=((1,), (1, 2), (2,)))
    g = Multigraph(n=3, edges=((0, 1, 1), (1, 2, 2)))
    carving = build_carving(g, [-1, -1, 0, -1, 2], [-1, -1, 1, -1, 3], [0, 2, None, 1, None], 4)
    with pytest.raises(InvalidInputError):
        contraction_tree_from_carving(network, carving)


def test_invalid_network_is_rejected():
    with pytest.raises(InvalidInputError):
        build_good_contraction_tree(AbstractNetwork(sets=((1,), (2,))))


# Red de tres conjuntos y su árbol de rango 3: I1, I2 -> {3, 4}; con I3 -> ∅
THREE_SETS = AbstractNetwork(sets=((1, 2, 3), (1, 2, 4), (3, 4)))
THREE_SETS_TREE = ContractionTree(
    left=(-1, -1, 0, -1, 2),
    right=(-1, -1, 1, -1, 3),
    labels=((1, 2, 3), (1, 2, 4), (3, 4), (3, 4), ()),
    position=(0, 1, None, 2, None),
    root=4,
)


def test_three_set_network():
    g = graph_of_network(THREE_SETS)
    assert sorted(g.edges) == [(0, 1, 1), (0, 1, 2), (0, 2, 3), (1, 2, 4)]
    assert tree_stats(THREE_SETS, THREE_SETS_TREE) == (3, 2)
    assert [step.result for step in contraction_sequence(THREE_SETS_TREE)] == [(3, 4), ()]
    good = build_good_contraction_tree(THREE_SETS)
    assert good.rank == good.contractive_width == 3


def test_rank_equals_contractive_width(random_multigraph):
    for seed in range(100):
        g = random_multigraph(3 + seed % 8, seed)
        network = network_of_graph(g)
        good = build_good_contraction_tree(network)
        assert good.rank == good.contractive_width, f"semilla {seed}"
        assert good.carving_width <= good.max_degree * (good.treewidth + 1), f"semilla {seed}"

        caterpillar = bfs_caterpillar_carving(graph_of_network(network))
        tree = contraction_tree_from_carving(network, caterpillar)
        assert tree_stats(network, tree) == (caterpillar.width, caterpillar.height), f"semilla {seed}"
