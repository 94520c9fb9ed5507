# src/qcsat/services/graphs.py

import logging
import random
from typing import Iterable, Sequence

import networkx as nx

from qcsat.core.errors import InvalidInputError
from qcsat.schemas.graph import Multigraph, TreeDecomposition, TreeDecompositionReport

logger = logging.getLogger(__name__)


# ============================================================
# COMPONENTES Y SUBGRAFOS
# ============================================================

def connected_components(g: Multigraph) -> list[list[int]]:
    """
    Componentes conexas de g.

    Returns:
        Listas de nombres de vértice ordenadas; las componentes van ordenadas por su
        vértice más pequeño.
    """
    names = g.vertex_names
    components = [sorted(names[v] for v in comp) for comp in nx.connected_components(g.to_networkx())]
    return sorted(components, key=lambda comp: comp[0])


def ensure_connected(g: Multigraph) -> None:
    """
    Rechaza grafos vacíos o desconexos.

    Raises:
        InvalidInputError: si g no tiene vértices o tiene más de una componente
    """
    if g.n == 0:
        raise InvalidInputError("El grafo no tiene vértices")
    components = connected_components(g)
    if len(components) > 1:
        raise InvalidInputError(
            f"El grafo es desconexo: {len(components)} componentes",
            details={"components": components},
        )


def induced_subgraph(g: Multigraph, vertices: Iterable[int]) -> Multigraph:
    """Subgrafo inducido por los nombres dados; conserva los nombres originales."""
    keep = sorted(g.index_of[name] for name in vertices)
    position = {v: i for i, v in enumerate(keep)}
    edges = tuple(
        (position[u], position[v], label)
        for u, v, label in g.edges
        if u in position and v in position
    )
    return Multigraph(n=len(keep), edges=edges, names=tuple(g.vertex_names[v] for v in keep))


def quotient_graph(g: Multigraph, parts: Sequence[Sequence[int]]) -> Multigraph:
    """
    Grafo cociente sobre una partición de los vértices.

    Args:
        g: Grafo original
        parts: Partición de los nombres de vértice; la parte i es el vértice i del cociente

    Returns:
        Multigrafo con una arista por cada arista de g que cruza entre partes (misma etiqueta)

    Raises:
        InvalidInputError: si `parts` no es una partición de V
    """
    owner: dict[int, int] = {}
    for i, part in enumerate(parts):
        if not part:
            raise InvalidInputError(f"La parte {i} está vacía")
        for name in part:
            if name not in g.index_of:
                raise InvalidInputError(f"Vértice desconocido {name} en la parte {i}")
            if name in owner:
                raise InvalidInputError(
                    f"El vértice {name} aparece en las partes {owner[name]} y {i}"
                )
            owner[name] = i
    missing = [name for name in g.vertex_names if name not in owner]
    if missing:
        raise InvalidInputError("Las partes no cubren todos los vértices", details={"missing": missing})

    names = g.vertex_names
    edges = []
    for u, v, label in g.edges:
        pu, pv = owner[names[u]], owner[names[v]]
        if pu != pv:
            edges.append((pu, pv, label))
    return Multigraph(n=len(parts), edges=tuple(edges))


# ============================================================
# DESCOMPOSICIÓN EN ÁRBOL (MIN-FILL)
# ============================================================

def _fill_in(neighbors: dict[int, set[int]], v: int) -> int:
    around = sorted(neighbors[v])
    missing = 0
    for i, a in enumerate(around):
        adjacent = neighbors[a]
        for b in around[i + 1:]:
            if b not in adjacent:
                missing += 1
    return missing


def min_fill_tree_decomposition(g: Multigraph, seed: int = 0) -> TreeDecomposition:
    """
    Descomposición en árbol por orden de eliminación min-fill.

    Con seed 0 los empates se rompen por el nombre de vértice más bajo; con otra semilla,
    al azar entre los candidatos de relleno mínimo (determinista por semilla).

    Args:
        g: Grafo conexo con al menos un vértice
        seed: Semilla de desempate

    Returns:
        TreeDecomposition con una bolsa por vértice eliminado

    Raises:
        InvalidInputError: si g es desconexo
    """
    ensure_connected(g)
    names = g.vertex_names
    rng = random.Random(seed) if seed else None

    neighbors: dict[int, set[int]] = {v: set() for v in range(g.n)}
    for u, v, _ in g.edges:
        neighbors[u].add(v)
        neighbors[v].add(u)

    order: list[int] = []
    bags: list[tuple[int, ...]] = []
    while neighbors:
        fills = {v: _fill_in(neighbors, v) for v in neighbors}
        best = min(fills.values())
        candidates = sorted((v for v, fill in fills.items() if fill == best), key=lambda v: names[v])
        chosen = candidates[0] if rng is None else rng.choice(candidates)

        around = neighbors.pop(chosen)
        bags.append(tuple(sorted({chosen} | around)))
        order.append(chosen)
        for a in around:
            neighbors[a].discard(chosen)
            neighbors[a].update(around - {a})

    step_of = {v: i for i, v in enumerate(order)}
    arcs = []
    for i, bag in enumerate(bags):
        later = [step_of[v] for v in bag if step_of[v] > i]
        if later:
            arcs.append((i, min(later)))

    named_bags = tuple(tuple(sorted(names[v] for v in bag)) for bag in bags)
    width = max(len(bag) for bag in named_bags) - 1
    logger.info(f"Descomposición min-fill: {len(named_bags)} bolsas, ancho {width}")
    return TreeDecomposition(bags=named_bags, arcs=tuple(arcs), width=width)


def validate_tree_decomposition(g: Multigraph, td: TreeDecomposition) -> TreeDecompositionReport:
    """Comprueba forma de árbol, cobertura, aristas y conexidad por vértice."""
    violations: list[str] = []

    tree = nx.Graph()
    tree.add_nodes_from(range(len(td.bags)))
    tree.add_edges_from(td.arcs)
    if not nx.is_tree(tree):
        violations.append("forma: los arcos no forman un árbol sobre las bolsas")

    known = set(g.vertex_names)
    holders: dict[int, list[int]] = {name: [] for name in g.vertex_names}
    for i, bag in enumerate(td.bags):
        for name in bag:
            if name not in known:
                violations.append(f"cobertura: la bolsa {i} contiene el vértice desconocido {name}")
            else:
                holders[name].append(i)

    for name, nodes in holders.items():
        if not nodes:
            violations.append(f"cobertura: el vértice {name} no está en ninguna bolsa")
        elif nx.is_tree(tree) and not nx.is_connected(tree.subgraph(nodes)):
            violations.append(f"conexidad: las bolsas con el vértice {name} no son conexas")

    bag_sets = [set(bag) for bag in td.bags]
    names = g.vertex_names
    for u, v, label in g.edges:
        if not any(names[u] in bag and names[v] in bag for bag in bag_sets):
            violations.append(f"arista: la arista {label} ({names[u]}, {names[v]}) no está en ninguna bolsa")

    return TreeDecompositionReport(valid=not violations, violations=violations)
