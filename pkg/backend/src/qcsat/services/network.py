# src/qcsat/services/network.py

import logging
from collections import Counter
from typing import Iterable

from qcsat.core.errors import InvalidInputError
from qcsat.schemas.graph import Multigraph, RootedCarving
from qcsat.schemas.network import (
    AbstractNetwork,
    ContractionStep,
    ContractionTree,
    GoodTreeResult,
    IndexSet,
    IndexViolation,
    NetworkReport,
    TreeReport,
)
from qcsat.services.carving import carving_stats, contractify, tree_decomposition_to_carving
from qcsat.services.graphs import connected_components, min_fill_tree_decomposition

logger = logging.getLogger(__name__)


# ============================================================
# CONJUNTOS DE ÍNDICES
# ============================================================

def make_index_set(values: Iterable[int]) -> IndexSet:
    return tuple(sorted(set(values)))


def xor_sets(a: IndexSet, b: IndexSet) -> IndexSet:
    """Diferencia simétrica por mezcla de dos listas ordenadas."""
    out: list[int] = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            i += 1
            j += 1
        elif a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def intersect_sets(a: IndexSet, b: IndexSet) -> IndexSet:
    out: list[int] = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            out.append(a[i])
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return tuple(out)


# ============================================================
# RED ABSTRACTA
# ============================================================

def validate_network(n: AbstractNetwork) -> NetworkReport:
    """
    Verifica que cada índice aparezca en exactamente dos conjuntos y que el grafo
    asociado sea conexo.

    Returns:
        NetworkReport con cada índice infractor y su conteo
    """
    counts = Counter(i for s in n.sets for i in s)
    violations = [IndexViolation(index=i, count=c) for i, c in sorted(counts.items()) if c != 2]
    if violations:
        return NetworkReport(valid=False, connected=False, violations=violations)

    components = connected_components(_graph(n))
    connected = len(components) == 1
    return NetworkReport(
        valid=connected,
        connected=connected,
        components=components if not connected else [],
    )


def ensure_valid_network(n: AbstractNetwork) -> None:
    report = validate_network(n)
    if not report.valid:
        if report.violations:
            first = report.violations[0]
            message = f"Red inválida: el índice {first.index} aparece {first.count} veces"
        else:
            message = f"Red desconexa: {len(report.components)} componentes"
        raise InvalidInputError(message, details=report.model_dump())


def _graph(n: AbstractNetwork) -> Multigraph:
    holders: dict[int, list[int]] = {}
    for position, s in enumerate(n.sets):
        for i in s:
            holders.setdefault(i, []).append(position)
    edges = tuple((holders[i][0], holders[i][1], i) for i in sorted(holders))
    return Multigraph(n=n.size, edges=edges)


def graph_of_network(n: AbstractNetwork) -> Multigraph:
    """
    Grafo de la red: un vértice por posición y una arista etiquetada i por cada índice.

    Raises:
        InvalidInputError: si algún índice no aparece exactamente dos veces
    """
    counts = Counter(i for s in n.sets for i in s)
    bad = [IndexViolation(index=i, count=c) for i, c in sorted(counts.items()) if c != 2]
    if bad:
        raise InvalidInputError(
            f"Red inválida: el índice {bad[0].index} aparece {bad[0].count} veces",
            details={"violations": [v.model_dump() for v in bad]},
        )
    return _graph(n)


# ============================================================
# ÁRBOLES DE CONTRACCIÓN
# ============================================================

def contraction_tree_from_carving(n: AbstractNetwork, carving: RootedCarving) -> ContractionTree:
    """
    Etiqueta un tallado contractivo de G(N) con ι(u) = ι(u.l) ⊕ ι(u.r).

    Raises:
        InvalidInputError: si algún nodo interno tiene hijos con índices disjuntos
    """
    g = graph_of_network(n)
    carving_stats(g, carving)

    labels: list[IndexSet] = [()] * carving.size
    position = [None] * carving.size
    for u in carving.postorder():
        if carving.is_leaf(u):
            position[u] = carving.vertex[u]
            labels[u] = n.sets[carving.vertex[u]]
            continue
        a, b = labels[carving.left[u]], labels[carving.right[u]]
        if not intersect_sets(a, b):
            raise InvalidInputError(
                f"Tallado no contractivo: el nodo {u} une conjuntos disjuntos {a} y {b}",
                details={"node": u},
            )
        labels[u] = xor_sets(a, b)

    return ContractionTree(
        left=carving.left,
        right=carving.right,
        labels=tuple(labels),
        position=tuple(position),
        root=carving.root,
    )


def validate_contraction_tree(n: AbstractNetwork, t: ContractionTree) -> TreeReport:
    """Comprueba la biyección hoja-posición, las etiquetas ⊕, intersecciones y raíz vacía."""
    violations: list[str] = []

    positions = [t.position[u] for u in range(t.size) if t.is_leaf(u)]
    if sorted(positions) != list(range(n.size)):
        violations.append(
            f"(i) las hojas no están en biyección con las {n.size} posiciones de la red"
        )
    for u in t.postorder():
        if t.is_leaf(u):
            p = t.position[u]
            if 0 <= p < n.size and t.labels[u] != n.sets[p]:
                violations.append(f"(i) la hoja {u} lleva {t.labels[u]} en lugar de {n.sets[p]}")
            continue
        a, b = t.labels[t.left[u]], t.labels[t.right[u]]
        if not intersect_sets(a, b):
            violations.append(f"(ii) el nodo {u} tiene hijos con índices disjuntos")
        if t.labels[u] != xor_sets(a, b):
            violations.append(f"(ii) el nodo {u} no está etiquetado con ι(u.l) ⊕ ι(u.r)")
    if t.labels[t.root]:
        violations.append(f"la raíz está etiquetada con {t.labels[t.root]} en lugar de ∅")

    return TreeReport(valid=not violations, rank=t.rank, height=t.height, violations=violations)


def tree_stats(n: AbstractNetwork, t: ContractionTree) -> tuple[int, int]:
    """
    (rango, altura) de un árbol válido.

    Raises:
        InvalidInputError: si el árbol no es válido para la red
    """
    report = validate_contraction_tree(n, t)
    if not report.valid:
        raise InvalidInputError(
            f"Árbol de contracción inválido: {report.violations[0]}",
            details={"violations": report.violations},
        )
    return report.rank, report.height


def build_good_contraction_tree(n: AbstractNetwork, seed: int = 0) -> GoodTreeResult:
    """
    Construye un árbol de contracción de rango y altura acotados.

    Etapas: grafo de la red -> descomposición min-fill -> tallado -> contractificación
    -> etiquetado con diferencias simétricas.

    Args:
        n: Red válida y conexa
        seed: Semilla de desempate de la descomposición

    Returns:
        GoodTreeResult con el árbol y las medidas de cada etapa
    """
    ensure_valid_network(n)
    g = graph_of_network(n)
    td = min_fill_tree_decomposition(g, seed=seed)
    carving = tree_decomposition_to_carving(g, td)
    contractive = contractify(g, carving)
    tree = contraction_tree_from_carving(n, contractive)
    logger.info(
        f"Árbol de contracción: treewidth {td.width}, tallado {carving.width} -> "
        f"{contractive.width}, rango {tree.rank}, altura {tree.height}"
    )
    return GoodTreeResult(
        tree=tree,
        decomposition=td,
        carving=contractive,
        treewidth=td.width,
        max_degree=g.max_degree,
        carving_width=carving.width,
        contractive_width=contractive.width,
        rank=tree.rank,
        height=tree.height,
    )


def contraction_sequence(t: ContractionTree) -> list[ContractionStep]:
    """Contracciones del árbol en orden de finalización de izquierda a derecha."""
    return [
        ContractionStep(
            node=u,
            left=t.labels[t.left[u]],
            right=t.labels[t.right[u]],
            result=t.labels[u],
        )
        for u in t.postorder()
        if not t.is_leaf(u)
    ]


def replay_contractions(n: AbstractNetwork, t: ContractionTree) -> list[IndexSet]:
    """
    Contrae la lista de conjuntos siguiendo el árbol; devuelve la lista final.

    Raises:
        InvalidInputError: si el árbol no es válido para la red
    """
    tree_stats(n, t)
    current: dict[int, IndexSet] = {}
    for u in t.postorder():
        if t.is_leaf(u):
            current[u] = n.sets[t.position[u]]
        else:
            a = current.pop(t.left[u])
            b = current.pop(t.right[u])
            current[u] = xor_sets(a, b)
    return list(current.values())


def network_of_graph(g: Multigraph) -> AbstractNetwork:
    """Red cuyo conjunto en la posición v son las etiquetas de las aristas incidentes a v."""
    sets: list[list[int]] = [[] for _ in range(g.n)]
    for u, v, label in g.edges:
        sets[u].append(label)
        sets[v].append(label)
    return AbstractNetwork(sets=tuple(make_index_set(s) for s in sets))
