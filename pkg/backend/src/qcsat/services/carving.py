# src/qcsat/services/carving.py

import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import networkx as nx

from qcsat.core.config import settings
from qcsat.core.errors import InvalidInputError
from qcsat.schemas.graph import CarvingStats, Multigraph, RootedCarving, TreeDecomposition
from qcsat.services.graphs import ensure_connected, validate_tree_decomposition

logger = logging.getLogger(__name__)


# ============================================================
# CONSTRUCCIÓN Y MEDICIÓN
# ============================================================

class _CarvingBuilder:
    """Acumula nodos de un tallado; `build` compacta lo alcanzable desde la raíz."""

    def __init__(self):
        self.left: list[int] = []
        self.right: list[int] = []
        self.vertex: list[Optional[int]] = []

    def leaf(self, name: int) -> int:
        self.left.append(-1)
        self.right.append(-1)
        self.vertex.append(name)
        return len(self.vertex) - 1

    def join(self, a: int, b: int) -> int:
        self.left.append(a)
        self.right.append(b)
        self.vertex.append(None)
        return len(self.vertex) - 1

    def copy_from(self, carving: RootedCarving, leaf_map: Optional[dict[int, int]] = None) -> int:
        """
        Copia un tallado existente. Con `leaf_map`, cada hoja con vértice i se sustituye
        por el nodo ya construido leaf_map[i].
        """
        new_id: dict[int, int] = {}
        for u in carving.postorder():
            if carving.is_leaf(u):
                name = carving.vertex[u]
                new_id[u] = leaf_map[name] if leaf_map is not None else self.leaf(name)
            else:
                new_id[u] = self.join(new_id[carving.left[u]], new_id[carving.right[u]])
        return new_id[carving.root]

    def build(self, g: Multigraph, root: int) -> RootedCarving:
        order: list[int] = []
        stack = [(root, False)]
        while stack:
            u, expanded = stack.pop()
            if expanded or self.left[u] < 0:
                order.append(u)
                continue
            stack.append((u, True))
            stack.append((self.right[u], False))
            stack.append((self.left[u], False))
        renum = {u: i for i, u in enumerate(order)}
        left = [renum[self.left[u]] if self.left[u] >= 0 else -1 for u in order]
        right = [renum[self.right[u]] if self.right[u] >= 0 else -1 for u in order]
        vertex = [self.vertex[u] for u in order]
        return build_carving(g, left, right, vertex, renum[root])


def _measure(
    g: Multigraph,
    left: Sequence[int],
    right: Sequence[int],
    vertex: Sequence[Optional[int]],
    root: int,
) -> tuple[list[int], int, bool]:
    """Cortes por nodo, altura y bandera contractiva, recalculados desde cero."""
    size = len(left)
    masks = [0] * size
    cuts = [0] * size
    contractive = True
    seen: set[int] = set()

    order: list[int] = []
    depth = {root: 0}
    stack = [root]
    while stack:
        u = stack.pop()
        order.append(u)
        if left[u] >= 0:
            for child in (left[u], right[u]):
                depth[child] = depth[u] + 1
                stack.append(child)

    for u in reversed(order):
        if left[u] < 0:
            name = vertex[u]
            if name not in g.index_of:
                raise InvalidInputError(f"La hoja {u} lleva el vértice desconocido {name}")
            if name in seen:
                raise InvalidInputError(f"El vértice {name} aparece en más de una hoja")
            seen.add(name)
            masks[u] = 1 << g.index_of[name]
        else:
            ml, mr = masks[left[u]], masks[right[u]]
            masks[u] = ml | mr
            if contractive and not any(
                ((ml >> a) & 1 and (mr >> b) & 1) or ((ml >> b) & 1 and (mr >> a) & 1)
                for a, b, _ in g.edges
            ):
                contractive = False
        mask = masks[u]
        cuts[u] = sum(1 for a, b, _ in g.edges if ((mask >> a) & 1) != ((mask >> b) & 1))

    if len(seen) != g.n:
        missing = sorted(set(g.vertex_names) - seen)
        raise InvalidInputError("γ no es una biyección: faltan vértices", details={"missing": missing})
    height = max(depth.values(), default=0)
    return cuts, height, contractive


def build_carving(
    g: Multigraph,
    left: Sequence[int],
    right: Sequence[int],
    vertex: Sequence[Optional[int]],
    root: int,
) -> RootedCarving:
    """
    Construye un RootedCarving midiendo sus cortes contra g.

    Raises:
        InvalidInputError: si la estructura no es un árbol binario o γ no es biyección
    """
    try:
        RootedCarving(
            left=tuple(left), right=tuple(right), vertex=tuple(vertex), root=root,
            cuts=(0,) * len(left), width=0, height=0, contractive=False,
        )
    except ValueError as e:
        raise InvalidInputError(f"Tallado mal formado: {e}") from e
    cuts, height, contractive = _measure(g, left, right, vertex, root)
    return RootedCarving(
        left=tuple(left),
        right=tuple(right),
        vertex=tuple(vertex),
        root=root,
        cuts=tuple(cuts),
        width=max(cuts),
        height=height,
        contractive=contractive,
    )


def carving_stats(g: Multigraph, carving: RootedCarving) -> CarvingStats:
    """
    Ancho, altura y chequeo contractivo medidos desde cero (no usa los valores cacheados).

    Raises:
        InvalidInputError: si γ no es una biyección sobre los vértices de g
    """
    cuts, height, contractive = _measure(g, carving.left, carving.right, carving.vertex, carving.root)
    return CarvingStats(width=max(cuts), height=height, contractive=contractive)


def _combine_balanced(builder: _CarvingBuilder, items: list[int]) -> int:
    while len(items) > 1:
        paired = [builder.join(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


# ============================================================
# DESDE UNA DESCOMPOSICIÓN EN ÁRBOL
# ============================================================

def tree_decomposition_to_carving(g: Multigraph, td: TreeDecomposition) -> RootedCarving:
    """
    Tallado enraizado (no necesariamente contractivo) a partir de una descomposición en árbol.

    La descomposición se enraíza en su centro de menor id; cada vértice cuelga como hoja
    de la bolsa menos profunda que lo contiene (empates por id de bolsa). Hijos y hojas de
    cada bolsa se combinan en un árbol binario balanceado.

    Raises:
        InvalidInputError: si td no es válida para g
    """
    report = validate_tree_decomposition(g, td)
    if not report.valid:
        raise InvalidInputError(
            f"Descomposición en árbol inválida: {report.violations[0]}",
            details={"violations": report.violations},
        )

    tree = nx.Graph()
    tree.add_nodes_from(range(len(td.bags)))
    tree.add_edges_from(td.arcs)
    root = min(nx.center(tree))
    depth = nx.single_source_shortest_path_length(tree, root)

    assigned: dict[int, list[int]] = {t: [] for t in range(len(td.bags))}
    for name in g.vertex_names:
        holder = min((t for t, bag in enumerate(td.bags) if name in bag), key=lambda t: (depth[t], t))
        assigned[holder].append(name)

    children: dict[int, list[int]] = {t: [] for t in range(len(td.bags))}
    parent = {root: None}
    queue = deque([root])
    order = []
    while queue:
        t = queue.popleft()
        order.append(t)
        for s in sorted(tree.neighbors(t)):
            if s not in parent:
                parent[s] = t
                children[t].append(s)
                queue.append(s)

    builder = _CarvingBuilder()
    subtree: dict[int, Optional[int]] = {}
    for t in reversed(order):
        items = [subtree[s] for s in children[t] if subtree[s] is not None]
        items.extend(builder.leaf(name) for name in sorted(assigned[t]))
        subtree[t] = _combine_balanced(builder, items) if items else None

    carving = builder.build(g, subtree[root])
    logger.info(
        f"Tallado desde descomposición: ancho {carving.width}, altura {carving.height}, "
        f"cota Δ·(w+1) = {g.max_degree * (td.width + 1)}"
    )
    return carving


# ============================================================
# ORUGAS (CATERPILLARS)
# ============================================================

def bfs_order(g: Multigraph) -> list[int]:
    """Orden BFS desde el vértice de nombre más bajo, vecinos en orden ascendente."""
    ensure_connected(g)
    names = g.vertex_names
    start = min(range(g.n), key=lambda v: names[v])
    order = [start] + [v for _, v in nx.bfs_edges(g.to_networkx(), start, sort_neighbors=lambda vs: sorted(vs, key=lambda v: names[v]))]
    return [names[v] for v in order]


def caterpillar_carving(g: Multigraph, ordering: Sequence[int]) -> RootedCarving:
    """
    Oruga de n hojas para un orden conexo v1..vn: v1 y v2 son las hojas más profundas
    y vk queda a profundidad n-k+1.

    Raises:
        InvalidInputError: si el orden no es una permutación conexa de los vértices
    """
    if sorted(ordering) != sorted(g.vertex_names):
        raise InvalidInputError("El orden no es una permutación de los vértices")
    placed = 0
    builder = _CarvingBuilder()
    node = None
    for k, name in enumerate(ordering):
        v = g.index_of[name]
        if k > 0 and not any((placed >> w) & 1 for w, _ in g.adjacency[v]):
            raise InvalidInputError(f"El orden no es conexo: {name} no tiene vecinos previos")
        placed |= 1 << v
        leaf = builder.leaf(name)
        node = leaf if node is None else builder.join(node, leaf)
    return builder.build(g, node)


def bfs_caterpillar_carving(g: Multigraph) -> RootedCarving:
    """
    Tallado contractivo en oruga siguiendo un recorrido BFS.

    Raises:
        InvalidInputError: si g es desconexo
    """
    return caterpillar_carving(g, bfs_order(g))


# ============================================================
# COMPOSICIÓN
# ============================================================

def compose_carvings(
    g: Multigraph,
    quotient_carving: RootedCarving,
    parts: Sequence[RootedCarving],
) -> RootedCarving:
    """
    Identifica la raíz de cada parte con la hoja correspondiente del tallado cociente.

    Args:
        g: Grafo unión (sobre el que se miden los cortes)
        quotient_carving: Tallado del grafo cociente; la hoja i representa parts[i]
        parts: Tallados de los subgrafos inducidos, con nombres de vértice de g

    Raises:
        InvalidInputError: si las hojas del cociente no coinciden con las partes
    """
    leaves = sorted(quotient_carving.leaves())
    if leaves != list(range(len(parts))):
        raise InvalidInputError(
            f"El tallado cociente tiene hojas {leaves} pero hay {len(parts)} partes"
        )
    builder = _CarvingBuilder()
    roots = {i: builder.copy_from(part) for i, part in enumerate(parts)}
    root = builder.copy_from(quotient_carving, leaf_map=roots)
    return builder.build(g, root)


# ============================================================
# CONTRACTIFICACIÓN
# ============================================================

@dataclass
class _Piece:
    """Componente conexa de G[u] junto con su subárbol ya contractivo."""
    mask: int
    node: int
    height: int
    cut: int
    low: int


def _lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _best_quotient_tree(
    k: int,
    links: list[list[int]],
    cuts: list[int],
    heights: list[int],
) -> dict[int, tuple[int, int, int]]:
    """
    Mejor tallado contractivo de un cociente pequeño por búsqueda exhaustiva.

    Minimiza (máximo corte en g, altura) sobre todas las particiones binarias en partes
    conexas y adyacentes. Devuelve, por subconjunto, (ancho, altura, subconjunto izquierdo).
    """
    nbr = [sum(1 << j for j in range(k) if links[i][j]) for i in range(k)]
    full = (1 << k) - 1

    connected = [False] * (full + 1)
    for s in range(1, full + 1):
        reach = s & -s
        while True:
            grown = reach
            for i in range(k):
                if (reach >> i) & 1:
                    grown |= nbr[i] & s
            if grown == reach:
                break
            reach = grown
        connected[s] = reach == s

    def cut_of(s: int) -> int:
        members = [i for i in range(k) if (s >> i) & 1]
        total = sum(cuts[i] for i in members)
        for x, i in enumerate(members):
            for j in members[x + 1:]:
                total -= 2 * links[i][j]
        return total

    best: dict[int, tuple[int, int, int]] = {}
    for i in range(k):
        best[1 << i] = (0, heights[i], 0)
    for s in sorted((s for s in range(1, full + 1) if connected[s] and s & (s - 1)), key=lambda s: bin(s).count("1")):
        low = s & -s
        own = cut_of(s)
        choice = None
        sub = (s - 1) & s
        while sub:
            rest = s ^ sub
            if sub & low and connected[sub] and connected[rest]:
                adjacent = any((nbr[i] & rest) for i in range(k) if (sub >> i) & 1)
                if adjacent:
                    wa, ha, _ = best[sub]
                    wb, hb, _ = best[rest]
                    cand = (max(own, wa, wb), 1 + max(ha, hb), sub)
                    if choice is None or cand[:2] < choice[:2]:
                        choice = cand
            sub = (sub - 1) & s
        if choice is not None:
            best[s] = choice
    return best


def _emit_quotient(builder: _CarvingBuilder, best: dict, s: int, pieces: list[_Piece]) -> int:
    if s & (s - 1) == 0:
        return pieces[_lowest_bit(s)].node
    sub = best[s][2]
    return builder.join(
        _emit_quotient(builder, best, sub, pieces),
        _emit_quotient(builder, best, s ^ sub, pieces),
    )


def _merge_group(
    builder: _CarvingBuilder,
    group: list[_Piece],
    g: Multigraph,
    exhaustive_limit: int,
) -> _Piece:
    group.sort(key=lambda p: p.low)
    k = len(group)
    owner: dict[int, int] = {}
    for i, piece in enumerate(group):
        mask = piece.mask
        while mask:
            v = _lowest_bit(mask)
            owner[v] = i
            mask &= mask - 1
    links = [[0] * k for _ in range(k)]
    for a, b, _ in g.edges:
        i, j = owner.get(a), owner.get(b)
        if i is not None and j is not None and i != j:
            links[i][j] += 1
            links[j][i] += 1

    cuts = [p.cut for p in group]
    union = 0
    for p in group:
        union |= p.mask
    total_cut = sum(cuts) - sum(links[i][j] for i in range(k) for j in range(k) if i != j)

    if k <= exhaustive_limit:
        best = _best_quotient_tree(k, links, cuts, [p.height for p in group])
        full = (1 << k) - 1
        node = _emit_quotient(builder, best, full, group)
        height = best[full][1]
    else:
        # Oruga BFS sobre el cociente, raíz en la componente de vértice más bajo
        order, seen = [], {0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            order.append(i)
            for j in range(k):
                if links[i][j] and j not in seen:
                    seen.add(j)
                    queue.append(j)
        node, height = group[order[0]].node, group[order[0]].height
        for i in order[1:]:
            node = builder.join(node, group[i].node)
            height = 1 + max(height, group[i].height)
    return _Piece(mask=union, node=node, height=height, cut=total_cut, low=group[0].low)


def contractify(
    g: Multigraph,
    carving: RootedCarving,
    exhaustive_limit: Optional[int] = None,
) -> RootedCarving:
    """
    Convierte un tallado enraizado en uno contractivo.

    Recorre el tallado de abajo hacia arriba; en cada nodo u agrupa las componentes de
    los hijos en componentes conexas de G[u] y, para cada grupo con más de una pieza,
    construye un tallado contractivo del cociente y lo compone con los subárboles de
    las piezas.

    Args:
        g: Grafo conexo
        carving: Tallado válido de g
        exhaustive_limit: Máximo de piezas para la búsqueda exhaustiva del cociente

    Returns:
        Tallado contractivo de g

    Raises:
        InvalidInputError: si g es desconexo o el tallado no es válido
    """
    ensure_connected(g)
    stats = carving_stats(g, carving)
    limit = exhaustive_limit if exhaustive_limit is not None else settings.exhaustive_quotient_limit

    adj_mask = [0] * g.n
    for a, b, _ in g.edges:
        adj_mask[a] |= 1 << b
        adj_mask[b] |= 1 << a
    degrees = [g.degree(v) for v in range(g.n)]

    builder = _CarvingBuilder()
    pieces: dict[int, list[_Piece]] = {}
    for u in carving.postorder():
        if carving.is_leaf(u):
            v = g.index_of[carving.vertex[u]]
            pieces[u] = [_Piece(mask=1 << v, node=builder.leaf(carving.vertex[u]), height=0, cut=degrees[v], low=v)]
            continue

        current = pieces.pop(carving.left[u]) + pieces.pop(carving.right[u])
        neighborhoods = []
        for piece in current:
            around, mask = 0, piece.mask
            while mask:
                v = _lowest_bit(mask)
                around |= adj_mask[v]
                mask &= mask - 1
            neighborhoods.append(around)

        links = nx.Graph()
        links.add_nodes_from(range(len(current)))
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                if neighborhoods[i] & current[j].mask:
                    links.add_edge(i, j)

        merged = []
        for comp in nx.connected_components(links):
            group = [current[i] for i in comp]
            merged.append(group[0] if len(group) == 1 else _merge_group(builder, group, g, limit))
        pieces[u] = sorted(merged, key=lambda p: p.low)

    final = pieces[carving.root]
    if len(final) != 1:
        raise InvalidInputError("El grafo es desconexo")
    result = builder.build(g, final[0].node)
    if result.width > stats.width:
        logger.warning(f"Contractificación con ancho {result.width} > ancho de entrada {stats.width}")
    logger.info(
        f"Contractificación: ancho {stats.width} -> {result.width}, "
        f"altura {stats.height} -> {result.height}"
    )
    return result
