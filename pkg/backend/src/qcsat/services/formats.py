# src/qcsat/services/formats.py
"""
Formatos de texto de los artefactos intermedios.

    d-graph v1 <n> <m>          contraction-tree v1 <nodos> <raíz>
    names <v0> <v1> ...         node <id> leaf <posición> : i j k
    <u> <v> <etiqueta>          node <id> join <l> <r> : i j k

    carving v1 <nodos> <raíz>        network v1 <conjuntos> <índices>
    node <id> leaf <vértice>         set i j k
    node <id> join <l> <r>

Las líneas vacías y las que empiezan con '#' se ignoran.
"""

import logging

from pydantic import ValidationError

from qcsat.core.errors import InvalidInputError
from qcsat.schemas.graph import Multigraph, RootedCarving
from qcsat.schemas.network import AbstractNetwork, ContractionTree
from qcsat.services.carving import build_carving
from qcsat.services.network import make_index_set

logger = logging.getLogger(__name__)


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((lineno, line.split()))
    return out


def _header(lines, magic: str) -> tuple[int, int]:
    if not lines:
        raise InvalidInputError(f"Archivo vacío; se esperaba la cabecera `{magic} v1`")
    lineno, tokens = lines[0]
    if len(tokens) != 4 or tokens[0] != magic or tokens[1] != "v1":
        raise InvalidInputError(f"Cabecera inválida en la línea {lineno}: se esperaba `{magic} v1 <a> <b>`")
    try:
        return int(tokens[2]), int(tokens[3])
    except ValueError:
        raise InvalidInputError(f"Cabecera con valores no enteros en la línea {lineno}")


def _ints(lineno: int, tokens: list[str]) -> list[int]:
    try:
        return [int(tok) for tok in tokens]
    except ValueError:
        raise InvalidInputError(f"Valor no entero en la línea {lineno}")


# ============================================================
# GRAFOS
# ============================================================

def format_graph(g: Multigraph) -> str:
    lines = [f"d-graph v1 {g.n} {g.m}"]
    if g.names is not None:
        lines.append("names " + " ".join(str(name) for name in g.names))
    lines += [f"{u} {v} {label}" for u, v, label in g.edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Multigraph:
    """
    Raises:
        InvalidInputError: si la cabecera, los nombres o las aristas son inválidos
    """
    lines = _lines(text)
    n, m = _header(lines, "d-graph")
    names = None
    edges = []
    for lineno, tokens in lines[1:]:
        if tokens[0] == "names":
            names = tuple(_ints(lineno, tokens[1:]))
            continue
        if len(tokens) != 3:
            raise InvalidInputError(f"Arista mal formada en la línea {lineno}: se esperaba `u v etiqueta`")
        edges.append(tuple(_ints(lineno, tokens)))
    if len(edges) != m:
        raise InvalidInputError(f"La cabecera declara {m} aristas y hay {len(edges)}")
    try:
        return Multigraph(n=n, edges=tuple(edges), names=names)
    except ValidationError as e:
        raise InvalidInputError(f"Grafo inválido: {e.errors()[0]['msg']}")


# ============================================================
# TALLADOS
# ============================================================

def format_carving(carving: RootedCarving) -> str:
    lines = [f"carving v1 {carving.size} {carving.root}"]
    for u in range(carving.size):
        if carving.is_leaf(u):
            lines.append(f"node {u} leaf {carving.vertex[u]}")
        else:
            lines.append(f"node {u} join {carving.left[u]} {carving.right[u]}")
    return "\n".join(lines) + "\n"


def _node_arrays(lines, size: int, magic: str):
    left, right, leaf = [-1] * size, [-1] * size, [None] * size
    seen = set()
    for lineno, tokens in lines[1:]:
        if len(tokens) < 4 or tokens[0] != "node" or tokens[2] not in ("leaf", "join"):
            raise InvalidInputError(f"Línea {lineno} de {magic} mal formada")
        u = _ints(lineno, [tokens[1]])[0]
        if not 0 <= u < size or u in seen:
            raise InvalidInputError(f"Nodo {u} fuera de rango o repetido en la línea {lineno}")
        seen.add(u)
        if tokens[2] == "leaf":
            leaf[u] = _ints(lineno, [tokens[3]])[0]
            rest = tokens[4:]
        else:
            if len(tokens) < 5:
                raise InvalidInputError(f"Unión incompleta en la línea {lineno}")
            left[u], right[u] = _ints(lineno, tokens[3:5])
            rest = tokens[5:]
        yield u, lineno, rest
    if len(seen) != size:
        raise InvalidInputError(f"Se declararon {size} nodos y se describieron {len(seen)}")
    yield left, right, leaf


def parse_carving(text: str, g: Multigraph) -> RootedCarving:
    """
    Lee un tallado y mide sus cortes contra g.

    Raises:
        InvalidInputError: si el archivo o el árbol son inválidos
    """
    lines = _lines(text)
    size, root = _header(lines, "carving")
    items = list(_node_arrays(lines, size, "carving"))
    left, right, vertex = items[-1]
    return build_carving(g, left, right, vertex, root)


# ============================================================
# ÁRBOLES DE CONTRACCIÓN
# ============================================================

def format_contraction_tree(t: ContractionTree) -> str:
    lines = [f"contraction-tree v1 {t.size} {t.root}"]
    for u in range(t.size):
        label = " ".join(str(i) for i in t.labels[u])
        if t.is_leaf(u):
            lines.append(f"node {u} leaf {t.position[u]} : {label}".rstrip())
        else:
            lines.append(f"node {u} join {t.left[u]} {t.right[u]} : {label}".rstrip())
    return "\n".join(lines) + "\n"


def parse_contraction_tree(text: str) -> ContractionTree:
    """
    Raises:
        InvalidInputError: si el archivo está mal formado o el árbol no es binario
    """
    lines = _lines(text)
    size, root = _header(lines, "contraction-tree")
    labels: list[tuple[int, ...]] = [()] * size
    items = list(_node_arrays(lines, size, "contraction-tree"))
    for u, lineno, rest in items[:-1]:
        if not rest or rest[0] != ":":
            raise InvalidInputError(f"Falta ':' antes de la etiqueta en la línea {lineno}")
        labels[u] = tuple(_ints(lineno, rest[1:]))
    left, right, position = items[-1]
    try:
        return ContractionTree(
            left=tuple(left), right=tuple(right), labels=tuple(labels),
            position=tuple(position), root=root,
        )
    except ValidationError as e:
        raise InvalidInputError(f"Árbol de contracción inválido: {e.errors()[0]['msg']}")


# ============================================================
# REDES ABSTRACTAS
# ============================================================

def format_network(n: AbstractNetwork) -> str:
    lines = [f"network v1 {n.size} {sum(len(s) for s in n.sets) // 2}"]
    lines += [("set " + " ".join(str(i) for i in s)).rstrip() for s in n.sets]
    return "\n".join(lines) + "\n"


def parse_network(text: str) -> AbstractNetwork:
    """
    Lee `network v1 <conjuntos> <índices>` seguido de una línea `set i j ...` por posición.

    Raises:
        InvalidInputError: si el archivo está mal formado (la validación de la red es aparte)
    """
    lines = _lines(text)
    size, _ = _header(lines, "network")
    sets = []
    for lineno, tokens in lines[1:]:
        if tokens[0] != "set":
            raise InvalidInputError(f"Se esperaba `set` en la línea {lineno}")
        values = _ints(lineno, tokens[1:])
        if len(set(values)) != len(values):
            raise InvalidInputError(f"Índice repetido en la línea {lineno}")
        sets.append(make_index_set(values))
    if len(sets) != size:
        raise InvalidInputError(f"La cabecera declara {size} conjuntos y hay {len(sets)}")
    try:
        return AbstractNetwork(sets=tuple(sets))
    except ValidationError as e:
        raise InvalidInputError(f"Red inválida: {e.errors()[0]['msg']}")


def sniff_format(text: str) -> str:
    """circuit | network | graph según el primer contenido del archivo."""
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("{"):
            return "circuit"
        first = stripped.split()[0]
        if first == "network":
            return "network"
        if first == "d-graph":
            return "graph"
        break
    raise InvalidInputError("Formato de archivo no reconocido (circuito, `network v1` o `d-graph v1`)")
