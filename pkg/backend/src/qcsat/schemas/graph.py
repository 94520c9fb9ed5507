# src/qcsat/schemas/graph.py
from functools import cached_property
from typing import Optional

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator

# ============================================================
# MULTIGRAFO
# ============================================================

Edge = tuple[int, int, int]


class Multigraph(BaseModel):
    """
    Multigrafo no dirigido sin lazos con aristas etiquetadas.

    Los vértices son densos (0..n-1); `names` guarda el identificador externo de cada
    vértice (por defecto el propio índice). Las descomposiciones usan siempre los nombres.
    """
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0, description="Número de vértices")
    edges: tuple[Edge, ...] = Field(default=(), description="Aristas (u, v, etiqueta)")
    names: Optional[tuple[int, ...]] = Field(default=None, description="Nombre externo por vértice")

    @model_validator(mode="after")
    def _check_structure(self) -> "Multigraph":
        labels = set()
        for u, v, label in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"Arista ({u}, {v}, {label}) fuera del rango de vértices")
            if u == v:
                raise ValueError(f"Lazo no permitido en el vértice {u} (etiqueta {label})")
            if label <= 0:
                raise ValueError(f"Etiqueta de arista no positiva: {label}")
            if label in labels:
                raise ValueError(f"Etiqueta de arista repetida: {label}")
            labels.add(label)
        if self.names is not None:
            if len(self.names) != self.n:
                raise ValueError("La cantidad de nombres no coincide con n")
            if len(set(self.names)) != self.n:
                raise ValueError("Nombres de vértices repetidos")
        return self

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def vertex_names(self) -> tuple[int, ...]:
        return self.names if self.names is not None else tuple(range(self.n))

    @cached_property
    def index_of(self) -> dict[int, int]:
        return {name: i for i, name in enumerate(self.vertex_names)}

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Por vértice denso: tuplas (vecino, etiqueta) ordenadas por vecino y etiqueta."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for u, v, label in self.edges:
            adj[u].append((v, label))
            adj[v].append((u, label))
        return tuple(tuple(sorted(items)) for items in adj)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def max_degree(self) -> int:
        return max((self.degree(v) for v in range(self.n)), default=0)

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.n))
        for u, v, label in self.edges:
            graph.add_edge(u, v, key=label)
        return graph


# ============================================================
# DESCOMPOSICIÓN EN ÁRBOL
# ============================================================

class TreeDecomposition(BaseModel):
    """Descomposición en árbol (T, β) sobre los nombres de vértice del grafo."""
    model_config = ConfigDict(frozen=True)

    bags: tuple[tuple[int, ...], ...] = Field(..., min_length=1)
    arcs: tuple[tuple[int, int], ...] = ()
    width: int = Field(..., ge=0)

    @model_validator(mode="after")
    def _check_width(self) -> "TreeDecomposition":
        measured = max(len(bag) for bag in self.bags) - 1
        if measured != self.width:
            raise ValueError(f"Ancho almacenado {self.width} distinto del medido {measured}")
        for a, b in self.arcs:
            if not (0 <= a < len(self.bags) and 0 <= b < len(self.bags)):
                raise ValueError(f"Arco ({a}, {b}) fuera del rango de bolsas")
        return self


class TreeDecompositionReport(BaseModel):
    valid: bool
    violations: list[str] = Field(default_factory=list)


# ============================================================
# DESCOMPOSICIÓN DE TALLADO (CARVING)
# ============================================================

class RootedCarving(BaseModel):
    """
    Descomposición de tallado enraizada.

    Nodos en arreglos planos: `left`/`right` valen -1 en las hojas y `vertex` es None
    en los nodos internos. `cuts` guarda |E(V[u], V \\ V[u])| por nodo.
    """
    model_config = ConfigDict(frozen=True)

    left: tuple[int, ...]
    right: tuple[int, ...]
    vertex: tuple[Optional[int], ...]
    root: int = Field(..., ge=0)
    cuts: tuple[int, ...]
    width: int = Field(..., ge=0)
    height: int = Field(..., ge=0)
    contractive: bool

    @model_validator(mode="after")
    def _check_shape(self) -> "RootedCarving":
        size = len(self.left)
        if not (len(self.right) == len(self.vertex) == len(self.cuts) == size):
            raise ValueError("Arreglos de nodos con longitudes distintas")
        if not 0 <= self.root < size:
            raise ValueError("Raíz fuera de rango")
        parents = [0] * size
        for u in range(size):
            is_leaf = self.left[u] < 0
            if is_leaf != (self.right[u] < 0):
                raise ValueError(f"Nodo {u} con un solo hijo")
            if is_leaf != (self.vertex[u] is not None):
                raise ValueError(f"Nodo {u}: las hojas llevan vértice y los internos no")
            if not is_leaf:
                for child in (self.left[u], self.right[u]):
                    if not 0 <= child < size:
                        raise ValueError(f"Hijo {child} de {u} fuera de rango")
                    parents[child] += 1
        if parents[self.root] != 0 or any(parents[u] != 1 for u in range(size) if u != self.root):
            raise ValueError("La estructura no es un árbol binario enraizado")
        if max(self.cuts, default=0) != self.width:
            raise ValueError("El ancho almacenado no coincide con los cortes")
        return self

    @property
    def size(self) -> int:
        return len(self.left)

    def is_leaf(self, u: int) -> bool:
        return self.left[u] < 0

    def postorder(self) -> list[int]:
        """Recorrido postorden iterativo (izquierda, derecha, nodo)."""
        order: list[int] = []
        stack = [(self.root, False)]
        while stack:
            u, expanded = stack.pop()
            if expanded or self.left[u] < 0:
                order.append(u)
                continue
            stack.append((u, True))
            stack.append((self.right[u], False))
            stack.append((self.left[u], False))
        return order

    def leaves(self) -> list[int]:
        """Vértices de las hojas de izquierda a derecha."""
        return [self.vertex[u] for u in self.postorder() if self.left[u] < 0]


class CarvingStats(BaseModel):
    width: int
    height: int
    contractive: bool
