# src/qcsat/schemas/network.py
from functools import cached_property
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from qcsat.schemas.graph import RootedCarving, TreeDecomposition

# Conjunto de índices: enteros positivos estrictamente crecientes (posiblemente vacío)
IndexSet = tuple[int, ...]


def _check_index_set(values: IndexSet) -> IndexSet:
    for a, b in zip(values, values[1:]):
        if a >= b:
            raise ValueError(f"Conjunto de índices no estrictamente creciente: {values}")
    if values and values[0] <= 0:
        raise ValueError(f"Índice no positivo en {values}")
    return values


# ============================================================
# RED ABSTRACTA
# ============================================================

class AbstractNetwork(BaseModel):
    """Lista de conjuntos de índices; la identidad de cada miembro es su posición."""
    model_config = ConfigDict(frozen=True)

    sets: tuple[IndexSet, ...] = Field(..., min_length=1)

    @field_validator("sets")
    @classmethod
    def _check_sets(cls, sets: tuple[IndexSet, ...]) -> tuple[IndexSet, ...]:
        return tuple(_check_index_set(tuple(s)) for s in sets)

    @property
    def size(self) -> int:
        return len(self.sets)

    @property
    def rank(self) -> int:
        return max(len(s) for s in self.sets)


class IndexViolation(BaseModel):
    index: int
    count: int


class NetworkReport(BaseModel):
    valid: bool
    connected: bool
    violations: list[IndexViolation] = Field(default_factory=list)
    components: list[list[int]] = Field(default_factory=list)


# ============================================================
# ÁRBOL DE CONTRACCIÓN
# ============================================================

class ContractionTree(BaseModel):
    """
    Árbol binario etiquetado con conjuntos de índices.

    Nodos en arreglos planos; en las hojas `left`/`right` valen -1 y `position` es la
    posición del conjunto de la red que representan.
    """
    model_config = ConfigDict(frozen=True)

    left: tuple[int, ...]
    right: tuple[int, ...]
    labels: tuple[IndexSet, ...]
    position: tuple[Optional[int], ...]
    root: int = Field(..., ge=0)

    @model_validator(mode="after")
    def _check_shape(self) -> "ContractionTree":
        size = len(self.left)
        if not (len(self.right) == len(self.labels) == len(self.position) == size):
            raise ValueError("Arreglos de nodos con longitudes distintas")
        if not 0 <= self.root < size:
            raise ValueError("Raíz fuera de rango")
        parents = [0] * size
        for u in range(size):
            if (self.left[u] < 0) != (self.right[u] < 0):
                raise ValueError(f"Nodo {u} con un solo hijo")
            if (self.left[u] < 0) != (self.position[u] is not None):
                raise ValueError(f"Nodo {u}: solo las hojas llevan posición")
            for child in (self.left[u], self.right[u]):
                if child >= size:
                    raise ValueError(f"Hijo {child} de {u} fuera de rango")
                if child >= 0:
                    parents[child] += 1
        if parents[self.root] != 0 or any(parents[u] != 1 for u in range(size) if u != self.root):
            raise ValueError("La estructura no es un árbol binario enraizado")
        for label in self.labels:
            _check_index_set(tuple(label))
        return self

    @property
    def size(self) -> int:
        return len(self.left)

    def is_leaf(self, u: int) -> bool:
        return self.left[u] < 0

    def postorder(self) -> list[int]:
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

    @cached_property
    def node_heights(self) -> tuple[int, ...]:
        """Altura del subárbol de cada nodo (0 en las hojas)."""
        heights = [0] * self.size
        for u in self.postorder():
            if self.left[u] >= 0:
                heights[u] = 1 + max(heights[self.left[u]], heights[self.right[u]])
        return tuple(heights)

    @property
    def rank(self) -> int:
        return max(len(label) for label in self.labels)

    @property
    def height(self) -> int:
        return self.node_heights[self.root]


class TreeReport(BaseModel):
    valid: bool
    rank: int
    height: int
    violations: list[str] = Field(default_factory=list)


class ContractionStep(BaseModel):
    node: int
    left: IndexSet
    right: IndexSet
    result: IndexSet


class GoodTreeResult(BaseModel):
    """Árbol de contracción con las medidas de cada etapa de la construcción."""
    model_config = ConfigDict(frozen=True)

    tree: ContractionTree
    decomposition: TreeDecomposition
    carving: RootedCarving
    treewidth: int
    max_degree: int
    carving_width: int
    contractive_width: int
    rank: int
    height: int
