# src/qcsat/schemas/circuit.py
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from qcsat.schemas.network import AbstractNetwork
from qcsat.schemas.tensor import Tensor

# Entrada compleja como par [re, im]; matrices por filas
ComplexPair = tuple[float, float]
Matrix = tuple[tuple[ComplexPair, ...], ...]

CIRCUIT_FORMAT = "qcircuit"
CIRCUIT_VERSION = 1


def matrix_to_pairs(matrix: np.ndarray) -> Matrix:
    """Convierte una matriz compleja al formato de archivo [re, im] por entrada."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    return tuple(tuple((float(z.real), float(z.imag)) for z in row) for row in matrix)


def pairs_to_matrix(pairs: Matrix) -> np.ndarray:
    if not pairs:
        return np.zeros((0, 0), dtype=np.complex128)
    return np.array([[complex(re, im) for re, im in row] for row in pairs], dtype=np.complex128)


# ============================================================
# DOCUMENTO DE CIRCUITO (FORMATO DE ARCHIVO)
# ============================================================

class Vertex(BaseModel):
    """Vértice del circuito: entrada, compuerta o salida."""
    model_config = ConfigDict(frozen=True)

    id: int = Field(..., ge=0)
    kind: Literal["input", "gate", "output"]
    init: Optional[Union[Literal["*"], int]] = Field(default=None, description="Índice de base o '*'")
    gate: Optional[str] = Field(default=None, description="Nombre de la compuerta")
    measure: Optional[Matrix] = Field(default=None, description="Elemento de medición d×d")


class CircuitEdge(BaseModel):
    """Arista etiquetada ξ entre (vértice, puerto) de origen y de destino."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    label: int
    source: tuple[int, int] = Field(..., alias="from")
    target: tuple[int, int] = Field(..., alias="to")


class QuantumCircuit(BaseModel):
    """
    Circuito cuántico de estados mixtos (DAG de entradas, compuertas y salidas).

    Las compuertas se dan por operadores de Kraus de tamaño d^r × d^q (r salidas,
    q entradas); el primer puerto es el factor más significativo del producto tensorial.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    format: Literal["qcircuit"] = CIRCUIT_FORMAT
    version: Literal[1] = CIRCUIT_VERSION
    d: int = Field(..., ge=2)
    gates: dict[str, tuple[Matrix, ...]] = Field(default_factory=dict)
    vertices: tuple[Vertex, ...] = ()
    edges: tuple[CircuitEdge, ...] = ()

    def vertex(self, vertex_id: int) -> Vertex:
        for v in self.vertices:
            if v.id == vertex_id:
                return v
        raise KeyError(vertex_id)

    @property
    def inputs(self) -> list[Vertex]:
        return [v for v in self.vertices if v.kind == "input"]

    @property
    def uninitialized(self) -> list[Vertex]:
        return [v for v in self.vertices if v.kind == "input" and v.init == "*"]


# ============================================================
# COMPUERTA Y REPORTES
# ============================================================

class Gate(BaseModel):
    """Mapa completamente positivo dado por operadores de Kraus (m, d^r, d^q)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    d: int = Field(..., ge=2)
    n_inputs: int = Field(..., ge=1)
    n_outputs: int = Field(..., ge=1)
    kraus: np.ndarray

    @field_validator("kraus", mode="before")
    @classmethod
    def _as_complex(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=np.complex128)

    @model_validator(mode="after")
    def _check_shape(self) -> "Gate":
        expected = (self.d ** self.n_outputs, self.d ** self.n_inputs)
        if self.kraus.ndim != 3 or self.kraus.shape[1:] != expected or self.kraus.shape[0] == 0:
            raise ValueError(f"Kraus de {self.name} con forma {self.kraus.shape}, se esperaba (m, {expected[0]}, {expected[1]})")
        return self

    def trace_excess(self) -> float:
        """Mayor autovalor de ΣK†K menos 1."""
        total = np.einsum("mba,mbc->ac", self.kraus.conj(), self.kraus)
        return float(np.max(np.linalg.eigvalsh((total + total.conj().T) / 2))) - 1.0


class CircuitViolation(BaseModel):
    code: str
    message: str
    vertex: Optional[int] = None
    edge: Optional[int] = None


class CircuitReport(BaseModel):
    valid: bool
    violations: list[CircuitViolation] = Field(default_factory=list)
    n_vertices: int = 0
    n_inputs: int = 0
    n_uninitialized: int = 0
    n_gates: int = 0
    n_outputs: int = 0


class OrderingReport(BaseModel):
    width: int
    topological: bool


# ============================================================
# REDES DE TENSORES DEL CIRCUITO
# ============================================================

class CircuitNetwork(BaseModel):
    """Red abstracta del circuito con un tensor por posición (vértices en orden del archivo)."""
    model_config = ConfigDict(frozen=True)

    network: AbstractNetwork
    tensors: tuple[Tensor, ...]
    vertex_ids: tuple[int, ...]


class FeasibilityNetwork(BaseModel):
    """
    Red de factibilidad: un conjunto de tensores candidatos por posición.

    En las entradas sin inicializar el candidato k es |k⟩⟨k|; `input_positions` da sus
    posiciones en orden de vértice, que es el orden de los dígitos de y.
    """
    model_config = ConfigDict(frozen=True)

    network: AbstractNetwork
    candidates: tuple[tuple[Tensor, ...], ...]
    vertex_ids: tuple[int, ...]
    input_positions: tuple[int, ...]
