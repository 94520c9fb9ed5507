# src/qcsat/schemas/simulation.py
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from qcsat.schemas.network import ContractionTree
from qcsat.schemas.tensor import NetParams, Tensor, TensorSet


# ============================================================
# SIMULACIÓN EXACTA
# ============================================================

class SimulationTrace(BaseModel):
    """
    Resultado de contraer una red a lo largo de un árbol.

    `tensors` guarda la raíz y, en modo de traza completa, el tensor de cada nodo.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tensors: dict[int, Tensor]
    scalar: complex
    value: float = Field(..., ge=0.0)
    peak_rank: int


class AcceptanceResult(BaseModel):
    probability: float
    scalar_real: float
    scalar_imag: float
    imag_warning: bool = False
    rank: int
    height: int
    treewidth: int


# ============================================================
# SIMULACIÓN ε DE REDES DE FACTIBILIDAD
# ============================================================

class EpsilonChoice(BaseModel):
    epsilon: float
    delta: Optional[float] = None
    floored: bool = False
    bound: float = Field(..., description="ε·(3d^(2r)+1)^h")


class FeasibilitySimulation(BaseModel):
    """Conjuntos Λ̂(u) de cada nodo con su procedencia y la cota garantizada en la raíz."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tree: ContractionTree
    params: NetParams
    sets: dict[int, TensorSet]
    rank: int
    height: int
    bound: float

    @property
    def root_set(self) -> TensorSet:
        return self.sets[self.tree.root]


class InitializationResult(BaseModel):
    """Elección por posición (índice dentro de Λ(posición)) y el valor α de la raíz."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    choices: tuple[int, ...]
    alpha: complex
    root_member: int


class SolveResult(BaseModel):
    y: str
    digits: list[int]
    probability: float
    alpha: float
    mode: Literal["delta", "epsilon"]
    delta: Optional[float] = None
    epsilon: float
    epsilon_floored: bool = False
    bound: float = Field(..., description="ε·(3d^(2r)+1)^h en la raíz")
    certified_bound: float = Field(..., description="Cota conservadora |Pr(C,y) - Pr^cl| ≤ 2·bound")
    rank: int
    height: int
    treewidth: int
    max_degree: int
    carving_width: int
    contractive_width: int
    set_sizes: list[int] = Field(default_factory=list, description="Tamaño de Λ̂(u) en postorden")
    peak_set_size: int
    seconds: Optional[float] = None


# ============================================================
# ORÁCULO
# ============================================================

class BruteForceResult(BaseModel):
    y: str
    digits: list[int]
    probability: float
    evaluated: int
    values: list[float] = Field(default_factory=list, description="Pr(C,y) por y en orden lexicográfico")
