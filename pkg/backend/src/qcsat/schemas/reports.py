# src/qcsat/schemas/reports.py
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from qcsat.schemas.circuit import QuantumCircuit
from qcsat.schemas.formula import CnfFormula

Command = Literal["validate", "decompose", "simulate", "satisfy", "oracle", "gen"]
OutputFormat = Literal["human", "records"]


# ============================================================
# CONFIGURACIÓN DE UNA EJECUCIÓN
# ============================================================

class RunConfig(BaseModel):
    """Banderas de la línea de comandos combinadas con los valores de settings."""
    command: Command
    path: Optional[str] = None
    delta: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    epsilon: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    seed: int = 0
    threads: int = Field(default=1, ge=1)
    max_set_size: int = Field(default=10**6, ge=1)
    oracle_cap: int = Field(default=12, ge=1)
    output_format: OutputFormat = "human"
    out: Optional[str] = None
    timings: bool = False

    @model_validator(mode="after")
    def _check_precision(self) -> "RunConfig":
        if self.command == "satisfy" and (self.delta is None) == (self.epsilon is None):
            raise ValueError("satisfy necesita exactamente uno de --delta o --epsilon")
        return self


# ============================================================
# REPORTES
# ============================================================

class DecomposeReport(BaseModel):
    source: Literal["circuit", "network", "graph"]
    sets: int
    indices: int
    treewidth: int
    max_degree: int
    carving_width: int
    contractive_width: int
    rank: int
    height: int
    cutwidth: Optional[int] = Field(default=None, description="Ancho de corte del orden del archivo")
    topological: Optional[bool] = None


class ValidationSummary(BaseModel):
    """Resultado de validar un archivo de cualquiera de los formatos aceptados."""
    source: Literal["circuit", "network", "graph"]
    valid: bool
    violations: list[str] = Field(default_factory=list)


class GenerateReport(BaseModel):
    kind: Literal["random", "3sat"]
    vertices: int
    edges: int
    uninitialized: int
    cutwidth: int
    topological: bool


# ============================================================
# CUERPOS DE LA API
# ============================================================

class CircuitRequest(BaseModel):
    circuit: QuantumCircuit
    seed: int = 0


class AssignmentRequest(CircuitRequest):
    y: Optional[str] = Field(default=None, description="Asignación de las entradas '*'")


class SatisfyRequest(CircuitRequest):
    delta: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    epsilon: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    threads: int = Field(default=1, ge=1)
    max_set_size: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_precision(self) -> "SatisfyRequest":
        if (self.delta is None) == (self.epsilon is None):
            raise ValueError("Indique exactamente uno de delta o epsilon")
        return self


class OracleRequest(CircuitRequest):
    assignment_cap: Optional[int] = Field(default=None, ge=1)
    wire_cap: Optional[int] = Field(default=None, ge=1)


class GenerateRequest(BaseModel):
    kind: Literal["random", "3sat"]
    seed: int = 0
    n_inputs: int = Field(default=2, ge=1)
    n_gates: int = Field(default=2, ge=0)
    structure: Literal["path", "tree", "ladder"] = "path"
    d: int = Field(default=2, ge=2)
    n_uninitialized: int = Field(default=0, ge=0)
    formula: Optional[CnfFormula] = None
    n_vars: int = Field(default=3, ge=1)
    n_clauses: int = Field(default=3, ge=1)
    amplify: int = Field(default=0, ge=0)
    threshold: Optional[int] = Field(default=None, ge=1)


class DecomposeRequest(BaseModel):
    graph: Optional[str] = Field(default=None, description="Texto `d-graph v1` o `network v1`")
    circuit: Optional[QuantumCircuit] = None
    seed: int = 0

    @model_validator(mode="after")
    def _check_source(self) -> "DecomposeRequest":
        if (self.graph is None) == (self.circuit is None):
            raise ValueError("Indique exactamente uno de graph o circuit")
        return self
