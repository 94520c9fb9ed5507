# src/qcsat/schemas/tensor.py
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from qcsat.core.config import settings
from qcsat.schemas.network import IndexSet

logger = logging.getLogger(__name__)


# ============================================================
# TENSOR DENSO
# ============================================================

class Tensor(BaseModel):
    """
    Tensor denso sobre un conjunto de índices.

    Cada índice toma d² valores: la variable σ = |b1⟩⟨b2| se codifica como b1·d + b2.
    `data` tiene forma (d², ..., d²) en el orden de los índices ordenados; un tensor de
    rango 0 es un número complejo (arreglo de forma ()).
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    d: int = Field(..., ge=2)
    indices: IndexSet
    data: np.ndarray

    @field_validator("data", mode="before")
    @classmethod
    def _as_complex(cls, value) -> np.ndarray:
        view = np.asarray(value, dtype=np.complex128).view()
        view.flags.writeable = False
        return view

    @model_validator(mode="after")
    def _check_shape(self) -> "Tensor":
        for a, b in zip(self.indices, self.indices[1:]):
            if a >= b:
                raise ValueError(f"Índices no ordenados: {self.indices}")
        expected = (self.d * self.d,) * len(self.indices)
        if self.data.shape != expected:
            raise ValueError(f"Forma {self.data.shape} distinta de la esperada {expected}")
        return self

    @property
    def rank(self) -> int:
        return len(self.indices)

    def scalar(self) -> complex:
        if self.indices:
            raise ValueError("Solo un tensor de rango 0 es un escalar")
        return complex(self.data)


class TensorSet(BaseModel):
    """
    Conjunto deduplicado de tensores sobre el mismo conjunto de índices.

    `provenance[k]` es el par (i, j) de miembros de los hijos que produjo primero al
    miembro k; en las hojas es (k, -1), el índice dentro del conjunto asignado.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    d: int = Field(..., ge=2)
    indices: IndexSet
    members: tuple[Tensor, ...] = Field(..., min_length=1)
    provenance: tuple[tuple[int, int], ...]

    @model_validator(mode="after")
    def _check_members(self) -> "TensorSet":
        if len(self.provenance) != len(self.members):
            raise ValueError("Cada miembro necesita su procedencia")
        seen = set()
        for k, member in enumerate(self.members):
            if member.indices != self.indices or member.d != self.d:
                raise ValueError(f"El miembro {k} no comparte índices o dimensión")
            key = member.data.tobytes()
            if key in seen:
                raise ValueError(f"El miembro {k} repite entradas de otro miembro")
            seen.add(key)
        return self

    def __len__(self) -> int:
        return len(self.members)


# ============================================================
# PARÁMETROS DE LA RED ε
# ============================================================

class NetParams(BaseModel):
    """Rejilla de múltiplos de ε/2 acotada a [-B, B]."""
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(..., gt=0.0, lt=1.0)
    clamp_bound: float = Field(default_factory=lambda: settings.clamp_bound, gt=0.0)

    def model_post_init(self, __context) -> None:
        if self.clamp_bound != 1.0:
            logger.warning(
                f"Cota de recorte B={self.clamp_bound}: las cotas de error solo están probadas para B=1"
            )

    @property
    def step(self) -> float:
        return self.epsilon / 2.0

    @property
    def max_steps(self) -> int:
        """Mayor entero k con k·ε/2 ≤ B."""
        return math.floor(self.clamp_bound / self.step + 1e-9)
