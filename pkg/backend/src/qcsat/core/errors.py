# src/qcsat/core/errors.py

from typing import Optional


class QcsatError(Exception):
    """Excepción base de qcsat."""

    exit_code = 3
    http_status = 500
    code = "INTERNAL_ERROR"

    def __init__(self, message: str, details: Optional[dict] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "details": self.details}


class InvalidInputError(QcsatError):
    """Entrada mal formada o que no cumple sus invariantes."""

    exit_code = 1
    http_status = 422
    code = "VALIDATION_ERROR"


class TensorRangeError(InvalidInputError):
    """Entrada de tensor fuera del rango de la red ε."""

    code = "NET_RANGE_ERROR"


class ResourceLimitError(QcsatError):
    """Se superó un límite configurable (tamaño de conjunto, cables del oráculo, ...)."""

    exit_code = 2
    http_status = 413
    code = "RESOURCE_LIMIT"


class InvariantError(QcsatError):
    """Estado interno inconsistente; indica un bug, no una entrada inválida."""

    exit_code = 3
    http_status = 500
    code = "INTERNAL_INVARIANT"
