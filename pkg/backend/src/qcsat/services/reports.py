# src/qcsat/services/reports.py
"""
Orquestación compartida por la CLI y la API, y formato de los reportes.

Los reportes `records` son líneas `clave valor` bajo la cabecera `qcsat-report v1`;
los flotantes usan su representación más corta, así que dos ejecuciones con las
mismas entradas producen bytes idénticos.
"""

import logging
from typing import Any, Optional

from pydantic import BaseModel

from qcsat.core.errors import InvalidInputError
from qcsat.schemas.circuit import QuantumCircuit
from qcsat.schemas.network import GoodTreeResult
from qcsat.schemas.reports import DecomposeReport, GenerateReport, OutputFormat, ValidationSummary
from qcsat.services.circuit import (
    cutwidth_of_ordering,
    ensure_valid_circuit,
    parse_circuit,
    to_feasibility_network,
    validate_circuit,
)
from qcsat.services.formats import parse_graph, parse_network, sniff_format
from qcsat.services.graphs import connected_components
from qcsat.services.network import build_good_contraction_tree, network_of_graph, validate_network

logger = logging.getLogger(__name__)

REPORT_HEADER = "qcsat-report v1"


# ============================================================
# FORMATO
# ============================================================

def _scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value).replace("\n", " ")


def _flatten(prefix: str, value: Any, out: list[tuple[str, str]]) -> None:
    if value is None:
        return
    if isinstance(value, BaseModel):
        value = value.model_dump()
    if isinstance(value, dict):
        for key, item in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), item, out)
    elif isinstance(value, (list, tuple)):
        if all(not isinstance(item, (dict, list, tuple, BaseModel)) for item in value):
            out.append((prefix, " ".join(_scalar(item) for item in value)))
        else:
            for k, item in enumerate(value):
                _flatten(f"{prefix}.{k}", item, out)
    else:
        out.append((prefix, _scalar(value)))


def render(command: str, report: BaseModel, fmt: OutputFormat = "human") -> str:
    pairs: list[tuple[str, str]] = []
    _flatten("", report, pairs)
    if fmt == "records":
        lines = [REPORT_HEADER, f"command {command}"]
        lines += [f"{key} {value}".rstrip() for key, value in pairs]
        return "\n".join(lines) + "\n"
    width = max((len(key) for key, _ in pairs), default=0)
    lines = [f"== {command} =="]
    lines += [f"{key.ljust(width)} : {value}" for key, value in pairs]
    return "\n".join(lines) + "\n"


# ============================================================
# VALIDACIÓN Y DESCOMPOSICIÓN DE ARCHIVOS
# ============================================================

def validate_source(text: str) -> ValidationSummary:
    """Valida un circuito, una red `network v1` o un grafo `d-graph v1` (debe ser conexo).

    Un archivo de formato reconocido que no se puede leer no lanza error: se
    reporta como inválido con el mensaje del parser como única violación.
    """
    kind = sniff_format(text)
    try:
        if kind == "circuit":
            return _validate_circuit_text(text)
        if kind == "network":
            return _validate_network_text(text)
        return _validate_graph_text(text)
    except InvalidInputError as e:
        logger.info(f"Archivo {kind} ilegible: {e.message}")
        return ValidationSummary(source=kind, valid=False, violations=[e.message])


def _validate_circuit_text(text: str) -> ValidationSummary:
    report = validate_circuit(parse_circuit(text))
    messages = [f"{v.code}: {v.message}" for v in report.violations]
    return ValidationSummary(source="circuit", valid=report.valid, violations=messages)


def _validate_network_text(text: str) -> ValidationSummary:
    report = validate_network(parse_network(text))
    messages = [f"índice {v.index} aparece {v.count} veces" for v in report.violations]
    if not report.connected and not report.violations:
        messages.append(f"red desconexa: {len(report.components)} componentes")
    return ValidationSummary(source="network", valid=report.valid, violations=messages)


def _validate_graph_text(text: str) -> ValidationSummary:
    components = connected_components(parse_graph(text))
    if len(components) > 1:
        return ValidationSummary(source="graph", valid=False, violations=[f"grafo desconexo: {len(components)} componentes"])
    return ValidationSummary(source="graph", valid=True)


def _decompose_report(source: str, good: GoodTreeResult, sets: int, indices: int, **extra) -> DecomposeReport:
    return DecomposeReport(
        source=source,
        sets=sets,
        indices=indices,
        treewidth=good.treewidth,
        max_degree=good.max_degree,
        carving_width=good.carving_width,
        contractive_width=good.contractive_width,
        rank=good.rank,
        height=good.height,
        **extra,
    )


def decompose_circuit(c: QuantumCircuit, seed: int = 0) -> tuple[DecomposeReport, GoodTreeResult]:
    """Árbol de contracción de la red de factibilidad del circuito y el ancho de corte del orden del archivo."""
    ensure_valid_circuit(c)
    network = to_feasibility_network(c).network
    good = build_good_contraction_tree(network, seed=seed)
    ordering = cutwidth_of_ordering(c, [v.id for v in c.vertices])
    report = _decompose_report(
        "circuit", good, network.size, len(c.edges),
        cutwidth=ordering.width, topological=ordering.topological,
    )
    return report, good


def decompose_text(text: str, seed: int = 0) -> tuple[DecomposeReport, GoodTreeResult]:
    """
    Descompone un circuito, una red o un grafo.

    Raises:
        InvalidInputError: si el archivo es inválido o el grafo es desconexo
    """
    kind = sniff_format(text)
    if kind == "circuit":
        return decompose_circuit(parse_circuit(text), seed=seed)
    if kind == "network":
        network = parse_network(text)
    else:
        network = network_of_graph(parse_graph(text))
    good = build_good_contraction_tree(network, seed=seed)
    indices = sum(len(s) for s in network.sets) // 2
    return _decompose_report(kind, good, network.size, indices), good


def generation_report(kind: str, c: QuantumCircuit) -> GenerateReport:
    ordering = cutwidth_of_ordering(c, [v.id for v in c.vertices])
    return GenerateReport(
        kind=kind,
        vertices=len(c.vertices),
        edges=len(c.edges),
        uninitialized=len(c.uninitialized),
        cutwidth=ordering.width,
        topological=ordering.topological,
    )


def read_text(path: Optional[str]) -> str:
    if not path:
        raise InvalidInputError("Falta la ruta del archivo de entrada")
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as e:
        raise InvalidInputError(f"No se pudo leer {path}: {e.strerror}")
