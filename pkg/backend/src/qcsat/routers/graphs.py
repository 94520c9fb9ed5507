# src/qcsat/routers/graphs.py

import logging

from fastapi import APIRouter

from qcsat.schemas.reports import DecomposeRequest
from qcsat.services.formats import format_carving, format_contraction_tree
from qcsat.services.reports import decompose_circuit, decompose_text

router = APIRouter(prefix="/graphs", tags=["Graphs"])
logger = logging.getLogger(__name__)


@router.post(
    "/decompose",
    summary="Árbol de contracción de un circuito, una red o un grafo",
    description="Devuelve las medidas de cada etapa y los volcados del árbol y del tallado",
)
def decompose(request: DecomposeRequest):
    if request.circuit is not None:
        report, good = decompose_circuit(request.circuit, seed=request.seed)
    else:
        report, good = decompose_text(request.graph, seed=request.seed)
    return {
        "report": report.model_dump(exclude_none=True),
        "tree": format_contraction_tree(good.tree),
        "carving": format_carving(good.carving),
    }
