# src/qcsat/routers/circuits.py

import logging

from fastapi import APIRouter

from qcsat.schemas.circuit import CircuitReport
from qcsat.schemas.reports import (
    AssignmentRequest,
    CircuitRequest,
    GenerateRequest,
    OracleRequest,
    SatisfyRequest,
)
from qcsat.schemas.simulation import AcceptanceResult, BruteForceResult, SolveResult
from qcsat.services.circuit import initialize, validate_circuit
from qcsat.services.exactsim import acceptance_probability
from qcsat.services.generators import gen_3sat_verifier, gen_random_circuit, random_3cnf
from qcsat.services.oracle import brute_force_max
from qcsat.services.reports import generation_report
from qcsat.services.satsolve import solve_classical_assignment

router = APIRouter(prefix="/circuits", tags=["Circuits"])
logger = logging.getLogger(__name__)


@router.post(
    "/validate",
    response_model=CircuitReport,
    summary="Validar un circuito",
    description="Validación estructural y semántica; cada violación indica su vértice o arista",
)
def validate(request: CircuitRequest):
    return validate_circuit(request.circuit)


@router.post(
    "/simulate",
    response_model=AcceptanceResult,
    summary="Probabilidad de aceptación exacta",
)
def simulate(request: AssignmentRequest):
    circuit = request.circuit
    if request.y is not None:
        circuit = initialize(circuit, request.y)
    return acceptance_probability(circuit, seed=request.seed)


@router.post(
    "/satisfy",
    response_model=SolveResult,
    response_model_exclude_none=True,
    summary="Asignación clásica casi óptima",
)
def satisfy(request: SatisfyRequest):
    logger.info(f"Resolviendo con delta={request.delta} epsilon={request.epsilon} semilla={request.seed}")
    return solve_classical_assignment(
        request.circuit,
        delta=request.delta,
        epsilon=request.epsilon,
        seed=request.seed,
        threads=request.threads,
        max_set_size=request.max_set_size,
    )


@router.post(
    "/oracle",
    response_model=BruteForceResult,
    summary="Máximo por fuerza bruta con simulación densa",
)
def oracle(request: OracleRequest):
    return brute_force_max(
        request.circuit,
        assignment_cap=request.assignment_cap,
        wire_cap=request.wire_cap,
    )


@router.post("/generate", summary="Generar un circuito de prueba")
def generate(request: GenerateRequest):
    if request.kind == "random":
        circuit = gen_random_circuit(
            request.n_inputs, request.n_gates, structure=request.structure, d=request.d,
            seed=request.seed, n_uninitialized=request.n_uninitialized,
        )
    else:
        formula = request.formula or random_3cnf(request.n_vars, request.n_clauses, seed=request.seed)
        circuit = gen_3sat_verifier(formula, amplify=request.amplify, threshold=request.threshold)
    return {
        "circuit": circuit.model_dump(mode="json", by_alias=True),
        "report": generation_report(request.kind, circuit).model_dump(),
    }
