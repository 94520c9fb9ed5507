# src/qcsat/services/oracle.py
"""
Oráculo de fuerza bruta: simulación por matriz densidad sobre todo el espacio de
Hilbert, aplicando los vértices en orden topológico lexicográfico. No usa la red de
tensores ni los árboles de contracción.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Optional

import networkx as nx
import numpy as np

from qcsat.core.config import settings
from qcsat.core.errors import InvalidInputError, ResourceLimitError
from qcsat.schemas.circuit import QuantumCircuit, pairs_to_matrix
from qcsat.schemas.simulation import BruteForceResult
from qcsat.services.circuit import (
    Assignment,
    circuit_gate,
    ensure_valid_circuit,
    format_assignment,
    initialize,
)

logger = logging.getLogger(__name__)


class DenseState:
    """Matriz densidad sobre los cables activos; el primer cable es el factor más significativo."""

    def __init__(self, d: int, max_dimension: int):
        self.d = d
        self.max_dimension = max_dimension
        self.wires: list[int] = []
        self.rho = np.ones((1, 1), dtype=np.complex128)

    @property
    def dimension(self) -> int:
        return self.rho.shape[0]

    def _front(self, labels: list[int]) -> np.ndarray:
        """ρ como (d^k, resto, d^k, resto) con los cables `labels` al frente."""
        w, k, d = len(self.wires), len(labels), self.d
        targets = [self.wires.index(label) for label in labels]
        others = [i for i in range(w) if i not in targets]
        tensor = self.rho.reshape((d,) * (2 * w))
        perm = targets + others + [w + i for i in targets] + [w + i for i in others]
        rest = d ** (w - k)
        return np.transpose(tensor, perm).reshape(d ** k, rest, d ** k, rest)

    def add_wire(self, label: int, basis: int) -> None:
        if self.dimension * self.d > self.max_dimension:
            raise ResourceLimitError(
                f"El estado superaría {self.max_dimension} dimensiones con {len(self.wires) + 1} cables",
                details={"wires": len(self.wires) + 1, "max_dimension": self.max_dimension},
            )
        ket = np.zeros((self.d, self.d), dtype=np.complex128)
        ket[basis, basis] = 1.0
        self.rho = np.kron(self.rho, ket)
        self.wires.append(label)

    def apply(self, kraus: np.ndarray, in_labels: list[int], out_labels: list[int]) -> None:
        """ρ -> Σ_m K_m ρ K_m† sobre los cables de entrada; los de salida quedan al frente."""
        others = [label for label in self.wires if label not in in_labels]
        new_dim = kraus.shape[1] * (self.dimension // kraus.shape[2])
        if new_dim > self.max_dimension:
            raise ResourceLimitError(
                f"El estado superaría {self.max_dimension} dimensiones",
                details={"wires": len(others) + len(out_labels), "max_dimension": self.max_dimension},
            )
        rho4 = self._front(in_labels)
        rho4 = np.einsum("mab,bxcy,mdc->axdy", kraus, rho4, kraus.conj())
        self.wires = list(out_labels) + others
        self.rho = rho4.reshape(new_dim, new_dim)

    def measure(self, theta: np.ndarray, label: int) -> None:
        """Reemplaza ρ por tr_label(θ·ρ): aplica el elemento de medición y descarta el cable."""
        rho4 = self._front([label])
        rest = rho4.shape[1]
        self.rho = np.einsum("ab,bxay->xy", theta, rho4).reshape(rest, rest)
        self.wires.remove(label)

    def value(self) -> complex:
        if self.wires:
            raise InvalidInputError(f"Quedan cables sin medir: {self.wires}")
        return complex(self.rho[0, 0])


def _max_dimension(wire_cap: Optional[int]) -> int:
    # El límite se expresa en cables de qubit: d^w ≤ 2^cap
    cap = settings.oracle_wire_cap if wire_cap is None else wire_cap
    return 2 ** cap


def dm_simulate(c: QuantumCircuit, y: Optional[Assignment] = None, wire_cap: Optional[int] = None) -> float:
    """
    Pr(C, y) = tr[C(ρ_in)·M(C)] por simulación densa.

    Las entradas se agregan al estado cuando se procesan y cada salida se mide y se
    descarta al llegar a ella, en orden topológico lexicográfico por id.

    Args:
        c: Circuito válido
        y: Asignación de las entradas '*' (en orden de vértice)
        wire_cap: Límite de cables activos medido en qubits (d^w ≤ 2^cap)

    Raises:
        InvalidInputError: si quedan entradas sin inicializar
        ResourceLimitError: si el estado supera el límite
    """
    ensure_valid_circuit(c)
    if y is not None:
        c = initialize(c, y)
    if c.uninitialized:
        raise InvalidInputError("El oráculo necesita una asignación para las entradas '*'")

    state = DenseState(c.d, _max_dimension(wire_cap))
    incoming: dict[int, dict[int, int]] = {v.id: {} for v in c.vertices}
    outgoing: dict[int, dict[int, int]] = {v.id: {} for v in c.vertices}
    graph = nx.DiGraph()
    graph.add_nodes_from(v.id for v in c.vertices)
    for e in c.edges:
        outgoing[e.source[0]][e.source[1]] = e.label
        incoming[e.target[0]][e.target[1]] = e.label
        graph.add_edge(e.source[0], e.target[0])

    kraus_cache: dict[str, np.ndarray] = {}
    vertices = {v.id: v for v in c.vertices}
    peak = 0
    for vid in nx.lexicographical_topological_sort(graph):
        v = vertices[vid]
        ins = [incoming[vid][p] for p in sorted(incoming[vid])]
        outs = [outgoing[vid][p] for p in sorted(outgoing[vid])]
        if v.kind == "input":
            state.add_wire(outs[0], v.init)
        elif v.kind == "output":
            state.measure(pairs_to_matrix(v.measure), ins[0])
        else:
            if v.gate not in kraus_cache:
                kraus_cache[v.gate] = circuit_gate(c, v.gate).kraus
            state.apply(kraus_cache[v.gate], ins, outs)
        peak = max(peak, len(state.wires))

    value = state.value()
    if abs(value.imag) > settings.imag_warning_threshold:
        logger.warning(f"Parte imaginaria {value.imag:.3g} en la simulación densa")
    logger.debug(f"Simulación densa: {peak} cables como máximo, Pr = {value.real:.12g}")
    return value.real


def brute_force_max(
    c: QuantumCircuit,
    assignment_cap: Optional[int] = None,
    wire_cap: Optional[int] = None,
    threads: int = 1,
) -> BruteForceResult:
    """
    Pr^cl(C) = max_y Pr(C, y) por enumeración; en empates gana la y lexicográficamente menor.

    Raises:
        ResourceLimitError: si d^n supera el límite de asignaciones
    """
    ensure_valid_circuit(c)
    n = len(c.uninitialized)
    cap = settings.oracle_assignment_cap if assignment_cap is None else assignment_cap
    total = c.d ** n
    if total > cap:
        raise ResourceLimitError(
            f"{c.d}^{n} = {total} asignaciones superan el límite de {cap}",
            details={"assignments": total, "limit": cap},
        )

    assignments = list(product(range(c.d), repeat=n))

    def evaluate(digits) -> float:
        return dm_simulate(c, list(digits), wire_cap=wire_cap)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(evaluate, assignments))
    else:
        values = [evaluate(digits) for digits in assignments]

    best = 0
    for k, value in enumerate(values):
        if value > values[best]:
            best = k
    digits = list(assignments[best])
    logger.info(f"Fuerza bruta sobre {total} asignaciones: Pr^cl = {values[best]:.12g}")
    return BruteForceResult(
        y=format_assignment(digits, c.d),
        digits=digits,
        probability=values[best],
        evaluated=total,
        values=values,
    )
