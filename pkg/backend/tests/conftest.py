# tests/conftest.py

from typing import Optional

import numpy as np
import pytest

from qcsat.schemas.circuit import CircuitEdge, QuantumCircuit, Vertex, matrix_to_pairs
from qcsat.schemas.formula import CnfFormula
from qcsat.schemas.graph import Multigraph
from qcsat.services import gates as library
from qcsat.services.circuit import format_circuit
from qcsat.services.generators import gen_3sat_verifier


def _wire(d, init, theta, kraus=None, name="U") -> QuantumCircuit:
    """Circuito de un cable: entrada -> [compuerta] -> salida."""
    vertices = [Vertex(id=0, kind="input", init=init)]
    edges = []
    gates = {}
    last = 0
    if kraus is not None:
        gates[name] = tuple(matrix_to_pairs(k) for k in kraus)
        vertices.append(Vertex(id=1, kind="gate", gate=name))
        edges.append(CircuitEdge(label=1, source=(0, 0), target=(1, 0)))
        last = 1
    out = len(vertices)
    vertices.append(Vertex(id=out, kind="output", measure=matrix_to_pairs(theta)))
    edges.append(CircuitEdge(label=len(edges) + 1, source=(last, 0), target=(out, 0)))
    return QuantumCircuit(d=d, gates=gates, vertices=tuple(vertices), edges=tuple(edges))


@pytest.fixture
def make_wire():
    return _wire


@pytest.fixture
def hadamard_circuit():
    # |0⟩ -> H -> |0⟩⟨0|: Pr = 1/2
    return _wire(2, 0, library.projector(2, 0), library.fourier(2), name="H")


@pytest.fixture
def measure_one():
    # '*' medido en |1⟩⟨1|: el óptimo es y = 1
    return _wire(2, "*", library.projector(2, 1))


@pytest.fixture
def not_circuit():
    return _wire(2, "*", library.projector(2, 0), library.shift_x(2), name="X")


@pytest.fixture
def cnot_circuit():
    """Dos entradas '*' -> CNOT -> ambas salidas en |1⟩⟨1|; solo y = 10 acepta."""
    one = matrix_to_pairs(library.projector(2, 1))
    return QuantumCircuit(
        d=2,
        gates={"CNOT": tuple(matrix_to_pairs(k) for k in library.sum_gate(2))},
        vertices=(
            Vertex(id=0, kind="input", init="*"),
            Vertex(id=1, kind="input", init="*"),
            Vertex(id=2, kind="gate", gate="CNOT"),
            Vertex(id=3, kind="output", measure=one),
            Vertex(id=4, kind="output", measure=one),
        ),
        edges=(
            CircuitEdge(label=1, source=(0, 0), target=(2, 0)),
            CircuitEdge(label=2, source=(1, 0), target=(2, 1)),
            CircuitEdge(label=3, source=(2, 0), target=(3, 0)),
            CircuitEdge(label=4, source=(2, 1), target=(4, 0)),
        ),
    )


@pytest.fixture
def two_clause_formula():
    # (x1 ∨ x2 ∨ x2) ∧ (¬x1 ∨ x2 ∨ x2): se satisface si y solo si x2 = 1
    return CnfFormula(n_vars=2, clauses=((1, 2, 2), (-1, 2, 2)))


@pytest.fixture
def unsat_formula():
    return CnfFormula(n_vars=1, clauses=((1, 1, 1), (-1, -1, -1)))


@pytest.fixture
def verifier(two_clause_formula):
    return gen_3sat_verifier(two_clause_formula)


@pytest.fixture
def circuit_file(tmp_path):
    """Escribe un circuito en tmp_path y devuelve su ruta como texto."""

    def write(circuit: QuantumCircuit, name: str = "circuit.json") -> str:
        path = tmp_path / name
        path.write_text(format_circuit(circuit), encoding="utf-8")
        return str(path)

    return write


def _random_multigraph(n: int, seed: int, extra: Optional[int] = None) -> Multigraph:
    """Multigrafo conexo: árbol aleatorio más hasta `extra` aristas (paralelas permitidas)."""
    rng = np.random.default_rng(seed)
    pairs = [(int(rng.integers(0, v)), v) for v in range(1, n)]
    extra = n if extra is None else extra
    for _ in range(int(rng.integers(0, extra + 1)) if n > 1 else 0):
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        pairs.append((u, v))
    labels = rng.permutation(len(pairs)) + 1
    return Multigraph(n=n, edges=tuple((u, v, int(label)) for (u, v), label in zip(pairs, labels)))


@pytest.fixture
def random_multigraph():
    return _random_multigraph
