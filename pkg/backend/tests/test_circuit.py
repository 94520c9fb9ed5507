# tests/test_circuit.py

import numpy as np
import pytest

from qcsat.core.errors import InvalidInputError
from qcsat.schemas.circuit import CircuitEdge, Gate, QuantumCircuit, Vertex, matrix_to_pairs
from qcsat.services import gates as library
from qcsat.services.circuit import (
    circuit_gate,
    cutwidth_of_ordering,
    density_tensor,
    format_circuit,
    gate_tensor,
    initialize,
    measurement_tensor,
    parse_assignment,
    parse_circuit,
    to_feasibility_network,
    to_tensor_network,
    validate_circuit,
)
from qcsat.services.generators import gen_random_circuit
from qcsat.services.tensor import contract


def codes(report):
    return {v.code for v in report.violations}


def test_format_parse_round_trip():
    circuit = gen_random_circuit(3, 4, structure="ladder", d=2, seed=11, n_uninitialized=1)
    text = format_circuit(circuit)
    assert parse_circuit(text) == circuit
    assert format_circuit(parse_circuit(text)) == text


def test_parse_circuit_errors():
    with pytest.raises(InvalidInputError):
        parse_circuit("{not json")
    with pytest.raises(InvalidInputError):
        parse_circuit('{"format": "qcircuit", "version": 2, "d": 2}')


def test_valid_toy_circuits(hadamard_circuit, cnot_circuit, verifier):
    for circuit in (hadamard_circuit, cnot_circuit, verifier):
        report = validate_circuit(circuit)
        assert report.valid, report.violations
    report = validate_circuit(cnot_circuit)
    assert (report.n_inputs, report.n_uninitialized, report.n_gates, report.n_outputs) == (2, 2, 1, 2)


def test_measurement_above_identity_is_rejected(make_wire):
    report = validate_circuit(make_wire(2, 0, 2 * library.projector(2, 0)))
    assert not report.valid
    assert codes(report) == {"OUTPUT_MEASURE"}
    assert report.violations[0].vertex == 1


def test_trace_increasing_gate_is_rejected(make_wire):
    report = validate_circuit(make_wire(2, 0, library.projector(2, 0), np.sqrt(2) * library.identity(2)))
    assert "KRAUS_TRACE" in codes(report)


def test_bad_gate_shape(make_wire):
    circuit = make_wire(2, 0, library.projector(2, 0), np.ones((1, 3, 3)))
    assert "GATE_SHAPE" in codes(validate_circuit(circuit))


def test_structural_violations(hadamard_circuit):
    repeated = hadamard_circuit.model_copy(update={"edges": (
        CircuitEdge(label=1, source=(0, 0), target=(1, 0)),
        CircuitEdge(label=1, source=(1, 0), target=(2, 0)),
    )})
    assert "XI_INJECTIVE" in codes(validate_circuit(repeated))

    dangling = hadamard_circuit.model_copy(update={"edges": hadamard_circuit.edges[:1]})
    assert "PORT_ARITY" in codes(validate_circuit(dangling))

    bad_init = hadamard_circuit.model_copy(update={"vertices": (
        Vertex(id=0, kind="input", init=5),
    ) + hadamard_circuit.vertices[1:]})
    assert "INPUT_INIT" in codes(validate_circuit(bad_init))


def test_cycle_and_disconnection():
    identity = tuple(matrix_to_pairs(k) for k in library.identity(2))
    theta = matrix_to_pairs(library.projector(2, 0))
    cyclic = QuantumCircuit(
        d=2,
        gates={"I": identity},
        vertices=(Vertex(id=0, kind="gate", gate="I"), Vertex(id=1, kind="gate", gate="I")),
        edges=(
            CircuitEdge(label=1, source=(0, 0), target=(1, 0)),
            CircuitEdge(label=2, source=(1, 0), target=(0, 0)),
        ),
    )
    assert "CYCLE" in codes(validate_circuit(cyclic))

    split = cyclic.model_copy(update={
        "gates": {},
        "vertices": (
            Vertex(id=0, kind="input", init=0), Vertex(id=1, kind="output", measure=theta),
            Vertex(id=2, kind="input", init=0), Vertex(id=3, kind="output", measure=theta),
        ),
        "edges": (
            CircuitEdge(label=1, source=(0, 0), target=(1, 0)),
            CircuitEdge(label=2, source=(2, 0), target=(3, 0)),
        ),
    })
    assert codes(validate_circuit(split)) == {"DISCONNECTED"}


def test_density_and_measurement_tensors():
    rho = np.array([[0.75, 0.25j], [-0.25j, 0.25]])
    theta = np.array([[0.5, 0.5], [0.5, 0.5]])
    value = contract(density_tensor(rho, 1, 2), measurement_tensor(theta, 1, 2)).scalar()
    assert value == pytest.approx(np.trace(rho @ theta))

    with pytest.raises(InvalidInputError):
        density_tensor(np.eye(2), 1, 2)


def test_gate_tensor_applies_channel():
    rng = np.random.default_rng(3)
    gate_kraus = library.random_channel(4, 2, rng)
    theta = library.random_effect(2, rng)
    a, b = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])

    gate = Gate(name="G", d=2, n_inputs=2, n_outputs=2, kraus=gate_kraus)
    tensor = gate_tensor(gate, [3, 1], [2, 4])
    assert tensor.indices == (1, 2, 3, 4)

    # Entrada 3 = |0⟩⟨0| (primer puerto), entrada 1 = |1⟩⟨1|; se mide la salida 2 y se traza la 4
    network = contract(tensor, density_tensor(a, 3, 2))
    network = contract(network, density_tensor(b, 1, 2))
    network = contract(network, measurement_tensor(theta, 2, 2))
    value = contract(network, measurement_tensor(np.eye(2), 4, 2)).scalar()

    rho = np.kron(a, b)
    out = sum(k @ rho @ k.conj().T for k in gate_kraus)
    expected = np.trace(np.kron(theta, np.eye(2)) @ out)
    assert value == pytest.approx(expected)


def test_circuit_gate_infers_arity(verifier):
    gate = circuit_gate(verifier, "CLAUSE_1")
    assert (gate.n_inputs, gate.n_outputs) == (4, 4)
    assert gate.trace_excess() == pytest.approx(0.0, abs=1e-12)


def test_networks_of_circuit(cnot_circuit):
    with pytest.raises(InvalidInputError):
        to_tensor_network(cnot_circuit)

    fn = to_feasibility_network(cnot_circuit)
    assert fn.input_positions == (0, 1)
    assert [len(c) for c in fn.candidates] == [2, 2, 1, 1, 1]
    assert fn.network.sets == ((1,), (2,), (1, 2, 3, 4), (3,), (4,))

    cn = to_tensor_network(initialize(cnot_circuit, "10"))
    assert cn.vertex_ids == (0, 1, 2, 3, 4)
    assert [t.indices for t in cn.tensors] == list(cn.network.sets)


def test_assignments(cnot_circuit):
    assert parse_assignment("0120", 3) == [0, 1, 2, 0]
    assert parse_assignment("10,11,0", 12) == [10, 11, 0]
    assert parse_assignment([1, 0], 2) == [1, 0]
    with pytest.raises(InvalidInputError):
        parse_assignment("2", 2)
    with pytest.raises(InvalidInputError):
        initialize(cnot_circuit, "1")

    ready = initialize(cnot_circuit, [1, 0])
    assert [v.init for v in ready.inputs] == [1, 0]
    assert not ready.uninitialized


def test_cutwidth_of_ordering(cnot_circuit):
    report = cutwidth_of_ordering(cnot_circuit, [0, 1, 2, 3, 4])
    assert report.width == 2
    assert report.topological

    backwards = cutwidth_of_ordering(cnot_circuit, [3, 4, 2, 0, 1])
    assert not backwards.topological

    with pytest.raises(InvalidInputError):
        cutwidth_of_ordering(cnot_circuit, [0, 1, 2])
