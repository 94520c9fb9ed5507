# tests/test_oracle.py

import numpy as np
import pytest

from qcsat.core.errors import InvalidInputError, ResourceLimitError
from qcsat.services import gates as library
from qcsat.services.oracle import DenseState, brute_force_max, dm_simulate


def test_dense_state_applies_and_measures():
    state = DenseState(d=2, max_dimension=16)
    state.add_wire(1, 0)
    state.add_wire(2, 1)
    state.apply(library.sum_gate(2), [1, 2], [3, 4])
    assert state.wires == [3, 4]
    # |0,1⟩ no cambia con CNOT
    state.measure(library.projector(2, 1), 4)
    state.measure(library.projector(2, 0), 3)
    assert state.value() == pytest.approx(1.0)


def test_dense_state_respects_port_order():
    state = DenseState(d=2, max_dimension=16)
    state.add_wire(1, 1)
    state.add_wire(2, 0)
    # El control es el segundo cable listado: |0⟩ controla, el objetivo |1⟩ no cambia
    state.apply(library.sum_gate(2), [2, 1], [5, 6])
    state.measure(library.projector(2, 1), 6)
    state.measure(library.projector(2, 0), 5)
    assert state.value() == pytest.approx(1.0)


def test_dense_state_limit():
    state = DenseState(d=2, max_dimension=4)
    state.add_wire(1, 0)
    state.add_wire(2, 0)
    with pytest.raises(ResourceLimitError):
        state.add_wire(3, 0)
    with pytest.raises(InvalidInputError):
        state.value()


def test_dm_simulate(hadamard_circuit, cnot_circuit, make_wire):
    assert dm_simulate(hadamard_circuit) == pytest.approx(0.5)
    assert dm_simulate(cnot_circuit, "10") == pytest.approx(1.0)
    assert dm_simulate(cnot_circuit, [1, 1]) == pytest.approx(0.0)

    theta = np.array([[0.5, 0.5], [0.5, 0.5]])
    plus = make_wire(2, 0, theta, library.fourier(2), name="H")
    assert dm_simulate(plus) == pytest.approx(1.0)


def test_dm_simulate_requires_assignment(cnot_circuit):
    with pytest.raises(InvalidInputError):
        dm_simulate(cnot_circuit)


def test_wire_cap(verifier):
    with pytest.raises(ResourceLimitError):
        dm_simulate(verifier, "01", wire_cap=2)
    assert dm_simulate(verifier, "01", wire_cap=6) == pytest.approx(1.0)


def test_brute_force_max(cnot_circuit):
    result = brute_force_max(cnot_circuit)
    assert result.y == "10"
    assert result.digits == [1, 0]
    assert result.evaluated == 4
    assert result.values == pytest.approx([0.0, 0.0, 1.0, 0.0])


def test_brute_force_ties_pick_smallest(make_wire):
    circuit = make_wire(3, "*", library.identity(3)[0])
    result = brute_force_max(circuit)
    assert result.y == "0"
    assert result.values == pytest.approx([1.0, 1.0, 1.0])


def test_brute_force_threads_and_limits(cnot_circuit):
    assert brute_force_max(cnot_circuit, threads=3).values == brute_force_max(cnot_circuit).values
    with pytest.raises(ResourceLimitError):
        brute_force_max(cnot_circuit, assignment_cap=3)
