# tests/test_generators.py

from itertools import product

import numpy as np
import pytest

from qcsat.core.errors import InvalidInputError
from qcsat.schemas.formula import CnfFormula
from qcsat.services.circuit import format_circuit, validate_circuit
from qcsat.services.generators import (
    format_dimacs,
    gen_3sat_verifier,
    gen_random_circuit,
    parse_dimacs,
    random_3cnf,
)
from qcsat.services.oracle import brute_force_max, dm_simulate

DIMACS = """c ejemplo
p cnf 3 2
1 -2 3 0
-1 2 -3 0
"""


def test_parse_dimacs():
    formula = parse_dimacs(DIMACS)
    assert formula.n_vars == 3
    assert formula.clauses == ((1, -2, 3), (-1, 2, -3))
    assert parse_dimacs(format_dimacs(formula)) == formula


@pytest.mark.parametrize("text", [
    "1 2 3 0\n",
    "p cnf 3 1\n1 2 0\n",
    "p cnf 3 2\n1 2 3 0\n",
    "p cnf 2 1\n1 2 3 0\n",
    "p cnf 3 1\n1 2 3\n",
])
def test_parse_dimacs_errors(text):
    with pytest.raises(InvalidInputError):
        parse_dimacs(text)


def test_random_3cnf_is_planted_satisfiable():
    formula = random_3cnf(5, 12, seed=4)
    assert len(formula.clauses) == 12
    assert any(formula.satisfied_by(list(values)) for values in product([0, 1], repeat=5))
    assert random_3cnf(5, 12, seed=4) == formula


def test_verifier_layout(verifier, two_clause_formula):
    assert validate_circuit(verifier).valid
    stars = [v.id for v in verifier.uninitialized]
    assert stars == [0, 1]
    assert set(verifier.gates) == {"COIN", "TIE", "CLAUSE_1", "CLAUSE_2"}


def test_verifier_accepts_fraction_of_satisfied_clauses(verifier):
    values = brute_force_max(verifier).values
    assert values == pytest.approx([0.5, 1.0, 0.5, 1.0])


def test_verifier_optimum_satisfies_formula(verifier, two_clause_formula):
    result = brute_force_max(verifier)
    assert result.y == "01"
    assert two_clause_formula.satisfied_by(result.digits)


def test_verifier_unsatisfiable_formula(unsat_formula):
    circuit = gen_3sat_verifier(unsat_formula)
    assert brute_force_max(circuit).values == pytest.approx([0.5, 0.5])


def test_verifier_coin_weights_when_clauses_are_not_a_power_of_two():
    # Con m = 3 y dos monedas, la cláusula 1 recibe los valores 0 y 3
    formula = CnfFormula(n_vars=1, clauses=((1, 1, 1), (-1, -1, -1), (1, 1, 1)))
    values = brute_force_max(gen_3sat_verifier(formula)).values
    assert values == pytest.approx([0.25, 0.75])


def test_verifier_skips_tautologies():
    formula = CnfFormula(n_vars=2, clauses=((1, -1, 2),))
    circuit = gen_3sat_verifier(formula)
    assert not any(name.startswith("CLAUSE") for name in circuit.gates)
    assert brute_force_max(circuit).values == pytest.approx([1.0] * 4)


def test_amplified_verifier(two_clause_formula, unsat_formula):
    amplified = gen_3sat_verifier(two_clause_formula, amplify=2)
    assert {"ADD", "COMP"} <= set(amplified.gates)
    # umbral ⌈2/2⌉ = 1: con x2 = 0 cada repetición acepta con 1/2
    assert dm_simulate(amplified, "00") == pytest.approx(0.75)
    assert dm_simulate(amplified, "01") == pytest.approx(1.0)

    # mayoría de 3 repeticiones independientes con probabilidad 1/2
    majority = gen_3sat_verifier(unsat_formula, amplify=3)
    assert dm_simulate(majority, "1") == pytest.approx(0.5)

    with pytest.raises(InvalidInputError):
        gen_3sat_verifier(unsat_formula, amplify=2, threshold=3)


@pytest.mark.parametrize("structure", ["path", "tree", "ladder"])
def test_random_circuit_structures(structure):
    circuit = gen_random_circuit(4, 6, structure=structure, d=2, seed=2, n_uninitialized=2)
    report = validate_circuit(circuit)
    assert report.valid, report.violations
    assert report.n_gates == 6
    assert [v.id for v in circuit.uninitialized] == [0, 1]


def test_random_circuit_is_deterministic_per_seed():
    a = gen_random_circuit(3, 3, structure="tree", d=3, seed=9)
    b = gen_random_circuit(3, 3, structure="tree", d=3, seed=9)
    c = gen_random_circuit(3, 3, structure="tree", d=3, seed=10)
    assert format_circuit(a) == format_circuit(b)
    assert format_circuit(a) != format_circuit(c)


def test_random_circuit_parameter_errors():
    with pytest.raises(InvalidInputError):
        gen_random_circuit(4, 2)
    with pytest.raises(InvalidInputError):
        gen_random_circuit(2, 2, structure="star")
    with pytest.raises(InvalidInputError):
        gen_random_circuit(2, 2, n_uninitialized=3)
    single = gen_random_circuit(1, 0, seed=1)
    assert len(single.vertices) == 2


@pytest.mark.slow
def test_verifier_accepts_planted_formulas_with_certainty():
    for seed in range(50):
        rng = np.random.default_rng(seed)
        formula = random_3cnf(int(rng.integers(1, 5)), int(rng.integers(1, 5)), seed=seed)
        result = brute_force_max(gen_3sat_verifier(formula))
        assert result.probability == pytest.approx(1.0, abs=1e-9), f"semilla {seed}"
        assert formula.satisfied_by(result.digits), f"semilla {seed}"
