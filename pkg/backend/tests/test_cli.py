# tests/test_cli.py

import pytest

from qcsat.cli import main
from qcsat.services.circuit import parse_circuit
from qcsat.services.formats import parse_contraction_tree
from qcsat.services.generators import gen_random_circuit
from qcsat.services.reports import REPORT_HEADER


def _records(text: str) -> dict[str, str]:
    lines = text.splitlines()
    assert lines[0] == REPORT_HEADER
    return dict(line.split(" ", 1) for line in lines[1:] if " " in line)


def test_simulate_records(capsys, hadamard_circuit, circuit_file):
    code = main(["simulate", circuit_file(hadamard_circuit), "--format", "records"])
    assert code == 0
    records = _records(capsys.readouterr().out)
    assert records["command"] == "simulate"
    assert float(records["probability"]) == pytest.approx(0.5)


def test_simulate_with_assignment(capsys, cnot_circuit, circuit_file):
    assert main(["simulate", circuit_file(cnot_circuit), "--assign", "10", "--format", "records"]) == 0
    assert float(_records(capsys.readouterr().out)["probability"]) == pytest.approx(1.0)


def test_satisfy(capsys, cnot_circuit, circuit_file):
    path = circuit_file(cnot_circuit)
    assert main(["satisfy", path, "--epsilon", "0.01", "--format", "records"]) == 0
    records = _records(capsys.readouterr().out)
    assert records["y"] == "10"
    assert records["mode"] == "epsilon"


def test_satisfy_needs_precision(capsys, measure_one, circuit_file):
    assert main(["satisfy", circuit_file(measure_one)]) == 1
    assert main(["satisfy", circuit_file(measure_one), "--delta", "1.5"]) == 1


def test_invalid_inputs_exit_with_one(capsys, tmp_path):
    assert main(["validate", str(tmp_path / "no-existe.json")]) == 1
    broken = tmp_path / "roto.json"
    broken.write_text("{ no es json", encoding="utf-8")
    assert main(["simulate", str(broken)]) == 1
    assert "error:" in capsys.readouterr().err


def test_validate_reports_violations(capsys, tmp_path):
    network = tmp_path / "red.txt"
    network.write_text("network v1 2 1\nset 1\nset 2\n", encoding="utf-8")
    assert main(["validate", str(network)]) == 1
    assert "índice 1" in capsys.readouterr().out


def test_validate_unreadable_circuit_still_reports(capsys, tmp_path):
    broken = tmp_path / "roto.json"
    broken.write_text("{ no es json", encoding="utf-8")
    assert main(["validate", str(broken), "--format", "records"]) == 1
    records = _records(capsys.readouterr().out)
    assert records["command"] == "validate"
    assert records["source"] == "circuit"
    assert records["valid"] == "false"
    assert "mal formado" in records["violations"]


def test_gen_then_validate(capsys, tmp_path):
    out = tmp_path / "gen.json"
    report = tmp_path / "gen.txt"
    code = main([
        "gen", "random", "--inputs", "3", "--gates", "4", "--structure", "ladder",
        "--uninitialized", "1", "--seed", "7", "--out", str(out),
        "--report", str(report), "--format", "records",
    ])
    assert code == 0
    circuit = parse_circuit(out.read_text(encoding="utf-8"))
    assert len(circuit.uninitialized) == 1
    assert _records(report.read_text(encoding="utf-8"))["kind"] == "random"

    assert main(["validate", str(out), "--format", "records"]) == 0
    assert _records(capsys.readouterr().out)["valid"] == "true"


def test_gen_3sat_from_dimacs(tmp_path):
    dimacs = tmp_path / "f.cnf"
    dimacs.write_text("p cnf 2 2\n1 2 2 0\n-1 2 2 0\n", encoding="utf-8")
    out = tmp_path / "verif.json"
    assert main(["gen", "3sat", "--formula", str(dimacs), "--out", str(out)]) == 0
    circuit = parse_circuit(out.read_text(encoding="utf-8"))
    assert [v.id for v in circuit.uninitialized] == [0, 1]


def test_oracle_assignment_cap_exits_with_two(capsys, cnot_circuit, circuit_file):
    path = circuit_file(cnot_circuit)
    assert main(["oracle", path, "--assignment-cap", "1"]) == 2
    assert main(["oracle", path, "--format", "records"]) == 0
    assert _records(capsys.readouterr().out)["y"] == "10"


def test_decompose_dumps_tree(capsys, tmp_path):
    graph = tmp_path / "ciclo.txt"
    graph.write_text("d-graph v1 3 3\n0 1 1\n1 2 2\n2 0 3\n", encoding="utf-8")
    tree_path = tmp_path / "arbol.txt"
    carving_path = tmp_path / "tallado.txt"
    code = main([
        "decompose", str(graph), "--dump-tree", str(tree_path),
        "--dump-carving", str(carving_path), "--format", "records",
    ])
    assert code == 0
    records = _records(capsys.readouterr().out)
    assert records["source"] == "graph"
    assert records["treewidth"] == "2"
    tree = parse_contraction_tree(tree_path.read_text(encoding="utf-8"))
    assert tree.size == 5
    assert carving_path.read_text(encoding="utf-8").startswith("carving v1 5")


def test_records_are_reproducible(capsys, hadamard_circuit, circuit_file):
    path = circuit_file(hadamard_circuit)
    main(["simulate", path, "--format", "records"])
    first = capsys.readouterr().out
    main(["simulate", path, "--format", "records"])
    assert capsys.readouterr().out == first


def test_unknown_command():
    assert main(["transpile", "x"]) == 1


@pytest.mark.parametrize("seed", range(10))
def test_satisfy_records_do_not_depend_on_threads(capsys, circuit_file, seed):
    circuit = gen_random_circuit(3, 4, structure=("path", "tree", "ladder")[seed % 3], seed=seed, n_uninitialized=2)
    path = circuit_file(circuit, name=f"c{seed}.json")
    outputs = []
    for threads in ("1", "8"):
        assert main(["satisfy", path, "--epsilon", "0.01", "--threads", threads, "--format", "records"]) == 0
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]
