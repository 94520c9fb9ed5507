# src/qcsat/services/generators.py

import logging
import math
from typing import Optional

import numpy as np

from qcsat.core.errors import InvalidInputError
from qcsat.schemas.circuit import CircuitEdge, QuantumCircuit, Vertex, matrix_to_pairs
from qcsat.schemas.formula import CnfFormula
from qcsat.services import gates as library
from qcsat.services.circuit import ensure_valid_circuit

logger = logging.getLogger(__name__)

Head = tuple[int, int]


class _CircuitBuilder:
    """Arma un circuito en orden topológico: los ids y las etiquetas crecen con cada paso."""

    def __init__(self, d: int):
        self.d = d
        self.vertices: list[Vertex] = []
        self.edges: list[CircuitEdge] = []
        self.gates: dict[str, tuple] = {}
        self._label = 0

    def define(self, name: str, kraus: np.ndarray) -> None:
        if name not in self.gates:
            self.gates[name] = tuple(matrix_to_pairs(k) for k in kraus)

    def _connect(self, source: Head, target: Head) -> None:
        self._label += 1
        self.edges.append(CircuitEdge(label=self._label, source=source, target=target))

    def input(self, init) -> Head:
        vid = len(self.vertices)
        self.vertices.append(Vertex(id=vid, kind="input", init=init))
        return (vid, 0)

    def apply(self, name: str, heads: list[Head], n_outputs: Optional[int] = None) -> list[Head]:
        vid = len(self.vertices)
        self.vertices.append(Vertex(id=vid, kind="gate", gate=name))
        for port, head in enumerate(heads):
            self._connect(head, (vid, port))
        return [(vid, port) for port in range(len(heads) if n_outputs is None else n_outputs)]

    def output(self, head: Head, theta: np.ndarray) -> None:
        vid = len(self.vertices)
        self.vertices.append(Vertex(id=vid, kind="output", measure=matrix_to_pairs(theta)))
        self._connect(head, (vid, 0))

    def build(self) -> QuantumCircuit:
        circuit = QuantumCircuit(
            d=self.d,
            gates=self.gates,
            vertices=tuple(self.vertices),
            edges=tuple(self.edges),
        )
        ensure_valid_circuit(circuit)
        return circuit


# ============================================================
# FÓRMULAS 3-CNF
# ============================================================

def parse_dimacs(text: str) -> CnfFormula:
    """
    Lee una fórmula en formato DIMACS (`p cnf n m`, cláusulas terminadas en 0).

    Raises:
        InvalidInputError: si falta la cabecera, una cláusula no tiene 3 literales o
            el número de cláusulas no coincide
    """
    n_vars = n_clauses = None
    literals: list[int] = []
    clauses: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InvalidInputError(f"Cabecera DIMACS inválida en la línea {lineno}: {line!r}")
            n_vars, n_clauses = int(parts[2]), int(parts[3])
            continue
        if n_vars is None:
            raise InvalidInputError("Falta la cabecera `p cnf` antes de las cláusulas")
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError:
            raise InvalidInputError(f"Literal no entero en la línea {lineno}")
        for value in values:
            if value == 0:
                if len(literals) != 3:
                    raise InvalidInputError(
                        f"Cláusula {len(clauses) + 1} con {len(literals)} literales; se esperan 3"
                    )
                clauses.append(tuple(literals))
                literals = []
            else:
                literals.append(value)
    if n_vars is None:
        raise InvalidInputError("Falta la cabecera `p cnf`")
    if literals:
        raise InvalidInputError("La última cláusula no termina en 0")
    if len(clauses) != n_clauses:
        raise InvalidInputError(f"La cabecera declara {n_clauses} cláusulas y hay {len(clauses)}")
    try:
        return CnfFormula(n_vars=n_vars, clauses=tuple(clauses))
    except ValueError as e:
        raise InvalidInputError(f"Fórmula inválida: {e}")


def format_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.n_vars} {len(formula.clauses)}"]
    lines += [" ".join(str(lit) for lit in clause) + " 0" for clause in formula.clauses]
    return "\n".join(lines) + "\n"


def random_3cnf(n_vars: int, n_clauses: int, seed: int = 0, satisfiable: bool = True) -> CnfFormula:
    """
    Fórmula 3-CNF aleatoria. Con `satisfiable` se planta una asignación y cada cláusula
    se vuelve a sortear hasta que esa asignación la satisfaga.
    """
    if n_vars < 1 or n_clauses < 1:
        raise InvalidInputError("Se necesita al menos una variable y una cláusula")
    rng = np.random.default_rng(seed)
    planted = rng.integers(0, 2, size=n_vars)
    clauses = []
    while len(clauses) < n_clauses:
        variables = rng.integers(1, n_vars + 1, size=3)
        signs = rng.choice([-1, 1], size=3)
        clause = tuple(int(v * s) for v, s in zip(variables, signs))
        if satisfiable and not any((planted[abs(l) - 1] == 1) == (l > 0) for l in clause):
            continue
        clauses.append(clause)
    return CnfFormula(n_vars=n_vars, clauses=tuple(clauses))


# ============================================================
# VERIFICADOR 3-SAT
# ============================================================

def _clause_literals(clause) -> Optional[list[tuple[int, bool]]]:
    """Variables distintas de la cláusula con su signo; None si es una tautología."""
    polarity: dict[int, bool] = {}
    for literal in clause:
        var, positive = abs(literal), literal > 0
        if polarity.get(var, positive) != positive:
            return None
        polarity[var] = positive
    return sorted(polarity.items())


def gen_3sat_verifier(
    formula: CnfFormula,
    amplify: int = 0,
    threshold: Optional[int] = None,
) -> QuantumCircuit:
    """
    Circuito verificador de una fórmula 3-CNF sobre qubits.

    Las variables son las entradas sin inicializar (ids 0..n-1, en orden). Cada
    repetición prepara ⌈log₂ m⌉ monedas con la compuerta COIN; el valor c de las monedas
    elige la cláusula c mod m. Una compuerta de verificación por cláusula invierte la
    bandera si la cláusula elegida es la suya y no se satisface, así que aceptar
    (bandera en |0⟩) ocurre con probabilidad igual a la fracción de valores de moneda
    cuya cláusula se satisface.

    Con amplify = q > 0 se hacen q repeticiones con monedas nuevas; ADD_i suma 1 a un
    contador cuando la repetición i acepta y COMP marca el resultado si el contador
    alcanza el umbral (por defecto ⌈q/2⌉). La salida medida es el resultado en |1⟩.

    Raises:
        InvalidInputError: si amplify o threshold son inválidos
    """
    if amplify < 0:
        raise InvalidInputError("amplify debe ser ≥ 0")
    if amplify and threshold is None:
        threshold = math.ceil(amplify / 2)
    if amplify and not 1 <= threshold <= amplify:
        raise InvalidInputError(f"Umbral {threshold} fuera de 1..{amplify}")

    m = len(formula.clauses)
    coin_wires = math.ceil(math.log2(m)) if m > 1 else 0
    checks = [(j, _clause_literals(clause)) for j, clause in enumerate(formula.clauses)]
    checks = [(j, lits) for j, lits in checks if lits is not None]
    used = {var for _, lits in checks for var, _ in lits}

    b = _CircuitBuilder(d=2)
    b.define("COIN", library.coin(2))
    b.define("TIE", library.identity(2, wires=2))
    for j, lits in checks:
        selectors = [c for c in range(2 ** coin_wires) if c % m == j]
        b.define(f"CLAUSE_{j + 1}", library.clause_check(coin_wires, selectors, [pos for _, pos in lits]))

    x = [b.input("*") for _ in range(formula.n_vars)]
    counter_wires = math.ceil(math.log2(amplify + 1)) if amplify else 0
    counter: list[Head] = []
    if amplify:
        b.define("ADD", library.counter_increment(counter_wires))
        b.define("COMP", library.threshold_comparator(counter_wires, threshold))
        counter = [b.input(0) for _ in range(counter_wires)]

    identity = library.projector(2, 0) + library.projector(2, 1)
    for rep in range(max(1, amplify)):
        flag = b.input(0)
        coins = [b.apply("COIN", [b.input(0)])[0] for _ in range(coin_wires)]
        if rep == 0:
            for var in range(1, formula.n_vars + 1):
                if var not in used:
                    x[var - 1], flag = b.apply("TIE", [x[var - 1], flag])
        if not checks:
            for k in range(coin_wires):
                coins[k], flag = b.apply("TIE", [coins[k], flag])
        for j, lits in checks:
            heads = coins + [x[var - 1] for var, _ in lits] + [flag]
            out = b.apply(f"CLAUSE_{j + 1}", heads)
            coins = out[:coin_wires]
            for (var, _), head in zip(lits, out[coin_wires:-1]):
                x[var - 1] = head
            flag = out[-1]
        for head in coins:
            b.output(head, identity)
        if amplify:
            out = b.apply("ADD", [flag] + counter)
            flag, counter = out[0], out[1:]
            b.output(flag, identity)
        else:
            b.output(flag, library.projector(2, 0))

    if amplify:
        result = b.input(0)
        out = b.apply("COMP", counter + [result])
        for head in out[:-1]:
            b.output(head, identity)
        b.output(out[-1], library.projector(2, 1))
    for head in x:
        b.output(head, identity)

    circuit = b.build()
    logger.info(
        f"Verificador 3-SAT: {formula.n_vars} variables, {m} cláusulas, {coin_wires} monedas, "
        f"{max(1, amplify)} repeticiones, {len(circuit.vertices)} vértices"
    )
    return circuit


# ============================================================
# CIRCUITOS ALEATORIOS
# ============================================================

def _wire_pairs(n_inputs: int, structure: str, rng: np.random.Generator) -> list[tuple[int, int]]:
    if structure == "path":
        return [(w, w + 1) for w in range(n_inputs - 1)]
    if structure == "ladder":
        even = [(w, w + 1) for w in range(0, n_inputs - 1, 2)]
        odd = [(w, w + 1) for w in range(1, n_inputs - 1, 2)]
        return even + odd
    parents = [int(rng.integers(0, w)) for w in range(1, n_inputs)]
    return [(parent, w) for parent, w in zip(parents, range(1, n_inputs))]


def gen_random_circuit(
    n_inputs: int,
    n_gates: int,
    structure: str = "path",
    d: int = 2,
    seed: int = 0,
    n_uninitialized: int = 0,
) -> QuantumCircuit:
    """
    Circuito aleatorio válido y conexo, determinista por semilla.

    Con más de una entrada cada compuerta actúa sobre un par de cables según la
    estructura: `path` recorre los pares vecinos (w, w+1), `ladder` alterna las capas
    pares e impares, `tree` usa las aristas (padre, hijo) de un árbol aleatorio sobre los
    cables. Las primeras n_inputs-1 compuertas conectan todos los cables. Cada compuerta
    es un unitario de Haar o, con probabilidad 1/5, un canal aleatorio de dos operadores
    de Kraus. Las salidas miden elementos 0 ≼ θ ≼ I aleatorios.

    Args:
        n_inputs: Cantidad de entradas (cables)
        n_gates: Cantidad de compuertas
        structure: path | tree | ladder
        d: Dimensión de los qudits
        seed: Semilla del generador
        n_uninitialized: Las primeras k entradas quedan sin inicializar ('*')

    Raises:
        InvalidInputError: si los parámetros no permiten un circuito conexo
    """
    if n_inputs < 1 or n_gates < 0 or d < 2:
        raise InvalidInputError("Parámetros no positivos para el circuito aleatorio")
    if structure not in ("path", "tree", "ladder"):
        raise InvalidInputError(f"Estructura desconocida: {structure}")
    if not 0 <= n_uninitialized <= n_inputs:
        raise InvalidInputError(f"n_uninitialized={n_uninitialized} fuera de 0..{n_inputs}")
    if n_inputs > 1 and n_gates < n_inputs - 1:
        raise InvalidInputError(
            f"Con {n_inputs} entradas se necesitan al menos {n_inputs - 1} compuertas para un circuito conexo"
        )

    rng = np.random.default_rng(seed)
    b = _CircuitBuilder(d=d)
    wires = [
        b.input("*" if k < n_uninitialized else int(rng.integers(0, d)))
        for k in range(n_inputs)
    ]
    pairs = _wire_pairs(n_inputs, structure, rng) if n_inputs > 1 else []

    for j in range(n_gates):
        targets = list(pairs[j % len(pairs)]) if pairs else [0]
        dim = d ** len(targets)
        name = f"G{j + 1}"
        if rng.uniform() < 0.2:
            b.define(name, library.random_channel(dim, 2, rng))
        else:
            b.define(name, library.haar_unitary(dim, rng))
        out = b.apply(name, [wires[w] for w in targets])
        for w, head in zip(targets, out):
            wires[w] = head

    for head in wires:
        b.output(head, library.random_effect(d, rng))

    circuit = b.build()
    logger.debug(f"Circuito aleatorio {structure}: {n_inputs} entradas, {n_gates} compuertas, d={d}, semilla {seed}")
    return circuit
