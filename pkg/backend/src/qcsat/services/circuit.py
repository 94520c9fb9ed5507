# src/qcsat/services/circuit.py

import json
import logging
from collections import Counter
from typing import Optional, Sequence, Union

import networkx as nx
import numpy as np
from pydantic import ValidationError

from qcsat.core.config import settings
from qcsat.core.errors import InvalidInputError
from qcsat.schemas.circuit import (
    CIRCUIT_FORMAT,
    CIRCUIT_VERSION,
    CircuitNetwork,
    CircuitReport,
    CircuitViolation,
    FeasibilityNetwork,
    Gate,
    OrderingReport,
    QuantumCircuit,
    Vertex,
    pairs_to_matrix,
)
from qcsat.schemas.graph import Multigraph
from qcsat.schemas.network import AbstractNetwork
from qcsat.schemas.tensor import Tensor
from qcsat.services.network import make_index_set

logger = logging.getLogger(__name__)

Assignment = Union[str, Sequence[int]]


# ============================================================
# FORMATO DE ARCHIVO
# ============================================================

def _dump(value) -> str:
    return json.dumps(value, ensure_ascii=False)


def format_circuit(c: QuantumCircuit) -> str:
    """
    Imprime el circuito en el formato `qcircuit v1` (JSON con una línea por fila de
    matriz, vértice y arista). Los flotantes usan la representación más corta que
    se relee sin pérdida, así que parse_circuit(format_circuit(c)) == c.
    """
    lines = [
        "{",
        f'  "format": {_dump(CIRCUIT_FORMAT)},',
        f'  "version": {CIRCUIT_VERSION},',
        f'  "d": {c.d},',
    ]

    gate_blocks = []
    for name, matrices in c.gates.items():
        matrix_blocks = []
        for matrix in matrices:
            rows = ",\n".join(f"        {_dump(row)}" for row in matrix)
            matrix_blocks.append(f"      [\n{rows}\n      ]")
        body = ",\n".join(matrix_blocks)
        gate_blocks.append(f"    {_dump(name)}: [\n{body}\n    ]")
    if gate_blocks:
        lines.append('  "gates": {')
        lines.append(",\n".join(gate_blocks))
        lines.append("  },")
    else:
        lines.append('  "gates": {},')

    vertices = [_dump(v.model_dump(mode="json", exclude_none=True)) for v in c.vertices]
    edges = [_dump(e.model_dump(mode="json", by_alias=True)) for e in c.edges]
    for key, items, last in (("vertices", vertices, False), ("edges", edges, True)):
        closing = "  ]" if last else "  ],"
        if items:
            lines.append(f'  "{key}": [')
            lines.append(",\n".join(f"    {item}" for item in items))
            lines.append(closing)
        else:
            lines.append(f'  "{key}": []' + ("" if last else ","))
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> QuantumCircuit:
    """
    Lee un documento `qcircuit v1`.

    Raises:
        InvalidInputError: si el texto no es JSON o no respeta el esquema
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"Documento de circuito mal formado: {e.msg} (línea {e.lineno})")
    if not isinstance(payload, dict):
        raise InvalidInputError("El documento de circuito debe ser un objeto")
    try:
        return QuantumCircuit.model_validate(payload)
    except ValidationError as e:
        errors = [{"loc": [str(x) for x in err["loc"]], "msg": err["msg"]} for err in e.errors()]
        first = errors[0]
        raise InvalidInputError(
            f"Documento de circuito inválido en {'.'.join(first['loc'])}: {first['msg']}",
            details={"errors": errors},
        )


# ============================================================
# VALIDACIÓN
# ============================================================

def _power_of(size: int, d: int) -> Optional[int]:
    k, value = 0, 1
    while value < size:
        value *= d
        k += 1
    return k if value == size and k >= 1 else None


def circuit_gate(c: QuantumCircuit, name: str) -> Gate:
    """
    Compuerta `name` del circuito con su aridad deducida de la forma de Kraus.

    Raises:
        InvalidInputError: si la compuerta no existe o sus matrices no tienen forma d^r × d^q
    """
    if name not in c.gates:
        raise InvalidInputError(f"Compuerta desconocida: {name}")
    matrices = c.gates[name]
    if not matrices:
        raise InvalidInputError(f"La compuerta {name} no tiene operadores de Kraus")
    try:
        kraus = np.stack([pairs_to_matrix(m) for m in matrices])
    except ValueError:
        raise InvalidInputError(f"Los operadores de Kraus de {name} no tienen forma uniforme")
    if kraus.ndim != 3:
        raise InvalidInputError(f"Los operadores de Kraus de {name} no son matrices")
    r = _power_of(kraus.shape[1], c.d)
    q = _power_of(kraus.shape[2], c.d)
    if r is None or q is None:
        raise InvalidInputError(
            f"Kraus de {name} con forma {kraus.shape[1]}×{kraus.shape[2]}, que no es d^r × d^q para d={c.d}"
        )
    return Gate(name=name, d=c.d, n_inputs=q, n_outputs=r, kraus=kraus)


def measurement_violation(theta: np.ndarray, d: int, tolerance: float) -> Optional[str]:
    """Motivo por el que θ no es un elemento de medición 0 ≼ θ ≼ I, o None."""
    if theta.shape != (d, d):
        return f"la matriz de medición tiene forma {theta.shape} en lugar de {d}×{d}"
    if np.max(np.abs(theta - theta.conj().T)) > tolerance:
        return "la matriz de medición no es hermítica"
    eigenvalues = np.linalg.eigvalsh((theta + theta.conj().T) / 2)
    if eigenvalues[0] < -tolerance:
        return f"la matriz de medición no es semidefinida positiva (autovalor {eigenvalues[0]:.3g})"
    if eigenvalues[-1] > 1 + tolerance:
        return f"la matriz de medición no cumple θ ≼ I (autovalor {eigenvalues[-1]:.6g})"
    return None


def _port_counts(c: QuantumCircuit, gates: dict[str, Gate], v: Vertex) -> tuple[int, int]:
    """(puertos de entrada, puertos de salida) esperados para el vértice."""
    if v.kind == "input":
        return 0, 1
    if v.kind == "output":
        return 1, 0
    gate = gates.get(v.gate or "")
    return (gate.n_inputs, gate.n_outputs) if gate else (-1, -1)


def validate_circuit(c: QuantumCircuit) -> CircuitReport:
    """
    Validación estructural y semántica del circuito.

    Comprueba las compuertas (forma y condición de traza), los vértices (inicialización,
    compuerta conocida, medición 0 ≼ θ ≼ I), la inyectividad de ξ, los puertos, que el
    grafo sea acíclico y que el grafo no dirigido subyacente sea conexo.

    Returns:
        CircuitReport con cada violación y el vértice o arista afectado
    """
    tolerance = settings.kraus_tolerance
    violations: list[CircuitViolation] = []

    def add(code: str, message: str, vertex: Optional[int] = None, edge: Optional[int] = None):
        violations.append(CircuitViolation(code=code, message=message, vertex=vertex, edge=edge))

    # Compuertas
    gates: dict[str, Gate] = {}
    for name in c.gates:
        try:
            gate = circuit_gate(c, name)
        except InvalidInputError as e:
            add("GATE_SHAPE", e.message)
            continue
        excess = gate.trace_excess()
        if excess > tolerance:
            add("KRAUS_TRACE", f"La compuerta {name} aumenta la traza: autovalor {1 + excess:.6g} de ΣK†K")
        gates[name] = gate

    # Vértices
    by_id: dict[int, Vertex] = {}
    for v in c.vertices:
        if v.id in by_id:
            add("VERTEX_ID", f"Identificador de vértice repetido: {v.id}", vertex=v.id)
            continue
        by_id[v.id] = v
        if v.kind == "input":
            if v.init is None:
                add("INPUT_INIT", f"La entrada {v.id} no declara init", vertex=v.id)
            elif v.init != "*" and not 0 <= v.init < c.d:
                add("INPUT_INIT", f"La entrada {v.id} tiene init {v.init} fuera de 0..{c.d - 1}", vertex=v.id)
        elif v.kind == "gate":
            if v.gate is None or v.gate not in c.gates:
                add("GATE_UNKNOWN", f"El vértice {v.id} usa la compuerta desconocida {v.gate!r}", vertex=v.id)
        else:
            if v.measure is None:
                add("OUTPUT_MEASURE", f"La salida {v.id} no declara su medición", vertex=v.id)
            else:
                try:
                    theta = pairs_to_matrix(v.measure)
                except ValueError:
                    add("OUTPUT_MEASURE", f"La medición de la salida {v.id} no es una matriz", vertex=v.id)
                    continue
                problem = measurement_violation(theta, c.d, tolerance)
                if problem:
                    add("OUTPUT_MEASURE", f"Salida {v.id}: {problem}", vertex=v.id)

    # Aristas y puertos
    label_counts = Counter(e.label for e in c.edges)
    out_used: Counter = Counter()
    in_used: Counter = Counter()
    directed = nx.DiGraph()
    directed.add_nodes_from(by_id)
    for e in c.edges:
        if e.label <= 0:
            add("EDGE_LABEL", f"Etiqueta de arista no positiva: {e.label}", edge=e.label)
        if label_counts[e.label] > 1:
            add("XI_INJECTIVE", f"La etiqueta {e.label} se asigna a {label_counts[e.label]} aristas", edge=e.label)
        (u, pu), (v, pv) = e.source, e.target
        if u not in by_id or v not in by_id:
            add("EDGE_ENDPOINT", f"La arista {e.label} referencia un vértice inexistente", edge=e.label)
            continue
        if u == v:
            add("EDGE_ENDPOINT", f"La arista {e.label} es un lazo en el vértice {u}", vertex=u, edge=e.label)
            continue
        _, n_out = _port_counts(c, gates, by_id[u])
        n_in, _ = _port_counts(c, gates, by_id[v])
        if by_id[u].kind == "output":
            add("EDGE_DIRECTION", f"La arista {e.label} sale de la salida {u}", vertex=u, edge=e.label)
        elif n_out >= 0 and not 0 <= pu < n_out:
            add("PORT_RANGE", f"La arista {e.label} usa el puerto de salida {pu} de {u}", vertex=u, edge=e.label)
        if by_id[v].kind == "input":
            add("EDGE_DIRECTION", f"La arista {e.label} entra en la entrada {v}", vertex=v, edge=e.label)
        elif n_in >= 0 and not 0 <= pv < n_in:
            add("PORT_RANGE", f"La arista {e.label} usa el puerto de entrada {pv} de {v}", vertex=v, edge=e.label)
        out_used[(u, pu)] += 1
        in_used[(v, pv)] += 1
        directed.add_edge(u, v)

    for v in by_id.values():
        n_in, n_out = _port_counts(c, gates, v)
        if n_in < 0:
            continue
        for port in range(n_in):
            if in_used[(v.id, port)] != 1:
                add("PORT_ARITY", f"El puerto de entrada {port} de {v.id} tiene {in_used[(v.id, port)]} aristas", vertex=v.id)
        for port in range(n_out):
            if out_used[(v.id, port)] != 1:
                add("PORT_ARITY", f"El puerto de salida {port} de {v.id} tiene {out_used[(v.id, port)]} aristas", vertex=v.id)

    if by_id:
        if not nx.is_directed_acyclic_graph(directed):
            add("CYCLE", "El circuito contiene un ciclo dirigido")
        if not nx.is_weakly_connected(directed):
            parts = nx.number_weakly_connected_components(directed)
            add("DISCONNECTED", f"El grafo subyacente tiene {parts} componentes")
    else:
        add("EMPTY", "El circuito no tiene vértices")

    return CircuitReport(
        valid=not violations,
        violations=violations,
        n_vertices=len(c.vertices),
        n_inputs=sum(1 for v in c.vertices if v.kind == "input"),
        n_uninitialized=sum(1 for v in c.vertices if v.kind == "input" and v.init == "*"),
        n_gates=sum(1 for v in c.vertices if v.kind == "gate"),
        n_outputs=sum(1 for v in c.vertices if v.kind == "output"),
    )


def ensure_valid_circuit(c: QuantumCircuit) -> None:
    report = validate_circuit(c)
    if not report.valid:
        first = report.violations[0]
        raise InvalidInputError(f"Circuito inválido: {first.message}", details=report.model_dump())


# ============================================================
# TENSORES DEL CIRCUITO
# ============================================================

def basis_density(d: int, k: int) -> np.ndarray:
    rho = np.zeros((d, d), dtype=np.complex128)
    rho[k, k] = 1.0
    return rho


def density_tensor(rho: np.ndarray, index: int, d: int) -> Tensor:
    """
    Tensor de rango 1 de una matriz densidad: la entrada en σ es tr(ρ·σ†).

    Con σ = |b1⟩⟨b2| la entrada vale ρ[b1, b2], así que el tensor es ρ aplanado por filas.

    Raises:
        InvalidInputError: si ρ no es semidefinida positiva de traza 1
    """
    tolerance = settings.kraus_tolerance
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (d, d):
        raise InvalidInputError(f"Matriz densidad de forma {rho.shape}, se esperaba {d}×{d}")
    if np.max(np.abs(rho - rho.conj().T)) > tolerance:
        raise InvalidInputError("La matriz densidad no es hermítica")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] < -tolerance:
        raise InvalidInputError("La matriz densidad no es semidefinida positiva")
    if abs(np.trace(rho) - 1.0) > tolerance:
        raise InvalidInputError(f"La matriz densidad tiene traza {np.trace(rho).real:.6g}")
    return Tensor(d=d, indices=(index,), data=rho.reshape(d * d))


def measurement_tensor(theta: np.ndarray, index: int, d: int) -> Tensor:
    """Tensor de rango 1 de una salida: la entrada en σ = |b1⟩⟨b2| es tr(θ·σ) = θ[b2, b1]."""
    theta = np.asarray(theta, dtype=np.complex128)
    if theta.shape != (d, d):
        raise InvalidInputError(f"Matriz de medición de forma {theta.shape}, se esperaba {d}×{d}")
    return Tensor(d=d, indices=(index,), data=theta.T.reshape(d * d))


def gate_tensor(gate: Gate, in_indices: Sequence[int], out_indices: Sequence[int]) -> Tensor:
    """
    Tensor de una compuerta.

    Con σ_in = |a⟩⟨a'| y σ_out = |b⟩⟨b'| la entrada es
    tr([Σ_m K_m σ_in K_m†] · σ_out†) = Σ_m K_m[b, a] · conj(K_m[b', a']).
    Al contraer con la densidad de entrada queda Σ_m K_m ρ K_m†, y al contraer con la
    medición queda tr(C(ρ)·θ).

    Args:
        gate: Compuerta con q entradas y r salidas
        in_indices: Etiqueta de la arista de cada puerto de entrada
        out_indices: Etiqueta de la arista de cada puerto de salida

    Raises:
        InvalidInputError: si la aridad no coincide o los índices se repiten
    """
    q, r, d = gate.n_inputs, gate.n_outputs, gate.d
    if len(in_indices) != q or len(out_indices) != r:
        raise InvalidInputError(
            f"La compuerta {gate.name} espera {q} entradas y {r} salidas, "
            f"recibió {len(in_indices)} y {len(out_indices)}"
        )
    labels = list(in_indices) + list(out_indices)
    if len(set(labels)) != len(labels):
        raise InvalidInputError(f"Índices repetidos en la compuerta {gate.name}: {labels}")

    m = gate.kraus.shape[0]
    k = gate.kraus.reshape((m,) + (d,) * (r + q))
    # Subíndices: 0 = m; b = 1..r; a = 1+r..r+q; b' y a' desplazados en r+q
    b = list(range(1, 1 + r))
    a = list(range(1 + r, 1 + r + q))
    b_conj = [x + r + q for x in b]
    a_conj = [x + r + q for x in a]
    out = [x for pair in zip(a, a_conj) for x in pair] + [x for pair in zip(b, b_conj) for x in pair]
    data = np.einsum(k, [0] + b + a, k.conj(), [0] + b_conj + a_conj, out)
    data = data.reshape((d * d,) * (q + r))

    perm = sorted(range(len(labels)), key=lambda i: labels[i])
    data = np.transpose(data, perm)
    return Tensor(d=d, indices=tuple(sorted(labels)), data=np.asarray(data, order="C"))


def _wiring(c: QuantumCircuit) -> dict[int, tuple[list[int], list[int]]]:
    """Por vértice: (etiqueta por puerto de entrada, etiqueta por puerto de salida)."""
    incoming: dict[int, dict[int, int]] = {v.id: {} for v in c.vertices}
    outgoing: dict[int, dict[int, int]] = {v.id: {} for v in c.vertices}
    for e in c.edges:
        outgoing[e.source[0]][e.source[1]] = e.label
        incoming[e.target[0]][e.target[1]] = e.label
    return {
        vid: ([incoming[vid][p] for p in sorted(incoming[vid])], [outgoing[vid][p] for p in sorted(outgoing[vid])])
        for vid in incoming
    }


def _network(c: QuantumCircuit, wiring) -> AbstractNetwork:
    sets = [make_index_set(wiring[v.id][0] + wiring[v.id][1]) for v in c.vertices]
    return AbstractNetwork(sets=tuple(sets))


def _fixed_tensor(c: QuantumCircuit, v: Vertex, wiring, gates: dict[str, Gate]) -> Tensor:
    ins, outs = wiring[v.id]
    if v.kind == "input":
        return density_tensor(basis_density(c.d, v.init), outs[0], c.d)
    if v.kind == "output":
        return measurement_tensor(pairs_to_matrix(v.measure), ins[0], c.d)
    if v.gate not in gates:
        gates[v.gate] = circuit_gate(c, v.gate)
    return gate_tensor(gates[v.gate], ins, outs)


def to_tensor_network(c: QuantumCircuit) -> CircuitNetwork:
    """
    Red de tensores de un circuito inicializado: un conjunto de índices por vértice
    (las etiquetas de sus aristas) con su tensor de entrada, compuerta o medición.

    Raises:
        InvalidInputError: si el circuito es inválido o tiene entradas sin inicializar
    """
    ensure_valid_circuit(c)
    pending = [v.id for v in c.uninitialized]
    if pending:
        raise InvalidInputError(
            f"Entradas sin inicializar {pending}: use to_feasibility_network o initialize",
            details={"uninitialized": pending},
        )
    wiring = _wiring(c)
    gates: dict[str, Gate] = {}
    tensors = tuple(_fixed_tensor(c, v, wiring, gates) for v in c.vertices)
    return CircuitNetwork(
        network=_network(c, wiring),
        tensors=tensors,
        vertex_ids=tuple(v.id for v in c.vertices),
    )


def to_feasibility_network(c: QuantumCircuit) -> FeasibilityNetwork:
    """
    Red de factibilidad: las entradas sin inicializar llevan el conjunto
    {|k⟩⟨k| : k = 0..d-1} en ese orden; el resto de vértices, un único tensor.

    Raises:
        InvalidInputError: si el circuito es inválido
    """
    ensure_valid_circuit(c)
    wiring = _wiring(c)
    gates: dict[str, Gate] = {}
    candidates = []
    input_positions = []
    for position, v in enumerate(c.vertices):
        if v.kind == "input" and v.init == "*":
            index = wiring[v.id][1][0]
            candidates.append(tuple(density_tensor(basis_density(c.d, k), index, c.d) for k in range(c.d)))
            input_positions.append(position)
        else:
            candidates.append((_fixed_tensor(c, v, wiring, gates),))
    return FeasibilityNetwork(
        network=_network(c, wiring),
        candidates=tuple(candidates),
        vertex_ids=tuple(v.id for v in c.vertices),
        input_positions=tuple(input_positions),
    )


# ============================================================
# ASIGNACIONES
# ============================================================

def parse_assignment(y: Assignment, d: int) -> list[int]:
    """
    Dígitos de una asignación. Una cadena usa un carácter por dígito si d ≤ 10 y
    dígitos separados por comas en otro caso.

    Raises:
        InvalidInputError: si algún dígito está fuera de 0..d-1
    """
    if isinstance(y, str):
        text = y.strip()
        try:
            if d > 10:
                digits = [int(part) for part in text.split(",")] if text else []
            else:
                digits = [int(ch) for ch in text]
        except ValueError:
            raise InvalidInputError(f"Asignación mal formada: {y!r}")
    else:
        digits = [int(x) for x in y]
    bad = [x for x in digits if not 0 <= x < d]
    if bad:
        raise InvalidInputError(f"Dígitos fuera de 0..{d - 1} en la asignación: {bad}")
    return digits


def format_assignment(digits: Sequence[int], d: int) -> str:
    if d > 10:
        return ",".join(str(x) for x in digits)
    return "".join(str(x) for x in digits)


def initialize(c: QuantumCircuit, y: Assignment) -> QuantumCircuit:
    """
    Inicializa las entradas '*' con los dígitos de y en orden de vértice.

    Raises:
        InvalidInputError: si la longitud de y no coincide con las entradas sin inicializar
    """
    digits = parse_assignment(y, c.d)
    pending = c.uninitialized
    if len(digits) != len(pending):
        raise InvalidInputError(
            f"La asignación tiene {len(digits)} dígitos y el circuito {len(pending)} entradas sin inicializar"
        )
    values = {v.id: k for v, k in zip(pending, digits)}
    vertices = tuple(
        v.model_copy(update={"init": values[v.id]}) if v.id in values else v for v in c.vertices
    )
    return c.model_copy(update={"vertices": vertices})


# ============================================================
# GRAFO SUBYACENTE Y ANCHO DE CORTE
# ============================================================

def circuit_graph(c: QuantumCircuit) -> Multigraph:
    """Grafo no dirigido subyacente; los vértices se nombran con su id."""
    index = {v.id: i for i, v in enumerate(c.vertices)}
    edges = tuple((index[e.source[0]], index[e.target[0]], e.label) for e in c.edges)
    return Multigraph(n=len(c.vertices), edges=edges, names=tuple(v.id for v in c.vertices))


def cutwidth_of_ordering(c: QuantumCircuit, ordering: Sequence[int]) -> OrderingReport:
    """
    Ancho de corte de un orden de los vértices: máximo, sobre los prefijos, de las
    aristas con un extremo dentro y otro fuera. Informa si el orden es topológico.

    Raises:
        InvalidInputError: si el orden no es una permutación de los vértices
    """
    ids = [v.id for v in c.vertices]
    if sorted(ordering) != sorted(ids) or len(set(ordering)) != len(ids):
        raise InvalidInputError("El orden no es una permutación de los vértices del circuito")
    position = {vid: i for i, vid in enumerate(ordering)}

    delta = [0] * (len(ordering) + 1)
    topological = True
    for e in c.edges:
        a, b = position[e.source[0]], position[e.target[0]]
        if a > b:
            topological = False
        lo, hi = min(a, b), max(a, b)
        delta[lo] += 1
        delta[hi] -= 1

    width = running = 0
    for i in range(len(ordering)):
        running += delta[i]
        width = max(width, running)
    if not topological:
        logger.warning("El orden evaluado no es topológico")
    return OrderingReport(width=width, topological=topological)
