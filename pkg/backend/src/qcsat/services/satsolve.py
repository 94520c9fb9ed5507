# src/qcsat/services/satsolve.py

import logging
import time
from itertools import product
from typing import Optional, Sequence

from qcsat.core.config import settings
from qcsat.core.errors import InvalidInputError, InvariantError, ResourceLimitError
from qcsat.schemas.circuit import QuantumCircuit
from qcsat.schemas.network import AbstractNetwork, ContractionTree
from qcsat.schemas.simulation import (
    EpsilonChoice,
    FeasibilitySimulation,
    InitializationResult,
    SolveResult,
)
from qcsat.schemas.tensor import NetParams, Tensor, TensorSet
from qcsat.services.circuit import format_assignment, initialize, to_feasibility_network
from qcsat.services.exactsim import acceptance_probability, check_leaf, simulate
from qcsat.services.network import build_good_contraction_tree, tree_stats
from qcsat.services.tensor import leaf_set, set_contract_trunc

logger = logging.getLogger(__name__)


def _growth(d: int, r: int) -> int:
    """Factor de crecimiento del error por nivel: 3·d^(2r) + 1."""
    return 3 * d ** (2 * r) + 1


def _scaled(value: float, factor: int, power: int) -> float:
    """value · factor^power sin desbordar (inf si no cabe en un flotante)."""
    try:
        return value * float(factor ** power)
    except OverflowError:
        return float("inf")


# ============================================================
# ELECCIÓN DE ε
# ============================================================

def choose_epsilon(
    delta: float,
    d: int,
    r: int,
    h: int,
    floor: Optional[float] = None,
) -> EpsilonChoice:
    """
    ε = δ / (3d^(2r)+1)^h con el rango y la altura medidos en el árbol construido.

    Si ε queda por debajo del piso configurado se devuelve el piso y se avisa con la
    garantía que realmente implica.

    Raises:
        InvalidInputError: si δ no está en (0, 1)
    """
    if not 0.0 < delta < 1.0:
        raise InvalidInputError(f"delta={delta} fuera de (0, 1)")
    floor = settings.epsilon_floor if floor is None else floor
    factor = _growth(d, r)
    try:
        epsilon = delta / factor ** h
    except OverflowError:
        epsilon = 0.0

    if epsilon < floor:
        implied = _scaled(floor, factor, h)
        logger.warning(
            f"ε={epsilon:.3g} por debajo del piso {floor:.3g} (d={d}, r={r}, h={h}); "
            f"se usa el piso y la garantía pasa a {implied:.3g}"
        )
        return EpsilonChoice(epsilon=floor, delta=delta, floored=True, bound=implied)
    return EpsilonChoice(epsilon=epsilon, delta=delta, floored=False, bound=_scaled(epsilon, factor, h))


# ============================================================
# SIMULACIÓN ε
# ============================================================

def epsilon_simulate(
    n: AbstractNetwork,
    candidates: Sequence[Sequence[Tensor]],
    tree: ContractionTree,
    p: NetParams,
    threads: int = 1,
    max_size: Optional[int] = None,
) -> FeasibilitySimulation:
    """
    Programación dinámica de conjuntos sobre el árbol.

    Las hojas reciben exactamente Λ(ι(u)); cada nodo interno recibe
    Trunc(Contr(Λ̂(u.l), Λ̂(u.r))). El chequeo de rango de cada nodo tolera el error
    acumulado hasta su altura, ε·(3d^(2r)+1)^altura(u).

    Args:
        n: Red abstracta
        candidates: Conjunto de tensores por posición
        tree: Árbol de contracción válido para n
        p: Parámetros de la red ε
        threads: Hilos para el producto cartesiano de cada nodo
        max_size: Tamaño máximo de cada conjunto (por defecto settings.max_set_size)

    Raises:
        ResourceLimitError: si un conjunto supera el límite (informa nodo y tamaño)
        TensorRangeError: si una entrada sale del rango de la red
    """
    r, h = tree_stats(n, tree)
    if len(candidates) != n.size:
        raise InvalidInputError(f"Se esperaban {n.size} conjuntos y llegaron {len(candidates)}")
    cap = settings.max_set_size if max_size is None else max_size
    d = candidates[0][0].d
    factor = _growth(d, r)
    heights = tree.node_heights

    sets: dict[int, TensorSet] = {}
    for u in tree.postorder():
        if tree.is_leaf(u):
            members = candidates[tree.position[u]]
            for tensor in members:
                check_leaf(n, tree, u, tensor)
            sets[u] = leaf_set(members)
        else:
            tolerance = _scaled(p.epsilon, factor, heights[u])
            try:
                sets[u] = set_contract_trunc(
                    sets[tree.left[u]], sets[tree.right[u]], p,
                    tolerance=tolerance, threads=threads, max_size=cap,
                )
            except ResourceLimitError as e:
                raise ResourceLimitError(
                    f"El conjunto del nodo {u} supera el límite de {cap} tensores",
                    details={**e.details, "node": u, "indices": list(tree.labels[u])},
                )
        logger.debug(f"Nodo {u}: |Λ̂| = {len(sets[u])} sobre {tree.labels[u]}")

    bound = _scaled(p.epsilon, factor, h)
    logger.info(
        f"Simulación ε={p.epsilon:.3g}: rango {r}, altura {h}, cota {bound:.3g}, "
        f"mayor conjunto {max(len(s) for s in sets.values())}"
    )
    return FeasibilitySimulation(tree=tree, params=p, sets=sets, rank=r, height=h, bound=bound)


def extract_initialization(sim: FeasibilitySimulation) -> InitializationResult:
    """
    Reconstruye la inicialización desde el miembro de mayor módulo de la raíz.

    Entre miembros de igual módulo gana el de menor orden de procedencia (el primero).

    Raises:
        InvariantError: si falta o es incoherente la procedencia de algún miembro
    """
    tree = sim.tree
    root_set = sim.root_set
    moduli = [abs(member.scalar()) for member in root_set.members]
    best = max(range(len(moduli)), key=lambda k: (moduli[k], -k))
    alpha = root_set.members[best].scalar()

    choices: dict[int, int] = {}
    stack = [(tree.root, best)]
    while stack:
        u, k = stack.pop()
        tensor_set = sim.sets.get(u)
        if tensor_set is None or not 0 <= k < len(tensor_set):
            raise InvariantError(f"Procedencia rota en el nodo {u} (miembro {k})", details={"node": u})
        i, j = tensor_set.provenance[k]
        if tree.is_leaf(u):
            if j != -1:
                raise InvariantError(f"La hoja {u} tiene procedencia interna ({i}, {j})", details={"node": u})
            choices[tree.position[u]] = i
            continue
        if j < 0:
            raise InvariantError(f"El nodo {u} no registra el par que produjo su miembro {k}", details={"node": u})
        stack.append((tree.right[u], j))
        stack.append((tree.left[u], i))

    positions = sorted(choices)
    if positions != list(range(len(positions))):
        raise InvariantError("La reconstrucción no cubre todas las posiciones de la red")
    return InitializationResult(
        choices=tuple(choices[pos] for pos in positions),
        alpha=alpha,
        root_member=best,
    )


def enumerate_initializations(
    n: AbstractNetwork,
    candidates: Sequence[Sequence[Tensor]],
    tree: ContractionTree,
    limit: int = 4096,
) -> list[tuple[tuple[int, ...], complex]]:
    """
    Escalar exacto de cada inicialización (producto cartesiano en orden lexicográfico).

    Raises:
        ResourceLimitError: si hay más de `limit` inicializaciones
    """
    total = 1
    for members in candidates:
        total *= len(members)
    if total > limit:
        raise ResourceLimitError(
            f"{total} inicializaciones superan el límite de {limit}",
            details={"initializations": total, "limit": limit},
        )
    results = []
    for choice in product(*(range(len(members)) for members in candidates)):
        tensors = [candidates[pos][k] for pos, k in enumerate(choice)]
        results.append((choice, simulate(n, tensors, tree).scalar))
    return results


# ============================================================
# DRIVER
# ============================================================

def solve_classical_assignment(
    c: QuantumCircuit,
    delta: Optional[float] = None,
    epsilon: Optional[float] = None,
    seed: int = 0,
    threads: int = 1,
    max_set_size: Optional[int] = None,
    timings: bool = False,
) -> SolveResult:
    """
    Busca una asignación clásica y de probabilidad de aceptación casi óptima.

    Etapas: red de factibilidad -> árbol de contracción -> elección de ε -> simulación ε
    -> extracción de la inicialización -> decodificación de y -> Pr(C, y) exacta.

    Args:
        c: Circuito válido (las entradas '*' forman y)
        delta: Precisión objetivo; deriva ε del árbol construido
        epsilon: ε fijo; se informa la garantía que implica
        seed: Semilla de la descomposición
        threads: Hilos del producto cartesiano
        max_set_size: Límite de tamaño de cada conjunto
        timings: Incluye el tiempo de reloj en el resultado

    Raises:
        InvalidInputError: si no se da exactamente uno de delta/epsilon o el circuito es inválido
        ResourceLimitError: si un conjunto supera el límite
    """
    if (delta is None) == (epsilon is None):
        raise InvalidInputError("Indique exactamente uno de delta o epsilon")
    if epsilon is not None and not 0.0 < epsilon < 1.0:
        raise InvalidInputError(f"epsilon={epsilon} fuera de (0, 1)")
    started = time.perf_counter()

    fn = to_feasibility_network(c)
    good = build_good_contraction_tree(fn.network, seed=seed)
    r, h = good.rank, good.height
    if delta is not None:
        choice = choose_epsilon(delta, c.d, r, h)
    else:
        choice = EpsilonChoice(epsilon=epsilon, bound=_scaled(epsilon, _growth(c.d, r), h))
    params = NetParams(epsilon=choice.epsilon)

    sim = epsilon_simulate(
        fn.network, fn.candidates, good.tree, params, threads=threads, max_size=max_set_size,
    )
    init = extract_initialization(sim)
    digits = [init.choices[pos] for pos in fn.input_positions]
    y = format_assignment(digits, c.d)

    exact = acceptance_probability(initialize(c, digits), seed=seed)
    deviation = abs(exact.probability - abs(init.alpha))
    if deviation > sim.bound:
        logger.warning(f"|Pr(C,y) - α| = {deviation:.3g} supera la cota {sim.bound:.3g}")

    sizes = [len(sim.sets[u]) for u in good.tree.postorder()]
    logger.info(f"Asignación y={y} con Pr(C,y)={exact.probability:.12g}, α={abs(init.alpha):.12g}")
    return SolveResult(
        y=y,
        digits=digits,
        probability=exact.probability,
        alpha=abs(init.alpha),
        mode="delta" if delta is not None else "epsilon",
        delta=delta,
        epsilon=choice.epsilon,
        epsilon_floored=choice.floored,
        bound=sim.bound,
        certified_bound=2 * sim.bound,
        rank=r,
        height=h,
        treewidth=good.treewidth,
        max_degree=good.max_degree,
        carving_width=good.carving_width,
        contractive_width=good.contractive_width,
        set_sizes=sizes,
        peak_set_size=max(sizes),
        seconds=time.perf_counter() - started if timings else None,
    )
