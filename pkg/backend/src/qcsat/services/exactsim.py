# src/qcsat/services/exactsim.py

import logging
from typing import Sequence

from qcsat.core.config import settings
from qcsat.core.errors import InvalidInputError
from qcsat.schemas.circuit import QuantumCircuit
from qcsat.schemas.network import AbstractNetwork, ContractionTree
from qcsat.schemas.simulation import AcceptanceResult, SimulationTrace
from qcsat.schemas.tensor import Tensor
from qcsat.services.circuit import to_tensor_network
from qcsat.services.network import build_good_contraction_tree, tree_stats
from qcsat.services.tensor import contract

logger = logging.getLogger(__name__)


def check_leaf(n: AbstractNetwork, tree: ContractionTree, u: int, tensor: Tensor) -> None:
    position = tree.position[u]
    if tensor.indices != n.sets[position]:
        raise InvalidInputError(
            f"El tensor de la posición {position} está sobre {tensor.indices} y la red espera {n.sets[position]}",
            details={"position": position},
        )


def simulate(
    n: AbstractNetwork,
    tensors: Sequence[Tensor],
    tree: ContractionTree,
    keep_all: bool = False,
) -> SimulationTrace:
    """
    Contrae la red de abajo hacia arriba siguiendo el árbol.

    Los tensores de los hijos se liberan al calcular el padre salvo con keep_all.

    Args:
        n: Red abstracta
        tensors: Un tensor por posición de la red
        tree: Árbol de contracción válido para n
        keep_all: Conserva el tensor de cada nodo en la traza

    Returns:
        SimulationTrace con el escalar de la raíz y su módulo

    Raises:
        InvalidInputError: si el árbol es inválido o un tensor no coincide con su posición
    """
    tree_stats(n, tree)
    if len(tensors) != n.size:
        raise InvalidInputError(f"Se esperaban {n.size} tensores y llegaron {len(tensors)}")
    d = tensors[0].d
    if any(t.d != d for t in tensors):
        raise InvalidInputError("Los tensores tienen dimensiones distintas")

    live: dict[int, Tensor] = {}
    kept: dict[int, Tensor] = {}
    peak = 0
    for u in tree.postorder():
        if tree.is_leaf(u):
            tensor = tensors[tree.position[u]]
            check_leaf(n, tree, u, tensor)
        else:
            tensor = contract(live.pop(tree.left[u]), live.pop(tree.right[u]))
        live[u] = tensor
        peak = max(peak, tensor.rank)
        if keep_all:
            kept[u] = tensor

    root = live[tree.root]
    kept[tree.root] = root
    scalar = root.scalar()
    return SimulationTrace(tensors=kept, scalar=scalar, value=abs(scalar), peak_rank=peak)


def acceptance_probability(c: QuantumCircuit, seed: int = 0) -> AcceptanceResult:
    """
    Probabilidad de aceptación de un circuito inicializado por contracción de su red.

    Raises:
        InvalidInputError: si el circuito es inválido o tiene entradas sin inicializar
    """
    cn = to_tensor_network(c)
    good = build_good_contraction_tree(cn.network, seed=seed)
    trace = simulate(cn.network, cn.tensors, good.tree)

    imag_warning = abs(trace.scalar.imag) > settings.imag_warning_threshold
    if imag_warning:
        logger.warning(f"Parte imaginaria {trace.scalar.imag:.3g} en el valor del circuito")
    if trace.value > 1 + settings.kraus_tolerance:
        logger.warning(f"Probabilidad de aceptación {trace.value:.12g} mayor que 1")
    return AcceptanceResult(
        probability=trace.value,
        scalar_real=trace.scalar.real,
        scalar_imag=trace.scalar.imag,
        imag_warning=imag_warning,
        rank=good.rank,
        height=good.height,
        treewidth=good.treewidth,
    )
