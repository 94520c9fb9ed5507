# src/qcsat/services/tensor.py

import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import islice, product
from typing import Optional, Sequence

import numpy as np

from qcsat.core.errors import InvalidInputError, ResourceLimitError, TensorRangeError
from qcsat.schemas.tensor import NetParams, Tensor, TensorSet
from qcsat.services.network import intersect_sets, xor_sets

logger = logging.getLogger(__name__)

# Celdas del producto cartesiano evaluadas por lote cuando hay varios hilos
_CHUNK_PER_THREAD = 8


# ============================================================
# CONTRACCIÓN Y NORMAS
# ============================================================

def contract(g1: Tensor, g2: Tensor, allow_outer: bool = False) -> Tensor:
    """
    Contrae g1 y g2 sumando sobre las variables de sus índices compartidos.

    Args:
        g1, g2: Tensores de la misma dimensión d
        allow_outer: Permite intersección vacía (producto exterior)

    Returns:
        Tensor sobre I1 ⊕ I2 en el orden canónico de índices

    Raises:
        InvalidInputError: si las dimensiones difieren o no hay índices compartidos
    """
    if g1.d != g2.d:
        raise InvalidInputError(f"Dimensiones distintas: {g1.d} y {g2.d}")
    shared = intersect_sets(g1.indices, g2.indices)
    if not shared:
        if not allow_outer:
            raise InvalidInputError(
                f"Los tensores sobre {g1.indices} y {g2.indices} no comparten índices"
            )
        logger.debug(f"Producto exterior entre {g1.indices} y {g2.indices}")

    common = set(shared)
    axes1 = [g1.indices.index(i) for i in shared]
    axes2 = [g2.indices.index(i) for i in shared]
    data = np.tensordot(g1.data, g2.data, axes=(axes1, axes2))

    rest = [i for i in g1.indices if i not in common] + [i for i in g2.indices if i not in common]
    perm = sorted(range(len(rest)), key=lambda k: rest[k])
    if perm != list(range(len(rest))):
        data = np.transpose(data, perm)
    return Tensor(d=g1.d, indices=tuple(sorted(rest)), data=np.asarray(data, order="C"))


def linf_norm(g: Tensor) -> float:
    if g.data.size == 0:
        return 0.0
    return float(np.max(np.abs(g.data)))


def distance(g1: Tensor, g2: Tensor) -> float:
    """
    Norma L∞ de la diferencia entrada a entrada.

    Raises:
        InvalidInputError: si los índices o la dimensión no coinciden
    """
    if g1.d != g2.d or g1.indices != g2.indices:
        raise InvalidInputError(
            f"Tensores incomparables: {g1.indices} (d={g1.d}) vs {g2.indices} (d={g2.d})"
        )
    return float(np.max(np.abs(g1.data - g2.data)))


# ============================================================
# TRUNCAMIENTO A LA RED ε
# ============================================================

def grid_coordinates(
    g: Tensor,
    p: NetParams,
    tolerance: Optional[float] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Coordenadas enteras en la rejilla ε/2 de las partes real e imaginaria.

    El redondeo va al múltiplo par en los empates y se recorta a ±floor(2B/ε).

    Raises:
        TensorRangeError: si alguna parte supera B + tolerance (por defecto tolerance = ε)
    """
    slack = p.epsilon if tolerance is None else tolerance
    re, im = g.data.real, g.data.imag
    worst = max(float(np.max(np.abs(re))), float(np.max(np.abs(im))))
    if worst > p.clamp_bound + slack:
        raise TensorRangeError(
            f"Entrada fuera del rango de la red: {worst:.6g} > {p.clamp_bound} + {slack:.3g}",
            details={"indices": list(g.indices), "max_component": worst},
        )
    k = p.max_steps
    coords_re = np.clip(np.rint(re / p.step), -k, k).astype(np.int64)
    coords_im = np.clip(np.rint(im / p.step), -k, k).astype(np.int64)
    return coords_re, coords_im


def _from_grid(d: int, indices, coords_re: np.ndarray, coords_im: np.ndarray, p: NetParams) -> Tensor:
    data = coords_re.astype(np.float64) * p.step + 1j * (coords_im.astype(np.float64) * p.step)
    return Tensor(d=d, indices=indices, data=data)


def trunc(g: Tensor, p: NetParams, tolerance: Optional[float] = None) -> Tensor:
    """
    Redondea g a la red ε; garantiza distance(g, trunc(g)) ≤ ε.

    Raises:
        TensorRangeError: si alguna entrada queda fuera del rango de la red
    """
    coords_re, coords_im = grid_coordinates(g, p, tolerance)
    return _from_grid(g.d, g.indices, coords_re, coords_im, p)


# ============================================================
# CONJUNTOS DE TENSORES
# ============================================================

def leaf_set(tensors: Sequence[Tensor]) -> TensorSet:
    """
    Conjunto de hoja: conserva el orden dado y descarta repetidos exactos.

    Raises:
        InvalidInputError: si el conjunto está vacío o mezcla índices
    """
    if not tensors:
        raise InvalidInputError("Conjunto de tensores vacío")
    first = tensors[0]
    members, provenance, seen = [], [], set()
    for k, tensor in enumerate(tensors):
        if tensor.indices != first.indices or tensor.d != first.d:
            raise InvalidInputError(f"El tensor {k} no comparte índices con el conjunto")
        key = tensor.data.tobytes()
        if key in seen:
            continue
        seen.add(key)
        members.append(tensor)
        provenance.append((k, -1))
    return TensorSet(d=first.d, indices=first.indices, members=tuple(members), provenance=tuple(provenance))


def set_contract_trunc(
    f1: TensorSet,
    f2: TensorSet,
    p: NetParams,
    tolerance: Optional[float] = None,
    threads: int = 1,
    max_size: Optional[int] = None,
) -> TensorSet:
    """
    {trunc(contract(g, g'))} sobre el producto cartesiano, deduplicado por coordenadas
    de rejilla. El orden canónico (i ascendente, luego j) fija la procedencia sea cual
    sea el número de hilos.

    Args:
        f1, f2: Conjuntos con índices compartidos
        p: Parámetros de la red
        tolerance: Holgura del chequeo de rango (por defecto ε)
        threads: Hilos para evaluar las celdas
        max_size: Tamaño máximo permitido del resultado

    Raises:
        ResourceLimitError: si el resultado supera max_size
        TensorRangeError: si alguna contracción sale del rango de la red
    """
    if not intersect_sets(f1.indices, f2.indices):
        raise InvalidInputError(f"Los conjuntos sobre {f1.indices} y {f2.indices} no comparten índices")

    def cell(pair: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        i, j = pair
        return grid_coordinates(contract(f1.members[i], f2.members[j]), p, tolerance)

    cells = product(range(len(f1)), range(len(f2)))
    members: list[Tensor] = []
    provenance: list[tuple[int, int]] = []
    seen: set[bytes] = set()
    indices = xor_sets(f1.indices, f2.indices)

    def consume(pairs, results):
        for pair, (coords_re, coords_im) in zip(pairs, results):
            key = coords_re.tobytes() + coords_im.tobytes()
            if key in seen:
                continue
            seen.add(key)
            members.append(_from_grid(f1.d, indices, coords_re, coords_im, p))
            provenance.append(pair)
            if max_size is not None and len(members) > max_size:
                raise ResourceLimitError(
                    f"El conjunto supera el límite de {max_size} tensores",
                    details={"size": len(members), "limit": max_size},
                )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            while True:
                block = list(islice(cells, threads * _CHUNK_PER_THREAD))
                if not block:
                    break
                consume(block, pool.map(cell, block))
    else:
        for pair in cells:
            consume([pair], [cell(pair)])

    return TensorSet(d=f1.d, indices=indices, members=tuple(members), provenance=tuple(provenance))
