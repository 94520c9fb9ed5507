# src/qcsat/services/gates.py
"""
Biblioteca de compuertas como listas de operadores de Kraus.

Todas devuelven un arreglo (m, d^r, d^q). Las compuertas clásicas reversibles se
construyen como matrices de permutación sobre la base computacional, con el primer
cable como dígito más significativo.
"""

import logging
import math
from typing import Callable, Sequence

import numpy as np

from qcsat.core.errors import InvalidInputError

logger = logging.getLogger(__name__)


def _digits(value: int, d: int, wires: int) -> list[int]:
    out = []
    for _ in range(wires):
        out.append(value % d)
        value //= d
    return out[::-1]


def _value(digits: Sequence[int], d: int) -> int:
    value = 0
    for x in digits:
        value = value * d + x
    return value


def permutation_gate(d: int, wires: int, mapping: Callable[[list[int]], list[int]]) -> np.ndarray:
    """
    Unitario de permutación |x⟩ -> |mapping(x)⟩ sobre `wires` cables.

    Raises:
        InvalidInputError: si mapping no es una biyección de la base
    """
    dim = d ** wires
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for x in range(dim):
        image = _value(mapping(_digits(x, d, wires)), d)
        matrix[image, x] = 1.0
    if not np.all(matrix.sum(axis=1) == 1):
        raise InvalidInputError("La función de la compuerta clásica no es reversible")
    return matrix[None, :, :]


# ============================================================
# UNITARIOS ELEMENTALES
# ============================================================

def identity(d: int, wires: int = 1) -> np.ndarray:
    return np.eye(d ** wires, dtype=np.complex128)[None, :, :]


def shift_x(d: int) -> np.ndarray:
    """X generalizada: |k⟩ -> |k+1 mod d⟩."""
    return permutation_gate(d, 1, lambda x: [(x[0] + 1) % d])


def fourier(d: int) -> np.ndarray:
    """Transformada de Fourier cuántica de un qudit (Hadamard cuando d = 2)."""
    omega = np.exp(2j * np.pi / d)
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return (omega ** (j * k) / math.sqrt(d))[None, :, :]


def sum_gate(d: int) -> np.ndarray:
    """SUM: |a, b⟩ -> |a, a+b mod d⟩ (CNOT cuando d = 2)."""
    return permutation_gate(d, 2, lambda x: [x[0], (x[0] + x[1]) % d])


def toffoli(d: int) -> np.ndarray:
    """|a, b, c⟩ -> |a, b, c + a·b mod d⟩."""
    return permutation_gate(d, 3, lambda x: [x[0], x[1], (x[2] + x[0] * x[1]) % d])


# ============================================================
# CANALES
# ============================================================

def coin(d: int) -> np.ndarray:
    """
    Moneda: reemplaza cualquier estado por el estado maximalmente mezclado I/d.

    Kraus |k⟩⟨j|/√d para todo j, k; ΣK†K = I.
    """
    kraus = np.zeros((d * d, d, d), dtype=np.complex128)
    for k in range(d):
        for j in range(d):
            kraus[k * d + j, k, j] = 1.0 / math.sqrt(d)
    return kraus


def amplitude_damping(gamma: float) -> np.ndarray:
    if not 0.0 <= gamma <= 1.0:
        raise InvalidInputError(f"gamma={gamma} fuera de [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1 - gamma)]], dtype=np.complex128)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=np.complex128)
    return np.stack([k0, k1])


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unitario aleatorio con distribución de Haar (QR de una matriz gaussiana compleja)."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return (q * phases)[None, :, :]


def random_channel(dim: int, n_kraus: int, rng: np.random.Generator) -> np.ndarray:
    """Canal aleatorio que preserva la traza: bloques de una isometría de Haar."""
    u = haar_unitary(dim * n_kraus, rng)[0]
    isometry = u[:, :dim]
    return isometry.reshape(n_kraus, dim, dim)


# ============================================================
# AMPLIFICADOR: CONTADOR Y COMPARADOR
# ============================================================

def counter_increment(counter_wires: int) -> np.ndarray:
    """
    ADD sobre (bandera, contador): suma 1 al contador (mod 2^k) cuando la bandera es 0,
    es decir, cuando la repetición aceptó. Qubits.
    """
    modulus = 2 ** counter_wires

    def mapping(x: list[int]) -> list[int]:
        flag, value = x[0], _value(x[1:], 2)
        if flag == 0:
            value = (value + 1) % modulus
        return [flag] + _digits(value, 2, counter_wires)

    return permutation_gate(2, 1 + counter_wires, mapping)


def threshold_comparator(counter_wires: int, threshold: int) -> np.ndarray:
    """COMP sobre (contador, resultado): invierte el resultado si contador ≥ threshold."""

    def mapping(x: list[int]) -> list[int]:
        value = _value(x[:-1], 2)
        return x[:-1] + [x[-1] ^ int(value >= threshold)]

    return permutation_gate(2, counter_wires + 1, mapping)


def clause_check(coin_wires: int, selectors: Sequence[int], literals: Sequence[bool]) -> np.ndarray:
    """
    Verificación de una cláusula sobre (monedas, variables, bandera).

    Invierte la bandera cuando el valor de las monedas está en `selectors` y todas las
    variables toman el valor que falsea su literal (la cláusula no se satisface).
    `literals[i]` es True si la i-ésima variable aparece sin negar.
    """
    chosen = set(selectors)
    k = len(literals)

    def mapping(x: list[int]) -> list[int]:
        coins = _value(x[:coin_wires], 2)
        values = x[coin_wires:coin_wires + k]
        unsatisfied = all(v == (0 if positive else 1) for v, positive in zip(values, literals))
        flip = int(coins in chosen and unsatisfied)
        return x[:-1] + [x[-1] ^ flip]

    return permutation_gate(2, coin_wires + k + 1, mapping)


# ============================================================
# ELEMENTOS DE MEDICIÓN
# ============================================================

def projector(d: int, k: int) -> np.ndarray:
    theta = np.zeros((d, d), dtype=np.complex128)
    theta[k, k] = 1.0
    return theta


def random_effect(d: int, rng: np.random.Generator) -> np.ndarray:
    """Elemento 0 ≼ θ ≼ I aleatorio: U diag(λ) U† con λ uniforme en [0, 1]."""
    u = haar_unitary(d, rng)[0]
    theta = (u * rng.uniform(0.0, 1.0, size=d)) @ u.conj().T
    return (theta + theta.conj().T) / 2
