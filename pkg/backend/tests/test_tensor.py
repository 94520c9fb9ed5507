# tests/test_tensor.py

import numpy as np
import pytest

from qcsat.core.errors import InvalidInputError, ResourceLimitError, TensorRangeError
from qcsat.schemas.tensor import NetParams, Tensor
from qcsat.services.tensor import (
    contract,
    distance,
    grid_coordinates,
    leaf_set,
    linf_norm,
    set_contract_trunc,
    trunc,
)


def random_tensor(indices, seed, d=2, scale=1.0):
    rng = np.random.default_rng(seed)
    shape = (d * d,) * len(indices)
    data = rng.uniform(-scale, scale, shape) + 1j * rng.uniform(-scale, scale, shape)
    return Tensor(d=d, indices=tuple(indices), data=data)


def scalar_tensor(value):
    return Tensor(d=2, indices=(), data=np.array(value))


def test_tensor_shape_is_checked():
    with pytest.raises(ValueError):
        Tensor(d=2, indices=(1,), data=np.zeros(3))
    with pytest.raises(ValueError):
        Tensor(d=2, indices=(2, 1), data=np.zeros((4, 4)))


def test_contract_matches_einsum():
    g1 = random_tensor((1, 2), seed=1)
    g2 = random_tensor((2, 3), seed=2)
    result = contract(g1, g2)
    assert result.indices == (1, 3)
    np.testing.assert_allclose(result.data, np.einsum("ab,bc->ac", g1.data, g2.data))


def test_contract_reorders_free_indices():
    g1 = random_tensor((2, 5), seed=3)
    g2 = random_tensor((1, 2), seed=4)
    result = contract(g1, g2)
    assert result.indices == (1, 5)
    np.testing.assert_allclose(result.data, np.einsum("sx,ys->yx", g1.data, g2.data))


def test_contract_to_scalar():
    g1 = random_tensor((4, 7), seed=5)
    g2 = random_tensor((4, 7), seed=6)
    result = contract(g1, g2)
    assert result.rank == 0
    assert result.scalar() == pytest.approx(complex(np.sum(g1.data * g2.data)))


def test_contract_of_vectors_is_a_scalar():
    g = Tensor(d=2, indices=(1,), data=np.ones(4))
    result = contract(g, g)
    assert result.indices == ()
    assert result.data.shape == ()
    assert result.scalar() == 4


def test_contract_requires_shared_index():
    g1 = random_tensor((1,), seed=7)
    g2 = random_tensor((2,), seed=8)
    with pytest.raises(InvalidInputError):
        contract(g1, g2)
    outer = contract(g1, g2, allow_outer=True)
    np.testing.assert_allclose(outer.data, np.outer(g1.data, g2.data))


def test_norms():
    g = Tensor(d=2, indices=(1,), data=np.array([0.1, -0.5j, 0.3 + 0.4j, 0.0]))
    assert linf_norm(g) == pytest.approx(0.5)
    h = Tensor(d=2, indices=(1,), data=np.zeros(4))
    assert distance(g, h) == pytest.approx(0.5)
    with pytest.raises(InvalidInputError):
        distance(g, random_tensor((2,), seed=9))


def test_trunc_rounds_to_grid():
    p = NetParams(epsilon=0.1)
    assert p.step == pytest.approx(0.05)
    assert p.max_steps == 20

    assert trunc(scalar_tensor(0.12 - 0.33j), p).scalar() == pytest.approx(0.1 - 0.35j)
    # Empates al múltiplo par
    assert trunc(scalar_tensor(0.125), p).scalar() == pytest.approx(0.1)
    # Recorte dentro de la tolerancia
    assert trunc(scalar_tensor(1.05), p).scalar() == pytest.approx(1.0)


def test_trunc_error_is_within_epsilon():
    p = NetParams(epsilon=0.01)
    g = random_tensor((1, 2), seed=10, scale=1.0)
    assert distance(g, trunc(g, p)) <= p.epsilon


def test_trunc_rejects_out_of_range():
    p = NetParams(epsilon=0.1)
    with pytest.raises(TensorRangeError):
        trunc(scalar_tensor(1.5), p)
    coords_re, _ = grid_coordinates(scalar_tensor(1.5), p, tolerance=1.0)
    assert int(coords_re) == p.max_steps


def test_leaf_set_drops_exact_repeats():
    a = random_tensor((1,), seed=11)
    b = random_tensor((1,), seed=12)
    tensor_set = leaf_set([a, b, a])
    assert len(tensor_set) == 2
    assert tensor_set.provenance == ((0, -1), (1, -1))
    with pytest.raises(InvalidInputError):
        leaf_set([])


def basis(k):
    data = np.zeros(4)
    data[k * 2 + k] = 1.0
    return Tensor(d=2, indices=(1,), data=data)


def effect(diag):
    theta = np.diag(diag).astype(np.complex128)
    return Tensor(d=2, indices=(1,), data=theta.T.reshape(4))


@pytest.mark.parametrize("threads", [1, 3])
def test_set_contract_trunc_provenance(threads):
    inputs = leaf_set([basis(0), basis(1)])
    measures = leaf_set([effect([0.0, 1.0]), effect([1.0, 1.0])])
    result = set_contract_trunc(inputs, measures, NetParams(epsilon=0.1), threads=threads)
    assert result.indices == ()
    values = [m.scalar() for m in result.members]
    # (0,0) -> 0, (0,1) -> 1, (1,0) -> 1 repetido, (1,1) -> 1 repetido
    assert values == [0, 1]
    assert result.provenance == ((0, 0), (0, 1))


def test_set_contract_trunc_size_limit():
    inputs = leaf_set([basis(0), basis(1)])
    measures = leaf_set([effect([0.0, 1.0])])
    with pytest.raises(ResourceLimitError):
        set_contract_trunc(inputs, measures, NetParams(epsilon=0.1), max_size=1)


def random_index_pair(rng):
    """Dos conjuntos de a lo sumo 3 índices entre 1..5 con al menos uno en común."""
    labels = [int(x) for x in rng.permutation(5) + 1]
    size = int(rng.integers(1, 4))
    shared = int(rng.integers(1, size + 1))
    extra = int(rng.integers(0, 4 - shared))
    return tuple(sorted(labels[:size])), tuple(sorted(labels[:shared] + labels[size:size + extra]))


def perturb(g, radius, rng):
    """Suma a cada entrada un complejo de módulo ≤ radius."""
    shape = g.data.shape
    noise = radius * rng.uniform(0.0, 1.0, shape) * np.exp(1j * rng.uniform(0.0, 2 * np.pi, shape))
    return Tensor(d=g.d, indices=g.indices, data=g.data + noise)


def test_contraction_error_bound():
    rng = np.random.default_rng(2024)
    for trial in range(1000):
        i1, i2 = random_index_pair(rng)
        g1 = random_tensor(i1, seed=2 * trial, scale=0.7)
        g2 = random_tensor(i2, seed=2 * trial + 1, scale=0.7)
        eps = float(rng.uniform(1e-4, 0.1))
        shared = len(set(i1) & set(i2))
        error = distance(contract(g1, g2), contract(perturb(g1, eps, rng), perturb(g2, eps, rng)))
        assert error <= eps * 3 * 4 ** shared + 1e-12, f"ensayo {trial}"


def test_truncated_contraction_error_bound():
    rng = np.random.default_rng(7)
    p = NetParams(epsilon=1e-3)
    for trial in range(300):
        i1, i2 = random_index_pair(rng)
        terms = 4 ** len(set(i1) & set(i2))
        g1 = random_tensor(i1, seed=3000 + 2 * trial, scale=0.7)
        g2 = random_tensor(i2, seed=3001 + 2 * trial, scale=0.7 / terms)
        exact = contract(g1, g2)
        r = max(len(i1), len(i2), exact.rank)
        growth = 3 * 4 ** r + 1
        h = int(rng.integers(0, 2))
        radius = p.epsilon * growth ** h
        limit = p.epsilon * growth ** (h + 1)
        approx = contract(perturb(g1, radius, rng), perturb(g2, radius, rng))
        assert distance(trunc(approx, p, tolerance=limit), exact) <= limit, f"ensayo {trial}"


def test_trunc_distance_and_idempotence():
    rng = np.random.default_rng(11)
    for trial in range(1000):
        p = NetParams(epsilon=float(rng.uniform(1e-3, 0.5)))
        rank = int(rng.integers(0, 3))
        g = random_tensor(tuple(range(1, rank + 1)), seed=5000 + trial, scale=0.7)
        rounded = trunc(g, p)
        assert distance(g, rounded) <= p.epsilon, f"ensayo {trial}"
        assert np.array_equal(trunc(rounded, p).data, rounded.data), f"ensayo {trial}"
