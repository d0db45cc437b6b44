import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varspec.operators import (
    INFINITE,
    DiscreteOperator,
    SpectralWindow,
    as_operator,
    graph_weight,
    norm_V_to_H,
    operator_norm,
    resolvent,
    resolvent_norm,
)

from conftest import random_complex, random_normal_matrix


def test_operator_rejects_bad_shapes():
    with pytest.raises(ValueError):
        DiscreteOperator(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        DiscreteOperator(np.zeros((0, 0)))
    with pytest.raises(ValueError):
        DiscreteOperator(np.array([[np.nan]]))


def test_operator_entries_are_read_only():
    A = DiscreteOperator(np.eye(2))
    with pytest.raises(ValueError):
        A.entries[0, 0] = 5


@pytest.mark.parametrize("A, expected", [
    (np.zeros((2, 2)), np.eye(2)),
    (np.eye(2), math.sqrt(2) * np.eye(2)),
    (np.diag([0.0, 3.0]), np.diag([1.0, math.sqrt(10)])),
])
def test_graph_weight_closed_forms(A, expected):
    W = graph_weight(A).weight
    assert np.allclose(W, expected, atol=1e-14)


def test_operator_norm_examples():
    assert operator_norm(np.eye(3)) == pytest.approx(1.0, abs=1e-15)
    T = np.zeros((3, 4))
    T[1, 2] = 0.1
    assert operator_norm(T) == pytest.approx(0.1, abs=1e-16)
    # T*T = diag(0, 1) for the nilpotent block
    assert operator_norm([[0, 1], [0, 0]]) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        operator_norm(np.zeros((0, 3)))


def test_norm_V_to_H_examples():
    ctx = graph_weight(np.zeros((2, 2)))
    assert norm_V_to_H(np.zeros((2, 2)), ctx) == (0.0, 0.0, 0.0)
    h, lo, hi = norm_V_to_H(np.eye(2), ctx)
    assert (h, lo, hi) == pytest.approx((1.0, 1 / math.sqrt(2), 1.0), abs=1e-15)
    h, lo, hi = norm_V_to_H(np.eye(2), graph_weight(np.diag([0.0, 3.0])))
    assert (h, lo, hi) == pytest.approx((1.0, 1 / math.sqrt(2), 1.0), abs=1e-14)
    with pytest.raises(ValueError):
        norm_V_to_H(np.eye(3), ctx)


def test_resolvent_norm_diagonal_examples():
    A = np.diag([0.0, 2.0])
    s = resolvent_norm(A, 1.0)
    assert s.sigma_min == pytest.approx(1.0) and s.resolvent_norm == pytest.approx(1.0)
    s = resolvent_norm(A, 0.0)
    assert s.sigma_min == 0.0 and s.resolvent_norm == INFINITE and s.is_singular


def test_resolvent_norm_nilpotent_block_matches_explicit_inverse():
    # (0.5 - A)^{-1} = [[2, 4], [0, 2]]; its Gram matrix [[4, 8], [8, 20]] has top eigenvalue 12 + 8 sqrt 2
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    expected = math.sqrt(12 + 8 * math.sqrt(2))
    assert expected == pytest.approx(2 + 2 * math.sqrt(2))
    assert resolvent_norm(A, 0.5).resolvent_norm == pytest.approx(expected, rel=1e-13)
    assert np.allclose(resolvent(A, 0.5), [[2, 4], [0, 2]], atol=1e-14)


def test_resolvent_raises_on_spectrum():
    with pytest.raises(ValueError, match="spectrum"):
        resolvent(np.diag([0.0, 2.0]), 2.0)


def test_window_is_closed_disc():
    w = SpectralWindow(1j, 2.0)
    assert w.contains(1j + 2.0)
    assert not w.contains(1j + 2.0 + 1e-12)
    assert list(w.contains([0, 5])) == [True, False]
    with pytest.raises(ValueError):
        SpectralWindow(0, 0.0)


@given(st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_normal_matrix_resolvent_oracle(n, seed):
    rng = np.random.default_rng(seed)
    A, lam = random_normal_matrix(rng, n)
    z = complex(*rng.standard_normal(2))
    value = resolvent_norm(A, z).resolvent_norm
    assert abs(value - 1 / np.min(np.abs(z - lam))) <= 1e-8 * value


@given(st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_resolvent_norm_dominates_inverse_distance(n, seed):
    rng = np.random.default_rng(seed)
    A = random_complex(rng, (n, n))
    z = complex(*rng.standard_normal(2))
    dist = np.min(np.abs(z - np.linalg.eigvals(A)))
    assert resolvent_norm(A, z).resolvent_norm >= 1 / dist - 1e-8 * (1 / dist)


@given(st.integers(1, 10), st.integers(0, 2**31 - 1))
def test_hermitian_shortcut_matches_svd(n, seed):
    rng = np.random.default_rng(seed)
    B = random_complex(rng, (n, n))
    H = DiscreteOperator(B + B.conj().T)
    assert H.hermitian_eigenvalues is not None
    z = complex(*rng.standard_normal(2))
    sigma = np.linalg.svd(z * np.eye(n) - H.entries, compute_uv=False)[-1]
    assert resolvent_norm(H, z).sigma_min == pytest.approx(sigma, rel=1e-10, abs=1e-12)


@given(st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_graph_weight_squares_to_gram(n, seed):
    rng = np.random.default_rng(seed)
    A = random_complex(rng, (n, n))
    W = graph_weight(A).weight
    gram = np.eye(n) + A.conj().T @ A
    assert np.linalg.norm(W @ W - gram, 2) <= 1e-10 * (1 + np.linalg.norm(A, 2) ** 2)
    assert np.linalg.eigvalsh(W).min() >= 1 - 1e-12


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_norm_V_to_H_bounds_sampled_sum_norm_ratio(m, n, seed):
    rng = np.random.default_rng(seed)
    A = random_complex(rng, (n, n))
    T = random_complex(rng, (m, n))
    _, lower, upper = norm_V_to_H(T, graph_weight(A))
    assert lower <= upper
    for _ in range(100):
        u = random_complex(rng, n)
        ratio = np.linalg.norm(T @ u) / (np.linalg.norm(u) + np.linalg.norm(A @ u))
        assert 0 <= ratio <= upper + 1e-10


def test_as_operator_passthrough():
    A = DiscreteOperator(np.eye(2), label="id")
    assert as_operator(A) is A
    assert as_operator(np.eye(2)).dim == 2
