import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from dlrastab.lowrank import LowRankState, orthonormalize, reconstruct, truncated_init

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def tall_matrices(draw, max_n=12, max_r=5):
    r = draw(st.integers(1, max_r))
    n = draw(st.integers(r, max_n))
    return draw(arrays(np.float64, (n, r), elements=finite))


def test_qr_identity_is_fixed():
    Q, R = orthonormalize(np.eye(4)[:, :3])
    np.testing.assert_allclose(Q, np.eye(4)[:, :3], atol=1e-15)
    np.testing.assert_allclose(R, np.eye(3), atol=1e-15)


def test_qr_small_example():
    M = np.array([[3.0, 1.0], [4.0, 2.0], [0.0, 5.0]])
    Q, R = orthonormalize(M)
    np.testing.assert_allclose(Q[:, 0], [0.6, 0.8, 0.0], atol=1e-15)
    assert R[0, 0] == pytest.approx(5.0)
    assert R[0, 1] == pytest.approx(2.2)
    np.testing.assert_allclose(Q @ R, M, atol=1e-13)


def test_qr_rank_deficient_completes_basis():
    v = np.array([1.0, 2.0, 2.0, 0.0])
    M = np.column_stack([v, 2 * v, np.zeros(4)])
    Q, R = orthonormalize(M)
    np.testing.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-13)
    np.testing.assert_allclose(Q @ R, M, atol=1e-13)
    assert np.all(np.diag(R) >= 0)
    np.testing.assert_array_equal(R[1:], 0.0)


def test_qr_zero_matrix():
    Q, R = orthonormalize(np.zeros((5, 2)))
    np.testing.assert_allclose(Q.T @ Q, np.eye(2), atol=1e-14)
    np.testing.assert_array_equal(R, 0.0)


@pytest.mark.parametrize("bad", [np.full((3, 2), np.nan), np.array([[np.inf], [1.0]])])
def test_qr_rejects_nonfinite(bad):
    with pytest.raises(ValueError):
        orthonormalize(bad)


def test_qr_rejects_wide():
    with pytest.raises(ValueError):
        orthonormalize(np.ones((2, 3)))


@given(tall_matrices())
def test_qr_reconstructs_and_is_orthonormal(M):
    Q, R = orthonormalize(M)
    scale = max(1.0, np.linalg.norm(M))
    assert np.linalg.norm(Q.T @ Q - np.eye(M.shape[1])) < 1e-10
    assert np.linalg.norm(Q @ R - M) < 1e-10 * scale
    assert np.allclose(R, np.triu(R))
    assert np.all(np.diag(R) >= 0)


def test_qr_nearly_dependent_columns(rng):
    a = rng.standard_normal(50)
    M = np.column_stack([a, a + 1e-9 * rng.standard_normal(50), rng.standard_normal(50)])
    Q, R = orthonormalize(M)
    assert np.linalg.norm(Q.T @ Q - np.eye(3)) < 1e-10
    assert np.linalg.norm(Q @ R - M) < 1e-12 * np.linalg.norm(M)


def test_state_validation():
    with pytest.raises(ValueError):
        LowRankState(np.ones((4, 2)), np.eye(3), np.ones((3, 2)))
    with pytest.raises(ValueError):
        LowRankState(np.ones((2, 3)), np.eye(3), np.ones((5, 3)))


def test_truncated_init_rank_one():
    x = np.linspace(1.0, 2.0, 6)
    w = np.array([1.0, 0.0, 0.0])
    st_ = truncated_init(np.outer(x, w), 1)
    assert st_.rank == 1
    np.testing.assert_allclose(reconstruct(st_), np.outer(x, w), atol=1e-14)
    assert st_.norm() == pytest.approx(np.linalg.norm(x))


def test_truncated_init_pads_beyond_numerical_rank():
    u = np.outer(np.arange(1.0, 9.0), [1.0, 2.0, 0.0, 1.0])
    st_ = truncated_init(u, 3)
    assert st_.is_orthonormal()
    np.testing.assert_allclose(reconstruct(st_), u, atol=1e-12)
    np.testing.assert_array_equal(st_.S[1:, :], 0.0)


def test_truncated_init_best_approximation(rng):
    u = rng.standard_normal((20, 7))
    sig = np.linalg.svd(u, compute_uv=False)
    st_ = truncated_init(u, 3)
    err = np.linalg.norm(reconstruct(st_) - u)
    assert err == pytest.approx(np.sqrt(np.sum(sig[3:] ** 2)), rel=1e-12)


@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_norm_is_invariant_under_basis_rotation(r, seed):
    g = np.random.default_rng(seed)
    u = g.standard_normal((10, 6))
    s = truncated_init(u, r)
    Qa, _ = np.linalg.qr(g.standard_normal((r, r)))
    Qb, _ = np.linalg.qr(g.standard_normal((r, r)))
    rot = LowRankState(s.X @ Qa, Qa.T @ s.S @ Qb, s.W @ Qb)
    np.testing.assert_allclose(reconstruct(rot), reconstruct(s), atol=1e-12)
    assert rot.norm() == pytest.approx(np.linalg.norm(reconstruct(s)), rel=1e-12)
