import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qfdiv import _kernels, linalg
from qfdiv.errors import NotHermitianError, NotPSDError, PartitionError

from conftest import random_hermitian


def test_diagonal_input():
    spec = linalg.eig_hermitian(np.diag([3.0, 1.0]))
    assert np.allclose(spec.eigenvalues, [3, 1])
    assert np.allclose(np.abs(spec.eigenvectors), np.eye(2))


def test_two_by_two_quadratic_formula():
    a = np.array([[2.5, 1.0], [1.0, 1.0]])
    tr, det = 3.5, 2.5 - 1.0
    disc = np.sqrt(tr ** 2 / 4 - det)
    spec = linalg.eig_hermitian(a)
    assert np.allclose(spec.eigenvalues, [tr / 2 + disc, tr / 2 - disc], atol=1e-14)
    assert np.allclose(spec.eigenvalues, [3.0, 0.5], atol=1e-14)


def test_pauli_x():
    assert np.allclose(linalg.eig_hermitian(np.array([[0, 1], [1, 0]])).eigenvalues, [1, -1])


def test_reconstruction_and_unitarity_random():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        a = random_hermitian(rng, n)
        spec = linalg.eig_hermitian(a)
        u = spec.eigenvectors
        assert np.linalg.norm(spec.reconstruct() - a) <= 1e-12 * max(1, np.linalg.norm(a))
        assert np.linalg.norm(u.conj().T @ u - np.eye(n)) <= 1e-12
        assert np.all(np.diff(spec.eigenvalues) <= 0)


def test_matches_lapack_oracle():
    rng = np.random.default_rng(3)
    for n in (2, 5, 8, 16):
        a = random_hermitian(rng, n)
        ours = linalg.eig_hermitian(a).eigenvalues
        ref = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert np.allclose(ours, ref, atol=1e-12 * np.linalg.norm(a))


def test_backends_agree():
    rng = np.random.default_rng(5)
    for n in (1, 2, 3, 7):
        a = np.ascontiguousarray(random_hermitian(rng, n))
        w1, v1, _, ok1 = _kernels.jacobi_loops(a.copy(), linalg.JACOBI_TOL, linalg.JACOBI_MAX_SWEEPS)
        w2, v2, _, ok2 = _kernels.jacobi_numpy(a.copy(), linalg.JACOBI_TOL, linalg.JACOBI_MAX_SWEEPS)
        assert ok1 and ok2
        assert np.allclose(np.sort(w1), np.sort(w2), atol=1e-12)
        for w, v in ((w1, v1), (w2, v2)):
            assert np.allclose((v * w) @ v.conj().T, a, atol=1e-12)


def test_degenerate_eigenvalues():
    rng = np.random.default_rng(8)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    a = (q * np.array([2.0, 2.0, 2.0, -1.0])) @ q.conj().T
    spec = linalg.eig_hermitian(a)
    assert np.allclose(spec.eigenvalues, [2, 2, 2, -1], atol=1e-13)
    assert np.allclose(spec.reconstruct(), a, atol=1e-13)


def test_hermitian_rejects():
    with pytest.raises(NotHermitianError):
        linalg.hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotHermitianError):
        linalg.hermitian(np.ones((2, 3)))
    with pytest.raises(NotHermitianError):
        linalg.hermitian(np.array([[np.nan, 0], [0, 1]]))


def test_matrix_function_examples():
    assert np.allclose(linalg.matrix_function(np.diag([2.0, 3.0]), np.square), np.diag([4, 9]))
    rng = np.random.default_rng(0)
    a = random_hermitian(rng, 4)
    assert np.allclose(linalg.matrix_function(a, lambda x: x), a, atol=1e-12)
    r = linalg.matrix_function(np.array([[2.0, 1.0], [1.0, 2.0]]), np.sqrt)
    assert np.allclose(np.sort(np.linalg.eigvalsh(r)), [1, np.sqrt(3)])
    assert np.allclose(r @ r, [[2, 1], [1, 2]])


def test_sqrt_and_pinv_sqrt():
    r, ri = linalg.sqrt_and_pinv_sqrt(np.eye(2))
    assert np.allclose(r, np.eye(2)) and np.allclose(ri, np.eye(2))
    r, ri = linalg.sqrt_and_pinv_sqrt(np.diag([4.0, 0.0]))
    assert np.allclose(r, np.diag([2, 0])) and np.allclose(ri, np.diag([0.5, 0]))
    j = np.ones((2, 2))
    r, ri = linalg.sqrt_and_pinv_sqrt(j)
    assert np.allclose(r, j / np.sqrt(2))
    assert np.allclose(ri, j / (2 * np.sqrt(2)))
    with pytest.raises(NotPSDError):
        linalg.sqrt_and_pinv_sqrt(np.diag([1.0, -1.0]))


def test_support_projection():
    assert np.allclose(linalg.support_projection(np.diag([0.5, 0, 0])), np.diag([1, 0, 0]))
    assert np.allclose(linalg.support_projection(np.ones((2, 2))), np.ones((2, 2)) / 2)
    assert np.allclose(linalg.support_projection(np.zeros((3, 3))), 0)


def test_pinch_examples():
    a = np.array([[1.0, 2 + 1j], [2 - 1j, 4.0]])
    assert np.allclose(linalg.pinch(a, [[0], [1]]), np.diag([1, 4]))
    assert np.allclose(linalg.pinch(a, [[0, 1]]), a)
    for bad in ([[0]], [[0, 1], [1]], [[0, 2]], [[], [0, 1]]):
        with pytest.raises(PartitionError):
            linalg.pinch(a, bad)


def test_pinch_refinement_chain():
    rng = np.random.default_rng(2)
    a = random_hermitian(rng, 5)
    coarse = [[0, 1, 2], [3, 4]]
    fine = [[0], [1, 2], [3], [4]]
    assert np.allclose(linalg.pinch(linalg.pinch(a, coarse), fine), linalg.pinch(a, fine))


def test_direct_sum():
    assert np.allclose(linalg.direct_sum(np.diag([1.0]), np.diag([2.0])), np.diag([1, 2]))
    rng = np.random.default_rng(4)
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 3)
    s = linalg.direct_sum(a, b)
    assert np.isclose(np.trace(s), np.trace(a) + np.trace(b))
    union = np.sort(np.concatenate([np.linalg.eigvalsh(a), np.linalg.eigvalsh(b)]))
    assert np.allclose(np.sort(linalg.eig_hermitian(s).eigenvalues), union, atol=1e-12)


entries = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def hermitian_matrices(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    re = np.array(draw(st.lists(entries, min_size=n * n, max_size=n * n))).reshape(n, n)
    im = np.array(draw(st.lists(entries, min_size=n * n, max_size=n * n))).reshape(n, n)
    a = re + 1j * im
    return (a + a.conj().T) / 2


@settings(max_examples=200, deadline=None)
@given(hermitian_matrices())
def test_eig_properties(a):
    spec = linalg.eig_hermitian(a)
    scale = max(1.0, np.linalg.norm(a))
    assert np.linalg.norm(spec.reconstruct() - a) <= 1e-12 * scale
    assert np.isclose(spec.eigenvalues.sum(), np.trace(a).real, atol=1e-11 * scale)


@settings(max_examples=100, deadline=None)
@given(hermitian_matrices(), st.integers(0, 2 ** 31))
def test_pinch_properties(a, seed):
    n = a.shape[0]
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, n, size=n)
    part = [list(np.flatnonzero(labels == k)) for k in np.unique(labels)]
    p = linalg.pinch(a, part)
    assert np.allclose(linalg.pinch(p, part), p)
    assert np.isclose(np.trace(p), np.trace(a))


def test_numpy_fallback_selected_by_env_flag():
    import os
    import subprocess
    import sys

    code = ("from qfdiv import backend_name, maximal_f_divergence, make_named, random_density;"
            "r, s = random_density(4, 2, seed=1), random_density(4, seed=2);"
            "print(backend_name(), repr(maximal_f_divergence(r, s, make_named('xlogx')).value))")
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, QFDIV_NUMBA=flag)
        name, val = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout.split()
        outs[name] = float(val)
    assert set(outs) == {"numpy", "numba"}
    assert abs(outs["numpy"] - outs["numba"]) <= 1e-12 * max(1.0, abs(outs["numba"]))
