import numpy as np
import pytest

from qfdiv import states
from qfdiv.errors import InconsistencyError, InputError, NotHermitianError, NotPSDError, PartitionError
from qfdiv.states import make_functional


def test_functional_examples():
    x = make_functional(np.diag([0.5, 0.5]))
    assert x.trace == pytest.approx(1.0) and x.rank == 2
    assert np.allclose(x.support, np.eye(2))
    j = make_functional(np.ones((2, 2)))
    assert j.trace == pytest.approx(2.0) and j.rank == 1
    z = make_functional(np.zeros((3, 3)))
    assert z.trace == 0.0 and z.rank == 0 and np.allclose(z.support, 0)


def test_functional_rejects():
    with pytest.raises(NotPSDError):
        make_functional(np.diag([1.0, -0.5]))
    with pytest.raises(NotHermitianError):
        make_functional(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_rounding_negatives_are_clamped():
    h = np.diag([1.0, -1e-14])
    x = make_functional(h)
    assert x.spectrum.eigenvalues.min() == 0.0
    assert np.allclose(x.h, np.diag([1.0, 0.0]), atol=1e-13)


def test_random_density():
    a = states.random_density(2, 2, seed=5)
    b = states.random_density(2, 2, seed=5)
    assert np.array_equal(a.h, b.h)
    r1 = states.random_density(4, 1, seed=3)
    assert r1.spectrum.eigenvalues[1] <= 1e-12
    assert r1.trace == pytest.approx(1.0, abs=1e-12)
    assert r1.rank == 1
    with pytest.raises(InputError):
        states.random_density(3, 4)


def test_commutes():
    assert states.commutes(make_functional(np.diag([1.0, 2.0])), make_functional(np.diag([3.0, 0.5])))
    assert not states.commutes(make_functional(np.diag([1.0, 0.0])), make_functional(np.ones((2, 2)) / 2))
    r = states.random_density(3, seed=1)
    assert states.commutes(r, r)


def test_dominance_alpha():
    a = states.dominance_alpha(make_functional(np.diag([0.6, 0.4])), make_functional(np.diag([0.5, 0.5])))
    assert a == pytest.approx(1.2)
    r = states.random_density(3, seed=2)
    assert states.dominance_alpha(r, r) == pytest.approx(1.0)
    rho, sigma = make_functional(np.diag([1.5, 0.0])), make_functional(np.ones((2, 2)))
    assert states.dominance_alpha(rho, sigma) is None
    assert not states.support_leq(rho, sigma)


def test_dominance_alpha_is_least_constant():
    rng = np.random.default_rng(0)
    for _ in range(20):
        rho = states.random_density(3, 2, rng)
        sigma = states.random_density(3, 3, rng)
        a = states.dominance_alpha(rho, sigma)
        assert np.linalg.eigvalsh(a * sigma.h - rho.h).min() >= -1e-10
        assert np.linalg.eigvalsh(0.99 * a * sigma.h - rho.h).min() < 0


def test_channel_examples():
    x = make_functional(np.array([[0.6, 0.2 + 0.1j], [0.2 - 0.1j, 0.4]]))
    assert np.allclose(states.apply_predual(states.pinching_channel([[0], [1]], 2), x).h, np.diag([0.6, 0.4]))
    assert np.allclose(states.apply_predual(states.kraus_channel([np.eye(2)]), x).h, x.h)
    y = make_functional(np.diag([0.7, 0.3]))
    comp = states.apply_predual(states.compression_channel([0], 2), y)
    assert comp.dim == 1 and comp.trace == pytest.approx(0.7)


def test_channel_validation():
    with pytest.raises(InputError):
        states.kraus_channel([2 * np.eye(2)])
    with pytest.raises(PartitionError):
        states.pinching_channel([[0]], 2)
    with pytest.raises(InputError):
        states.compression_channel([3], 2)
    with pytest.raises(InputError):
        states.apply_predual(states.pinching_channel([[0], [1]], 2), states.random_density(3))


def test_random_channel_trace_preserving():
    ch = states.random_channel(3, 4, 2, seed=9)
    s = sum(k.conj().T @ k for k in ch.kraus)
    assert np.linalg.norm(s - np.eye(3)) <= 1e-10
    rho = states.random_density(3, seed=1)
    assert states.apply_predual(ch, rho).trace == pytest.approx(1.0, abs=1e-10)
    ch2 = states.random_channel(3, 4, 2, seed=9)
    assert all(np.array_equal(a, b) for a, b in zip(ch.kraus, ch2.kraus))


def test_transpose_output_is_positive_not_cp():
    ch = states.kraus_channel([np.eye(2)], transpose_output=True)
    rho = states.random_density(2, seed=4)
    out = states.apply_predual(ch, rho)
    assert np.allclose(out.h, rho.h.T)
    assert out.spectrum.eigenvalues.min() >= 0


def test_pair_context_examples():
    half = make_functional(np.eye(2) / 2)
    ctx = states.make_pair_context(half, half)
    assert np.allclose(ctx.G, np.eye(2) / 2) and np.allclose(ctx.t, 0.5)
    rho, sigma = make_functional(np.diag([1.5, 0.0])), make_functional(np.ones((2, 2)))
    ctx = states.make_pair_context(rho, sigma)
    assert sorted(ctx.t) == [0.0, 1.0]
    ctx = states.make_pair_context(make_functional(np.diag([1.0, 0.0])), make_functional(np.diag([0.0, 1.0])))
    assert np.allclose(ctx.G, np.diag([1.0, 0.0]))


def test_pair_context_weights_sum_to_total_trace():
    rng = np.random.default_rng(7)
    for _ in range(50):
        d = int(rng.integers(2, 7))
        rho = states.random_density(d, int(rng.integers(1, d + 1)), rng)
        sigma = states.random_density(d, int(rng.integers(1, d + 1)), rng)
        ctx = states.make_pair_context(rho, sigma)
        assert ctx.w.sum() == pytest.approx(2.0, abs=1e-10)
        assert float(ctx.w @ ctx.t) == pytest.approx(1.0, abs=1e-10)
        assert np.all((ctx.t >= 0) & (ctx.t <= 1))


def test_pair_context_inconsistent():
    # spec(G) lies in [0, 1] for PSD sigma, so a negative tolerance is the only way to trip the guard
    rho, sigma = states.random_density(2, seed=1), states.random_density(2, seed=2)
    with pytest.raises(InconsistencyError):
        states.make_pair_context(rho, sigma, snap_tol=-1.0)
