"""Dense complex Hermitian linear algebra.

Matrices are plain ``numpy`` ``complex128`` arrays; :func:`hermitian` is the
single validation/symmetrisation entry point.  Eigendecompositions go
through the cyclic Jacobi kernel in :mod:`qfdiv._kernels`.
"""

from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import ConvergenceError, InfiniteValueError, NotHermitianError, NotPSDError, PartitionError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
SUPPORT_CUTOFF = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class Spectrum(NamedTuple):
    """Eigenvalues (descending) and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def hermitian(a, tol=HERMITIAN_TOL):
    """Return ``(a + a^*)/2`` as a complex array after checking ``a`` is Hermitian.

    The check is relative in Frobenius norm: ``|a - a^*| <= tol * max(1, |a|)``.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotHermitianError("matrix has non-finite entries")
    ah = a.conj().T
    if np.linalg.norm(a - ah) > tol * max(1.0, np.linalg.norm(a)):
        raise NotHermitianError("matrix is not Hermitian")
    return (a + ah) / 2


def eig_hermitian(a):
    """Eigendecomposition of a Hermitian matrix with eigenvalues sorted descending."""
    a = hermitian(a)
    w, v, sweeps, converged = _kernels.jacobi(np.ascontiguousarray(a), JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if not converged:
        raise ConvergenceError(f"Jacobi iteration did not converge in {sweeps} sweeps")
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], v[:, order])


def _check_psd(spec, tol=PSD_TOL):
    lam = spec.eigenvalues
    if lam.size == 0:
        return
    scale = max(abs(lam[0]), abs(lam[-1]))
    if lam[-1] < -tol * scale:
        raise NotPSDError(f"matrix has negative eigenvalue {lam[-1]:.3e}")


def matrix_function(a, g: Callable[[np.ndarray], np.ndarray], spectrum=None):
    """Functional calculus ``U diag(g(lambda)) U^*``.

    ``g`` is applied to the eigenvalue array.  An infinite output raises
    :class:`InfiniteValueError`; callers that need extended values should
    form weighted spectral sums directly.
    """
    spec = spectrum if spectrum is not None else eig_hermitian(a)
    vals = np.asarray(g(spec.eigenvalues), dtype=np.complex128)
    if np.any(np.isinf(vals)):
        raise InfiniteValueError("function takes an infinite value on the spectrum")
    u = spec.eigenvectors
    return hermitian((u * vals) @ u.conj().T, tol=1e-8)


def sqrt_and_pinv_sqrt(a, cutoff=SUPPORT_CUTOFF, spectrum=None):
    """Return ``(a^{1/2}, a^{-1/2})`` with the inverse taken on the support of ``a``.

    Eigenvalues ``<= cutoff * lambda_max`` count as zero in both branches.
    """
    spec = spectrum if spectrum is not None else eig_hermitian(a)
    _check_psd(spec)
    lam = spec.eigenvalues
    keep = _support_mask(lam, cutoff)
    root = np.where(keep, np.sqrt(np.where(keep, lam, 0.0)), 0.0)
    inv = np.where(keep, 1.0 / np.where(keep, root, 1.0), 0.0)
    u = spec.eigenvectors
    return (u * root) @ u.conj().T, (u * inv) @ u.conj().T


def _support_mask(lam, cutoff):
    if lam.size == 0 or lam[0] <= 0:
        return np.zeros(lam.shape, dtype=bool)
    return lam > cutoff * lam[0]


def support_basis(a, cutoff=SUPPORT_CUTOFF, spectrum=None):
    """Columns spanning the support of PSD ``a`` and the matching eigenvalues."""
    spec = spectrum if spectrum is not None else eig_hermitian(a)
    _check_psd(spec)
    keep = _support_mask(spec.eigenvalues, cutoff)
    return spec.eigenvectors[:, keep], spec.eigenvalues[keep]


def support_projection(a, cutoff=SUPPORT_CUTOFF, spectrum=None):
    w, _ = support_basis(a, cutoff, spectrum)
    return w @ w.conj().T


def validate_partition(partition: Sequence[Sequence[int]], dim: int):
    """Return the partition as a tuple of sorted index tuples, or raise."""
    blocks = []
    seen = set()
    for block in partition:
        b = tuple(sorted(int(i) for i in block))
        if not b:
            raise PartitionError("empty block in partition")
        for i in b:
            if i < 0 or i >= dim:
                raise PartitionError(f"index {i} out of range for dimension {dim}")
            if i in seen:
                raise PartitionError(f"index {i} appears in more than one block")
            seen.add(i)
        blocks.append(b)
    if len(seen) != dim:
        raise PartitionError(f"partition does not cover all {dim} indices")
    return tuple(blocks)


def pinch(a, partition):
    """Block-diagonal part ``sum_b P_b a P_b`` for a partition of the coordinates."""
    a = hermitian(a)
    blocks = validate_partition(partition, a.shape[0])
    out = np.zeros_like(a)
    for b in blocks:
        ix = np.ix_(b, b)
        out[ix] = a[ix]
    return out


def direct_sum(a, b):
    a = hermitian(a)
    b = hermitian(b)
    n, m = a.shape[0], b.shape[0]
    out = np.zeros((n + m, n + m), dtype=np.complex128)
    out[:n, :n] = a
    out[n:, n:] = b
    return out
