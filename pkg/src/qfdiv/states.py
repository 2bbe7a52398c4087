"""Positive functionals (densities), channels acting on them, and pair contexts."""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .errors import InconsistencyError, InputError, NumericalError
from .linalg import SUPPORT_CUTOFF, Spectrum

CLAMP_TOL = 1e-9
DOMINANCE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class PositiveFunctional:
    """PSD density ``h`` with its spectrum, trace and support projection cached."""

    h: np.ndarray
    spectrum: Spectrum
    cutoff: float = SUPPORT_CUTOFF

    @property
    def dim(self):
        return self.h.shape[0]

    @property
    def trace(self):
        return float(np.sum(self.spectrum.eigenvalues))

    @property
    def support_basis(self):
        lam = self.spectrum.eigenvalues
        if lam.size == 0 or lam[0] <= 0:
            return self.spectrum.eigenvectors[:, :0]
        return self.spectrum.eigenvectors[:, lam > self.cutoff * lam[0]]

    @property
    def support(self):
        w = self.support_basis
        return w @ w.conj().T

    @property
    def rank(self):
        return self.support_basis.shape[1]

    def __add__(self, other):
        return make_functional(self.h + other.h)

    def scaled(self, c):
        return make_functional(c * self.h)


def make_functional(h, cutoff=SUPPORT_CUTOFF):
    """Validate and freeze a density.

    Eigenvalues inside the PSD tolerance are clamped to zero and ``h`` is
    rebuilt from the clamped spectrum.
    """
    h = linalg.hermitian(h, tol=1e-10)
    spec = linalg.eig_hermitian(h)
    linalg._check_psd(spec)
    if spec.eigenvalues.size and spec.eigenvalues[-1] < 0:
        spec = Spectrum(np.clip(spec.eigenvalues, 0.0, None), spec.eigenvectors)
        h = linalg.hermitian(spec.reconstruct(), tol=1e-8)
    return PositiveFunctional(h, spec, cutoff)


def random_density(dim, rank=None, seed=0):
    """``sum_k g_k g_k^*`` of ``rank`` complex Gaussian vectors, trace one."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise InputError("need 1 <= rank <= dim")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    h = g @ g.conj().T
    return make_functional(h / np.trace(h).real)


def commutes(rho, sigma, tol=1e-10):
    a, b = rho.h, sigma.h
    comm = np.linalg.norm(a @ b - b @ a)
    return bool(comm <= tol * max(1.0, np.linalg.norm(a) * np.linalg.norm(b)))


def support_leq(rho, sigma, tol=DOMINANCE_TOL):
    """True iff ``s(rho) <= s(sigma)``, i.e. ``(1 - s(sigma)) s(rho)`` vanishes."""
    if rho.rank == 0:
        return True
    leak = rho.support_basis - sigma.support_basis @ (sigma.support_basis.conj().T @ rho.support_basis)
    return bool(np.linalg.norm(leak) <= tol)


def dominance_alpha(rho, sigma):
    """Least ``alpha`` with ``rho <= alpha sigma``, or ``None`` if none exists."""
    if not support_leq(rho, sigma):
        return None
    w = sigma.support_basis
    lam = sigma.spectrum.eigenvalues[: w.shape[1]]
    if w.shape[1] == 0:
        return 0.0
    x = (w.conj().T @ rho.h @ w) / np.sqrt(np.outer(lam, lam))
    return float(linalg.eig_hermitian(x).eigenvalues[0])


@dataclass(frozen=True)
class Channel:
    """A positive trace-preserving map on densities (or a compression).

    ``kind`` is ``kraus``, ``pinching``, ``compression`` or ``restriction``.
    A Kraus channel with ``transpose_output`` set is followed by the transpose
    map, which keeps it positive and trace preserving but not completely positive.
    """

    kind: str
    kraus: Tuple[np.ndarray, ...] = ()
    partition: Tuple[Tuple[int, ...], ...] = ()
    indices: Tuple[int, ...] = ()
    dim_in: Optional[int] = None
    transpose_output: bool = False

    @property
    def dim_out(self):
        if self.kind == "kraus":
            return self.kraus[0].shape[0]
        if self.kind == "compression":
            return len(self.indices)
        return self.dim_in


def kraus_channel(ops: Sequence[np.ndarray], transpose_output=False, tol=1e-10):
    ops = tuple(np.asarray(k, dtype=np.complex128) for k in ops)
    if not ops:
        raise InputError("Kraus channel needs at least one operator")
    d_out, d_in = ops[0].shape
    if any(k.shape != (d_out, d_in) for k in ops):
        raise InputError("Kraus operators must share one shape")
    s = sum(k.conj().T @ k for k in ops)
    if np.linalg.norm(s - np.eye(d_in)) > tol * max(1.0, d_in):
        raise InputError("Kraus operators are not trace preserving (sum K*K != I)")
    return Channel("kraus", kraus=ops, dim_in=d_in, transpose_output=transpose_output)


def pinching_channel(partition, dim):
    return Channel("pinching", partition=linalg.validate_partition(partition, dim), dim_in=dim)


def restriction_channel(partition, dim):
    return Channel("restriction", partition=linalg.validate_partition(partition, dim), dim_in=dim)


def compression_channel(indices, dim):
    idx = tuple(sorted(set(int(i) for i in indices)))
    if not idx or idx[0] < 0 or idx[-1] >= dim:
        raise InputError("compression indices out of range")
    return Channel("compression", indices=idx, dim_in=dim)


def apply_predual(ch: Channel, x: PositiveFunctional) -> PositiveFunctional:
    if x.dim != ch.dim_in:
        raise InputError(f"channel expects dimension {ch.dim_in}, got {x.dim}")
    h = x.h
    if ch.kind == "kraus":
        out = sum(k @ h @ k.conj().T for k in ch.kraus)
        if ch.transpose_output:
            out = out.T
    elif ch.kind in ("pinching", "restriction"):
        out = linalg.pinch(h, ch.partition)
    elif ch.kind == "compression":
        out = h[np.ix_(ch.indices, ch.indices)]
    else:
        raise InputError(f"unknown channel kind {ch.kind!r}")
    return make_functional(out)


def random_channel(dim_in, dim_out, n_kraus, seed=0, transpose_output=False):
    """Seeded Kraus channel normalised by ``K_i -> K_i S^{-1/2}``, ``S = sum K_i^* K_i``."""
    if n_kraus < 1:
        raise InputError("need at least one Kraus operator")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    ops = [rng.standard_normal((dim_out, dim_in)) + 1j * rng.standard_normal((dim_out, dim_in))
           for _ in range(n_kraus)]
    s = sum(k.conj().T @ k for k in ops)
    spec = linalg.eig_hermitian(s)
    if spec.eigenvalues[-1] <= 1e-12 * spec.eigenvalues[0]:
        raise NumericalError("Kraus normaliser is singular")
    inv_sqrt = (spec.eigenvectors / np.sqrt(spec.eigenvalues)) @ spec.eigenvectors.conj().T
    return kraus_channel([k @ inv_sqrt for k in ops], transpose_output=transpose_output)


@dataclass(frozen=True, eq=False)
class PairContext:
    """Shared spectral data for a pair: ``eta = rho + sigma`` and
    ``G = eta^{-1/2} rho eta^{-1/2}`` on the support of ``eta``.

    ``t`` holds the eigenvalues of ``G`` clamped and snapped into ``[0, 1]``;
    ``w`` the spectral weights ``v_k^* eta v_k``.
    """

    rho: PositiveFunctional
    sigma: PositiveFunctional
    eta: np.ndarray
    eta_sqrt: np.ndarray
    eta_support: np.ndarray
    G: np.ndarray
    G_spectrum: Spectrum
    t: np.ndarray
    w: np.ndarray = field(repr=False)


def make_pair_context(rho, sigma, cutoff=SUPPORT_CUTOFF, snap_tol=CLAMP_TOL):
    if rho.dim != sigma.dim:
        raise InputError("rho and sigma must have equal dimensions")
    eta = rho.h + sigma.h
    spec_eta = linalg.eig_hermitian(eta)
    root, inv_root = linalg.sqrt_and_pinv_sqrt(eta, cutoff, spectrum=spec_eta)
    G = linalg.hermitian(inv_root @ rho.h @ inv_root, tol=1e-8)
    gspec = linalg.eig_hermitian(G)
    t = gspec.eigenvalues.copy()
    if t.size and (t[0] > 1.0 + snap_tol or t[-1] < -snap_tol):
        raise InconsistencyError(f"eigenvalues of G leave [0, 1]: [{t[-1]:.3e}, {t[0]:.3e}]")
    t[t <= snap_tol] = 0.0
    t[t >= 1.0 - snap_tol] = 1.0
    v = gspec.eigenvectors
    w = np.einsum("ik,ij,jk->k", v.conj(), eta, v).real
    w = np.clip(w, 0.0, None)
    return PairContext(rho, sigma, eta, root, linalg.support_projection(eta, cutoff, spec_eta),
                       G, gspec, t, w)
