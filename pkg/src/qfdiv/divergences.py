"""Divergence engines.

The maximal f-divergence is evaluated through the spectral measure of
``G = (rho+sigma)^{-1/2} rho (rho+sigma)^{-1/2}``: for eigenpairs
``(t_k, v_k)`` of ``G`` and weights ``w_k = v_k^* (rho+sigma) v_k``,

    S_max(rho || sigma) = sum_k w_k k_f(t_k),    k_f(t) = (1-t) f(t/(1-t)),

with ``k_f(0) = f(0+)`` and ``k_f(1) = f'(inf)``.  This route needs no
support assumptions.  The standard divergence uses the same perspective
weights over pairs of eigenvectors of ``rho`` and ``sigma``.
"""

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from . import linalg
from .errors import DomainError, InputError, PartitionError
from .ocf import INF, Canonical, cutoff_approximant, ext_dot, make_named
from .states import (
    PositiveFunctional,
    commutes,
    make_functional,
    make_pair_context,
    support_leq,
)

ATOM_DROP = 1e-12


@dataclass
class DivergenceReport:
    value: float
    method: str
    boundary_zero_mass: float = 0.0
    boundary_one_mass: float = 0.0
    spectrum_used: List[Tuple[float, float]] = field(default_factory=list)

    def to_json(self):
        return {
            "value": "inf" if math.isinf(self.value) else self.value,
            "method": self.method,
            "boundary_zero_mass": self.boundary_zero_mass,
            "boundary_one_mass": self.boundary_one_mass,
            "spectrum": [[t, w] for t, w in self.spectrum_used],
        }


def _as_functional(x):
    return x if isinstance(x, PositiveFunctional) else make_functional(x)


def _atom_sum(t, w, f, method):
    """Report for ``sum_k w_k k_f(t_k)`` with rounding-dust atoms dropped."""
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    total = float(np.sum(w))
    live = w > ATOM_DROP * max(1.0, total)
    t, w = t[live], w[live]
    value = ext_dot(w, f.perspective(t)) if t.size else 0.0
    return DivergenceReport(
        value=value,
        method=method,
        boundary_zero_mass=float(np.sum(w[t <= 0.0])),
        boundary_one_mass=float(np.sum(w[t >= 1.0])),
        spectrum_used=[(float(a), float(b)) for a, b in zip(t, w)],
    )


def _classical_terms(p, q, f):
    """Per-coordinate ``q f(p/q)`` with the boundary conventions."""
    f0, finf = f.endpoints()
    out = np.zeros(p.shape)
    both = (p > 0) & (q > 0)
    if np.any(both):
        out[both] = q[both] * f.evaluate(p[both] / q[both])
    only_q = (p == 0) & (q > 0)
    only_p = (p > 0) & (q == 0)
    if np.any(only_q):
        out[only_q] = INF if math.isinf(f0) else q[only_q] * f0
    if np.any(only_p):
        out[only_p] = INF if math.isinf(finf) else p[only_p] * finf
    return out


def classical_f_divergence(p, q, nu, f):
    """``sum_k nu_k q_k f(p_k / q_k)`` in extended arithmetic."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if not (p.shape == q.shape == nu.shape):
        raise InputError("p, q and nu must have equal lengths")
    if np.any(p < 0) or np.any(q < 0) or np.any(nu < 0):
        raise InputError("classical divergence needs nonnegative entries")
    return ext_dot(nu, _classical_terms(p, q, f))


def _masked_spectrum(x: PositiveFunctional):
    lam = x.spectrum.eigenvalues.copy()
    r = x.rank
    lam[r:] = 0.0
    return lam, x.spectrum.eigenvectors


def standard_f_divergence(rho, sigma, f):
    """Quasi-entropy ``Tr sigma^{1/2} f(L_rho R_sigma^{-1}) sigma^{1/2}``.

    With ``rho = sum lam_i P_i`` and ``sigma = sum mu_j Q_j``, each pair of
    eigenvectors contributes ``(lam_i + mu_j) |<u_i, w_j>|^2 k_f(lam_i / (lam_i + mu_j))``.
    Pairs with ``lam_i = 0`` collect ``f(0+) Tr sigma (1 - s(rho))`` and pairs with
    ``mu_j = 0`` collect ``f'(inf) Tr rho (1 - s(sigma))``.
    """
    rho, sigma = _as_functional(rho), _as_functional(sigma)
    if rho.dim != sigma.dim:
        raise InputError("rho and sigma must have equal dimensions")
    lam, u = _masked_spectrum(rho)
    mu, v = _masked_spectrum(sigma)
    overlap = np.abs(u.conj().T @ v) ** 2
    total = lam[:, None] + mu[None, :]
    w = total * overlap
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(total > 0, lam[:, None] / np.where(total > 0, total, 1.0), 0.0)
    keep = total > 0
    t[(lam[:, None] > 0) & (mu[None, :] == 0)] = 1.0
    t[(lam[:, None] == 0) & (mu[None, :] > 0)] = 0.0
    return _atom_sum(t[keep], w[keep], f, "standard")


def maximal_from_context(ctx, f):
    return _atom_sum(ctx.t, ctx.w, f, "maximal_integral")


def maximal_f_divergence(rho, sigma, f):
    """Maximal f-divergence via the spectral integral over ``G``."""
    ctx = make_pair_context(_as_functional(rho), _as_functional(sigma))
    return maximal_from_context(ctx, f)


def maximal_closed_form(rho, sigma, f):
    """``Tr sigma f(sigma^{-1/2} rho sigma^{-1/2})`` where the supports allow it.

    If ``s(rho) <= s(sigma)`` fails and ``f'(inf) = inf``, or ``s(sigma) <= s(rho)``
    fails and ``f(0+) = inf``, the value is ``inf``.  Remaining non-nested
    cases fall back to the integral route.
    """
    rho, sigma = _as_functional(rho), _as_functional(sigma)
    f0, finf = f.endpoints()
    if not support_leq(rho, sigma):
        if math.isinf(finf):
            return INF
        return maximal_f_divergence(rho, sigma, f).value
    if math.isinf(f0) and not support_leq(sigma, rho):
        return INF
    wb = sigma.support_basis
    if wb.shape[1] == 0:
        return 0.0
    lam = sigma.spectrum.eigenvalues[: wb.shape[1]]
    scale = 1.0 / np.sqrt(lam)
    x = (wb.conj().T @ rho.h @ wb) * np.outer(scale, scale)
    xs = linalg.eig_hermitian(x)
    vals = xs.eigenvalues.copy()
    top = max(vals[0], 0.0)
    vals[vals <= linalg.SUPPORT_CUTOFF * top] = 0.0
    weights = np.einsum("ik,i,ik->k", xs.eigenvectors.conj(), lam, xs.eigenvectors).real
    zero = vals == 0.0
    fv = np.empty(vals.shape)
    fv[zero] = f0
    if np.any(~zero):
        fv[~zero] = f.evaluate(vals[~zero])
    live = weights > ATOM_DROP * max(1.0, float(np.sum(weights)))
    return ext_dot(weights[live], fv[live])


EPS_MODES = ("eta", "rho", "sigma")


def eps_regularized_maximal(rho, sigma, f, eps_schedule, mode="eta"):
    """Closed-form values along an epsilon perturbation.

    ``mode="eta"``: ``(rho + eps eta || sigma + eps eta)``, ``eta = rho + sigma``;
    ``mode="rho"``: ``(rho + eps sigma || sigma)``;
    ``mode="sigma"``: ``(rho || sigma + eps rho)``.
    """
    rho, sigma = _as_functional(rho), _as_functional(sigma)
    eps = [float(e) for e in eps_schedule]
    if any(e <= 0 for e in eps):
        raise InputError("epsilon values must be positive")
    if any(b > a for a, b in zip(eps, eps[1:])):
        raise InputError("epsilon schedule must be decreasing")
    if mode not in EPS_MODES:
        raise InputError(f"mode must be one of {EPS_MODES}")
    eta = rho.h + sigma.h
    out = []
    for e in eps:
        if mode == "eta":
            a, b = rho.h + e * eta, sigma.h + e * eta
        elif mode == "rho":
            a, b = rho.h + e * sigma.h, sigma.h
        else:
            a, b = rho.h, sigma.h + e * rho.h
        out.append(maximal_closed_form(make_functional(a), make_functional(b), f))
    return out


def d_bs(rho, sigma):
    """Belavkin-Staszewski relative entropy (natural log)."""
    return maximal_f_divergence(rho, sigma, make_named("xlogx")).value


RENYI_VARIANTS = ("standard", "sandwiched", "maximal")


def _power_on_support(x: PositiveFunctional, gamma):
    wb = x.support_basis
    lam = x.spectrum.eigenvalues[: wb.shape[1]]
    return (wb * lam ** gamma) @ wb.conj().T


def _renyi_from_q(q, tr, alpha):
    if math.isinf(q):
        return INF
    if q <= 0:
        if alpha < 1:
            return INF
        raise DomainError("Renyi quasi-entropy vanished for alpha > 1")
    return math.log(q / tr) / (alpha - 1.0)


def renyi_quasi(rho, sigma, alpha, variant):
    """The trace functional ``Q_alpha`` underlying each Renyi variant."""
    if variant == "standard":
        if alpha > 1 and not support_leq(rho, sigma):
            return INF
        lam, u = _masked_spectrum(rho)
        mu, v = _masked_spectrum(sigma)
        overlap = np.abs(u.conj().T @ v) ** 2
        mass = (lam[:, None] + mu[None, :]) * overlap
        live = (lam[:, None] > 0) & (mu[None, :] > 0) & (mass > ATOM_DROP * max(1.0, float(mass.sum())))
        a = np.where(lam > 0, np.where(lam > 0, lam, 1.0) ** alpha, 0.0)
        b = np.where(mu > 0, np.where(mu > 0, mu, 1.0) ** (1.0 - alpha), 0.0)
        return float(np.sum(np.outer(a, b)[live] * overlap[live]))
    if variant == "sandwiched":
        if alpha > 1 and not support_leq(rho, sigma):
            return INF
        gamma = (1.0 - alpha) / (2.0 * alpha)
        s = _power_on_support(sigma, gamma)
        m = linalg.eig_hermitian(s @ rho.h @ s).eigenvalues
        wb = sigma.support_basis
        scale = float(np.max(sigma.spectrum.eigenvalues[: wb.shape[1]] ** (2 * gamma))) * rho.spectrum.eigenvalues[0] \
            if wb.shape[1] else 0.0
        m = np.where(m > ATOM_DROP * scale, m, 0.0)
        return float(np.sum(m ** alpha))
    if variant == "maximal":
        if alpha > 1:
            return maximal_f_divergence(rho, sigma, make_named("power", alpha=alpha)).value
        return -maximal_f_divergence(rho, sigma, make_named("negpower", alpha=alpha)).value
    raise InputError(f"variant must be one of {RENYI_VARIANTS}")


def renyi(rho, sigma, alpha, variant="standard"):
    """Renyi divergence ``log(Q_alpha / Tr rho) / (alpha - 1)``."""
    rho, sigma = _as_functional(rho), _as_functional(sigma)
    alpha = float(alpha)
    if not alpha > 0 or alpha == 1.0:
        raise DomainError("alpha must lie in (0, inf) \\ {1}")
    if rho.trace <= 0:
        raise DomainError("Renyi divergence needs Tr rho > 0")
    return _renyi_from_q(renyi_quasi(rho, sigma, alpha, variant), rho.trace, alpha)


def _measured_value(u, rho_h, sigma_h, f, zero_tol):
    p = np.einsum("ik,ij,jk->k", u.conj(), rho_h, u).real
    q = np.einsum("ik,ij,jk->k", u.conj(), sigma_h, u).real
    p[p <= zero_tol] = 0.0
    q[q <= zero_tol] = 0.0
    return ext_dot(np.ones(p.size), _classical_terms(p, q, f))


def _pair_objective(a, b, theta, phi, f, zero_tol, rest):
    """Objective for a rotation in the (p, q) plane; ``a, b`` are 2x2 blocks."""
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(-1j * phi)

    def diag(m):
        cross = 2.0 * c * s * np.real(m[0, 1] * e)
        return c * c * m[0, 0].real + s * s * m[1, 1].real + cross, \
            s * s * m[0, 0].real + c * c * m[1, 1].real - cross

    p1, p2 = diag(a)
    q1, q2 = diag(b)
    p_all = np.stack([np.atleast_1d(p1), np.atleast_1d(p2)])
    q_all = np.stack([np.atleast_1d(q1), np.atleast_1d(q2)])
    p_all[p_all <= zero_tol] = 0.0
    q_all[q_all <= zero_tol] = 0.0
    terms = _classical_terms(p_all.ravel(), q_all.ravel(), f).reshape(p_all.shape)
    with np.errstate(invalid="ignore"):
        return rest + terms.sum(axis=0)


def _golden(fun, lo, hi, iters=30):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = fun(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _givens(n, p, q, theta, phi):
    r = np.eye(n, dtype=np.complex128)
    c, s = math.cos(theta), math.sin(theta)
    r[p, p] = c
    r[q, q] = c
    r[p, q] = -np.exp(1j * phi) * s
    r[q, p] = np.exp(-1j * phi) * s
    return r


def _ascend(u, rho_h, sigma_h, f, iters, zero_tol):
    n = u.shape[0]
    best = _measured_value(u, rho_h, sigma_h, f, zero_tol)
    thetas = np.linspace(0.0, math.pi / 2, 17)
    phis = np.linspace(0.0, 2 * math.pi, 8, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis)
    tt, pp = tt.ravel(), pp.ravel()
    for _ in range(iters):
        improved = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                if math.isinf(best):
                    return u, best
                cols = u[:, [p, q]]
                a = cols.conj().T @ rho_h @ cols
                b = cols.conj().T @ sigma_h @ cols
                pr = np.einsum("ik,ij,jk->k", u.conj(), rho_h, u).real
                qr = np.einsum("ik,ij,jk->k", u.conj(), sigma_h, u).real
                mask = np.ones(n, dtype=bool)
                mask[[p, q]] = False
                pr[pr <= zero_tol] = 0.0
                qr[qr <= zero_tol] = 0.0
                rest = ext_dot(np.ones(int(mask.sum())), _classical_terms(pr[mask], qr[mask], f))
                vals = _pair_objective(a, b, tt, pp, f, zero_tol, rest)
                k = int(np.argmax(vals))
                th, ph, val = tt[k], pp[k], vals[k]
                th, val1 = _golden(lambda x: float(_pair_objective(a, b, x, ph, f, zero_tol, rest)[0]),
                                   max(th - math.pi / 32, -math.pi / 2), th + math.pi / 32)
                ph, val2 = _golden(lambda x: float(_pair_objective(a, b, th, x, f, zero_tol, rest)[0]),
                                   ph - math.pi / 8, ph + math.pi / 8)
                cand = u @ _givens(n, p, q, th, ph)
                cval = _measured_value(cand, rho_h, sigma_h, f, zero_tol)
                if cval > best + 1e-15 * max(1.0, abs(best)):
                    u, best, improved = cand, cval, True
        if not improved:
            break
    return u, best


def _common_eigenbasis(rho, sigma):
    mix = rho.h + (math.pi / 4.0) * sigma.h
    return linalg.eig_hermitian(mix).eigenvectors


def measured_estimate(rho, sigma, f, restarts=4, iters=3, seed=0):
    """Heuristic lower bound on the projectively measured f-divergence.

    Maximises the classical divergence of the measurement statistics over
    orthonormal bases by Givens-rotation coordinate ascent from several
    starts (eigenbases of ``rho``, ``sigma``, a common eigenbasis when they
    commute, and seeded random unitaries).  Returns ``(value, basis)``.
    """
    rho, sigma = _as_functional(rho), _as_functional(sigma)
    n = rho.dim
    zero_tol = 1e-13 * max(1.0, rho.trace + sigma.trace)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    starts = [sigma.spectrum.eigenvectors, rho.spectrum.eigenvectors]
    exact = []
    if commutes(rho, sigma):
        exact.append(_common_eigenbasis(rho, sigma))
    for _ in range(restarts):
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        qm, r = np.linalg.qr(z)
        starts.append(qm * (np.diag(r) / np.abs(np.diag(r))))
    best_val, best_u = -INF, None
    for u in exact:
        val = _measured_value(u, rho.h, sigma.h, f, zero_tol)
        if val > best_val:
            best_val, best_u = val, u
    for u0 in starts:
        u, val = _ascend(u0.copy(), rho.h, sigma.h, f, iters, zero_tol)
        if val > best_val:
            best_val, best_u = val, u
    return best_val, best_u


def _refines(fine, coarse):
    owner = {}
    for k, block in enumerate(coarse):
        for i in block:
            owner[i] = k
    return all(len({owner[i] for i in block}) == 1 for block in fine)


def martingale_sequence(rho, sigma, f, chain: Sequence[Sequence[Sequence[int]]]):
    """Maximal divergence of the restrictions to increasing block-diagonal algebras.

    ``chain[i]`` must refine ``chain[i+1]``; the trivial partition (one block)
    is the full matrix algebra.
    """
    rho, sigma = _as_functional(rho), _as_functional(sigma)
    parts = [linalg.validate_partition(p, rho.dim) for p in chain]
    for fine, coarse in zip(parts, parts[1:]):
        if not _refines(fine, coarse):
            raise PartitionError("each partition must refine the next one in the chain")
    out = []
    for part in parts:
        a = make_functional(linalg.pinch(rho.h, part))
        b = make_functional(linalg.pinch(sigma.h, part))
        out.append(maximal_f_divergence(a, b, f).value)
    return out


def compression_sequence(rho, sigma, f, index_chain: Sequence[Sequence[int]]):
    """Maximal divergence of compressions ``rho[S, S]`` along increasing index sets."""
    rho, sigma = _as_functional(rho), _as_functional(sigma)
    sets = [tuple(sorted(set(int(i) for i in s))) for s in index_chain]
    if not sets:
        raise InputError("index chain is empty")
    for a, b in zip(sets, sets[1:]):
        if not (set(a) < set(b)):
            raise InputError("index chain must be strictly increasing")
    if sets[-1] != tuple(range(rho.dim)):
        raise InputError("index chain must end with all indices")
    if sets[0] and sets[0][0] < 0:
        raise InputError("negative index in chain")
    out = []
    for s in sets:
        ix = np.ix_(s, s)
        out.append(maximal_f_divergence(make_functional(rho.h[ix]), make_functional(sigma.h[ix]), f).value)
    return out


def approximant_sequence(rho, sigma, f: Canonical, n_list):
    """Maximal divergences of the cutoff approximants ``f_n`` (nondecreasing in ``n``)."""
    if not isinstance(f, Canonical):
        raise InputError("approximant sequences need a canonical function")
    ctx = make_pair_context(_as_functional(rho), _as_functional(sigma))
    return [maximal_from_context(ctx, cutoff_approximant(f, n)).value for n in n_list]
