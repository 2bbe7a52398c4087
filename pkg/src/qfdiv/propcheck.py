"""Seeded property suites for the divergence engines.

Every suite takes ``(trials, seed, tol)`` and returns a :class:`SuiteResult`.
Trial ``i`` of suite ``name`` draws from its own stream
``SeedSequence([seed, crc32(name), i])`` so results do not depend on order.
"""

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from . import divergences as dv
from . import linalg, ocf
from .reverse_tests import evaluate_many, evaluate_reverse_test, minimal_reverse_test, refine_reverse_test, verify_reverse_test
from .states import (
    apply_predual,
    make_functional,
    make_pair_context,
    pinching_channel,
    random_channel,
    random_density,
)

REL_TOL = 1e-8


def default_functions():
    """The six test functions used throughout the suites."""
    return [
        ocf.make_named("xlogx"),
        ocf.make_named("neglog"),
        ocf.make_named("negpower", alpha=0.5),
        ocf.make_named("power", alpha=1.5),
        ocf.make_named("chi2"),
        ocf.make_canonical(0, 0, 0, 0, [(1.0, 1.0)]),
    ]


def finite_endpoint_functions():
    return [ocf.make_canonical(0, 0, 0, 0, [(1.0, 1.0)]), ocf.make_named("negpower", alpha=0.5)]


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    violations: List[Dict] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def record(self, passed, pair=None, **detail):
        self.checks += 1
        if passed:
            return
        if len(self.violations) < 20:
            if pair is not None:
                detail["pair"] = {"rho": pair[0].h.tolist(), "sigma": pair[1].h.tolist()}
            self.violations.append(detail)
        else:
            self.violations.append({k: v for k, v in detail.items() if k in ("trial", "f", "route", "check")})


def trial_rng(seed, name, trial):
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(name.encode()), int(trial)]))


def leq(a, b, tol=REL_TOL):
    """``a <= b`` up to ``tol * max(1, |b|)`` in extended arithmetic."""
    if math.isinf(b):
        return True
    if math.isinf(a):
        return False
    return a <= b + tol * max(1.0, abs(b))


def close(a, b, tol=REL_TOL):
    if math.isinf(a) or math.isinf(b):
        return math.isinf(a) and math.isinf(b)
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


DIMS = (2, 6)


def random_pair(rng, dims=None, full_rank=False):
    dims = DIMS if dims is None else dims
    d = int(rng.integers(dims[0], dims[1] + 1))
    r1 = d if full_rank else int(rng.integers(1, d + 1))
    r2 = d if full_rank else int(rng.integers(1, d + 1))
    return random_density(d, r1, rng), random_density(d, r2, rng)


def random_unitary(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def commuting_pair(rng, dims=(2, 6), rotate=True):
    """Diagonal pair (with random zeros) conjugated by one random unitary."""
    d = int(rng.integers(dims[0], dims[1] + 1))
    p = rng.uniform(0.0, 1.0, d) * (rng.uniform(size=d) > 0.25)
    q = rng.uniform(0.0, 1.0, d) * (rng.uniform(size=d) > 0.25)
    p[0] = max(p[0], 0.1)
    q[-1] = max(q[-1], 0.1)
    p, q = p / p.sum(), q / q.sum()
    u = random_unitary(rng, d) if rotate else np.eye(d)
    rho = make_functional(u @ np.diag(p) @ u.conj().T)
    sigma = make_functional(u @ np.diag(q) @ u.conj().T)
    return rho, sigma, p, q


def random_partition(rng, d):
    perm = rng.permutation(d)
    cuts = np.sort(rng.choice(np.arange(1, d), size=int(rng.integers(0, d)), replace=False)) if d > 1 else []
    return [list(map(int, b)) for b in np.split(perm, cuts)]


def random_chain(rng, d):
    """Partitions from singletons up to one block, each refining the next."""
    blocks = [[i] for i in range(d)]
    chain = [[list(b) for b in blocks]]
    while len(blocks) > 1:
        i, j = sorted(rng.choice(len(blocks), size=2, replace=False))
        merged = blocks[i] + blocks[j]
        blocks = [b for k, b in enumerate(blocks) if k not in (i, j)] + [merged]
        chain.append([list(b) for b in blocks])
    return chain


def suite_transpose(trials, seed, tol=REL_TOL):
    res = SuiteResult("P1")
    fs = default_functions()
    for i in range(trials):
        rho, sigma = random_pair(trial_rng(seed, res.name, i))
        ctx_rs = make_pair_context(rho, sigma)
        ctx_sr = make_pair_context(sigma, rho)
        for f in fs:
            a = dv.maximal_from_context(ctx_sr, f).value
            b = dv.maximal_from_context(ctx_rs, ocf.transpose(f)).value
            res.record(close(a, b, tol), trial=i, pair=(rho, sigma), f=f.label, lhs=a, rhs=b)
    return res


def suite_additivity(trials, seed, tol=REL_TOL):
    res = SuiteResult("P2")
    fs = default_functions()
    for i in range(trials):
        rng = trial_rng(seed, res.name, i)
        r1, s1 = random_pair(rng, (1, 3))
        r2, s2 = random_pair(rng, (1, 3))
        big_r = make_functional(linalg.direct_sum(r1.h, r2.h))
        big_s = make_functional(linalg.direct_sum(s1.h, s2.h))
        for f in fs:
            whole = dv.maximal_f_divergence(big_r, big_s, f).value
            parts = dv.maximal_f_divergence(r1, s1, f).value + dv.maximal_f_divergence(r2, s2, f).value
            res.record(close(whole, parts, tol), trial=i, pair=(big_r, big_s), f=f.label, whole=whole, parts=parts)
    return res


def _random_map(rng, d, kind):
    if kind == "pinching":
        return pinching_channel(random_partition(rng, d), d)
    d_out = int(rng.integers(2, 7))
    n_min = -(-d // d_out)
    return random_channel(d, d_out, int(rng.integers(n_min, n_min + 4)), rng,
                          transpose_output=(kind == "transpose"))


def suite_dpi(trials, seed, tol=REL_TOL):
    res = SuiteResult("P3")
    fs = default_functions()
    for i in range(trials):
        rng = trial_rng(seed, res.name, i)
        rho, sigma = random_pair(rng)
        ctx = make_pair_context(rho, sigma)
        before_max = [dv.maximal_from_context(ctx, f).value for f in fs]
        before_std = [dv.standard_f_divergence(rho, sigma, f).value for f in fs]
        for kind in ("kraus", "pinching", "transpose"):
            ch = _random_map(rng, rho.dim, kind)
            a, b = apply_predual(ch, rho), apply_predual(ch, sigma)
            cout = make_pair_context(a, b)
            for f, m_in, s_in in zip(fs, before_max, before_std):
                m_out = dv.maximal_from_context(cout, f).value
                res.record(leq(m_out, m_in, tol), trial=i, pair=(rho, sigma), f=f.label, map=kind, which="maximal",
                           before=m_in, after=m_out)
                if kind != "transpose":
                    s_out = dv.standard_f_divergence(a, b, f).value
                    res.record(leq(s_out, s_in, tol), trial=i, pair=(rho, sigma), f=f.label, map=kind, which="standard",
                               before=s_in, after=s_out)
    return res


def suite_joint_convexity(trials, seed, tol=REL_TOL):
    res = SuiteResult("P4")
    fs = default_functions()
    for i in range(trials):
        rng = trial_rng(seed, res.name, i)
        d = int(rng.integers(2, 7))
        r1, s1, r2, s2 = (random_density(d, int(rng.integers(1, d + 1)), rng) for _ in range(4))
        c1, c2 = make_pair_context(r1, s1), make_pair_context(r2, s2)
        for lam in (0.25, 0.5, 0.9):
            mix = make_pair_context(make_functional(lam * r1.h + (1 - lam) * r2.h),
                                    make_functional(lam * s1.h + (1 - lam) * s2.h))
            for f in fs:
                lhs = dv.maximal_from_context(mix, f).value
                v1 = dv.maximal_from_context(c1, f).value
                v2 = dv.maximal_from_context(c2, f).value
                rhs = lam * v1 + (1 - lam) * v2
                res.record(leq(lhs, rhs, tol), trial=i, f=f.label, lam=lam, lhs=lhs, rhs=rhs)
    return res


def suite_standard_leq_maximal(trials, seed, tol=REL_TOL, commuting_trials=None):
    res = SuiteResult("P5")
    fs = default_functions()
    for i in range(trials):
        rho, sigma = random_pair(trial_rng(seed, res.name, i))
        ctx = make_pair_context(rho, sigma)
        for f in fs:
            s = dv.standard_f_divergence(rho, sigma, f).value
            m = dv.maximal_from_context(ctx, f).value
            res.record(leq(s, m, tol), trial=i, pair=(rho, sigma), f=f.label, standard=s, maximal=m)
    n_comm = trials if commuting_trials is None else commuting_trials
    for i in range(n_comm):
        rho, sigma, _, _ = commuting_pair(trial_rng(seed, "P5-commuting", i))
        for f in fs:
            s = dv.standard_f_divergence(rho, sigma, f).value
            m = dv.maximal_f_divergence(rho, sigma, f).value
            res.record(close(s, m, tol), trial=i, pair=(rho, sigma), f=f.label, commuting=True, standard=s, maximal=m)
    return res


def suite_quadratic_collapse(trials, seed, tol=REL_TOL):
    res = SuiteResult("P6")
    for i in range(trials):
        rng = trial_rng(seed, res.name, i)
        rho, sigma = random_pair(rng)
        a, b = rng.normal(size=2)
        ctx = make_pair_context(rho, sigma)
        aff = ocf.make_named("affine", a=a, b=b)
        exact = a * sigma.trace + b * rho.trace
        m = dv.maximal_from_context(ctx, aff).value
        s = dv.standard_f_divergence(rho, sigma, aff).value
        res.record(close(m, exact, tol) and close(s, exact, tol), trial=i, pair=(rho, sigma), f=aff.label,
                   maximal=m, standard=s, exact=exact)
        sq = ocf.make_named("square")
        m = dv.maximal_from_context(ctx, sq).value
        s = dv.standard_f_divergence(rho, sigma, sq).value
        res.record(close(m, s, tol), trial=i, pair=(rho, sigma), f="square", maximal=m, standard=s)
    return res


def _disjoint_pair(rng):
    d = int(rng.integers(2, 7))
    k = int(rng.integers(1, d))
    u = random_unitary(rng, d)
    a = np.zeros((d, d), dtype=complex)
    b = np.zeros((d, d), dtype=complex)
    ga = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    gb = rng.standard_normal((d - k, d - k)) + 1j * rng.standard_normal((d - k, d - k))
    a[:k, :k] = ga @ ga.conj().T
    b[k:, k:] = gb @ gb.conj().T
    a, b = u @ a @ u.conj().T, u @ b @ u.conj().T
    return make_functional(a / np.trace(a).real), make_functional(b / np.trace(b).real)


def suite_finiteness(trials, seed, tol=REL_TOL):
    res = SuiteResult("P7")
    fs = finite_endpoint_functions()
    for i in range(trials):
        rng = trial_rng(seed, res.name, i)
        pairs = [random_pair(rng), _disjoint_pair(rng)]
        for rho, sigma in pairs:
            for f in fs:
                v = dv.maximal_f_divergence(rho, sigma, f).value
                res.record(math.isfinite(v), trial=i, pair=(rho, sigma), f=f.label, value=v)
    return res


def suite_routes(trials, seed, tol=REL_TOL, eps_tol=1e-3):
    res = SuiteResult("P8")
    fs = default_functions()
    fin = finite_endpoint_functions()
    for i in range(trials):
        rng = trial_rng(seed, res.name, i)
        d = int(rng.integers(2, 7))
        rho = random_density(d, int(rng.integers(1, d + 1)), rng)
        sigma = random_density(d, d, rng)
        ctx = make_pair_context(rho, sigma)
        for f in fs:
            a = dv.maximal_from_context(ctx, f).value
            b = dv.maximal_closed_form(rho, sigma, f)
            res.record(close(a, b, tol), trial=i, pair=(rho, sigma), f=f.label, route="closed", integral=a, closed=b)
        for f in fin:
            a = dv.maximal_from_context(ctx, f).value
            (b,) = dv.eps_regularized_maximal(rho, sigma, f, [2.0 ** -20])
            res.record(abs(a - b) <= eps_tol, trial=i, pair=(rho, sigma), f=f.label, route="eps", integral=a, eps=b)
    return res


LSC_LADDER = tuple(4 ** k for k in range(1, 21))


def _richardson(values, ratio=4.0):
    """Extrapolate ``v(n)`` to ``n -> inf`` from samples at ``n, ratio n, ratio^2 n, ...``."""
    table = list(values)
    k = 1
    while len(table) > 1:
        table = [(ratio ** k * b - a) / (ratio ** k - 1) for a, b in zip(table, table[1:])]
        k += 1
    return table[0]


def suite_lsc(trials, seed, tol=1e-6):
    """Norm-convergent perturbations ``rho_n = (1-1/n) rho + tau/n`` of full-rank pairs.

    ``n`` runs over ``4, 16, 64, 256, ...`` up to ``4^20``; the limit is read
    off the last three rungs by Richardson extrapolation and must not
    undershoot the value at the limit pair.
    """
    res = SuiteResult("P9")
    fs = default_functions()
    for i in range(trials):
        rng = trial_rng(seed, res.name, i)
        rho, sigma = random_pair(rng, full_rank=True)
        tau = random_density(rho.dim, rho.dim, rng)
        tau2 = random_density(rho.dim, rho.dim, rng)
        ctxs = [make_pair_context(make_functional((1 - 1 / n) * rho.h + tau.h / n),
                                  make_functional((1 - 1 / n) * sigma.h + tau2.h / n)) for n in LSC_LADDER]
        ctx = make_pair_context(rho, sigma)
        for f in fs:
            target = dv.maximal_from_context(ctx, f).value
            tail = _richardson([dv.maximal_from_context(c, f).value for c in ctxs[-3:]])
            res.record(tail >= target - tol * max(1.0, abs(target)), trial=i, pair=(rho, sigma), f=f.label,
                       target=target, tail=tail)
    return res


def classical_renyi(p, q, alpha):
    p, q = np.asarray(p, float), np.asarray(q, float)
    if alpha > 1 and np.any((p > 0) & (q == 0)):
        return math.inf
    both = (p > 0) & (q > 0)
    s = float(np.sum(p[both] ** alpha * q[both] ** (1 - alpha)))
    if s == 0:
        return math.inf
    return math.log(s / p.sum()) / (alpha - 1)


RENYI_ALPHAS = (0.6, 1.3, 1.9, 3.0, 4.0)


def suite_renyi(trials, seed, tol=REL_TOL, alphas=RENYI_ALPHAS):
    res = SuiteResult("P10")
    for i in range(trials):
        rng = trial_rng(seed, res.name, i)
        rho, sigma = random_pair(rng)
        for alpha in alphas:
            s = dv.renyi(rho, sigma, alpha, "sandwiched")
            d = dv.renyi(rho, sigma, alpha, "standard")
            m = dv.renyi(rho, sigma, alpha, "maximal")
            if alpha <= 2:
                ok = leq(s, d, tol) and leq(d, m, tol)
            else:
                ok = leq(s, m, tol) and leq(m, d, tol)
            res.record(ok, trial=i, pair=(rho, sigma), alpha=alpha, sandwiched=s, standard=d, maximal=m)
        rho, sigma, p, q = commuting_pair(rng)
        for alpha in alphas:
            ref = classical_renyi(p, q, alpha)
            vals = [dv.renyi(rho, sigma, alpha, v) for v in dv.RENYI_VARIANTS]
            res.record(all(close(v, ref, tol) for v in vals), trial=i, pair=(rho, sigma), alpha=alpha, commuting=True,
                       classical=ref, values=vals)
    return res


def suite_reverse_tests(trials, seed, tol=REL_TOL, refinements=200):
    res = SuiteResult("RT")
    fs = default_functions()
    for i in range(trials):
        rng = trial_rng(seed, res.name, i)
        rho, sigma = random_pair(rng)
        ctx = make_pair_context(rho, sigma)
        rt = minimal_reverse_test(rho, sigma)
        ver = verify_reverse_test(rt, rho, sigma)
        res.record(ver.ok, trial=i, pair=(rho, sigma), check="verify", residuals=[ver.rho_residual, ver.sigma_residual])
        res.record(abs(float(np.sum(rt.nu)) - (rho.trace + sigma.trace)) <= tol, trial=i, pair=(rho, sigma), check="mass")
        targets = []
        for f in fs:
            m = dv.maximal_from_context(ctx, f).value
            v = evaluate_reverse_test(rt, f)
            targets.append(v)
            res.record(close(v, m, tol), trial=i, pair=(rho, sigma), f=f.label, check="attainment", maximal=m, reverse=v)
        refined = [refine_reverse_test(rt, splits=int(rng.integers(1, 6)), seed=rng) for _ in range(refinements)]
        for f, base in zip(fs, targets):
            for j, v in enumerate(evaluate_many(refined, f)):
                res.record(leq(base, float(v), tol), trial=i, refinement=j, f=f.label, check="minimality",
                           minimal=base, refined=float(v))
    return res


def _nondecreasing(seq, tol):
    return all(leq(a, b, tol) for a, b in zip(seq, seq[1:]))


def random_canonical(rng, with_cd=True, lo=0.1, hi=10.0):
    atoms = [(float(np.exp(rng.uniform(np.log(lo), np.log(hi)))), float(rng.uniform(0.1, 2.0)))
             for _ in range(int(rng.integers(1, 4)))]
    c = float(rng.uniform(0, 1)) if with_cd else 0.0
    d = float(rng.uniform(0, 1)) if with_cd else 0.0
    return ocf.make_canonical(float(rng.normal()), float(rng.normal()), c, d, atoms)


def suite_monotone_limits(trials, seed, tol=REL_TOL):
    res = SuiteResult("MC")
    fs = default_functions()
    n_list = [1, 2, 4, 10, 100, 1000, 10000]
    schedule = [2.0 ** -k for k in range(4, 21)]
    for i in range(trials):
        rng = trial_rng(seed, res.name, i)
        rho, sigma = random_pair(rng)
        ctx = make_pair_context(rho, sigma)
        # approximants: monotone for any canonical f, exact for atoms inside the cutoff window
        f = random_canonical(rng, with_cd=True)
        seq = dv.approximant_sequence(rho, sigma, f, n_list)
        res.record(_nondecreasing(seq, 1e-10), check="approximant-monotone", trial=i, pair=(rho, sigma), seq=seq)
        g = random_canonical(rng, with_cd=False)
        seq = dv.approximant_sequence(rho, sigma, g, n_list)
        full = dv.maximal_from_context(ctx, g).value
        res.record(_nondecreasing(seq, 1e-10) and abs(seq[-1] - full) <= 1e-6 * (1 + abs(full)),
                   check="approximant-limit", trial=i, pair=(rho, sigma), seq=seq, full=full)
        chain = random_chain(rng, rho.dim)
        for h in fs:
            mseq = dv.martingale_sequence(rho, sigma, h, chain)
            full = dv.maximal_from_context(ctx, h).value
            res.record(_nondecreasing(mseq, 1e-9) and close(mseq[-1], full, 1e-10),
                       check="martingale", trial=i, pair=(rho, sigma), f=h.label, seq=mseq, full=full)
        perm = [int(x) for x in rng.permutation(rho.dim)]
        sets = [perm[: k + 1] for k in range(rho.dim)]
        for h in fs:
            cseq = dv.compression_sequence(rho, sigma, h, sets)
            full = dv.maximal_from_context(ctx, h).value
            res.record(close(cseq[-1], full, 1e-10), check="compression", trial=i, pair=(rho, sigma), f=h.label,
                       last=cseq[-1], full=full)
        r = ocf.ratio_sum([(float(np.exp(rng.uniform(-2, 2))), float(rng.uniform(0.1, 2)))
                           for _ in range(int(rng.integers(1, 4)))])
        eseq = dv.eps_regularized_maximal(rho, sigma, r, schedule, mode="sigma")
        res.record(_nondecreasing(eseq, 1e-9), check="eps-monotone", trial=i, pair=(rho, sigma), seq=eseq)
    return res


SUITES: Dict[str, Callable] = {
    "P1": suite_transpose,
    "P2": suite_additivity,
    "P3": suite_dpi,
    "P4": suite_joint_convexity,
    "P5": suite_standard_leq_maximal,
    "P6": suite_quadratic_collapse,
    "P7": suite_finiteness,
    "P8": suite_routes,
    "P9": suite_lsc,
    "P10": suite_renyi,
    "RT": suite_reverse_tests,
    "MC": suite_monotone_limits,
}


def run_suites(names, trials, seed, tol=None, dims=None):
    """Run suites by name; ``dims`` overrides the dimension range of random pairs."""
    global DIMS
    saved = DIMS
    if dims is not None:
        DIMS = (int(dims[0]), int(dims[1]))
    try:
        out = []
        for name in names:
            fn = SUITES[name]
            out.append(fn(trials, seed) if tol is None else fn(trials, seed, tol))
        return out
    finally:
        DIMS = saved
