"""Acceptance criteria A1-A8 at their stated sizes and tolerances (seed 7).

Each test prints one ``ACCEPTANCE <id> PASS|FAIL`` line; the lines are
repeated in the pytest terminal summary.  Run standalone with
``python3 tests/test_acceptance.py`` for the lines alone.
"""

import math
import time

import numpy as np

from qfdiv import divergences as dv
from qfdiv import ocf, propcheck
from qfdiv.states import make_functional, make_pair_context, random_density

SEED = 7
TOL = 1e-8
RESULTS = []
_T0 = time.perf_counter()


def report(cid, ok, detail):
    line = f"ACCEPTANCE {cid} {'PASS' if ok else 'FAIL'}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def _count(res, key=None, value=None):
    if key is None:
        return len(res.violations)
    return sum(1 for v in res.violations if v.get(key) == value)


def test_a1_boundary_pair():
    rho = make_functional(np.diag([1.5, 0.0]))
    sigma = make_functional(np.array([[1.0, 1.0], [1.0, 1.0]]))
    ratio = ocf.make_canonical(0, 0, 0, 0, [(1.0, 1.0)])
    xlogx = ocf.make_named("xlogx")
    m = dv.maximal_f_divergence(rho, sigma, ratio)
    s = dv.standard_f_divergence(rho, sigma, ratio)
    f0, finf = ratio.endpoints()
    checks = {
        "maximal masses": abs(m.boundary_zero_mass - 2.0) <= 1e-9 and abs(m.boundary_one_mass - 1.5) <= 1e-9,
        "standard parts": abs(s.boundary_zero_mass * f0 - f0 * 1.0) <= 1e-9
                          and abs(s.boundary_one_mass * finf - finf * 0.75) <= 1e-9,
        "S_hat=3.5": abs(m.value - 3.5) <= 1e-9,
        "xlogx inf": math.isinf(dv.maximal_f_divergence(rho, sigma, xlogx).value)
                     and math.isinf(dv.standard_f_divergence(rho, sigma, xlogx).value),
    }
    bad = [k for k, v in checks.items() if not v]
    assert report("A1", not bad, f"masses ({m.boundary_zero_mass:.12g}, {m.boundary_one_mass:.12g}), "
                  f"standard parts ({s.boundary_zero_mass:.12g}, {s.boundary_one_mass:.12g}), "
                  f"S_hat={m.value:.12g}; failing: {bad or 'none'}")


def test_a2_affine_and_square():
    violations, worst = 0, 0.0
    square = ocf.make_named("square")
    for i in range(200):
        rng = propcheck.trial_rng(SEED, "A2", i)
        rho, sigma = propcheck.random_pair(rng, dims=(2, 6))
        a, b = rng.normal(size=2)
        ctx = make_pair_context(rho, sigma)
        aff = dv.maximal_from_context(ctx, ocf.make_named("affine", a=a, b=b)).value
        err = abs(aff - (a * sigma.trace + b * rho.trace))
        sm, ss = dv.maximal_from_context(ctx, square).value, dv.standard_f_divergence(rho, sigma, square).value
        err_sq = 0.0 if (math.isinf(sm) and math.isinf(ss)) else abs(sm - ss)
        worst = max(worst, err, err_sq)
        violations += (err > TOL) + (err_sq > TOL)
    assert report("A2", violations == 0, f"200 pairs, {violations} violations, max error {worst:.3e}")


def test_a3_inequalities():
    p3 = propcheck.suite_dpi(500, SEED, TOL)
    p4 = propcheck.suite_joint_convexity(500, SEED, TOL)
    p5 = propcheck.suite_standard_leq_maximal(1000, SEED, TOL, commuting_trials=200)
    ok = p3.ok and p4.ok and p5.ok
    assert report("A3", ok, f"P3 {p3.checks} checks/{_count(p3)} violations, P4 {p4.checks}/{_count(p4)}, "
                  f"P5 {p5.checks}/{_count(p5)} (1000 general + 200 commuting trials)")


def test_a4_reverse_tests():
    rt = propcheck.suite_reverse_tests(500, SEED, TOL, refinements=200)
    att = _count(rt, "check", "attainment")
    mini = _count(rt, "check", "minimality")
    other = _count(rt) - att - mini
    assert report("A4", rt.ok, f"{rt.checks} checks; attainment violations {att}, "
                  f"refinement violations {mini}, verification/mass violations {other}")


def test_a5_route_concordance():
    res = propcheck.suite_routes(500, SEED, TOL, eps_tol=1e-3)
    closed = _count(res, "route", "closed")
    eps = [v for v in res.violations if v.get("route") == "eps"]
    worst = max((abs(v["integral"] - v["eps"]) for v in eps if "eps" in v), default=0.0)
    detail = f"closed-form violations {closed}; eps-route violations {len(eps)}"
    if eps:
        detail += (f" (worst |gap| {worst:.4e} at 1e-3 tolerance, "
                   f"f={sorted({v['f'] for v in eps})}, trials={sorted({v['trial'] for v in eps})})")
    ok = res.ok
    assert report("A5", ok, detail)


def test_a6_monotone_convergences():
    res = propcheck.suite_monotone_limits(100, SEED, TOL)
    kinds = ("approximant-monotone", "approximant-limit", "martingale", "compression", "eps-monotone")
    counts = {k: _count(res, "check", k) for k in kinds}
    assert report("A6", res.ok, f"100 trials, violations {counts}")


def test_a7_renyi():
    res = propcheck.suite_renyi(300, SEED, TOL)
    comm = _count(res, "commuting", True)
    assert report("A7", res.ok, f"{res.checks} checks over alpha {list(propcheck.RENYI_ALPHAS)}; "
                  f"ordering violations {_count(res) - comm}, commuting-classical violations {comm}")


def test_a8_matrix_scale():
    """Matrix-scale licence: the integral definition coincides with Tr sigma f(sigma^-1/2 rho sigma^-1/2)."""
    worst, bad = 0.0, 0
    fs = propcheck.default_functions()
    for i in range(50):
        rng = propcheck.trial_rng(SEED, "A8", i)
        rho, sigma = random_density(8, int(rng.integers(1, 9)), rng), random_density(8, 8, rng)
        lam, u = np.linalg.eigh(sigma.h)
        s_inv = (u / np.sqrt(lam)) @ u.conj().T
        mu, v = np.linalg.eigh(s_inv @ rho.h @ s_inv)
        wts = np.real(np.einsum("ik,ij,jk->k", v.conj(), sigma.h, v))
        for f in fs:
            f0 = f.endpoints()[0]
            vals = np.array([f0 if m <= 1e-12 else float(f(m)) for m in mu])
            ref = float(np.sum(wts[wts > 1e-14] * vals[wts > 1e-14]))
            got = dv.maximal_f_divergence(rho, sigma, f).value
            err = abs(got - ref) / max(1.0, abs(ref))
            worst = max(worst, err)
            bad += err > TOL
    elapsed = time.perf_counter() - _T0
    assert report("A8", bad == 0, f"d=8 matrix formula agreement on 50 pairs x {len(fs)} functions, "
                  f"{bad} violations, max rel error {worst:.2e}; acceptance wall time so far {elapsed:.1f}s")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_a"):
            try:
                fn()
            except AssertionError:
                pass
