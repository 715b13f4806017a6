"""Acceptance gate: one test per criterion, each at its pinned tolerance.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
"""

import math
import time

import numpy as np
import pytest

from tantheta.certify import (
    FailureReason,
    block_partition,
    canonical_counterexample,
    certify_apriori,
    delta_r,
    exact_subspace,
    residual,
)
from tantheta.ensemble import (
    InstanceSpec,
    random_sweep_specs,
    run_sweep,
    sharpness_probe,
    synth_instance,
)
from tantheta.linalg import (
    OrthonormalFrame,
    hermitian_spectrum,
    principal_angles,
    spectral_norm,
    validate_hermitian,
)

from conftest import random_frame, random_hermitian

RESULTS = {}


def record(cid, ok, detail):
    RESULTS[cid] = (bool(ok), detail)
    assert ok, f"criterion {cid} failed: {detail}"


@pytest.fixture(scope="module")
def sweep():
    specs = random_sweep_specs(1000, master_seed=20240601, n_range=(4, 64), eps_range=(1e-6, 0.3))
    t0 = time.perf_counter()
    res = run_sweep(specs)
    return res, time.perf_counter() - t0


def test_c01_apriori_soundness_sweep(sweep):
    res, elapsed = sweep
    ok = (
        res.instances == 1000
        and res.valid > 0
        and res.apriori_violations == 0
        and res.enclosure_violations == 0
        and elapsed < 60.0
    )
    record(
        1, ok,
        f"{res.valid}/1000 valid, {res.apriori_violations} bound violations, "
        f"{res.enclosure_violations} enclosure violations, max ratio {res.max_tightness:.6f}, {elapsed:.1f}s",
    )


def test_c02_aposteriori_soundness(sweep):
    res, _ = sweep
    ok = res.aposteriori_valid > 0 and res.aposteriori_violations == 0
    record(2, ok, f"{res.aposteriori_valid} valid, {res.aposteriori_violations} violations, "
                  f"max ratio {res.aposteriori_max_tightness:.6f}")


def test_c03_sharpness():
    grid = [0.5, 0.3, 0.1, 3e-2, 1e-2, 1e-3, 1e-4, 1e-5]
    rows = sharpness_probe(grid)
    at_1e3 = next(r.ratio for r in rows if r.eps == 1e-3)
    worst = max(r.ratio for r in rows)
    closed = all(abs(r.exact_tan - math.tan(0.5 * math.atan(r.eps))) <= 1e-12 * r.exact_tan for r in rows)
    record(3, at_1e3 >= 0.999999 and worst <= 1 + 1e-9 and closed,
           f"ratio at 1e-3 = {at_1e3:.9f}, max ratio = {worst:.12f}")


def test_c04_enclosure_near_sharp():
    a = validate_hermitian([[2.0, 0.1], [0.1, 0.0]])
    c = certify_apriori(a, OrthonormalFrame.coordinate(2, [0]))
    lam = hermitian_spectrum(a).values[0]
    ratio = abs(lam) / c.delta_r
    record(4, c.valid and 0.999 <= ratio <= 1.000001,
           f"interior eigenvalue {lam:.7f}, delta_R {c.delta_r:.7f}, ratio {ratio:.12f}")


def test_c05_delta_r_boundary():
    errs = [abs(delta_r(math.sqrt(2) * d, d) - d) / d for d in (1e-3, 1.0, 1e3)]
    record(5, max(errs) <= 1e-12, f"max relative error {max(errs):.2e}")


def test_c06_counterexample():
    a, q1 = canonical_counterexample()
    w_lapack = hermitian_spectrum(a).values
    w_jacobi = hermitian_spectrum(a, method="jacobi").values
    c = certify_apriori(a, q1)
    eig_ok = np.allclose(w_lapack, [-2, 1, 1], atol=1e-12, rtol=0) and np.allclose(w_jacobi, [-2, 1, 1], atol=1e-12, rtol=0)
    rho_ok = abs(c.rho - math.sqrt(2)) <= 1e-12
    gap_empty = not np.any((w_lapack > -1 + 1e-12) & (w_lapack < 1 - 1e-12))
    ok = eig_ok and rho_ok and c.failure_reason is FailureReason.RHO_TOO_LARGE and gap_empty
    record(6, ok, f"eigenvalues {np.round(w_lapack, 14).tolist()}, rho {c.rho!r}, reason {c.failure_reason}")


def _instance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 33))
    k = int(rng.integers(1, n))
    ext = tuple(rng.choice([-1, 1], k) * rng.uniform(2.5, 5, k))
    inner = tuple(rng.uniform(-1, 1, n - k))
    return synth_instance(InstanceSpec(n, k, ext, inner, float(10 ** rng.uniform(-6, -1)), seed))


def test_c07_invariance_suite():
    tol = 1e-9
    worst = 0.0
    bad = 0
    for seed in range(100):
        inst = _instance(seed)
        rng = np.random.default_rng(10_000 + seed)
        c = certify_apriori(inst.a, inst.q1)
        ang = principal_angles(inst.q1, exact_subspace(inst.a, c.window)).largest
        n = inst.a.n

        w = random_frame(rng, n, n).columns
        au = validate_hermitian(w.conj().T @ inst.a.entries @ w)
        qu = OrthonormalFrame(w.conj().T @ inst.q1.columns)
        cu = certify_apriori(au, qu)
        angu = principal_angles(qu, exact_subspace(au, cu.window)).largest

        shift = float(rng.uniform(-10, 10))
        cs = certify_apriori(inst.a.entries + shift * np.eye(n), inst.q1)

        s = float(10 ** rng.uniform(-2, 2))
        cc = certify_apriori(s * inst.a.entries, inst.q1)

        if not (c.valid and cu.valid and cs.valid and cc.valid):
            bad += 1
            continue
        diffs = [
            cu.rho - c.rho, cu.window.lo - c.window.lo, cu.window.hi - c.window.hi,
            cu.window.gap - c.window.gap, cu.tan_bound - c.tan_bound, cu.delta_r - c.delta_r, angu - ang,
            cs.rho - c.rho, cs.window.gap - c.window.gap, cs.tan_bound - c.tan_bound,
            cs.window.lo - (c.window.lo + shift), cs.window.hi - (c.window.hi + shift),
            (cc.rho - s * c.rho) / s, (cc.window.gap - s * c.window.gap) / s,
            cc.tan_bound - c.tan_bound, cc.angle_bound - c.angle_bound,
        ]
        worst = max(worst, max(abs(d) for d in diffs))
    record(7, bad == 0 and worst <= tol, f"100 instances, {bad} invalid, worst deviation {worst:.2e}")


def test_c08_residual_identity():
    rng = np.random.default_rng(808)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 41))
        a = random_hermitian(rng, n)
        q1 = random_frame(rng, n, int(rng.integers(1, n)))
        worst = max(worst, abs(residual(a, q1).rho - spectral_norm(block_partition(a, q1).b)))
    record(8, worst <= 1e-10, f"max | ||B|| - ||R|| | = {worst:.2e}")


def test_c09_dual_angle_routes():
    rng = np.random.default_rng(909)
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(2, 65))
        u = random_frame(rng, n, int(rng.integers(1, n)))
        v = random_frame(rng, n, int(rng.integers(1, n)))
        ang = principal_angles(u, v)
        worst = max(worst, abs(ang.cosine_largest - ang.sine_largest))
    record(9, worst <= 1e-8, f"max route disagreement {worst:.2e}")


def test_c10_exterior_count(sweep):
    res, _ = sweep
    record(10, res.valid > 0 and res.count_violations == 0,
           f"{res.count_violations} count violations over {res.valid} valid instances")
