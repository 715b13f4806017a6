"""Seeded random instances and the soundness sweep."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .certify import (
    canonical_counterexample,
    certify_apriori,
    certify_aposteriori,
    enclosure_check,
    exact_subspace,
    lemma_intersection_check,
)
from .errors import EmptySelectionError
from .linalg import (
    HermitianMatrix,
    OrthonormalFrame,
    hermitian_spectrum,
    orthonormalize,
    principal_angles,
    validate_hermitian,
)

SOUNDNESS_RTOL = 1e-9


def soundness_slack(bound: float) -> float:
    return SOUNDNESS_RTOL * (1.0 + bound)


def instance_seed(master_seed: int, index: int) -> int:
    """Stable 64-bit seed for instance ``index`` of a sweep."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def haar_unitary(n: int, seed) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary: QR of a complex Ginibre matrix with
    the phases of ``diag(R)`` moved into ``Q``."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    k: int
    exterior_eigs: tuple
    interior_eigs: tuple
    perturbation_eps: float
    seed: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n - 1:
            raise ValueError(f"need 1 <= k <= n-1, got n={self.n}, k={self.k}")
        if len(self.exterior_eigs) != self.k or len(self.interior_eigs) != self.n - self.k:
            raise ValueError("eigenvalue list lengths must be k and n-k")
        if self.perturbation_eps < 0:
            raise ValueError("perturbation_eps must be nonnegative")
        lo, hi = min(self.interior_eigs), max(self.interior_eigs)
        sep = min(max(lo - x, x - hi) for x in self.exterior_eigs)
        if not sep > 0:
            raise ValueError("exterior eigenvalues must lie strictly outside the interior hull")

    @property
    def interior_window(self) -> tuple:
        return (min(self.interior_eigs), max(self.interior_eigs))


@dataclass(frozen=True, eq=False)
class Instance:
    """A concrete pair ``(A, Q1)``, optionally with the exact exterior frame."""

    a: HermitianMatrix
    q1: OrthonormalFrame
    x1: Optional[OrthonormalFrame] = None
    interior: Optional[tuple] = None
    seed: int = 0
    label: str = ""


def synth_instance(spec: InstanceSpec) -> Instance:
    """``A = X diag(ext, int) X^H`` with Haar ``X`` and ``Q1 = orth(X1 + eps G)``.

    ``G`` has complex Gaussian entries of variance ``1/n`` so that ``||G||``
    stays O(1) across dimensions.
    """
    x = haar_unitary(spec.n, spec.seed)
    lam = np.concatenate([spec.exterior_eigs, spec.interior_eigs]).astype(float)
    a = validate_hermitian((x * lam) @ x.conj().T)
    x1 = x[:, : spec.k]
    if spec.perturbation_eps > 0:
        rng = np.random.default_rng([spec.seed, 1])
        g = (rng.standard_normal((spec.n, spec.k)) + 1j * rng.standard_normal((spec.n, spec.k)))
        g /= math.sqrt(2.0 * spec.n)
        q1 = orthonormalize(x1 + spec.perturbation_eps * g)
    else:
        q1 = OrthonormalFrame(np.ascontiguousarray(x1))
    return Instance(
        a=a,
        q1=q1,
        x1=OrthonormalFrame(np.ascontiguousarray(x1)),
        interior=spec.interior_window,
        seed=spec.seed,
    )


def random_spec(
    master_seed: int,
    index: int,
    n_range: tuple = (4, 64),
    eps_range: tuple = (1e-6, 0.3),
    gap_target: float = 1.0,
) -> InstanceSpec:
    """Random spec with interior eigenvalues in ``[-1, 1]`` and exterior ones
    at distance at least ``gap_target`` on either side."""
    seed = instance_seed(master_seed, index)
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    k = int(rng.integers(1, n))
    interior = rng.uniform(-1.0, 1.0, n - k)
    sides = rng.choice([-1.0, 1.0], k)
    exterior = sides * (1.0 + gap_target + rng.uniform(0.0, 3.0, k))
    lo_e, hi_e = math.log(eps_range[0]), math.log(eps_range[1])
    eps = float(math.exp(rng.uniform(lo_e, hi_e)))
    return InstanceSpec(n, k, tuple(exterior.tolist()), tuple(interior.tolist()), eps, seed)


class SweepRow(NamedTuple):
    instance: int
    seed: int
    n: int
    k: int
    rho: float
    gap: float
    tan_bound: float
    exact_tan: float
    ratio: float
    status: str


CSV_HEADER = SweepRow._fields


@dataclass
class SweepResult:
    instances: int = 0
    valid: int = 0
    violations: int = 0
    max_tightness: float = 0.0
    failures_by_reason: dict = field(default_factory=dict)
    apriori_violations: int = 0
    enclosure_violations: int = 0
    count_violations: int = 0
    lemma_violations: int = 0
    aposteriori_valid: int = 0
    aposteriori_violations: int = 0
    aposteriori_max_tightness: float = 0.0
    rows: list = field(default_factory=list, repr=False)


def _ratio(exact: float, bound: float) -> float:
    # Both at rounding level (exact invariant subspace): the quotient is noise.
    if bound <= soundness_slack(0.0) and exact <= soundness_slack(0.0):
        return 0.0
    if bound == 0.0:
        return math.inf
    return exact / bound


def _evaluate(index: int, item) -> dict:
    inst = synth_instance(item) if isinstance(item, InstanceSpec) else item
    a, q1 = inst.a, inst.q1
    out = {"index": index, "flags": Counter(), "post": None}
    cert = certify_apriori(a, q1)
    nan = math.nan
    row = dict(
        instance=index, seed=inst.seed, n=a.n, k=q1.k, rho=cert.rho,
        gap=cert.window.gap if cert.window else nan,
        tan_bound=nan, exact_tan=nan, ratio=nan, status="",
    )
    if not cert.valid:
        row["status"] = cert.failure_reason.value
        out["reason"] = cert.failure_reason.value
    else:
        flags = out["flags"]
        spec = hermitian_spectrum(a)
        if not enclosure_check(spec, cert):
            flags["enclosure"] += 1
        try:
            x1 = exact_subspace(a, cert.window, "exterior")
        except EmptySelectionError:
            x1 = None
        if x1 is None or x1.k != q1.k:
            flags["count"] += 1
            row["status"] = "count_violation"
        else:
            exact_tan = math.tan(principal_angles(q1, x1).largest)
            row.update(tan_bound=cert.tan_bound, exact_tan=exact_tan)
            row["ratio"] = _ratio(exact_tan, cert.tan_bound)
            if exact_tan > cert.tan_bound + soundness_slack(cert.tan_bound):
                flags["apriori"] += 1
            sigma = lemma_intersection_check(q1, x1)
            if not (sigma > 0 and sigma >= math.cos(cert.angle_bound) - cert.tol):
                flags["lemma"] += 1
        if not row["status"]:
            row["status"] = "violation" if flags else "ok"
    if inst.interior is not None and inst.x1 is not None:
        post = certify_aposteriori(a, q1, inst.interior)
        if post.valid:
            exact_tan = math.tan(principal_angles(q1, inst.x1).largest)
            out["post"] = (
                _ratio(exact_tan, post.tan_bound),
                exact_tan > post.tan_bound + soundness_slack(post.tan_bound),
            )
    out["row"] = SweepRow(**row)
    out["valid"] = cert.valid
    return out


def run_sweep(specs: Sequence[Union[InstanceSpec, Instance]], workers: int = 1) -> SweepResult:
    """Certify every instance, compare against the eigendecomposition oracle,
    and aggregate. Results do not depend on ``workers``."""
    if not specs:
        raise ValueError("run_sweep needs at least one instance")
    items = list(enumerate(specs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(lambda p: _evaluate(*p), items))
    else:
        outs = [_evaluate(i, s) for i, s in items]
    outs.sort(key=lambda o: o["index"])

    res = SweepResult(instances=len(outs))
    reasons = Counter()
    for o in outs:
        res.rows.append(o["row"])
        if o["valid"]:
            res.valid += 1
            r = o["row"].ratio
            if not math.isnan(r):
                res.max_tightness = max(res.max_tightness, r)
        else:
            reasons[o["reason"]] += 1
        f = o["flags"]
        res.apriori_violations += f["apriori"]
        res.enclosure_violations += f["enclosure"]
        res.count_violations += f["count"]
        res.lemma_violations += f["lemma"]
        if o["post"] is not None:
            ratio, bad = o["post"]
            res.aposteriori_valid += 1
            res.aposteriori_violations += int(bad)
            res.aposteriori_max_tightness = max(res.aposteriori_max_tightness, ratio)
    res.failures_by_reason = dict(sorted(reasons.items()))
    res.violations = (
        res.apriori_violations + res.enclosure_violations + res.count_violations
        + res.lemma_violations + res.aposteriori_violations
    )
    return res


def counterexample_instance() -> Instance:
    a, q1 = canonical_counterexample()
    return Instance(a=a, q1=q1, label="counterexample")


def random_sweep_specs(count: int, master_seed: int = 0, **kwargs) -> list:
    return [random_spec(master_seed, i, **kwargs) for i in range(count)]


class ProbeRow(NamedTuple):
    eps: float
    tan_bound: float
    exact_tan: float
    ratio: float


def sharpness_probe(eps_grid: Sequence[float]) -> list:
    """Bound vs oracle on ``A(eps) = [[2, eps], [eps, 0]]`` with ``Q1 = e1``.

    The exact tangent is ``tan(arctan(eps) / 2)`` and the bound is ``eps / 2``.
    """
    rows = []
    e1 = OrthonormalFrame.coordinate(2, [0])
    for eps in eps_grid:
        if not 0 < eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {eps}")
        a = validate_hermitian([[2.0, eps], [eps, 0.0]])
        cert = certify_apriori(a, e1)
        x1 = exact_subspace(a, cert.window, "exterior")
        exact = math.tan(principal_angles(e1, x1).largest)
        rows.append(ProbeRow(float(eps), cert.tan_bound, exact, exact / cert.tan_bound))
    return rows
