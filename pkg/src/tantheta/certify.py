"""tan(theta) certificates for approximate spectral subspaces of Hermitian matrices.

Given a Hermitian ``A`` and an orthonormal ``Q1`` (``n x k``), write
``L = Q^H A Q`` for a unitary completion ``Q = [Q1 Q2]``; its blocks are
``A1 = Q1^H A Q1``, ``A2 = Q2^H A Q2`` and ``B = Q2^H A Q1``. The residual
``R = A Q1 - Q1 A1`` satisfies ``||R|| = ||B||``.

* :func:`certify_apriori` uses only the compressions: if ``spec(A2)`` lies in
  ``[a, b]``, ``spec(A1)`` lies outside ``(a - d, b + d)`` and
  ``||R|| < sqrt(2) d``, then ``tan angle(Q1, X1) <= ||R|| / d`` and the
  ``n - k`` remaining eigenvalues of ``A`` lie in ``[a - dR, b + dR]``.
* :func:`certify_aposteriori` needs an interval ``[alpha, beta]`` known to
  hold the exact complementary eigenvalues, and gives ``||R|| / delta``.

Hypothesis failures come back as invalid certificates with a
:class:`FailureReason`; only malformed input raises.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptySelectionError,
    GapNonpositiveError,
    NonpositiveGapError,
    RankMismatchError,
)
from .linalg import (
    HermitianMatrix,
    OrthonormalFrame,
    Spectrum,
    as_frame,
    as_hermitian,
    complete_frame,
    eigvals_small,
    hermitian_spectrum,
    spectral_norm,
    validate_hermitian,
)

SQRT2 = math.sqrt(2.0)
# Strict admissibility rho < sqrt(2) d is enforced with this relative margin,
# so rounding can never admit an instance sitting on the boundary.
ADMISSIBILITY_RTOL = 1e-12


class FailureReason(str, enum.Enum):
    GAP_NONPOSITIVE = "GAP_NONPOSITIVE"
    RHO_TOO_LARGE = "RHO_TOO_LARGE"
    INTERIOR_COUNT_MISMATCH = "INTERIOR_COUNT_MISMATCH"


@dataclass(frozen=True)
class GapWindow:
    """Interval ``[lo, hi]`` together with a separation ``gap > 0``."""

    lo: float
    hi: float
    gap: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"window needs lo <= hi, got [{self.lo}, {self.hi}]")
        if not self.gap > 0:
            raise NonpositiveGapError(f"window gap must be positive, got {self.gap}")

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def distance(self, x) -> np.ndarray:
        """Distance of each value in ``x`` from the closed interval ``[lo, hi]``."""
        return interval_distance(x, self.lo, self.hi)


@dataclass(frozen=True, eq=False)
class BlockForm:
    a1: np.ndarray
    a2: np.ndarray
    b: np.ndarray
    q2: Optional[OrthonormalFrame] = None

    def assemble(self) -> np.ndarray:
        return np.block([[self.a1, self.b.conj().T], [self.b, self.a2]])


@dataclass(frozen=True, eq=False)
class ResidualReport:
    r: np.ndarray
    rho: float


@dataclass(frozen=True)
class AprioriCertificate:
    valid: bool
    rho: float
    k: int
    n: int
    window: Optional[GapWindow] = None
    admissible: bool = False
    tan_bound: Optional[float] = None
    angle_bound: Optional[float] = None
    delta_r: Optional[float] = None
    enclosure_lo: Optional[float] = None
    enclosure_hi: Optional[float] = None
    failure_reason: Optional[FailureReason] = None
    tol: float = 0.0
    diagnostics: dict = field(default_factory=dict, compare=False)

    kind = "apriori"

    def to_dict(self) -> dict:
        return _cert_dict(self)


@dataclass(frozen=True)
class AposterioriCertificate:
    valid: bool
    rho: float
    k: int
    n: int
    interior_lo: float
    interior_hi: float
    window: Optional[GapWindow] = None
    tan_bound: Optional[float] = None
    angle_bound: Optional[float] = None
    interior_count: Optional[int] = None
    failure_reason: Optional[FailureReason] = None
    tol: float = 0.0
    diagnostics: dict = field(default_factory=dict, compare=False)

    kind = "aposteriori"

    def to_dict(self) -> dict:
        return _cert_dict(self)


def _cert_dict(cert) -> dict:
    d = asdict(cert)
    if cert.failure_reason is not None:
        d["failure_reason"] = cert.failure_reason.value
    return d


def interval_distance(x, lo: float, hi: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.maximum(np.maximum(lo - x, x - hi), 0.0)


def _check_dims(a: HermitianMatrix, q1: OrthonormalFrame):
    if a.n != q1.n:
        raise DimensionMismatchError(f"matrix is {a.n}x{a.n} but frame has {q1.n} rows")
    if not 1 <= q1.k <= a.n - 1:
        raise DimensionMismatchError(f"frame rank must be in [1, n-1], got k={q1.k}, n={a.n}")


def block_partition(a, q1) -> BlockForm:
    """Blocks ``A1, A2, B`` of ``Q^H A Q`` for a unitary completion ``Q = [Q1 Q2]``."""
    a, q1 = as_hermitian(a), as_frame(q1)
    _check_dims(a, q1)
    q2 = complete_frame(q1)
    u, w = q1.columns, q2.columns
    a1 = u.conj().T @ a.entries @ u
    a2 = w.conj().T @ a.entries @ w
    b = w.conj().T @ a.entries @ u
    return BlockForm(
        a1=0.5 * (a1 + a1.conj().T),
        a2=0.5 * (a2 + a2.conj().T),
        b=b,
        q2=q2,
    )


def residual(a, q1) -> ResidualReport:
    """``R = A Q1 - Q1 (Q1^H A Q1)`` and its spectral norm."""
    a, q1 = as_hermitian(a), as_frame(q1)
    _check_dims(a, q1)
    u = q1.columns
    au = a.entries @ u
    r = au - u @ (u.conj().T @ au)
    return ResidualReport(r=r, rho=spectral_norm(r))


def _values(spec) -> np.ndarray:
    if isinstance(spec, Spectrum):
        return np.asarray(spec.values, dtype=float)
    return np.asarray(spec, dtype=float).ravel()


def extract_window_apriori(spec_a1, spec_a2, tol: float = 0.0) -> GapWindow:
    """Tightest ``(a, b, d)``: the hull of ``spec(A2)`` and the largest admissible ``d``.

    Raises :class:`GapNonpositiveError` if an eigenvalue of ``A1`` is within
    ``tol`` of that hull.
    """
    w1, w2 = _values(spec_a1), _values(spec_a2)
    if w1.size == 0 or w2.size == 0:
        raise ValueError("both spectra must be nonempty")
    lo, hi = float(w2.min()), float(w2.max())
    gap = float(interval_distance(w1, lo, hi).min())
    if gap <= tol:
        err = GapNonpositiveError(f"eigenvalue of A1 within {gap:.3e} of [{lo}, {hi}]")
        err.lo, err.hi, err.gap = lo, hi, gap
        raise err
    return GapWindow(lo, hi, gap)


def delta_r(rho: float, gap: float) -> float:
    """Enclosure radius ``rho * tan(arctan(2 rho / gap) / 2)``.

    Evaluated through ``tan(x/2) = t / (1 + sqrt(1 + t^2))`` with
    ``t = tan x``, which is exact at ``rho = 0`` and has no cancellation.
    Equals ``gap`` at ``rho = sqrt(2) gap``.
    """
    if not gap > 0:
        raise NonpositiveGapError(f"gap must be positive, got {gap}")
    if rho < 0:
        raise ValueError(f"rho must be nonnegative, got {rho}")
    t = 2.0 * rho / gap
    return rho * t / (1.0 + math.sqrt(1.0 + t * t))


def certify_apriori(a, q1) -> AprioriCertificate:
    """Certificate that needs no exact eigenvalue of ``A``."""
    a, q1 = as_hermitian(a), as_frame(q1)
    bf = block_partition(a, q1)
    rep = residual(a, q1)
    w1, w2 = eigvals_small(bf.a1), eigvals_small(bf.a2)
    tol = a.tol
    diag = {"a1_eigenvalues": w1.tolist(), "a2_eigenvalues": w2.tolist()}
    base = dict(rho=rep.rho, k=q1.k, n=a.n, tol=tol, diagnostics=diag)
    try:
        window = extract_window_apriori(w1, w2, tol=tol)
    except GapNonpositiveError as err:
        diag.update(lo=err.lo, hi=err.hi, gap=err.gap)
        return AprioriCertificate(valid=False, failure_reason=FailureReason.GAP_NONPOSITIVE, **base)
    admissible = rep.rho < SQRT2 * window.gap * (1.0 - ADMISSIBILITY_RTOL)
    if not admissible:
        return AprioriCertificate(
            valid=False,
            window=window,
            admissible=False,
            failure_reason=FailureReason.RHO_TOO_LARGE,
            **base,
        )
    tan_bound = rep.rho / window.gap
    dr = delta_r(rep.rho, window.gap)
    return AprioriCertificate(
        valid=True,
        window=window,
        admissible=True,
        tan_bound=tan_bound,
        angle_bound=math.atan(tan_bound),
        delta_r=dr,
        enclosure_lo=window.lo - dr,
        enclosure_hi=window.hi + dr,
        **base,
    )


def certify_aposteriori(a, q1, interior) -> AposterioriCertificate:
    """Certificate for a caller-supplied interval ``interior = (alpha, beta)``.

    The exact spectrum of ``A`` is computed to confirm that exactly ``n - k``
    eigenvalues lie in ``[alpha, beta]``.
    """
    a, q1 = as_hermitian(a), as_frame(q1)
    alpha, beta = (float(x) for x in interior)
    if not alpha <= beta:
        raise ValueError(f"interior interval needs alpha <= beta, got [{alpha}, {beta}]")
    bf = block_partition(a, q1)
    rep = residual(a, q1)
    tol = a.tol
    w1 = eigvals_small(bf.a1)
    exact = hermitian_spectrum(a).values
    count = int(np.count_nonzero((exact >= alpha - tol) & (exact <= beta + tol)))
    delta = float(interval_distance(w1, alpha, beta).min())
    diag = {"a1_eigenvalues": w1.tolist(), "eigenvalues": exact.tolist(), "delta": delta}
    base = dict(
        rho=rep.rho, k=q1.k, n=a.n, interior_lo=alpha, interior_hi=beta,
        interior_count=count, tol=tol, diagnostics=diag,
    )
    if count != a.n - q1.k:
        return AposterioriCertificate(valid=False, failure_reason=FailureReason.INTERIOR_COUNT_MISMATCH, **base)
    if delta <= tol:
        return AposterioriCertificate(valid=False, failure_reason=FailureReason.GAP_NONPOSITIVE, **base)
    tan_bound = rep.rho / delta
    return AposterioriCertificate(
        valid=True,
        window=GapWindow(alpha, beta, delta),
        tan_bound=tan_bound,
        angle_bound=math.atan(tan_bound),
        **base,
    )


def exact_subspace(a, window: GapWindow, mode: str = "exterior", threshold: Optional[float] = None) -> OrthonormalFrame:
    """Eigenvectors of ``A`` classified against ``window``.

    An eigenvalue is exterior iff its distance from ``[lo, hi]`` exceeds
    ``threshold`` (default ``gap / 2``). Under the a priori hypotheses every
    threshold in ``(delta_r, gap)`` gives the same split.
    """
    a = as_hermitian(a)
    if mode not in ("exterior", "interior"):
        raise ValueError(f"mode must be 'exterior' or 'interior', got {mode!r}")
    thr = 0.5 * window.gap if threshold is None else threshold
    spec = hermitian_spectrum(a, want_vectors=True)
    ext = window.distance(spec.values) > thr
    sel = ext if mode == "exterior" else ~ext
    if not sel.any():
        raise EmptySelectionError(f"no {mode} eigenvalues for window {window}")
    return OrthonormalFrame(np.ascontiguousarray(spec.vectors[:, sel]))


def lemma_intersection_check(q1, x1) -> float:
    """Smallest singular value of ``Q1^H X1``.

    A positive value means ``span(Q1)`` meets no vector orthogonal to
    ``span(X1)`` and vice versa, i.e. the largest principal angle is below
    pi/2.
    """
    q1, x1 = as_frame(q1), as_frame(x1)
    if q1.n != x1.n:
        raise DimensionMismatchError(f"ambient dimensions differ: {q1.n} vs {x1.n}")
    if q1.k != x1.k:
        raise RankMismatchError(f"ranks differ: {q1.k} vs {x1.k}")
    return float(np.linalg.svd(q1.columns.conj().T @ x1.columns, compute_uv=False)[-1])


def enclosure_check(spec_a, cert: AprioriCertificate, tol: Optional[float] = None) -> bool:
    """True iff ``n - k`` eigenvalues lie in the enclosure and the other ``k``
    are at least ``gap`` away from ``[lo, hi]``.
    """
    if not cert.valid:
        raise ValueError("enclosure_check needs a valid certificate")
    w = _values(spec_a)
    tol = cert.tol if tol is None else tol
    win = cert.window
    inside = (w >= cert.enclosure_lo - tol) & (w <= cert.enclosure_hi + tol)
    outside = (w <= win.lo - win.gap + tol) | (w >= win.hi + win.gap - tol)
    return bool(
        np.count_nonzero(inside) == cert.n - cert.k
        and np.count_nonzero(outside & ~inside) == cert.k
    )


def canonical_counterexample():
    """3x3 instance with ``||R|| = sqrt(2) d`` and no eigenvalue in ``(a - d, b + d)``.

    ``spec(A1) = {-1, 1}``, ``spec(A2) = {0}``, ``d = 1``, ``eig(A) = {-2, 1, 1}``.
    """
    s = SQRT2
    a = validate_hermitian([[-1.0, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, 0.0]])
    return a, OrthonormalFrame.coordinate(3, [0, 1])
