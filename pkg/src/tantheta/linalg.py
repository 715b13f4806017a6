"""Dense complex-Hermitian linear algebra used by the certificates.

Everything here is a pure function over small immutable value types that wrap
numpy arrays. Two eigensolvers are available: LAPACK (``numpy.linalg.eigh``,
the default) and a self-contained cyclic Jacobi solver used as an independent
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    NotHermitianError,
    NotSquareError,
    RankDeficientError,
)

HERMITIAN_RTOL = 1e-12
ORTHONORMAL_TOL = 1e-10
RANK_RTOL = 1e-10
JACOBI_RTOL = 1e-13
JACOBI_MAX_SWEEPS = 64


def max_abs(m) -> float:
    """Entrywise max-norm, 0 for empty input."""
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """An exactly Hermitian ``n x n`` complex matrix, ``n >= 2``.

    Build instances with :func:`validate_hermitian`; the constructor trusts
    its input.
    """

    entries: np.ndarray

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def max_norm(self) -> float:
        return max_abs(self.entries)

    @property
    def tol(self) -> float:
        """Absolute comparison tolerance ``1e-9 * (1 + ||A||_max)``."""
        return 1e-9 * (1.0 + self.max_norm)


@dataclass(frozen=True, eq=False)
class OrthonormalFrame:
    """An ``n x k`` matrix with orthonormal columns, ``1 <= k <= n``."""

    columns: np.ndarray

    def __post_init__(self):
        cols = self.columns
        if cols.ndim != 2 or cols.shape[1] < 1 or cols.shape[1] > cols.shape[0]:
            raise DimensionMismatchError(f"frame shape {cols.shape} is not n x k with 1 <= k <= n")
        defect = max_abs(cols.conj().T @ cols - np.eye(cols.shape[1]))
        if defect > ORTHONORMAL_TOL:
            raise RankDeficientError(f"columns are not orthonormal (Gram defect {defect:.3e})")
        cols.setflags(write=False)

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def k(self) -> int:
        return self.columns.shape[1]

    @classmethod
    def coordinate(cls, n: int, idx) -> "OrthonormalFrame":
        """Frame spanned by the columns ``idx`` of the identity ``I_n``."""
        return cls(np.ascontiguousarray(np.eye(n, dtype=complex)[:, list(idx)]))


@dataclass(frozen=True, eq=False)
class Spectrum:
    values: np.ndarray
    vectors: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class AngleSet:
    """Principal angles in radians, sorted descending.

    ``cosine_largest`` and ``sine_largest`` keep the largest angle as produced
    by each route, for cross-checking.
    """

    angles: tuple
    cosine_largest: float
    sine_largest: float

    @property
    def largest(self) -> float:
        return self.angles[0]

    def to_dict(self) -> dict:
        return {
            "angles": list(self.angles),
            "largest": self.largest,
            "cosine_largest": self.cosine_largest,
            "sine_largest": self.sine_largest,
        }


def validate_hermitian(raw) -> HermitianMatrix:
    """Check Hermiticity of ``raw`` and return the symmetrized ``(A + A^H)/2``.

    >>> validate_hermitian([[0, 1j], [-1j, 0]]).n
    2
    """
    a = np.array(raw, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise NotSquareError("matrix dimension must be at least 2")
    if not np.all(np.isfinite(a)):
        raise NotHermitianError("matrix has non-finite entries")
    defect = max_abs(a - a.conj().T)
    if defect > HERMITIAN_RTOL * (1.0 + max_abs(a)):
        raise NotHermitianError(f"Hermiticity defect {defect:.3e} exceeds tolerance")
    return HermitianMatrix(np.ascontiguousarray(0.5 * (a + a.conj().T)))


def as_hermitian(a) -> HermitianMatrix:
    return a if isinstance(a, HermitianMatrix) else validate_hermitian(a)


def as_frame(q) -> OrthonormalFrame:
    if isinstance(q, OrthonormalFrame):
        return q
    q = np.array(q, dtype=complex)
    if q.ndim == 1:
        q = q[:, None]
    return OrthonormalFrame(q)


def orthonormalize(raw) -> OrthonormalFrame:
    """Orthonormal basis for the column span of ``raw`` (thin QR).

    Raises :class:`RankDeficientError` when the smallest singular value is
    below ``1e-10`` times the largest.
    """
    m = np.array(raw, dtype=complex)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.shape[1] < 1 or m.shape[1] > m.shape[0]:
        raise DimensionMismatchError(f"cannot orthonormalize a {m.shape} array")
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] < RANK_RTOL * sv[0]:
        raise RankDeficientError(f"numerically rank deficient (sigma_min/sigma_max = {sv[-1] / max(sv[0], 1e-300):.3e})")
    q, _ = np.linalg.qr(m)
    return OrthonormalFrame(np.ascontiguousarray(q))


def complete_frame(q1: OrthonormalFrame) -> OrthonormalFrame:
    """Orthonormal basis ``Q2`` of the orthogonal complement, so ``[Q1 Q2]`` is unitary."""
    q1 = as_frame(q1)
    if q1.k >= q1.n:
        raise DimensionMismatchError("frame already spans the whole space")
    q, _ = np.linalg.qr(np.asarray(q1.columns), mode="complete")
    q2 = q[:, q1.k:]
    # One re-projection pass keeps Q2^H Q1 at rounding level.
    q2 = q2 - q1.columns @ (q1.columns.conj().T @ q2)
    q2, _ = np.linalg.qr(q2)
    return OrthonormalFrame(np.ascontiguousarray(q2))


def spectral_norm(m) -> float:
    """Largest singular value; 0 for a zero matrix."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0.0
    if m.ndim == 1:
        m = m[:, None]
    return float(np.linalg.svd(m, compute_uv=False)[0])


def jacobi_eigh(a, *, rtol: float = JACOBI_RTOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Each rotation first removes the phase of ``a[p, q]`` and then applies the
    real symmetric Schur rotation. Iterates until the off-diagonal Frobenius
    norm drops below ``rtol * ||A||_F``.

    Returns ``(values, vectors)`` with values ascending.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    target = rtol * np.linalg.norm(a)

    def off(m):
        return math.sqrt(max(np.linalg.norm(m) ** 2 - np.linalg.norm(np.diag(m)) ** 2, 0.0))

    for _ in range(max_sweeps):
        if off(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                ag = abs(g)
                if ag == 0.0:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * ag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ph = np.conj(g) / ag
                rot = np.array([[c, s], [-s * ph, c * ph]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ rot
    else:
        if off(a) > target:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_spectrum(a, want_vectors: bool = False, method: str = "lapack") -> Spectrum:
    """Eigenvalues (ascending) and optionally a unitary eigenvector matrix."""
    a = as_hermitian(a)
    if method == "lapack":
        if want_vectors:
            w, v = np.linalg.eigh(a.entries)
            return Spectrum(w, v)
        return Spectrum(np.linalg.eigvalsh(a.entries))
    if method == "jacobi":
        w, v = jacobi_eigh(a.entries)
        return Spectrum(w, v if want_vectors else None)
    raise ValueError(f"unknown eigensolver {method!r}")


def eigvals_small(m) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian block of any size, including 1x1."""
    m = np.asarray(m, dtype=complex)
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def principal_angles(u, v) -> AngleSet:
    """Principal angles between ``span(U)`` and ``span(V)``, descending.

    Both routes are always evaluated: cosines are singular values of
    ``U^H V``, sines are singular values of ``(I - V V^H) U`` (with the
    lower-rank frame projected). Angles below pi/4 are taken from the sine
    route, the rest from the cosine route, since arccos is ill-conditioned
    near 0 and arcsin near pi/2.
    """
    u, v = as_frame(u), as_frame(v)
    if u.n != v.n:
        raise DimensionMismatchError(f"ambient dimensions differ: {u.n} vs {v.n}")
    uc, vc = u.columns, v.columns
    if u.k > v.k:
        uc, vc = vc, uc
    cos = np.clip(np.linalg.svd(uc.conj().T @ vc, compute_uv=False), 0.0, 1.0)
    sin = np.clip(np.linalg.svd(uc - vc @ (vc.conj().T @ uc), compute_uv=False), 0.0, 1.0)
    from_cos = np.sort(np.arccos(cos))[::-1]
    from_sin = np.sort(np.arcsin(sin))[::-1]
    angles = np.where(from_sin < math.pi / 4, from_sin, from_cos)
    angles = np.sort(angles)[::-1]
    return AngleSet(
        tuple(float(x) for x in angles),
        cosine_largest=float(from_cos[0]),
        sine_largest=float(from_sin[0]),
    )
