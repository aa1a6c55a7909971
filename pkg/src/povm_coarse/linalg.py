"""Dense complex matrix helpers and the shared tolerance policy.

Matrices are plain ``numpy`` arrays of shape ``(d, d)``. Every function is
pure: inputs are never modified and results are fresh arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotHermitian, NotPSD, ValidationError


@dataclass(frozen=True)
class Tolerance:
    """Relative tolerances used for every numerical decision.

    Attributes
    ----------
    eq_tol : float
        Relative Frobenius tolerance for matrix equality.
    psd_tol : float
        Relative eigenvalue floor for positivity tests.
    rank_tol : float
        Relative singular-value threshold for rank decisions.
    """

    eq_tol: float = 1e-9
    psd_tol: float = 1e-9
    rank_tol: float = 1e-8

    def __post_init__(self):
        for name in ("eq_tol", "psd_tol", "rank_tol"):
            value = getattr(self, name)
            if not 0.0 < value < 1e-2:
                raise ValueError(f"{name} must lie in (0, 1e-2), got {value!r}")

    def replace(self, **changes) -> "Tolerance":
        fields = {"eq_tol": self.eq_tol, "psd_tol": self.psd_tol, "rank_tol": self.rank_tol}
        fields.update(changes)
        return Tolerance(**fields)


DEFAULT_TOL = Tolerance()


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite square complex array, raising ValidationError otherwise."""
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


def adjoint(m) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def trace(m) -> complex:
    return complex(np.trace(np.asarray(m)))


def fro(m) -> float:
    return float(np.linalg.norm(m))


def commutator_norm(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    return fro(a @ b - b @ a)


def mat_equal(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Frobenius equality relative to ``max(1, |a|, |b|)``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    scale = max(1.0, fro(a), fro(b))
    return fro(a - b) <= tol.eq_tol * scale


def is_hermitian(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and fro(m - adjoint(m)) <= tol.eq_tol * max(1.0, fro(m))


def _require_hermitian(m, tol: Tolerance) -> np.ndarray:
    m = as_matrix(m)
    dev = fro(m - adjoint(m))
    if dev > tol.eq_tol * max(1.0, fro(m)):
        raise NotHermitian(f"matrix is not Hermitian: |M - M^H|_F = {dev:.3e}")
    # symmetrize away the admissible dust so eigh sees an exactly Hermitian input
    return (m + adjoint(m)) / 2


def hermitian_eig(m, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary matrix whose columns are
    the matching eigenvectors, so that ``m ~= U @ diag(w) @ U^H``.
    """
    h = _require_hermitian(m, tol)
    try:
        w, u = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return w, u


def eigvalsh(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    h = _require_hermitian(m, tol)
    try:
        return np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def psd_sqrt(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a PSD matrix.

    Eigenvalues in ``[-psd_tol * scale, 0)`` are clamped to zero, anything
    more negative raises NotPSD. ``scale`` is ``max(1, largest eigenvalue)``.
    Eigenvalues below ``d * machine_eps * scale`` are also zeroed: they are
    roundoff, and their square roots (~1e-8) would otherwise leak into the result.
    """
    w, u = hermitian_eig(m, tol)
    scale = max(1.0, float(w[-1]))
    if w[0] < -tol.psd_tol * scale:
        raise NotPSD(f"matrix is not PSD: minimum eigenvalue {w[0]:.3e}")
    noise = len(w) * np.finfo(float).eps * scale
    root = np.sqrt(np.where(w > noise, w, 0.0))
    return (u * root) @ adjoint(u)


def is_psd(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    if not is_hermitian(m, tol):
        return False
    w = eigvalsh(m, tol)
    return bool(w[0] >= -tol.psd_tol * max(1.0, float(w[-1])))


def is_effect(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True when ``0 <= m <= I`` up to ``psd_tol``."""
    if not is_hermitian(m, tol):
        return False
    w = eigvalsh(m, tol)
    return bool(w[0] >= -tol.psd_tol and w[-1] <= 1.0 + tol.psd_tol)


def unitary_exp(k, t: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``exp(-i t K)`` for Hermitian ``K``, via its eigen-decomposition."""
    w, u = hermitian_eig(k, tol)
    return (u * np.exp(-1j * t * w)) @ adjoint(u)


def hermitian_to_real(m) -> np.ndarray:
    """Isometric real coordinates of a Hermitian matrix.

    The layout is the real diagonal, then ``sqrt(2) Re m[i, j]`` and
    ``sqrt(2) Im m[i, j]`` for ``i < j`` in row-major order. The map preserves
    the Hilbert-Schmidt inner product.
    """
    m = np.asarray(m)
    iu = np.triu_indices(m.shape[0], k=1)
    upper = m[iu]
    return np.concatenate([m.diagonal().real, np.sqrt(2) * upper.real, np.sqrt(2) * upper.imag])


def real_to_hermitian(v, d: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (d * d,):
        raise ValueError(f"expected a vector of length {d * d}, got {v.shape}")
    iu = np.triu_indices(d, k=1)
    npairs = len(iu[0])
    upper = (v[d:d + npairs] + 1j * v[d + npairs:]) / np.sqrt(2)
    m = np.zeros((d, d), dtype=complex)
    m[iu] = upper
    m = m + adjoint(m)
    m[np.diag_indices(d)] = v[:d]
    return m


def _realified(ms, tol: Tolerance) -> np.ndarray:
    ms = [as_matrix(m) for m in ms]
    if not ms:
        raise ValueError("need at least one matrix")
    d = ms[0].shape[0]
    rows = []
    for i, m in enumerate(ms):
        if m.shape != (d, d):
            raise ValueError(f"matrix {i} has shape {m.shape}, expected {(d, d)}")
        rows.append(hermitian_to_real(_require_hermitian(m, tol)))
    return np.array(rows)


def _rank_from_singular(s: np.ndarray, tol: Tolerance) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_tol * s[0]))


def real_span_rank(ms, tol: Tolerance = DEFAULT_TOL) -> int:
    """Dimension of the real linear span of a list of Hermitian matrices."""
    s = np.linalg.svd(_realified(ms, tol), compute_uv=False)
    return _rank_from_singular(s, tol)


def real_span_complement(ms, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal Hermitian basis of the Hilbert-Schmidt annihilator of ``ms``.

    Each basis element has its largest-magnitude real coordinate (first one on
    ties) made positive, so the output is deterministic.
    """
    x = _realified(ms, tol)
    d = int(round(np.sqrt(x.shape[1])))
    _, s, vt = np.linalg.svd(x, full_matrices=True)
    rank = _rank_from_singular(s, tol)
    basis = []
    for v in vt[rank:]:
        pivot = int(np.argmax(np.abs(v) > np.max(np.abs(v)) * (1 - 1e-9)))
        if v[pivot] < 0:
            v = -v
        basis.append(real_to_hermitian(v, d))
    return basis
