"""Informational completeness and symmetric (SIC) checks.

Also builds the rank-one observables ``C = (nu . A) o B`` from a pair of
orthonormal bases, with effects ``|eta_xy><eta_xy|``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DimMismatch, OutOfRange, ValidationError
from .linalg import DEFAULT_TOL, Tolerance
from .measures import OutcomeSpace, StochasticMatrix, product_space
from .quantum import Observable, State, atomic_observable, effect_ranks, distribution
from .seqprod import eta_vectors, fourier_basis, seq_with_postprocessed_left


@dataclass(frozen=True, eq=False)
class BasisPair:
    """Two orthonormal bases of the same space, one vector per row."""

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        for name in ("left", "right"):
            b = np.array(getattr(self, name), dtype=complex)
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise ValidationError(f"{name} basis must be d vectors of length d, got shape {b.shape}")
            dev = np.abs(b.conj() @ b.T - np.eye(len(b))).max()
            if dev > 1e-10:
                raise ValidationError(f"{name} basis is not orthonormal (Gram deviation {dev:.3e})")
            object.__setattr__(self, name, linalg.frozen(b))
        if self.left.shape != self.right.shape:
            raise DimMismatch(f"bases have dimensions {len(self.left)} and {len(self.right)}")

    @property
    def dim(self) -> int:
        return len(self.left)

    @classmethod
    def standard_fourier(cls, d: int) -> "BasisPair":
        return cls(np.eye(d), fourier_basis(d))

    def overlaps(self) -> np.ndarray:
        """``|<left_r, right_y>|^2`` indexed ``[r, y]``."""
        return np.abs(self.left.conj() @ self.right.T) ** 2


@dataclass(frozen=True)
class SicReport:
    s1: bool
    cardinality: int
    s2: bool
    max_second_eigenvalue: float
    s3: bool
    max_trace_deviation: float
    s4: bool
    max_pair_deviation: float
    worst_pair: tuple[str, str] | None
    ic: bool
    span_rank: int

    @property
    def symmetric(self) -> bool:
        return self.s1 and self.s2 and self.s3 and self.s4

    @property
    def sic(self) -> bool:
        return self.symmetric and self.ic

    def as_dict(self) -> dict:
        out = asdict(self)
        out["symmetric"] = self.symmetric
        out["sic"] = self.sic
        return out


def is_ic(a: Observable) -> tuple[bool, int]:
    rank = linalg.real_span_rank(list(a.effects), a.tol)
    return rank == a.dim ** 2, rank


def pair_target(d: int) -> float:
    """Common value of ``tr(A_x A_y)``, ``x != y``, for a SIC in dimension ``d``."""
    return 1.0 / (d * d * (d + 1))


def sic_report(a: Observable) -> SicReport:
    d = a.dim
    tol = a.tol
    n = len(a)
    second = [float(np.linalg.eigvalsh(e)[-2]) if d > 1 else 0.0 for e in a.effects]
    traces = np.einsum("nii->n", a.effects).real
    gram = np.einsum("xij,yji->xy", a.effects, a.effects).real
    off = ~np.eye(n, dtype=bool)
    pair_dev = np.abs(gram - pair_target(d))
    if n > 1:
        masked = np.where(off, pair_dev, -1.0)
        x, y = np.unravel_index(np.argmax(masked), masked.shape)
        max_pair, worst = float(masked[x, y]), (a.space.labels[x], a.space.labels[y])
    else:
        max_pair, worst = 0.0, None
    ic, rank = is_ic(a)
    max_trace = float(np.abs(traces - 1.0 / d).max())
    return SicReport(
        s1=n == d * d,
        cardinality=n,
        s2=all(r == 1 for r in effect_ranks(a)),
        max_second_eigenvalue=max(second),
        s3=max_trace <= tol.eq_tol,
        max_trace_deviation=max_trace,
        s4=max_pair <= tol.eq_tol,
        max_pair_deviation=max_pair,
        worst_pair=worst,
        ic=ic,
        span_rank=rank,
    )


def mub_check(b: BasisPair, atol: float = 1e-10) -> bool:
    return bool(np.abs(b.overlaps() - 1.0 / b.dim).max() <= atol)


def build_C(nu: StochasticMatrix, b: BasisPair, tol: Tolerance = DEFAULT_TOL) -> Observable:
    """Rank-one observable ``C_(x,y) = |eta_xy><eta_xy|`` on ``nu.target x nu.source``.

    The result is cross-checked against the generic square-root route for
    ``(nu . A) o B`` with ``A``, ``B`` the atomic observables of the bases.
    """
    d = b.dim
    if nu.shape != (d, d):
        raise DimMismatch(f"nu must be {d}x{d}, got {nu.shape}")
    eta = eta_vectors(nu, b.left, b.right)
    effects = np.einsum("xyi,xyj->xyij", eta, eta.conj()).reshape(-1, d, d)
    out = Observable(product_space(nu.target, nu.source), effects, tol)
    # seq_with_postprocessed_left raises if the rank-one form disagrees with the sqrt route
    a = atomic_observable(b.left, nu.source)
    bb = atomic_observable(b.right, nu.source)
    generic = seq_with_postprocessed_left(nu, a, bb)
    if not np.allclose(generic.effects, out.effects, rtol=0, atol=tol.eq_tol):
        raise ValidationError(f"eta construction disagrees with (nu.A)oB by {out.max_deviation(generic):.3e}")
    return out


def eta_for(nu: StochasticMatrix, b: BasisPair) -> np.ndarray:
    return eta_vectors(nu, b.left, b.right)


def eta_overlap_squares(nu: StochasticMatrix, b: BasisPair) -> np.ndarray:
    """``|<eta_xy, eta_x'y'>|^2`` as a ``(d^2, d^2)`` table in product order."""
    eta = eta_for(nu, b).reshape(b.dim * b.dim, b.dim)
    return np.abs(eta.conj() @ eta.T) ** 2


def s4_from_overlaps(nu: StochasticMatrix, b: BasisPair, tol: Tolerance = DEFAULT_TOL) -> bool:
    """The symmetry condition (S4) decided on the ``eta`` vectors alone."""
    sq = eta_overlap_squares(nu, b)
    off = ~np.eye(len(sq), dtype=bool)
    return bool(np.abs(sq[off] - pair_target(b.dim)).max() <= tol.eq_tol)


def qubit_nu(a: float) -> StochasticMatrix:
    if not 0.0 <= a <= 1.0:
        raise OutOfRange(f"a must lie in [0, 1], got {a!r}")
    space = OutcomeSpace(("1", "2"))
    return StochasticMatrix(space, space, [[a, 1 - a], [1 - a, a]])


def qubit_C(a: float, b: BasisPair | None = None, tol: Tolerance = DEFAULT_TOL) -> Observable:
    """Qubit ``C`` for ``nu = [[a, 1-a], [1-a, a]]``, labels ``(1,1) ... (2,2)``.

    Checks ``eta_1y = D psi_y`` and ``eta_2y = E psi_y`` with
    ``D = diag(sqrt(a), sqrt(1-a))`` and ``E = diag(sqrt(1-a), sqrt(a))``.
    """
    nu = qubit_nu(a)
    b = b or BasisPair.standard_fourier(2)
    if b.dim != 2:
        raise DimMismatch("qubit_C needs a two-dimensional basis pair")
    c = build_C(nu, b, tol)
    # D and E act in the left basis coordinates
    to_left = b.left.conj()
    dmat = np.diag([np.sqrt(a), np.sqrt(1 - a)])
    emat = np.diag([np.sqrt(1 - a), np.sqrt(a)])
    eta = eta_for(nu, b)
    for x, m in enumerate((dmat, emat)):
        for y in range(2):
            expected = b.left.T @ (m @ (to_left @ b.right[y]))
            if np.abs(eta[x, y] - expected).max() > tol.eq_tol:
                raise ValidationError(f"eta_{x + 1}{y + 1} does not match the diagonal form")
    return c


def trace_null_space(c: Observable) -> list[np.ndarray]:
    """Orthonormal Hermitian ``G`` with ``tr(G C_e) = 0`` for every effect."""
    # tr(G C) is the real Hilbert-Schmidt product for Hermitian G, C
    return linalg.real_span_complement(list(c.effects), c.tol)


def witness_epsilon(g: np.ndarray, d: int, floor: float = 0.01) -> float:
    """Largest step keeping ``I/d + eps G`` above ``floor`` in every eigenvalue."""
    lam_min = float(np.linalg.eigvalsh(g)[0])
    if lam_min >= 0:
        raise ValidationError("a traceless nonzero Hermitian G has a negative eigenvalue")
    return (1.0 / d - floor) / -lam_min


def ic_witness_pair(c: Observable, epsilon: float | None = None) -> tuple[State, State] | None:
    """Two distinct states with identical ``c`` statistics, or None if ``c`` is IC.

    ``rho1 = I/d`` and ``rho2 = rho1 + epsilon G`` for the first null-space
    element ``G``. Without ``epsilon`` the largest step keeping the minimum
    eigenvalue of ``rho2`` at 0.01 is taken.
    """
    null = trace_null_space(c)
    if not null:
        return None
    g = null[0]
    d = c.dim
    eps = witness_epsilon(g, d) if epsilon is None else float(epsilon)
    rho1 = State(np.eye(d) / d, c.tol)
    rho2 = State(rho1.matrix + eps * g, c.tol)
    return rho1, rho2


def distribution_gap(c: Observable, rho1: State, rho2: State) -> float:
    return float(np.abs(distribution(c, rho1).weights - distribution(c, rho2).weights).max())


def ic_necessary_conditions(c: Observable) -> tuple[bool, bool]:
    """Two conditions every IC observable satisfies.

    First: no effect has both 0 and 1 among its eigenvalues. Second: every
    effect fails to commute with at least one other effect.
    """
    tol = c.tol
    cond_a = True
    for e in c.effects:
        w = np.linalg.eigvalsh(e)
        if abs(w[0]) <= tol.rank_tol and abs(w[-1] - 1.0) <= tol.rank_tol:
            cond_a = False
            break
    n = len(c)
    cond_b = all(
        any(linalg.commutator_norm(c.effects[i], c.effects[j]) > tol.eq_tol for j in range(n) if j != i)
        for i in range(n)
    )
    return cond_a, cond_b


def tetrahedron_povm() -> Observable:
    """Qubit SIC: ``(I + s_k . sigma) / 4`` over the regular tetrahedron vertices."""
    s = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
    sigma = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    effects = np.array([(np.eye(2) + np.einsum("k,kij->ij", v, sigma)) / 4 for v in s])
    return Observable(OutcomeSpace.range(4), effects)


def qubit_basis(theta: float, phase: float) -> np.ndarray:
    """Orthonormal qubit basis ``(cos t, e^{ip} sin t), (-e^{-ip} sin t, cos t)`` as rows."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, np.exp(1j * phase) * s], [-np.exp(-1j * phase) * s, c]])


def scan_qubit_bases(a: float, thetas: Sequence[float], phases: Sequence[float]) -> list[dict]:
    """IC rank of the qubit ``C`` for ``right = qubit_basis(theta, phase)``.

    Reports the measured rank per grid point; no verdict is drawn.
    """
    rows = []
    for theta in thetas:
        for phase in phases:
            b = BasisPair(np.eye(2), qubit_basis(theta, phase))
            c = qubit_C(a, b)
            ic, rank = is_ic(c)
            rows.append({"theta": float(theta), "phase": float(phase), "mub": mub_check(b), "ic": ic, "rank": rank})
    return rows
