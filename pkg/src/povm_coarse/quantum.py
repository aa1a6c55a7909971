"""States, finite observables (POVMs) and their classical post-processing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import DimMismatch, NotSurjective, SpaceMismatch, ValidationError
from .linalg import DEFAULT_TOL, Tolerance, adjoint, frozen
from .measures import (
    FiniteProbMeasure,
    OutcomeMap,
    OutcomeSpace,
    Partition,
    StochasticMatrix,
)


@dataclass(frozen=True, eq=False)
class State:
    """Density matrix: Hermitian, PSD, unit trace."""

    matrix: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix, "state")
        if not linalg.is_hermitian(m, self.tol):
            raise ValidationError(f"state is not Hermitian: |M - M^H|_F = {linalg.fro(m - adjoint(m)):.3e}")
        m = (m + adjoint(m)) / 2
        w = np.linalg.eigvalsh(m)
        if w[0] < -self.tol.psd_tol * max(1.0, w[-1]):
            raise ValidationError(f"state is not PSD: minimum eigenvalue {w[0]:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-9:
            raise ValidationError(f"state has trace {tr!r}, not 1")
        object.__setattr__(self, "matrix", frozen(m))

    @classmethod
    def pure(cls, vector, tol: Tolerance = DEFAULT_TOL) -> "State":
        v = np.asarray(vector, dtype=complex).ravel()
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"pure state vector has norm {norm!r}")
        return cls(np.outer(v, v.conj()), tol)

    @classmethod
    def maximally_mixed(cls, d: int) -> "State":
        return cls(np.eye(d) / d)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def equals(self, other: "State") -> bool:
        return linalg.mat_equal(self.matrix, other.matrix, self.tol)


@dataclass(frozen=True, eq=False)
class Observable:
    """Finite POVM: one effect per outcome label, summing to the identity.

    ``effects`` has shape ``(n, d, d)``.
    """

    space: OutcomeSpace
    effects: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        e = np.array(self.effects, dtype=complex)
        if e.ndim != 3 or e.shape[1] != e.shape[2]:
            raise ValidationError(f"effects must have shape (n, d, d), got {e.shape}")
        if e.shape[0] != len(self.space):
            raise ValidationError(f"{len(self.space)} labels but {e.shape[0]} effects")
        if not np.all(np.isfinite(e)):
            raise ValidationError("effects have non-finite entries")
        for label, m in zip(self.space, e):
            if not linalg.is_hermitian(m, self.tol):
                raise ValidationError(f"effect {label!r} is not Hermitian")
            w = np.linalg.eigvalsh((m + adjoint(m)) / 2)
            if w[0] < -self.tol.psd_tol or w[-1] > 1 + self.tol.psd_tol:
                raise ValidationError(
                    f"effect {label!r} has eigenvalues outside [0, 1]: [{w[0]:.3e}, {w[-1]:.3e}]"
                )
        d = e.shape[1]
        dev = linalg.fro(e.sum(axis=0) - np.eye(d))
        if dev > self.tol.eq_tol * max(1.0, np.sqrt(d)):
            raise ValidationError(f"effects sum to the identity only up to |sum - I|_F = {dev:.3e}")
        e = (e + np.conj(np.transpose(e, (0, 2, 1)))) / 2
        object.__setattr__(self, "effects", frozen(e))

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def __len__(self) -> int:
        return len(self.space)

    def __getitem__(self, label: str) -> np.ndarray:
        return self.effects[self.space.index(label)]

    def total(self, labels: Iterable[str]) -> np.ndarray:
        """Effect of the outcome set ``labels``."""
        idx = self.space.indices(labels)
        return self.effects[idx].sum(axis=0) if idx else np.zeros((self.dim, self.dim), dtype=complex)

    def equals(self, other: "Observable") -> bool:
        return (
            self.space == other.space
            and self.effects.shape == other.effects.shape
            and linalg.mat_equal(self.effects.reshape(-1, self.dim), other.effects.reshape(-1, self.dim), self.tol)
        )

    def max_deviation(self, other: "Observable") -> float:
        if self.space != other.space:
            raise SpaceMismatch(f"{self.space.labels} != {other.space.labels}")
        return float(max(linalg.fro(a - b) for a, b in zip(self.effects, other.effects)))


def trivial_observable(d: int, weights: Sequence[float] = (1.0,), space: OutcomeSpace | None = None) -> Observable:
    """Observable whose effects are ``weights[i] * I``."""
    space = space or OutcomeSpace.range(len(weights))
    return Observable(space, np.array([w * np.eye(d) for w in weights], dtype=complex))


def atomic_observable(vectors, space: OutcomeSpace | None = None) -> Observable:
    """Rank-one projections ``|v><v|``, one per row of ``vectors``."""
    vs = np.asarray(vectors, dtype=complex)
    space = space or OutcomeSpace.range(len(vs))
    return Observable(space, np.einsum("ni,nj->nij", vs, vs.conj()))


def mix_observables(lam: float, a: Observable, b: Observable) -> Observable:
    if a.space != b.space:
        raise SpaceMismatch("mixture of observables on different outcome spaces")
    return Observable(a.space, lam * a.effects + (1 - lam) * b.effects, a.tol)


def _require_dim(a: int, b: int, what: str):
    if a != b:
        raise DimMismatch(f"{what}: dimension {a} != {b}")


def distribution(a: Observable, rho: State) -> FiniteProbMeasure:
    """Outcome statistics ``tr(rho A_x)``."""
    _require_dim(a.dim, rho.dim, "observable vs state")
    p = np.einsum("ij,nji->n", rho.matrix, a.effects).real
    return FiniteProbMeasure(a.space, p)


def post_process(k: StochasticMatrix, a: Observable) -> Observable:
    """Coarse-grained observable with effects ``B_y = sum_x K[x, y] A_x``."""
    if k.source != a.space:
        raise SpaceMismatch(f"kernel source {k.source.labels} != observable space {a.space.labels}")
    return Observable(k.target, np.einsum("xy,xij->yij", k.entries, a.effects), a.tol)


def part_via_map(f: OutcomeMap, a: Observable) -> Observable:
    """Relabelled observable ``B_y = A(f^{-1}(y))``; ``f`` must be onto."""
    if f.source != a.space:
        raise SpaceMismatch(f"map source {f.source.labels} != observable space {a.space.labels}")
    if not f.surjective:
        raise NotSurjective("a part needs a surjective outcome map")
    out = np.zeros((len(f.target), a.dim, a.dim), dtype=complex)
    np.add.at(out, list(f.assignment), a.effects)
    return Observable(f.target, out, a.tol)


def discretize(a: Observable, p: Partition) -> Observable:
    """One effect per partition block, ``A(B_i)``."""
    if p.space != a.space:
        raise SpaceMismatch(f"partition space {p.space.labels} != observable space {a.space.labels}")
    return Observable(p.block_labels(), np.array([a.total(b) for b in p.canonical()]), a.tol)


def kernel_from_states(states: Sequence[State], a: Observable, space: OutcomeSpace | None = None) -> StochasticMatrix:
    """Kernel ``K[x, y] = tr(alpha_x A_y)`` from a family of states indexed by ``space``."""
    space = space or OutcomeSpace.range(len(states))
    if len(states) != len(space):
        raise ValidationError(f"{len(states)} states for {len(space)} labels")
    for s in states:
        _require_dim(s.dim, a.dim, "state vs observable")
    rows = np.einsum("xij,yji->xy", np.array([s.matrix for s in states]), a.effects).real
    return StochasticMatrix(space, a.space, rows)


@dataclass(frozen=True, eq=False)
class DynamicalSystem:
    """Closed evolution ``phi_t = exp(-i t K) phi_0`` sampled on a time grid."""

    hamiltonian: np.ndarray
    initial: np.ndarray
    times: tuple[float, ...]
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        k = linalg.as_matrix(self.hamiltonian, "hamiltonian")
        if not linalg.is_hermitian(k, self.tol):
            raise ValidationError("hamiltonian is not Hermitian")
        phi = np.asarray(self.initial, dtype=complex).ravel()
        if phi.shape != (k.shape[0],):
            raise ValidationError(f"initial vector has length {phi.size}, expected {k.shape[0]}")
        if abs(np.linalg.norm(phi) - 1.0) > 1e-12:
            raise ValidationError(f"initial vector has norm {np.linalg.norm(phi)!r}")
        times = tuple(float(t) for t in self.times)
        if not times:
            raise ValidationError("time grid is empty")
        if any(t < 0 for t in times) or any(b < a for a, b in zip(times, times[1:])):
            raise ValidationError("times must be nonnegative and ascending")
        object.__setattr__(self, "hamiltonian", frozen((k + adjoint(k)) / 2))
        object.__setattr__(self, "initial", frozen(phi))
        object.__setattr__(self, "times", times)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def time_space(self) -> OutcomeSpace:
        return OutcomeSpace(tuple(repr(t) for t in self.times))

    def evolve(self, t: float) -> np.ndarray:
        return linalg.unitary_exp(self.hamiltonian, t, self.tol) @ self.initial


def dynamical_kernel(system: DynamicalSystem, a: Observable) -> StochasticMatrix:
    """Rows indexed by time: row ``t`` is the distribution of ``a`` in ``phi_t``."""
    _require_dim(system.dim, a.dim, "system vs observable")
    w, u = linalg.hermitian_eig(system.hamiltonian, system.tol)
    coeffs = adjoint(u) @ system.initial
    rows = []
    for t in system.times:
        phi = u @ (np.exp(-1j * t * w) * coeffs)
        rows.append(np.einsum("i,nij,j->n", phi.conj(), a.effects, phi).real)
    return StochasticMatrix(system.time_space(), a.space, np.array(rows))


def is_sharp(a: Observable) -> bool:
    return all(linalg.mat_equal(e @ e, e, a.tol) for e in a.effects)


def effect_ranks(a: Observable) -> list[int]:
    out = []
    for e in a.effects:
        w = np.linalg.eigvalsh(e)
        out.append(int(np.sum(w > a.tol.rank_tol * max(1.0, w[-1]))))
    return out


def is_rank1(a: Observable) -> bool:
    return all(r == 1 for r in effect_ranks(a))


def is_atomic(a: Observable) -> bool:
    return is_sharp(a) and is_rank1(a)


def atomic_vectors(a: Observable) -> np.ndarray:
    """Unit vectors ``v_x`` with ``A_x = |v_x><v_x|``, one row per outcome.

    Only valid for atomic observables; the phase of each row is arbitrary.
    """
    if not is_atomic(a):
        raise ValidationError("observable is not atomic")
    return np.array([np.linalg.eigh(e)[1][:, -1] for e in a.effects])
