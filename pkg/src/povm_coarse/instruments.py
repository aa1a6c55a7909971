"""Finite instruments in Kraus form.

Instruments are compared by their action on the matrix units ``|i><j|``,
never by their Kraus lists, which are not unique.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import SpaceMismatch, ValidationError, ZeroProbability
from .linalg import DEFAULT_TOL, Tolerance, adjoint, frozen
from .measures import FiniteProbMeasure, OutcomeSpace, StochasticMatrix
from .quantum import Observable, State, distribution

MIN_PROBABILITY = 1e-12


@dataclass(frozen=True, eq=False)
class Operation:
    """Completely positive, trace non-increasing map ``rho -> sum_k M_k rho M_k^H``."""

    kraus: tuple[np.ndarray, ...]
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        ks = tuple(linalg.as_matrix(k, "Kraus operator") for k in self.kraus)
        if not ks:
            raise ValidationError("an operation needs at least one Kraus operator")
        d = ks[0].shape[0]
        if any(k.shape != (d, d) for k in ks):
            raise ValidationError("Kraus operators have mismatched shapes")
        w = np.linalg.eigvalsh(np.eye(d) - self._effect(ks))
        if w[0] < -self.tol.psd_tol:
            raise ValidationError(f"operation increases trace: min eigenvalue of I - sum M^H M is {w[0]:.3e}")
        object.__setattr__(self, "kraus", tuple(frozen(k) for k in ks))

    @staticmethod
    def _effect(ks) -> np.ndarray:
        return sum(adjoint(k) @ k for k in ks)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def effect(self) -> np.ndarray:
        return self._effect(self.kraus)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ adjoint(k) for k in self.kraus)


@dataclass(frozen=True, eq=False)
class Instrument:
    """One operation per outcome label; the operations add up to a channel."""

    space: OutcomeSpace
    ops: tuple[Operation, ...]
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        if len(ops) != len(self.space):
            raise ValidationError(f"{len(self.space)} labels but {len(ops)} operations")
        d = ops[0].dim
        if any(op.dim != d for op in ops):
            raise ValidationError("operations act on different dimensions")
        dev = linalg.fro(sum(op.effect() for op in ops) - np.eye(d))
        if dev > self.tol.eq_tol * max(1.0, np.sqrt(d)):
            raise ValidationError(f"instrument is not trace preserving: |sum M^H M - I|_F = {dev:.3e}")

    @property
    def dim(self) -> int:
        return self.ops[0].dim

    def __getitem__(self, label: str) -> Operation:
        return self.ops[self.space.index(label)]


def from_kraus(space: OutcomeSpace, kraus_lists: Sequence[Sequence], tol: Tolerance = DEFAULT_TOL) -> Instrument:
    return Instrument(space, tuple(Operation(tuple(ks), tol) for ks in kraus_lists), tol)


def luders(a: Observable) -> Instrument:
    """Lüders instrument: a single Kraus factor ``A_x^{1/2}`` per outcome."""
    return Instrument(a.space, tuple(Operation((linalg.psd_sqrt(e, a.tol),), a.tol) for e in a.effects), a.tol)


def measure_and_prepare(a: Observable, phi) -> Instrument:
    """Measure ``a`` then reprepare the pure state ``phi`` whatever the outcome.

    ``I_x(rho) = tr(rho A_x) |phi><phi|``; Kraus factors ``sqrt(l_k) |phi><v_k|``
    from the eigen-decomposition of each ``A_x``.
    """
    phi = np.asarray(phi, dtype=complex).ravel()
    ops = []
    for e in a.effects:
        w, u = linalg.hermitian_eig(e, a.tol)
        ks = [np.sqrt(lam) * np.outer(phi, u[:, k].conj()) for k, lam in enumerate(w) if lam > a.tol.rank_tol]
        ops.append(Operation(tuple(ks) or (np.zeros((a.dim, a.dim)),), a.tol))
    return Instrument(a.space, tuple(ops), a.tol)


def apply(instr: Instrument, outcomes: Iterable[str], rho: State | np.ndarray) -> tuple[np.ndarray, float]:
    """Unnormalized post-measurement matrix for the outcome set, and its probability."""
    r = rho.matrix if isinstance(rho, State) else np.asarray(rho)
    out = np.zeros((instr.dim, instr.dim), dtype=complex)
    for i in instr.space.indices(list(outcomes)):
        out = out + instr.ops[i](r)
    return out, float(np.trace(out).real)


def update_state(instr: Instrument, outcomes: Iterable[str], rho: State) -> State:
    m, p = apply(instr, outcomes, rho)
    if p < MIN_PROBABILITY:
        raise ZeroProbability(f"outcome set has probability {p:.3e}")
    return State(m / p, instr.tol)


def instrument_distribution(instr: Instrument, rho: State) -> FiniteProbMeasure:
    p = [apply(instr, [x], rho)[1] for x in instr.space]
    return FiniteProbMeasure(instr.space, p)


def measured_observable(instr: Instrument) -> Observable:
    """The unique observable with ``tr(rho Ihat_x) = tr(I_x(rho))``."""
    return Observable(instr.space, np.array([op.effect() for op in instr.ops]), instr.tol)


def post_process_instrument(k: StochasticMatrix, instr: Instrument) -> Instrument:
    """Coarse-grained instrument ``J_y = sum_x K[x, y] I_x``.

    Realized with Kraus factors ``sqrt(K[x, y]) M_{x,k}``; zero weights
    contribute nothing.
    """
    if k.source != instr.space:
        raise SpaceMismatch(f"kernel source {k.source.labels} != instrument space {instr.space.labels}")
    ops = []
    for y in range(len(k.target)):
        ks = [
            np.sqrt(k.entries[x, y]) * m
            for x, op in enumerate(instr.ops)
            if k.entries[x, y] > 0
            for m in op.kraus
        ]
        ops.append(Operation(tuple(ks) or (np.zeros((instr.dim, instr.dim)),), instr.tol))
    return Instrument(k.target, tuple(ops), instr.tol)


def mix_instruments(lam: float, a: Instrument, b: Instrument) -> Instrument:
    if a.space != b.space:
        raise SpaceMismatch("mixture of instruments on different outcome spaces")
    ops = tuple(
        Operation(tuple(np.sqrt(lam) * m for m in oa.kraus) + tuple(np.sqrt(1 - lam) * m for m in ob.kraus), a.tol)
        for oa, ob in zip(a.ops, b.ops)
    )
    return Instrument(a.space, ops, a.tol)


def action_tensor(instr: Instrument) -> np.ndarray:
    """Images of every matrix unit, shape ``(n, d, d, d, d)`` indexed ``[x, i, j]``."""
    d = instr.dim
    out = np.zeros((len(instr.space), d, d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            for x, op in enumerate(instr.ops):
                out[x, i, j] = op(unit)
    return out


def same_action(a: Instrument, b: Instrument, tol: Tolerance = DEFAULT_TOL) -> bool:
    if a.space != b.space or a.dim != b.dim:
        return False
    ta, tb = action_tensor(a), action_tensor(b)
    return linalg.fro(ta - tb) <= tol.eq_tol * max(1.0, linalg.fro(ta), linalg.fro(tb))


def check_distribution_law(instr: Instrument, rho: State) -> float:
    """Gap between instrument statistics and those of its measured observable."""
    p = instrument_distribution(instr, rho).weights
    q = distribution(measured_observable(instr), rho).weights
    return float(np.abs(p - q).max())
