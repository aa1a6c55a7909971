"""Seeded random generators for states, observables, kernels and instruments.

Every function takes a ``numpy.random.Generator`` so callers control seeding.
"""
from __future__ import annotations

import numpy as np

from .instruments import Instrument, Operation
from .measures import FiniteProbMeasure, OutcomeMap, OutcomeSpace, Partition, StochasticMatrix
from .quantum import Observable, State


def ginibre(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = ginibre(rng, d)
    return (g + g.conj().T) / 2


def unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    q, r = np.linalg.qr(ginibre(rng, d))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, rows, cols))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def psd(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    g = ginibre(rng, d, rank or d)
    return g @ g.conj().T


def state(rng: np.random.Generator, d: int, rank: int | None = None) -> State:
    m = psd(rng, d, rank)
    return State(m / np.trace(m).real)


def probability(rng: np.random.Generator, space: OutcomeSpace) -> FiniteProbMeasure:
    return FiniteProbMeasure(space, rng.dirichlet(np.ones(len(space))))


def stochastic(rng: np.random.Generator, source: OutcomeSpace, target: OutcomeSpace) -> StochasticMatrix:
    return StochasticMatrix(source, target, rng.dirichlet(np.ones(len(target)), size=len(source)))


def doubly_stochastic(rng: np.random.Generator, space: OutcomeSpace, terms: int | None = None) -> StochasticMatrix:
    """Random convex combination of permutation matrices."""
    n = len(space)
    weights = rng.dirichlet(np.ones(terms or n + 1))
    m = sum(w * np.eye(n)[rng.permutation(n)] for w in weights)
    return StochasticMatrix(space, space, m)


def observable(rng: np.random.Generator, d: int, n: int, space: OutcomeSpace | None = None) -> Observable:
    """Random full-rank POVM via ``S^{-1/2} G_x S^{-1/2}`` normalization."""
    gs = np.array([psd(rng, d) for _ in range(n)])
    w, u = np.linalg.eigh(gs.sum(axis=0))
    inv_root = (u / np.sqrt(w)) @ u.conj().T
    effects = np.array([inv_root @ g @ inv_root for g in gs])
    return Observable(space or OutcomeSpace.range(n), effects)


def atomic_observable(rng: np.random.Generator, d: int, space: OutcomeSpace | None = None) -> Observable:
    u = unitary(rng, d)
    return Observable(space or OutcomeSpace.range(d), np.einsum("ix,jx->xij", u, u.conj()))


def instrument(rng: np.random.Generator, d: int, n: int, kraus_per_outcome: int = 2) -> Instrument:
    """Random instrument cut out of a Haar isometry ``C^d -> C^{n k d}``."""
    v = isometry(rng, n * kraus_per_outcome * d, d)
    blocks = v.reshape(n, kraus_per_outcome, d, d)
    ops = tuple(Operation(tuple(blocks[x])) for x in range(n))
    return Instrument(OutcomeSpace.range(n), ops)


def outcome_map(rng: np.random.Generator, source: OutcomeSpace, target: OutcomeSpace, surjective: bool = True) -> OutcomeMap:
    n, m = len(source), len(target)
    if surjective:
        if m > n:
            raise ValueError("cannot map onto a larger space")
        assignment = np.concatenate([np.arange(m), rng.integers(0, m, n - m)])
        rng.shuffle(assignment)
    else:
        assignment = rng.integers(0, m, n)
    return OutcomeMap(source, target, tuple(int(i) for i in assignment))


def partition(rng: np.random.Generator, space: OutcomeSpace) -> Partition:
    n = len(space)
    k = int(rng.integers(1, n + 1))
    f = outcome_map(rng, space, OutcomeSpace.range(k))
    blocks = [frozenset(x for x, i in zip(space, f.assignment) if i == b) for b in range(k)]
    return Partition(space, tuple(blocks))
