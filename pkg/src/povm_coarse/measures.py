"""Finite probability measures and their coarse-grainings by stochastic matrices.

A stochastic matrix ``K`` stores ``K[x, y]``, the probability of output ``y``
given input ``x``; rows sum to one. The kernel of a set ``D`` of outputs is
``K[x, D].sum()``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import SpaceMismatch, UnknownLabel, ValidationError
from .linalg import frozen

MASS_TOL = 1e-9
CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class OutcomeSpace:
    """Ordered set of distinct string labels."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValidationError("an outcome space needs at least one label")
        if len(set(labels)) != len(labels):
            raise ValidationError(f"outcome labels are not distinct: {labels}")

    @classmethod
    def range(cls, n: int, start: int = 0) -> "OutcomeSpace":
        return cls(tuple(str(i) for i in range(start, start + n)))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"unknown outcome label {label!r}") from None

    def indices(self, labels: Iterable[str]) -> list[int]:
        return [self.index(x) for x in labels]


def pair_label(x: str, y: str) -> str:
    return f"({x},{y})"


def product_space(left: OutcomeSpace, right: OutcomeSpace) -> OutcomeSpace:
    """Pair space in row-major order: the left index varies slowest."""
    return OutcomeSpace(tuple(pair_label(x, y) for x in left for y in right))


def _require_same(a: OutcomeSpace, b: OutcomeSpace, what: str):
    if a != b:
        raise SpaceMismatch(f"{what}: {a.labels} != {b.labels}")


@dataclass(frozen=True, eq=False)
class FiniteProbMeasure:
    space: OutcomeSpace
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (len(self.space),):
            raise ValidationError(f"expected {len(self.space)} weights, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights must be finite")
        if w.min() < -CLAMP_TOL:
            raise ValidationError(f"negative weight {w.min():.3e}")
        total = w.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(f"weights sum to {total!r}, not 1")
        if w.min() < 0:
            w = np.clip(w, 0.0, None)
            w = w / w.sum()
        object.__setattr__(self, "weights", frozen(w))

    def __getitem__(self, label: str) -> float:
        return float(self.weights[self.space.index(label)])

    def measure(self, labels: Iterable[str]) -> float:
        return float(self.weights[self.space.indices(labels)].sum())

    def allclose(self, other: "FiniteProbMeasure", atol: float = 1e-12) -> bool:
        return self.space == other.space and bool(np.allclose(self.weights, other.weights, rtol=0, atol=atol))


def uniform(space: OutcomeSpace) -> FiniteProbMeasure:
    return FiniteProbMeasure(space, np.full(len(space), 1.0 / len(space)))


def dirac(space: OutcomeSpace, label: str) -> FiniteProbMeasure:
    w = np.zeros(len(space))
    w[space.index(label)] = 1.0
    return FiniteProbMeasure(space, w)


def mix_measures(lam: float, mu1: FiniteProbMeasure, mu2: FiniteProbMeasure) -> FiniteProbMeasure:
    _require_same(mu1.space, mu2.space, "mixture")
    return FiniteProbMeasure(mu1.space, lam * mu1.weights + (1 - lam) * mu2.weights)


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Row-stochastic transition matrix from ``source`` outcomes to ``target`` outcomes."""

    source: OutcomeSpace
    target: OutcomeSpace
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        shape = (len(self.source), len(self.target))
        if e.shape != shape:
            raise ValidationError(f"stochastic matrix must have shape {shape}, got {e.shape}")
        if not np.all(np.isfinite(e)):
            raise ValidationError("stochastic matrix has non-finite entries")
        if e.min() < -CLAMP_TOL or e.max() > 1 + CLAMP_TOL:
            raise ValidationError(f"entries outside [0, 1]: min {e.min():.3e}, max {e.max():.3e}")
        dev = np.abs(e.sum(axis=1) - 1.0).max()
        if dev > MASS_TOL:
            raise ValidationError(f"row sums deviate from 1 by {dev:.3e}")
        object.__setattr__(self, "entries", frozen(np.clip(e, 0.0, 1.0)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def kernel(self, x: str, labels: Iterable[str]) -> float:
        """Probability that input ``x`` lands in the output set ``labels``."""
        return float(self.entries[self.source.index(x), self.target.indices(labels)].sum())

    def column_sum_deviation(self) -> float:
        return float(np.abs(self.entries.sum(axis=0) - 1.0).max())

    def is_doubly_stochastic(self, tol: float = 1e-9) -> bool:
        return len(self.source) == len(self.target) and self.column_sum_deviation() <= tol

    def allclose(self, other: "StochasticMatrix", atol: float = 1e-12) -> bool:
        return (
            self.source == other.source
            and self.target == other.target
            and bool(np.allclose(self.entries, other.entries, rtol=0, atol=atol))
        )


def identity_kernel(space: OutcomeSpace) -> StochasticMatrix:
    return StochasticMatrix(space, space, np.eye(len(space)))


def constant_kernel(source: OutcomeSpace, nu: FiniteProbMeasure) -> StochasticMatrix:
    return StochasticMatrix(source, nu.space, np.tile(nu.weights, (len(source), 1)))


def apply_kernel(k: StochasticMatrix, mu: FiniteProbMeasure) -> FiniteProbMeasure:
    _require_same(mu.space, k.source, "measure space vs kernel source")
    return FiniteProbMeasure(k.target, mu.weights @ k.entries)


def compose(v: StochasticMatrix, u: StochasticMatrix) -> StochasticMatrix:
    """Kernel of "first ``v``, then ``u``"."""
    _require_same(v.target, u.source, "compose")
    return StochasticMatrix(v.source, u.target, v.entries @ u.entries)


@dataclass(frozen=True)
class OutcomeMap:
    """Total function between outcome spaces, stored as target indices."""

    source: OutcomeSpace
    target: OutcomeSpace
    assignment: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(i) for i in self.assignment)
        object.__setattr__(self, "assignment", a)
        if len(a) != len(self.source):
            raise ValidationError(f"map must assign all {len(self.source)} inputs, got {len(a)}")
        if any(not 0 <= i < len(self.target) for i in a):
            raise ValidationError("map assigns an index outside the target space")

    @classmethod
    def from_labels(cls, source: OutcomeSpace, target: OutcomeSpace, mapping: dict) -> "OutcomeMap":
        return cls(source, target, tuple(target.index(mapping[x]) for x in source))

    @property
    def surjective(self) -> bool:
        return set(self.assignment) == set(range(len(self.target)))

    def __call__(self, label: str) -> str:
        return self.target.labels[self.assignment[self.source.index(label)]]

    def preimage(self, labels: Iterable[str]) -> list[str]:
        wanted = set(self.target.indices(labels))
        return [x for x, i in zip(self.source, self.assignment) if i in wanted]

    def then(self, g: "OutcomeMap") -> "OutcomeMap":
        """The composite ``g o self``."""
        _require_same(self.target, g.source, "map composition")
        return OutcomeMap(self.source, g.target, tuple(g.assignment[i] for i in self.assignment))


def identity_map(space: OutcomeSpace) -> OutcomeMap:
    return OutcomeMap(space, space, tuple(range(len(space))))


def kernel_from_map(f: OutcomeMap) -> StochasticMatrix:
    e = np.zeros((len(f.source), len(f.target)))
    e[np.arange(len(f.source)), list(f.assignment)] = 1.0
    return StochasticMatrix(f.source, f.target, e)


def pushforward(f: OutcomeMap, mu: FiniteProbMeasure) -> FiniteProbMeasure:
    """``mu o f^{-1}``, summed over preimages."""
    _require_same(mu.space, f.source, "pushforward")
    w = np.zeros(len(f.target))
    np.add.at(w, list(f.assignment), mu.weights)
    return FiniteProbMeasure(f.target, w)


@dataclass(frozen=True)
class Partition:
    space: OutcomeSpace
    blocks: tuple[frozenset, ...]

    def __post_init__(self):
        blocks = tuple(frozenset(str(x) for x in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen: set = set()
        for b in blocks:
            if not b:
                raise ValidationError("partition blocks must be nonempty")
            if b & seen:
                raise ValidationError(f"partition blocks overlap on {sorted(b & seen)}")
            unknown = b - set(self.space.labels)
            if unknown:
                raise ValidationError(f"partition mentions unknown labels {sorted(unknown)}")
            seen |= b
        if seen != set(self.space.labels):
            raise ValidationError(f"partition misses labels {sorted(set(self.space.labels) - seen)}")

    def block_labels(self) -> OutcomeSpace:
        """One label per block: its members in space order, braced."""
        return OutcomeSpace(tuple("{" + ",".join(x for x in self.space if x in b) + "}" for b in self.blocks))

    def canonical(self) -> tuple[tuple[str, ...], ...]:
        return tuple(tuple(x for x in self.space if x in b) for b in self.blocks)


def kernel_from_partition(p: Partition) -> StochasticMatrix:
    e = np.zeros((len(p.space), len(p.blocks)))
    for i, b in enumerate(p.blocks):
        e[p.space.indices(b), i] = 1.0
    return StochasticMatrix(p.space, p.block_labels(), e)


def partition_from_kernel(k: StochasticMatrix) -> Partition | None:
    """Recover the partition behind a 0-1 kernel; None if ``k`` is not 0-1.

    Blocks come out in target order; targets that receive no input are
    dropped since partition blocks are nonempty.
    """
    e = k.entries
    if not np.all((np.abs(e) <= CLAMP_TOL) | (np.abs(e - 1.0) <= CLAMP_TOL)):
        return None
    hits = np.abs(e - 1.0) <= CLAMP_TOL
    blocks = [frozenset(k.source.labels[i] for i in np.flatnonzero(hits[:, j])) for j in range(e.shape[1])]
    return Partition(k.source, tuple(b for b in blocks if b))


def coexist_product(
    mu1: FiniteProbMeasure, mu2: FiniteProbMeasure
) -> tuple[FiniteProbMeasure, OutcomeMap, OutcomeMap]:
    """Product measure with the two coordinate projections as its parts."""
    space = product_space(mu1.space, mu2.space)
    n1, n2 = len(mu1.space), len(mu2.space)
    product = FiniteProbMeasure(space, np.outer(mu1.weights, mu2.weights).ravel())
    f = OutcomeMap(space, mu1.space, tuple(i for i in range(n1) for _ in range(n2)))
    g = OutcomeMap(space, mu2.space, tuple(j for _ in range(n1) for j in range(n2)))
    return product, f, g


def stochastic(source: Sequence[str] | OutcomeSpace, target: Sequence[str] | OutcomeSpace, entries) -> StochasticMatrix:
    """Convenience constructor accepting raw label lists."""
    if not isinstance(source, OutcomeSpace):
        source = OutcomeSpace(tuple(source))
    if not isinstance(target, OutcomeSpace):
        target = OutcomeSpace(tuple(target))
    return StochasticMatrix(source, target, entries)
