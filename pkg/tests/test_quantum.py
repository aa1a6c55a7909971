import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from povm_coarse import measures as ms
from povm_coarse import quantum as qm
from povm_coarse import sampling
from povm_coarse.errors import DimMismatch, NotSurjective, SpaceMismatch, ValidationError
from povm_coarse.seqprod import momentum_observable, position_observable, seq_product

seeds = st.integers(0, 2**32 - 1)


def test_state_validation():
    with pytest.raises(ValidationError, match="trace"):
        qm.State(np.eye(2))
    with pytest.raises(ValidationError, match="PSD"):
        qm.State(np.diag([1.5, -0.5]))
    with pytest.raises(ValidationError, match="Hermitian"):
        qm.State([[0.5, 0.5], [0, 0.5]])
    rho = qm.State.pure([1, 1j] / np.sqrt(2))
    np.testing.assert_allclose(rho.matrix, [[0.5, -0.5j], [0.5j, 0.5]])


def test_observable_validation():
    with pytest.raises(ValidationError, match="sum to the identity"):
        qm.Observable(ms.OutcomeSpace.range(2), [np.eye(2) / 2, np.eye(2) / 3])
    with pytest.raises(ValidationError, match="outside"):
        qm.Observable(ms.OutcomeSpace.range(2), [np.diag([1.5, 1]), np.diag([-0.5, 0])])


def test_distribution_examples():
    rho = sampling.state(np.random.default_rng(1), 3)
    np.testing.assert_allclose(qm.distribution(qm.trivial_observable(3), rho).weights, [1.0])
    q = position_observable(2)
    np.testing.assert_allclose(qm.distribution(q, qm.State.maximally_mixed(2)).weights, [0.5, 0.5])
    np.testing.assert_allclose(qm.distribution(q, qm.State.pure([1, 0])).weights, [1.0, 0.0])
    with pytest.raises(DimMismatch):
        qm.distribution(q, rho)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 5), st.integers(1, 6))
def test_distribution_is_probability(seed, d, n):
    rng = np.random.default_rng(seed)
    a = sampling.observable(rng, d, n)
    rho = sampling.state(rng, d)
    w = qm.distribution(a, rho).weights
    # oracle: trace of the explicit product
    direct = [np.trace(rho.matrix @ e).real for e in a.effects]
    np.testing.assert_allclose(w, direct, atol=1e-12)
    assert w.min() >= -1e-12 and abs(w.sum() - 1) <= 1e-9


def test_post_process_identity(rng):
    a = sampling.observable(rng, 3, 4)
    assert qm.post_process(ms.identity_kernel(a.space), a).max_deviation(a) == 0.0
    with pytest.raises(SpaceMismatch):
        qm.post_process(ms.identity_kernel(ms.OutcomeSpace.range(2)), a)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_smeared_position_eigenvalues_are_kernel_columns(d, rng):
    q = position_observable(d)
    mu = sampling.stochastic(rng, q.space, q.space)
    b = qm.post_process(mu, q)
    for j in range(d):
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(b.effects[j])), np.sort(mu.entries[:, j]), atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_post_process_statistics_consistency(seed):
    rng = np.random.default_rng(seed)
    d, n, m = (int(x) for x in rng.integers(1, 5, size=3))
    a = sampling.observable(rng, d, n)
    k = sampling.stochastic(rng, a.space, ms.OutcomeSpace.range(m))
    rho = sampling.state(rng, d)
    lhs = qm.distribution(qm.post_process(k, a), rho)
    rhs = ms.apply_kernel(k, qm.distribution(a, rho))
    np.testing.assert_allclose(lhs.weights, rhs.weights, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_post_process_functorial(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 5))
    s = [ms.OutcomeSpace.range(int(n)) for n in rng.integers(1, 6, size=3)]
    a = sampling.observable(rng, d, len(s[0]), s[0])
    v = sampling.stochastic(rng, s[0], s[1])
    u = sampling.stochastic(rng, s[1], s[2])
    lhs = qm.post_process(ms.compose(v, u), a)
    rhs = qm.post_process(u, qm.post_process(v, a))
    assert lhs.max_deviation(rhs) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(seeds, st.floats(0, 1))
def test_post_process_affine(seed, lam):
    rng = np.random.default_rng(seed)
    a1, a2 = sampling.observable(rng, 3, 4), sampling.observable(rng, 3, 4)
    k = sampling.stochastic(rng, a1.space, ms.OutcomeSpace.range(2))
    lhs = qm.post_process(k, qm.mix_observables(lam, a1, a2))
    rhs = lam * qm.post_process(k, a1).effects + (1 - lam) * qm.post_process(k, a2).effects
    np.testing.assert_allclose(lhs.effects, rhs, atol=1e-12)


def test_part_via_map_examples():
    q = position_observable(3)
    assert qm.part_via_map(ms.identity_map(q.space), q).max_deviation(q) == 0.0
    uv = ms.OutcomeSpace(("u", "v"))
    f = ms.OutcomeMap.from_labels(q.space, uv, {"0": "u", "1": "u", "2": "v"})
    b = qm.part_via_map(f, q)
    np.testing.assert_allclose(b["u"], q.effects[0] + q.effects[1])
    np.testing.assert_allclose(b["v"], q.effects[2])
    g = ms.OutcomeMap(q.space, ms.OutcomeSpace.range(4), (0, 1, 2))
    with pytest.raises(NotSurjective):
        qm.part_via_map(g, q)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_part_via_map_matches_zero_one_kernel(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    a = sampling.observable(rng, 3, n)
    f = sampling.outcome_map(rng, a.space, ms.OutcomeSpace.range(int(rng.integers(1, n + 1))))
    assert qm.part_via_map(f, a).max_deviation(qm.post_process(ms.kernel_from_map(f), a)) <= 1e-14


def test_discretize_examples(rng):
    a = sampling.observable(rng, 2, 3)
    whole = qm.discretize(a, ms.Partition(a.space, (frozenset(a.space.labels),)))
    np.testing.assert_allclose(whole.effects[0], np.eye(2), atol=1e-12)
    singletons = qm.discretize(a, ms.Partition(a.space, tuple(frozenset([x]) for x in a.space)))
    np.testing.assert_array_equal(singletons.effects, a.effects)


@pytest.mark.parametrize("seed", range(10))
def test_two_discretizations_coexist_through_the_original(seed):
    rng = np.random.default_rng(seed)
    a = sampling.observable(rng, 3, 6)
    p1, p2 = sampling.partition(rng, a.space), sampling.partition(rng, a.space)
    for p in (p1, p2):
        k = ms.kernel_from_partition(p)
        f = ms.OutcomeMap(a.space, k.target, tuple(int(np.argmax(row)) for row in k.entries))
        assert f.surjective
        assert qm.part_via_map(f, a).max_deviation(qm.discretize(a, p)) <= 1e-14


def test_kernel_from_states_recovers_diagonal_kernel(rng):
    d = 4
    mu = sampling.stochastic(rng, ms.OutcomeSpace.range(d), ms.OutcomeSpace.range(3))
    a = qm.Observable(mu.target, np.array([np.diag(mu.entries[:, j]) for j in range(3)]))
    states = [qm.State.pure(np.eye(d)[i]) for i in range(d)]
    np.testing.assert_array_equal(qm.kernel_from_states(states, a).entries, mu.entries)
    ones = qm.kernel_from_states(states, qm.trivial_observable(d))
    np.testing.assert_array_equal(ones.entries, np.ones((d, 1)))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_kernel_from_states_rows_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    a = sampling.observable(rng, 3, 4)
    states = [sampling.state(rng, 3) for _ in range(5)]
    k = qm.kernel_from_states(states, a)
    assert np.abs(k.entries.sum(axis=1) - 1).max() <= 1e-12
    direct = [[np.trace(s.matrix @ e).real for e in a.effects] for s in states]
    np.testing.assert_allclose(k.entries, direct, atol=1e-14)


def _system(k, phi, times):
    return qm.DynamicalSystem(np.asarray(k, dtype=complex), np.asarray(phi, dtype=complex), tuple(times))


def test_dynamical_kernel_frozen_dynamics(rng):
    phi = sampling.isometry(rng, 3, 1)[:, 0]
    k = qm.dynamical_kernel(_system(np.zeros((3, 3)), phi, [0, 0.5, 1, 7]), sampling.observable(rng, 3, 4))
    for row in k.entries:
        np.testing.assert_allclose(row, k.entries[0], atol=1e-15)


def test_dynamical_kernel_diagonal_hamiltonian():
    sysm = _system(np.diag([0.0, 1.0]), np.array([1, 1]) / np.sqrt(2), np.linspace(0, 10, 21))
    k = qm.dynamical_kernel(sysm, position_observable(2))
    np.testing.assert_allclose(k.entries[:, 0], 0.5, atol=1e-14)


def test_dynamical_system_validation():
    with pytest.raises(ValidationError):
        _system(np.eye(2), [1, 1], [0])
    with pytest.raises(ValidationError):
        _system(np.eye(2), [1, 0], [1, 0])
    with pytest.raises(ValidationError):
        _system([[0, 1], [0, 0]], [1, 0], [0])


@pytest.mark.parametrize("seed", range(10))
def test_dynamical_kernel_heisenberg_picture(seed):
    rng = np.random.default_rng(seed)
    d = 3
    h = sampling.hermitian(rng, d)
    phi = sampling.isometry(rng, d, 1)[:, 0]
    a = sampling.observable(rng, d, 4)
    times = np.linspace(0, 2, 9)
    k = qm.dynamical_kernel(_system(h, phi, times), a)
    for row, t in zip(k.entries, times):
        u = scipy.linalg.expm(-1j * t * h)
        heis = [np.vdot(phi, u.conj().T @ e @ u @ phi).real for e in a.effects]
        np.testing.assert_allclose(row, heis, atol=1e-12)
    # rows move by at most 2 |K| dt in total variation, checked loosely
    dt = times[1] - times[0]
    assert np.abs(np.diff(k.entries, axis=0)).sum(axis=1).max() <= 4 * np.linalg.norm(h, 2) * dt * len(a)


def test_sharpness_predicates():
    q = position_observable(3)
    assert qm.is_sharp(q) and qm.is_rank1(q) and qm.is_atomic(q)
    half = qm.trivial_observable(2, (0.5, 0.5))
    assert not (qm.is_sharp(half) or qm.is_rank1(half) or qm.is_atomic(half))
    qp = seq_product(q, momentum_observable(3))
    np.testing.assert_allclose(qp.effects, np.repeat(q.effects, 3, axis=0) / 3, atol=1e-12)
    assert qm.is_rank1(qp) and not qm.is_sharp(qp)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 5))
def test_sharp_effects_are_orthogonal(seed, d):
    rng = np.random.default_rng(seed)
    a = sampling.atomic_observable(rng, d)
    assert qm.is_sharp(a)
    for x in range(d):
        for y in range(d):
            if x != y:
                assert np.linalg.norm(a.effects[x] @ a.effects[y]) <= 1e-12


def test_atomic_vectors_reconstruct(rng):
    a = sampling.atomic_observable(rng, 4)
    v = qm.atomic_vectors(a)
    np.testing.assert_allclose(np.einsum("ni,nj->nij", v, v.conj()), a.effects, atol=1e-12)
    with pytest.raises(ValidationError):
        qm.atomic_vectors(qm.trivial_observable(2, (0.5, 0.5)))
