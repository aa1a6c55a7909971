import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from povm_coarse import measures as ms
from povm_coarse import quantum as qm
from povm_coarse import sampling
from povm_coarse import seqprod as sp
from povm_coarse.errors import DimMismatch, SpaceMismatch
from povm_coarse.sic import BasisPair, mub_check

seeds = st.integers(0, 2**32 - 1)
DIMS = [2, 3, 5]


@pytest.mark.parametrize("d", DIMS)
def test_position_then_momentum(d):
    q, p = sp.position_observable(d), sp.momentum_observable(d)
    qp = sp.seq_product(q, p)
    assert qp.space.labels[1] == "(0,1)"
    np.testing.assert_allclose(qp.effects, np.repeat(q.effects, d, axis=0) / d, atol=1e-10)


@pytest.mark.parametrize("d", DIMS)
def test_conditioning_position_and_momentum_is_trivial(d):
    q, p = sp.position_observable(d), sp.momentum_observable(d)
    for c in (sp.condition(p, q), sp.condition(q, p)):
        np.testing.assert_allclose(c.effects, np.broadcast_to(np.eye(d) / d, (d, d, d)), atol=1e-10)


def test_sharp_square(rng):
    a = sampling.atomic_observable(rng, 3)
    aa = sp.seq_product(a, a)
    for x in range(3):
        for y in range(3):
            want = a.effects[x] if x == y else np.zeros((3, 3))
            np.testing.assert_allclose(aa.effects[3 * x + y], want, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_marginals_and_normalization(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 5))
    a, b = sampling.observable(rng, d, 3), sampling.observable(rng, d, 4)
    ab = sp.seq_product(a, b)
    left = ab.effects.reshape(3, 4, d, d).sum(axis=1)
    np.testing.assert_allclose(left, a.effects, atol=1e-12)
    np.testing.assert_allclose(ab.effects.sum(axis=0), np.eye(d), atol=1e-12)


def test_conditioning_by_trivial_observable(rng):
    b = sampling.observable(rng, 3, 4)
    assert sp.condition(b, qm.trivial_observable(3)).max_deviation(b) <= 1e-12


def test_dimension_and_space_errors(rng):
    a2, a3 = sampling.observable(rng, 2, 2), sampling.observable(rng, 3, 2)
    with pytest.raises(DimMismatch):
        sp.seq_product(a2, a3)
    with pytest.raises(DimMismatch):
        sp.condition(a2, a3)
    k = ms.identity_kernel(ms.OutcomeSpace.range(5))
    with pytest.raises(SpaceMismatch):
        sp.seq_with_postprocessed_right(a2, k, a2)
    with pytest.raises(SpaceMismatch):
        sp.seq_with_postprocessed_left(k, a2, a2)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_postprocessed_right_matches_generic(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 5))
    a, b = sampling.observable(rng, d, 3), sampling.observable(rng, d, 4)
    mu = sampling.stochastic(rng, b.space, ms.OutcomeSpace.range(2))
    out = sp.seq_with_postprocessed_right(a, mu, b)
    assert out.max_deviation(sp.seq_product(a, qm.post_process(mu, b))) <= 1e-10
    same = sp.seq_with_postprocessed_right(a, ms.identity_kernel(b.space), b)
    assert same.max_deviation(sp.seq_product(a, b)) <= 1e-12


@pytest.mark.parametrize("seed", range(20))
def test_sharp_closed_forms(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    # sharp but not atomic: merge two rank-one projections
    atoms = sampling.atomic_observable(rng, d)
    a = qm.part_via_map(sampling.outcome_map(rng, atoms.space, ms.OutcomeSpace.range(d - 1)), atoms)
    assert qm.is_sharp(a)
    b = sampling.observable(rng, d, 3)
    mu = sampling.stochastic(rng, b.space, ms.OutcomeSpace.range(2))
    nu = sampling.stochastic(rng, a.space, ms.OutcomeSpace.range(3))
    assert sp.sharp_right_form(a, mu, b).max_deviation(sp.seq_with_postprocessed_right(a, mu, b)) <= 1e-9
    assert sp.sharp_left_form(nu, a, b).max_deviation(sp.seq_with_postprocessed_left(nu, a, b)) <= 1e-9


@pytest.mark.parametrize("d", DIMS)
@pytest.mark.parametrize("seed", range(10))
def test_atomic_closed_forms(d, seed):
    rng = np.random.default_rng(seed)
    a, b = sampling.atomic_observable(rng, d), sampling.atomic_observable(rng, d)
    mu = sampling.stochastic(rng, b.space, b.space)
    nu = sampling.stochastic(rng, a.space, a.space)
    assert sp.atomic_right_form(a, mu, b).max_deviation(sp.seq_product(a, qm.post_process(mu, b))) <= 1e-9
    assert sp.atomic_left_form(nu, a, b).max_deviation(sp.seq_product(qm.post_process(nu, a), b)) <= 1e-9


def test_identity_left_kernel_gives_overlap_weighted_atoms(rng):
    a, b = sampling.atomic_observable(rng, 3), sampling.atomic_observable(rng, 3)
    out = sp.seq_with_postprocessed_left(ms.identity_kernel(a.space), a, b)
    phi, psi = qm.atomic_vectors(a), qm.atomic_vectors(b)
    for x in range(3):
        for y in range(3):
            w = abs(np.vdot(phi[x], psi[y])) ** 2
            np.testing.assert_allclose(out.effects[3 * x + y], w * a.effects[x], atol=1e-12)


def test_eta_vectors_by_loop(rng):
    phi, psi = sampling.unitary(rng, 3).T, sampling.unitary(rng, 3).T
    nu = sampling.stochastic(rng, ms.OutcomeSpace.range(3), ms.OutcomeSpace.range(2))
    eta = sp.eta_vectors(nu, phi, psi)
    for x in range(2):
        for y in range(3):
            want = sum(np.sqrt(nu.entries[r, x]) * np.vdot(phi[r], psi[y]) * phi[r] for r in range(3))
            np.testing.assert_allclose(eta[x, y], want, atol=1e-14)


@pytest.mark.parametrize("d", DIMS)
@pytest.mark.parametrize("seed", range(10))
def test_fourier_phase_form(d, seed):
    rng = np.random.default_rng(seed)
    q, p = sp.position_observable(d), sp.momentum_observable(d)
    mu = sampling.stochastic(rng, q.space, q.space)
    generic = sp.seq_product(qm.post_process(mu, q), p)
    assert sp.fourier_phase_form(mu).max_deviation(generic) <= 1e-9


def test_fourier_phase_sign_is_not_interchangeable():
    # the opposite phase convention gives the complex conjugate, which differs for d >= 3
    rng = np.random.default_rng(3)
    mu = sampling.stochastic(rng, ms.OutcomeSpace.range(3), ms.OutcomeSpace.range(3))
    form = sp.fourier_phase_form(mu)
    generic = sp.seq_product(qm.post_process(mu, sp.position_observable(3)), sp.momentum_observable(3))
    conj = qm.Observable(form.space, form.effects.conj())
    assert generic.max_deviation(form) <= 1e-12
    assert generic.max_deviation(conj) > 1e-3


@settings(max_examples=40, deadline=None)
@given(seeds, st.booleans())
def test_conditioning_commutes_with_post_processing(seed, atomic):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    if atomic:
        a, b = sampling.atomic_observable(rng, d), sampling.atomic_observable(rng, d)
    else:
        a, b = sampling.observable(rng, d, 3), sampling.observable(rng, d, 4)
    mu = sampling.stochastic(rng, b.space, ms.OutcomeSpace.range(3))
    lhs = sp.condition(qm.post_process(mu, b), a)
    rhs = qm.post_process(mu, sp.condition(b, a))
    assert lhs.max_deviation(rhs) <= 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_conditioned_observable_is_a_part_of_the_product(seed):
    rng = np.random.default_rng(seed)
    a, b = sampling.observable(rng, 3, 3), sampling.observable(rng, 3, 4)
    ab = sp.seq_product(a, b)
    right = ms.OutcomeMap(ab.space, b.space, tuple(j for _ in range(3) for j in range(4)))
    assert qm.part_via_map(right, ab).max_deviation(sp.condition(b, a)) <= 1e-12


def test_fourier_examples():
    np.testing.assert_allclose(sp.fourier(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)
    psi = sp.fourier_basis(2)
    np.testing.assert_allclose(psi[0], np.array([1, 1]) / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(psi[1], np.array([1, -1]) / np.sqrt(2), atol=1e-15)
    for d in range(2, 9):
        f = sp.fourier(d)
        np.testing.assert_allclose(f @ f.conj().T, np.eye(d), atol=1e-13)


@pytest.mark.parametrize("d", range(2, 9))
def test_standard_and_fourier_are_unbiased(d):
    psi = sp.fourier_basis(d)
    np.testing.assert_allclose(np.abs(psi) ** 2, 1 / d, atol=1e-14)
    assert mub_check(BasisPair.standard_fourier(d))
    # momentum effects are F Q_j F^H
    f = sp.fourier(d)
    q, p = sp.position_observable(d), sp.momentum_observable(d)
    np.testing.assert_allclose(p.effects, f @ q.effects @ f.conj().T, atol=1e-13)
