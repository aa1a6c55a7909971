"""Built-in reproductions, one per worked example or theorem.

Every scenario takes a seed and returns a Report; randomized draws come from
``numpy.random.default_rng(seed)`` only.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from . import instruments as ins
from . import measures as ms
from . import quantum as qm
from . import sampling
from . import seqprod as sp
from . import sic
from .errors import UnknownScenario
from .linalg import DEFAULT_TOL, Tolerance, fro
from .report import Report

DEFAULT_SEED = 42

SIGMA_Y_DIRECTION = np.array([[0, 1j], [-1j, 0]]) / np.sqrt(2)


def _effects_gap(a: qm.Observable, b: qm.Observable) -> float:
    return a.max_deviation(b)


def example1_identity(seed: int = DEFAULT_SEED, tol: Tolerance = DEFAULT_TOL) -> Report:
    """Identity and constant kernels on measures and observables."""
    rng = np.random.default_rng(seed)
    rep = Report("scenario example1-identity")
    space = ms.OutcomeSpace(("a", "b", "c"))
    worst_id = worst_const = worst_obs = 0.0
    for _ in range(20):
        mu = sampling.probability(rng, space)
        nu = sampling.probability(rng, ms.OutcomeSpace(("u", "v")))
        worst_id = max(worst_id, np.abs(ms.apply_kernel(ms.identity_kernel(space), mu).weights - mu.weights).max())
        out = ms.apply_kernel(ms.constant_kernel(space, nu), mu)
        worst_const = max(worst_const, np.abs(out.weights - nu.weights).max())
        a = sampling.observable(rng, 2, 3, space)
        worst_obs = max(worst_obs, _effects_gap(qm.post_process(ms.identity_kernel(space), a), a))
    rep.bound("identity kernel fixes measures", worst_id, 1e-12)
    rep.bound("constant kernel outputs nu", worst_const, 1e-12)
    rep.bound("identity kernel fixes observables", worst_obs, tol.eq_tol)
    return rep


def example4_qp(seed: int = DEFAULT_SEED, tol: Tolerance = DEFAULT_TOL, dims=(2, 3, 5)) -> Report:
    """Finite position and momentum: ``(Q o P)_(j,k) = Q_j / d`` and ``(P|Q) = I/d``."""
    rep = Report("scenario example4-qp")
    for d in dims:
        q, p = sp.position_observable(d), sp.momentum_observable(d)
        qp = sp.seq_product(q, p).effects.reshape(d, d, d, d)
        pq = sp.seq_product(p, q).effects.reshape(d, d, d, d)
        gap_qp = max(fro(qp[j, k] - q.effects[j] / d) for j in range(d) for k in range(d))
        gap_pq = max(fro(pq[j, k] - p.effects[j] / d) for j in range(d) for k in range(d))
        gap_pgq = max(fro(e - np.eye(d) / d) for e in sp.condition(p, q).effects)
        gap_qgp = max(fro(e - np.eye(d) / d) for e in sp.condition(q, p).effects)
        rep.bound(f"d={d} (QoP)_(j,k) = Q_j/d", gap_qp, 1e-10)
        rep.bound(f"d={d} (PoQ)_(j,k) = P_j/d", gap_pq, 1e-10)
        rep.bound(f"d={d} (P|Q)_k = I/d", gap_pgq, 1e-10)
        rep.bound(f"d={d} (Q|P)_k = I/d", gap_qgp, 1e-10)
        rep.add(f"d={d} QoP rank one, not sharp", qm.is_rank1(sp.seq_product(q, p)) and not qm.is_sharp(sp.seq_product(q, p)))
        rep.add(f"d={d} standard and Fourier bases are MUB", sic.mub_check(sic.BasisPair.standard_fourier(d)))
    return rep


def thm41_sweep(seed: int = DEFAULT_SEED, tol: Tolerance = DEFAULT_TOL, trials: int = 50, dims=(2, 3, 4, 5)) -> Report:
    """Doubly stochastic ``nu`` with a MUB pair gives ``tr C = 1/d``, and conversely."""
    rng = np.random.default_rng(seed)
    rep = Report("scenario thm41-sweep")
    for d in dims:
        space = ms.OutcomeSpace.range(d)
        pair = sic.BasisPair.standard_fourier(d)
        worst = 0.0
        for _ in range(trials):
            c = sic.build_C(sampling.doubly_stochastic(rng, space), pair, tol)
            worst = max(worst, float(np.abs(np.einsum("nii->n", c.effects).real - 1 / d).max()))
        rep.bound(f"d={d} doubly stochastic + MUB: max |tr C - 1/d|", worst, 1e-10, f"trials={trials}")
        least = np.inf
        drawn = 0
        while drawn < trials:
            nu = sampling.stochastic(rng, space, space)
            if nu.column_sum_deviation() <= 0.05:
                continue
            drawn += 1
            c = sic.build_C(nu, pair, tol)
            least = min(least, float(np.abs(np.einsum("nii->n", c.effects).real - 1 / d).max()))
        rep.add(
            f"d={d} column-sum deviation > 0.05 forces trace deviation > 1e-3",
            least > 1e-3,
            least,
            1e-3,
            "value = smallest max-trace-deviation seen",
        )
        uniform = ms.StochasticMatrix(space, space, np.full((d, d), 1 / d))
        u = sampling.unitary(rng, d)
        c = sic.build_C(uniform, sic.BasisPair(sampling.unitary(rng, d).T, u.T), tol)
        gap = float(np.abs(np.einsum("nii->n", c.effects).real - 1 / d).max())
        rep.bound(f"d={d} uniform nu, arbitrary bases: max |tr C - 1/d|", gap, 1e-10)
    return rep


def null_direction_overlap(g: np.ndarray) -> float:
    """``|<G, [[0, i], [-i, 0]]/sqrt 2>|`` for a unit Hilbert-Schmidt ``G``."""
    return abs(np.vdot(SIGMA_Y_DIRECTION, g))


def thm43_nullspace(seed: int = DEFAULT_SEED, tol: Tolerance = DEFAULT_TOL) -> Report:
    rep = Report("scenario thm43-nullspace")
    dims = {}
    for a in (0.1, 0.3, 0.7, 0.9):
        null = sic.trace_null_space(sic.qubit_C(a, tol=tol))
        dims[str(a)] = len(null)
        rep.add(f"a={a} null space dimension is 1", len(null) == 1, len(null))
        if len(null) == 1:
            rep.add(
                f"a={a} null direction along [[0,i],[-i,0]]",
                null_direction_overlap(null[0]) > 1 - 1e-9,
                null_direction_overlap(null[0]),
                1e-9,
                "value = overlap with normalized target",
            )
    for a in (0.0, 0.5, 1.0):
        null = sic.trace_null_space(sic.qubit_C(a, tol=tol))
        dims[str(a)] = len(null)
        rep.add(f"a={a} null space dimension is at least 2", len(null) >= 2, len(null))
    rep.data["null_dimensions"] = dims
    return rep


def cor44_witness(seed: int = DEFAULT_SEED, tol: Tolerance = DEFAULT_TOL, a: float = 0.3, alpha: float = 0.25) -> Report:
    """Two states with the same qubit-``C`` statistics, and the (S4) failure."""
    rep = Report("scenario cor44-witness")
    c = sic.qubit_C(a, tol=tol)
    ic, rank = sic.is_ic(c)
    rep.add("C is not IC", not ic, rank, detail="value = span rank")
    # the null direction is normalized in Hilbert-Schmidt norm, so the off-diagonal is eps/sqrt(2)
    pair = sic.ic_witness_pair(c, epsilon=alpha * np.sqrt(2))
    rho1, rho2 = pair
    target = np.array([[0.5, 1j * alpha], [-1j * alpha, 0.5]])
    rep.bound("rho1 = I/2", fro(rho1.matrix - np.eye(2) / 2), 1e-12)
    rep.bound("rho2 = [[1/2, i alpha], [-i alpha, 1/2]]", fro(rho2.matrix - target), 1e-12)
    rep.bound("identical distributions", sic.distribution_gap(c, rho1, rho2), 1e-12)
    rep.add("states differ", fro(rho1.matrix - rho2.matrix) > 0.3, fro(rho1.matrix - rho2.matrix), 0.3)
    w = np.linalg.eigvalsh(rho2.matrix)
    rep.bound("eigenvalues of rho2 are 1/2 -+ alpha", float(np.abs(w - [0.5 - alpha, 0.5 + alpha]).max()), 1e-12)
    auto = sic.ic_witness_pair(c)
    rep.bound("default witness pair: identical distributions", sic.distribution_gap(c, *auto), 1e-10)
    rep.add("default witness: rho2 min eigenvalue 0.01", abs(np.linalg.eigvalsh(auto[1].matrix)[0] - 0.01) < 1e-12)
    sq = sic.eta_overlap_squares(sic.qubit_nu(a), sic.BasisPair.standard_fourier(2))
    rep.bound("<eta_11, eta_22>^2 = 0", float(sq[0, 3]), 1e-12)
    rep.bound("deviation from 1/12 is 1/12", abs(abs(sq[0, 3] - 1 / 12) - 1 / 12), 1e-12)
    report = sic.sic_report(c)
    rep.add("S1 and S2 hold, S4 fails", report.s1 and report.s2 and not report.s4)
    cond_a, cond_b = sic.ic_necessary_conditions(c)
    rep.add("necessary IC conditions (a) and (b) hold", cond_a and cond_b)
    rep.data["rho2"] = rho2.matrix
    return rep


def lemma32_random(seed: int = DEFAULT_SEED, tol: Tolerance = DEFAULT_TOL, trials: int = 100, dims=(2, 3, 4)) -> Report:
    """``(mu . B | A) = mu . (B | A)`` on random triples."""
    rng = np.random.default_rng(seed)
    rep = Report("scenario lemma32-random")
    for d in dims:
        worst = 0.0
        for t in range(trials):
            na, nb, nm = (int(x) for x in rng.integers(2, 5, size=3))
            a = sampling.atomic_observable(rng, d) if t % 2 else sampling.observable(rng, d, na)
            b = sampling.atomic_observable(rng, d) if t % 3 == 0 else sampling.observable(rng, d, nb)
            mu = sampling.stochastic(rng, b.space, ms.OutcomeSpace.range(nm))
            lhs = sp.condition(qm.post_process(mu, b), a)
            rhs = qm.post_process(mu, sp.condition(b, a))
            worst = max(worst, lhs.max_deviation(rhs))
        rep.bound(f"d={d} max deviation", worst, 1e-9, f"trials={trials}")
    return rep


def nonconverse_pair(d: int = 2) -> tuple[ins.Instrument, ins.Instrument]:
    """Lüders(Q) and measure-Q-then-prepare |0>: same statistics, different updates."""
    q = sp.position_observable(d)
    phi = np.zeros(d)
    phi[0] = 1.0
    return ins.luders(q), ins.measure_and_prepare(q, phi)


def thm26_instruments(seed: int = DEFAULT_SEED, tol: Tolerance = DEFAULT_TOL, trials: int = 50, states: int = 10, dims=(2, 3, 4)) -> Report:
    rng = np.random.default_rng(seed)
    rep = Report("scenario thm26-instruments")
    for d in dims:
        worst_hat = worst_dist = 0.0
        for _ in range(trials):
            n, m = (int(x) for x in rng.integers(2, 5, size=2))
            instr = sampling.instrument(rng, d, n, kraus_per_outcome=int(rng.integers(1, 4)))
            k = sampling.stochastic(rng, instr.space, ms.OutcomeSpace.range(m))
            coarse = ins.post_process_instrument(k, instr)
            lhs = ins.measured_observable(coarse)
            rhs = qm.post_process(k, ins.measured_observable(instr))
            worst_hat = max(worst_hat, lhs.max_deviation(rhs))
            for _ in range(states):
                rho = sampling.state(rng, d)
                got = ins.instrument_distribution(coarse, rho).weights
                want = ms.apply_kernel(k, ins.instrument_distribution(instr, rho)).weights
                worst_dist = max(worst_dist, float(np.abs(got - want).max()))
        rep.bound(f"d={d} (V.I)^ = V.I^", worst_hat, 1e-10, f"trials={trials}")
        rep.bound(f"d={d} distributions of V.I = V(distributions of I)", worst_dist, 1e-10, f"states={states}")
    first, second = nonconverse_pair(2)
    gap = max(
        float(np.abs(ins.instrument_distribution(first, r).weights - ins.instrument_distribution(second, r).weights).max())
        for r in (sampling.state(rng, 2) for _ in range(states))
    )
    rep.bound("non-converse pair: identical distributions", gap, 1e-12)
    rho = qm.State(np.eye(2) / 2)
    differ = not ins.update_state(first, ["1"], rho).equals(ins.update_state(second, ["1"], rho))
    rep.add("non-converse pair: different state updates", differ)
    rep.add("non-converse pair: different actions", not ins.same_action(first, second))
    return rep


def sec1_kernels(seed: int = DEFAULT_SEED, tol: Tolerance = DEFAULT_TOL, trials: int = 100) -> Report:
    """Finite kernels: Dirac recovery, composition, product coexistence, partitions."""
    rng = np.random.default_rng(seed)
    rep = Report("scenario sec1-kernels")
    dirac_exact = compose_gap = product_gap = 0.0
    round_trip = True
    for _ in range(trials):
        n, m, r = (int(x) for x in rng.integers(1, 13, size=3))
        s1, s2, s3 = ms.OutcomeSpace.range(n), ms.OutcomeSpace.range(m), ms.OutcomeSpace.range(r)
        k = sampling.stochastic(rng, s1, s2)
        recovered = np.array([ms.apply_kernel(k, ms.dirac(s1, x)).weights for x in s1])
        dirac_exact = max(dirac_exact, float(np.abs(recovered - k.entries).max()))
        u = sampling.stochastic(rng, s2, s3)
        mu = sampling.probability(rng, s1)
        two_step = ms.apply_kernel(u, ms.apply_kernel(k, mu)).weights
        compose_gap = max(compose_gap, float(np.abs(ms.apply_kernel(ms.compose(k, u), mu).weights - two_step).max()))
        f = sampling.outcome_map(rng, s1, s2, surjective=False)
        g = sampling.outcome_map(rng, s2, s3, surjective=False)
        lhs = ms.compose(ms.kernel_from_map(f), ms.kernel_from_map(g))
        compose_gap = max(compose_gap, float(np.abs(lhs.entries - ms.kernel_from_map(f.then(g)).entries).max()))
        nu = sampling.probability(rng, s2)
        prod, pf, pg = ms.coexist_product(mu, nu)
        product_gap = max(
            product_gap,
            float(np.abs(ms.pushforward(pf, prod).weights - mu.weights).max()),
            float(np.abs(ms.pushforward(pg, prod).weights - nu.weights).max()),
        )
        p = sampling.partition(rng, s1)
        back = ms.partition_from_kernel(ms.kernel_from_partition(p))
        round_trip = round_trip and back is not None and back.canonical() == p.canonical()
    rep.add("Dirac columns recover the kernel exactly", dirac_exact == 0.0, dirac_exact, 0.0)
    rep.bound("composition identities", compose_gap, 1e-12)
    rep.bound("product marginals", product_gap, 1e-12)
    rep.add("partition <-> 0-1 kernel round trip", round_trip, detail=f"trials={trials}")
    return rep


SCENARIOS: dict[str, Callable[..., Report]] = {
    "example1-identity": example1_identity,
    "example4-qp": example4_qp,
    "thm41-sweep": thm41_sweep,
    "thm43-nullspace": thm43_nullspace,
    "cor44-witness": cor44_witness,
    "lemma32-random": lemma32_random,
    "thm26-instruments": thm26_instruments,
    "sec1-kernels": sec1_kernels,
}


def run_scenario(name: str, seed: int = DEFAULT_SEED, tol: Tolerance = DEFAULT_TOL) -> Report:
    try:
        fn = SCENARIOS[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    rep = fn(seed=seed, tol=tol)
    rep.tolerances = {"eq_tol": tol.eq_tol, "psd_tol": tol.psd_tol, "rank_tol": tol.rank_tol}
    rep.data.setdefault("seed", seed)
    return rep
