"""Command line for the povm_coarse library.

Exit status: 0 success, 1 domain failure (invalid entity, incompatible
spaces, failed scenario check), 2 usage or parse failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import document as docmod
from . import instruments as ins
from . import linalg
from . import measures as ms
from . import quantum as qm
from . import seqprod as sp
from . import sic
from .errors import PovmError, UsageError
from .linalg import DEFAULT_TOL, Tolerance
from .report import Report
from .scenarios import DEFAULT_SEED, SCENARIOS, run_scenario


def _load(args) -> docmod.Document:
    if not args.file:
        raise UsageError("this command needs --file")
    return docmod.load(args.file, args.tol)


def _labels(text: str | None) -> list[str]:
    if text is None or text == "":
        return []
    return [x.strip() for x in text.split(",")]


def _observable_checks(rep: Report, obs: qm.Observable) -> None:
    rep.verdict("sharp", qm.is_sharp(obs), tol=obs.tol.eq_tol)
    rep.verdict("rank one", qm.is_rank1(obs), tol=obs.tol.rank_tol)
    rep.verdict("atomic", qm.is_atomic(obs), tol=obs.tol.eq_tol)


def _emit(rep: Report, doc: docmod.Document | None, args) -> None:
    if doc is not None:
        rep.data["document"] = doc.to_json()
        if args.out:
            doc.write(args.out)
            rep.data["written"] = args.out


def cmd_validate(args) -> Report:
    doc = _load(args)
    rep = Report(f"validate {args.file}")
    for name, kind, error in docmod.validate(doc):
        rep.add(f"{kind} {name}", error is None, detail=error or "")
    return rep


def cmd_distribution(args) -> Report:
    doc = _load(args)
    obs = doc.get(args.observable, "observable")
    rho = doc.get(args.state, "state")
    dist = qm.distribution(obs, rho)
    rep = Report(f"distribution {args.observable} in {args.state}")
    rep.data["distribution"] = dict(zip(dist.space.labels, dist.weights.tolist()))
    return rep


def cmd_postprocess(args) -> Report:
    doc = _load(args)
    k = doc.get(args.kernel, "stochastic_matrix")
    a = doc.get(args.observable, "observable")
    b = qm.post_process(k, a)
    rep = Report(f"postprocess {args.kernel} . {args.observable}")
    rep.add("result is an observable", True, linalg.fro(b.effects.sum(axis=0) - np.eye(b.dim)), args.tol.eq_tol)
    _observable_checks(rep, b)
    _emit(rep, docmod.document_of(b.dim, **{args.name or f"{args.kernel}.{args.observable}": b}), args)
    return rep


def cmd_seqprod(args) -> Report:
    doc = _load(args)
    a = doc.get(args.first, "observable")
    b = doc.get(args.second, "observable")
    c = sp.seq_product(a, b)
    rep = Report(f"seqprod {args.first} o {args.second}")
    marginal = c.effects.reshape(len(a), len(b), a.dim, a.dim).sum(axis=1)
    rep.bound("sum over second outcome returns the first observable", max(linalg.fro(m - e) for m, e in zip(marginal, a.effects)), args.tol.eq_tol)
    # deviation from the rank-one form A_x / |Omega_B|, which holds for mutually unbiased atomic pairs
    flat = c.effects.reshape(len(a), len(b), a.dim, a.dim)
    rep.data["max_deviation_from_A_x/n"] = max(
        linalg.fro(flat[x, y] - a.effects[x] / len(b)) for x in range(len(a)) for y in range(len(b))
    )
    _observable_checks(rep, c)
    _emit(rep, docmod.document_of(c.dim, **{args.name or f"{args.first}o{args.second}": c}), args)
    return rep


def cmd_condition(args) -> Report:
    doc = _load(args)
    b = doc.get(args.observable, "observable")
    a = doc.get(args.given, "observable")
    c = sp.condition(b, a)
    rep = Report(f"condition ({args.observable}|{args.given})")
    rep.data["max_deviation_from_I/n"] = max(linalg.fro(e - np.eye(c.dim) / len(c)) for e in c.effects)
    rep.verdict("trivial observable", all(linalg.mat_equal(e, e.trace() / c.dim * np.eye(c.dim), c.tol) for e in c.effects), tol=c.tol.eq_tol)
    _emit(rep, docmod.document_of(c.dim, **{args.name or f"({args.observable}|{args.given})": c}), args)
    return rep


def cmd_discretize(args) -> Report:
    doc = _load(args)
    a = doc.get(args.observable, "observable")
    blocks = [frozenset(_labels(b)) for b in args.blocks.split(";")]
    p = ms.Partition(a.space, tuple(blocks))
    b = qm.discretize(a, p)
    rep = Report(f"discretize {args.observable} by {args.blocks}")
    rep.data["blocks"] = list(b.space.labels)
    _emit(rep, docmod.document_of(b.dim, **{args.name or f"{args.observable}_disc": b}), args)
    return rep


def cmd_instrument(args) -> Report:
    doc = _load(args)
    instr = doc.get(args.instrument, "instrument")
    rep = Report(f"instrument {args.action} {args.instrument}")
    if args.action == "hat":
        hat = ins.measured_observable(instr)
        _emit(rep, docmod.document_of(hat.dim, **{args.name or f"{args.instrument}^": hat}), args)
        return rep
    if args.action == "coarse":
        if not args.kernel:
            raise UsageError("instrument coarse needs --kernel")
        k = doc.get(args.kernel, "stochastic_matrix")
        coarse = ins.post_process_instrument(k, instr)
        lhs = ins.measured_observable(coarse)
        rhs = qm.post_process(k, ins.measured_observable(instr))
        rep.bound("measured observable of coarse instrument = kernel . measured observable", lhs.max_deviation(rhs), args.tol.eq_tol)
        _emit(rep, docmod.document_of(coarse.dim, **{args.name or f"{args.kernel}.{args.instrument}": coarse}), args)
        return rep
    if not args.state:
        raise UsageError(f"instrument {args.action} needs --state")
    rho = doc.get(args.state, "state")
    outcomes = _labels(args.outcomes) if args.outcomes is not None else list(instr.space.labels)
    if args.action == "apply":
        m, p = ins.apply(instr, outcomes, rho)
        rep.data["probability"] = p
        rep.data["output"] = m
        return rep
    post = ins.update_state(instr, outcomes, rho)
    rep.data["probability"] = ins.apply(instr, outcomes, rho)[1]
    _emit(rep, docmod.document_of(post.dim, **{args.name or "posterior": post}), args)
    return rep


def cmd_check_ic(args) -> Report:
    doc = _load(args)
    c = doc.get(args.observable, "observable")
    ic, rank = sic.is_ic(c)
    null = sic.trace_null_space(c)
    rep = Report(f"check-ic {args.observable}")
    rep.verdict("informationally complete", ic, rank, args.tol.rank_tol, f"span rank {rank} of {c.dim ** 2}")
    rep.data["null_space_dimension"] = len(null)
    rep.data["null_space"] = [docmod.encode_matrix(g) for g in null]
    cond_a, cond_b = sic.ic_necessary_conditions(c)
    rep.verdict("no effect has both eigenvalues 0 and 1", cond_a, tol=args.tol.rank_tol)
    rep.verdict("every effect fails to commute with another", cond_b, tol=args.tol.eq_tol)
    pair = sic.ic_witness_pair(c)
    if pair is not None:
        rho1, rho2 = pair
        rep.bound("witness states give identical distributions", sic.distribution_gap(c, rho1, rho2), 1e-10)
        rep.data["witness_distance"] = linalg.fro(rho1.matrix - rho2.matrix)
        _emit(rep, docmod.document_of(c.dim, rho1=rho1, rho2=rho2), args)
    return rep


def cmd_check_sic(args) -> Report:
    doc = _load(args)
    a = doc.get(args.observable, "observable")
    r = sic.sic_report(a)
    d = a.dim
    rep = Report(f"check-sic {args.observable}")
    rep.verdict("S1 |outcomes| = d^2", r.s1, r.cardinality)
    rep.verdict("S2 rank one", r.s2, r.max_second_eigenvalue, args.tol.rank_tol, "value = largest second eigenvalue")
    rep.verdict("S3 tr A_x = 1/d", r.s3, r.max_trace_deviation, args.tol.eq_tol)
    rep.verdict(f"S4 tr A_x A_y = {sic.pair_target(d):.6g}", r.s4, r.max_pair_deviation, args.tol.eq_tol, f"worst pair {r.worst_pair}")
    rep.verdict("informationally complete", r.ic, r.span_rank, args.tol.rank_tol)
    rep.verdict("SIC", r.sic)
    rep.data["report"] = r.as_dict()
    return rep


def cmd_dyn_kernel(args) -> Report:
    doc = _load(args)
    system = doc.get(args.system, "dynamical_system")
    a = doc.get(args.observable, "observable")
    k = qm.dynamical_kernel(system, a)
    rep = Report(f"dyn-kernel {args.system} {args.observable}")
    rep.bound("rows are probability vectors", float(np.abs(k.entries.sum(axis=1) - 1).max()), 1e-9)
    rep.data["kernel"] = {t: dict(zip(k.target.labels, row)) for t, row in zip(k.source.labels, k.entries.tolist())}
    _emit(rep, docmod.document_of(system.dim, **{args.name or "dynamical_kernel": k}), args)
    return rep


def cmd_mub(args) -> Report:
    doc = _load(args)
    pair = sic.BasisPair(doc.get(args.left, "basis"), doc.get(args.right, "basis"))
    rep = Report(f"mub {args.left} {args.right}")
    dev = float(np.abs(pair.overlaps() - 1 / pair.dim).max())
    rep.verdict("mutually unbiased", sic.mub_check(pair), dev, 1e-10, "value = max |overlap^2 - 1/d|")
    return rep


def cmd_build_c(args) -> Report:
    if args.a is not None:
        c = sic.qubit_C(args.a, tol=args.tol)
        label = f"qubit a={args.a}"
    else:
        doc = _load(args)
        nu = doc.get(args.kernel, "stochastic_matrix")
        pair = sic.BasisPair(doc.get(args.left, "basis"), doc.get(args.right, "basis"))
        c = sic.build_C(nu, pair, args.tol)
        label = f"{args.kernel} {args.left} {args.right}"
    rep = Report(f"build-c {label}")
    traces = np.einsum("nii->n", c.effects).real
    rep.data["traces"] = dict(zip(c.space.labels, traces.tolist()))
    rep.verdict("all traces 1/d", bool(np.abs(traces - 1 / c.dim).max() <= args.tol.eq_tol), float(np.abs(traces - 1 / c.dim).max()), args.tol.eq_tol)
    _emit(rep, docmod.document_of(c.dim, **{args.name or "C": c}), args)
    return rep


def cmd_scan_bases(args) -> Report:
    thetas = np.linspace(0, np.pi / 2, args.steps)
    phases = np.linspace(0, np.pi, args.steps)
    rows = sic.scan_qubit_bases(args.a, thetas, phases)
    rep = Report(f"scan-bases a={args.a}")
    rep.data["max_rank"] = max(r["rank"] for r in rows)
    rep.data["ic_points"] = sum(r["ic"] for r in rows)
    rep.data["grid"] = rows
    return rep


def cmd_scenario(args) -> Report:
    if args.scenario_name == "list":
        rep = Report("scenario list")
        rep.data["scenarios"] = sorted(SCENARIOS)
        return rep
    return run_scenario(args.scenario_name, seed=args.seed, tol=args.tol)


def _tolerance(args) -> Tolerance:
    try:
        return DEFAULT_TOL.replace(eq_tol=args.tol_eq)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--file", "-f", help="input document (JSON)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized checks (default %(default)s)")
    common.add_argument("--tol-eq", type=float, default=DEFAULT_TOL.eq_tol, help="relative equality tolerance")
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--out", "-o", help="write the resulting document here")
    common.add_argument("--name", help="entity name for the result")

    parser = argparse.ArgumentParser(prog="povm-coarse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=fn)
        return p

    add("validate", cmd_validate, "construct every entity and report failures")
    p = add("distribution", cmd_distribution, "outcome distribution of an observable in a state")
    p.add_argument("--observable", required=True)
    p.add_argument("--state", required=True)
    p = add("postprocess", cmd_postprocess, "coarse-grain an observable by a stochastic matrix")
    p.add_argument("--kernel", required=True)
    p.add_argument("--observable", required=True)
    p = add("seqprod", cmd_seqprod, "sequential product of two observables")
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p = add("condition", cmd_condition, "condition an observable by another")
    p.add_argument("--observable", required=True)
    p.add_argument("--given", required=True)
    p = add("discretize", cmd_discretize, "discretize an observable by a partition")
    p.add_argument("--observable", required=True)
    p.add_argument("--blocks", required=True, help='blocks as "a,b;c"')
    p = add("instrument", cmd_instrument, "apply, update, hat or coarse-grain an instrument")
    p.add_argument("action", choices=["apply", "update", "hat", "coarse"])
    p.add_argument("--instrument", required=True)
    p.add_argument("--state")
    p.add_argument("--outcomes", help="comma-separated outcome labels (default: all)")
    p.add_argument("--kernel")
    p = add("check-ic", cmd_check_ic, "informational completeness, null space and witness states")
    p.add_argument("--observable", required=True)
    p = add("check-sic", cmd_check_sic, "symmetry conditions S1-S4 and IC")
    p.add_argument("--observable", required=True)
    p = add("dyn-kernel", cmd_dyn_kernel, "dynamical kernel of a system and an observable")
    p.add_argument("--system", required=True)
    p.add_argument("--observable", required=True)
    p = add("mub", cmd_mub, "test two bases for mutual unbiasedness")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p = add("build-c", cmd_build_c, "rank-one observable (nu . A) o B from two bases")
    p.add_argument("--a", type=float, help="qubit construction with nu = [[a, 1-a], [1-a, a]]")
    p.add_argument("--kernel")
    p.add_argument("--left")
    p.add_argument("--right")
    p = add("scan-bases", cmd_scan_bases, "IC rank of the qubit C over a grid of second bases")
    p.add_argument("--a", type=float, default=0.3)
    p.add_argument("--steps", type=int, default=9)
    p = add("scenario", cmd_scenario, "run a built-in reproduction")
    p.add_argument("scenario_name", metavar="name", help="one of: " + ", ".join(sorted(SCENARIOS)) + ", or list")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = None
    try:
        args.tol = _tolerance(args)
        rep = args.func(args)
    except UsageError as exc:
        rep = Report(args.command, status=2)
        rep.data["error"] = str(exc)
    except PovmError as exc:
        rep = Report(args.command, status=1)
        rep.data["error"] = f"{type(exc).__name__}: {exc}"
    tol = getattr(args, "tol", DEFAULT_TOL)
    rep.tolerances = rep.tolerances or {"eq_tol": tol.eq_tol, "psd_tol": tol.psd_tol, "rank_tol": tol.rank_tol}
    if rep.status is None:
        rep.status = rep.exit_status()
    text = rep.dumps_json() if args.json else rep.render_text()
    print(text)
    return rep.status


if __name__ == "__main__":
    sys.exit(main())
