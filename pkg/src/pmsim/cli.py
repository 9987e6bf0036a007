"""Command-line entry point.

    pmsim behaviors --out behaviors.json
    pmsim certify   --out section.json [--ray-cap N]
    pmsim ensemble  --state rho.json --out ensemble.json [--depth L]
    pmsim simulate  --state rho.json [--ensemble ensemble.json] C,c,gamma
    pmsim selftest
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import automata as au
from . import dd
from . import ensemble as en
from . import io
from . import quantum as qm
from . import section as se
from .errors import (
    ClassificationMismatch,
    ConstructionInvalid,
    DDOverflow,
    IncompatibleSequence,
    InternalInconsistency,
    InvalidState,
)
from .exact import rat_str
from .parallel import pmap

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERDICT = 3
EXIT_RESOURCE = 4
EXIT_INTERNAL = 5



def _positive_int(minimum):
    def parse(s):
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}")
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="output file")
    common.add_argument("--depth", type=_positive_int(2), default=3,
                        help="verification depth L (default 3)")
    common.add_argument("--ray-cap", type=_positive_int(1), default=dd.DEFAULT_RAY_CAP,
                        help="abort double description beyond this many rays")
    common.add_argument("--jobs", type=_positive_int(1), default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="pmsim", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("behaviors", parents=[common], help="dump the 240 behaviors and matrix A")
    sub.add_parser("certify", parents=[common], help="compute facets and witness operators")
    e = sub.add_parser("ensemble", parents=[common], help="solve for p(lambda) for a state")
    e.add_argument("--state", type=Path, required=True)
    s = sub.add_parser("simulate", parents=[common], help="probability table of one sequence")
    s.add_argument("--state", type=Path, required=True)
    s.add_argument("--ensemble", type=Path)
    s.add_argument("sequence", help="comma-separated observables, e.g. C,c,gamma")
    sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    return p


# ---------------------------------------------------------------------------

def _check_behavior(lam):
    b = au.behavior(lam)
    return au.deterministic_check(b, 5), au.ell_independence_check(b)


def cmd_behaviors(args, base=None) -> int:
    if base is None:
        fam = au.enumerate_behaviors()
        # re-validate in parallel so --jobs is exercised; results are ordered
        for b, (viol, ell) in zip(fam, pmap(_check_behavior, [b.lam for b in fam], args.jobs)):
            if viol is not None or not ell:
                raise ConstructionInvalid(f"behavior λ={b.lam} invalid", report=viol)
        a = au.behavior_matrix()
    else:
        fam = au.enumerate_behaviors(base)
        a = tuple(zip(*[(1,) + au.v_vector(b) for b in fam]))
    out = args.out or Path("behaviors.json")
    io.write_text(out, io.dumps(io.behaviors_json(fam)))
    io.write_text(out.with_suffix(".csv"), io.matrix_csv(a))
    print(f"wrote {len(fam)} behaviors to {out} and the {len(a)}x{len(a[0])} matrix to "
          f"{out.with_suffix('.csv')}")
    return EXIT_OK


def cmd_certify(args) -> int:
    sec = se.compute_section(cap=args.ray_cap, jobs=args.jobs)
    rep = sec.report
    out = args.out or Path("section.json")
    io.write_text(out, io.dumps(io.section_json(sec)))
    print(f"section rays: {rep.ray_count} (preimage rays {sec.generators.raw_count})")
    print(f"facet rows: {rep.row_count} ({rep.facet_count} facets, "
          f"{rep.row_count - rep.facet_count} equality rows)")
    print(f"nonzero witnesses: {rep.nonzero_witnesses}")
    for name, n in rep.per_context().items():
        print(f"  {name}: {n} witnesses")
    ok = rep.q_in_p and rep.nonzero_witnesses == 24 and all(
        v.psd and v.rank_one_projector for v in rep.verdicts)
    print(f"Q subset of P: {'true' if ok else 'false'}")
    print(f"report written to {out}")
    return EXIT_OK if ok else EXIT_VERDICT


def cmd_ensemble(args) -> int:
    state = io.load_state(args.state)
    q = qm.q_vector(state)
    result = en.find_ensemble(q)
    if not result.feasible:
        raise InternalInconsistency(
            "no ensemble reproduces a valid quantum state; the section certificate is wrong")
    ens = result.ensemble
    ver = en.verify_ensemble(ens, state, args.depth)
    out = args.out or Path("ensemble.json")
    io.write_text(out, io.dumps(io.ensemble_json(ens)))
    rep_path = out.with_name(out.stem + ".verify.json")
    io.write_text(rep_path, io.dumps(io.verification_json(ver, args.depth)))
    print(f"ensemble with {len(ens.support)} behaviors written to {out}")
    for lam in ens.support:
        b = au.behavior(lam)
        print(f"  λ={lam:3d} (flip {b.flip:2d}, perm {au.PERM_NAMES[b.perm]}, s0 {b.s0}): "
              f"{rat_str(ens.weights[lam])}")
    if ver is None:
        print(f"verification to depth {args.depth}: pass")
        return EXIT_OK
    print(f"verification to depth {args.depth}: FAIL: {ver}")
    return EXIT_VERDICT


def cmd_simulate(args) -> int:
    state = io.load_state(args.state)
    try:
        seq = [qm.canonical_label(x) for x in args.sequence.split(",") if x.strip()]
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_INPUT
    if not seq:
        print("error: empty sequence", file=sys.stderr)
        return EXIT_INPUT
    table = qm.outcome_table(state, seq)
    ens = io.load_ensemble(args.ensemble) if args.ensemble else None
    header = "outcomes".ljust(4 * len(seq) + 2) + "quantum"
    if ens:
        header += "      automaton"
    print(f"sequence {','.join(seq)}")
    print(header)
    all_equal = True
    for outs, p in table.items():
        line = " ".join(f"{o:+d}" for o in outs).ljust(4 * len(seq) + 2) + rat_str(p).ljust(12)
        if ens:
            c = au.ensemble_prob(ens.weights, seq, outs)
            eq = c == p
            all_equal &= eq
            line += " " + rat_str(c).ljust(12) + ("" if eq else " MISMATCH")
        print(line)
    if ens:
        print(f"equal: {'true' if all_equal else 'false'}")
        return EXIT_OK if all_equal else EXIT_VERDICT
    return EXIT_OK


def cmd_selftest(args, base=None) -> int:
    from .acceptance import run_all

    t0 = time.perf_counter()
    failed = None
    for res in run_all(base=base):
        print(res.line(), flush=True)
        if not res.ok:
            failed = res
            break
    print(f"total {time.perf_counter() - t0:.1f}s")
    if failed is not None:
        print(f"first failing criterion: {failed.number} ({failed.title})")
        return EXIT_VERDICT
    print("all criteria pass")
    return EXIT_OK


COMMANDS = {
    "behaviors": cmd_behaviors,
    "certify": cmd_certify,
    "ensemble": cmd_ensemble,
    "simulate": cmd_simulate,
    "selftest": cmd_selftest,
}


def main(argv=None, *, base_automaton=None) -> int:
    """Run one command; returns the exit code.

    ``base_automaton`` replaces the generating automaton of the behavior
    family in ``behaviors`` and ``selftest`` (fault injection for tests).
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in ("behaviors", "selftest"):
            return COMMANDS[args.command](args, base=base_automaton)
        return COMMANDS[args.command](args)
    except (InvalidState, IncompatibleSequence, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConstructionInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.report is not None:
            print(f"violation: {exc.report}", file=sys.stderr)
        return EXIT_VERDICT
    except ClassificationMismatch as exc:
        print(f"error: classification mismatch: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except DDOverflow as exc:
        print(f"error: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InternalInconsistency as exc:
        print(f"error: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
