"""Command-line interface.

Exit status: 0 success, 1 verification failure, 2 usage or input error,
3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import io
from .building import Apartment, CapExceeded, ClassSet, ball_around_set, class_of, invariant_classes
from .lattice import Lattice, SingularMatrixError, distance
from .orders import NotAnOrder, chain_class_sets, pz_order, radical_idealizer_chain
from .polytrope import (
    ExponentMatrix,
    InvalidExponentMatrix,
    ball_order,
    bolytrope_order,
    d2_canonical_form,
    polytrope_points,
)
from .suites import SUITES, run_suite
from .valuation import PAdicContext

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _ctx(args) -> PAdicContext:
    if args.p is None:
        raise UsageError("--p is required")
    return PAdicContext(args.p)


def _inputs(args, count=None):
    paths = args.inputs or []
    if count is not None and len(paths) != count:
        raise UsageError(f"expected {count} --in file(s), got {len(paths)}")
    for path in paths:
        if not os.path.exists(path):
            raise UsageError(f"no such file: {path}")
    return [io.read_json(path) for path in paths]


def _matrix(args) -> ExponentMatrix:
    if args.matrix is None:
        raise UsageError("--matrix is required")
    m = io.exponent_matrix_from_data(io.loads(args.matrix))
    if args.d is not None and m.d != args.d:
        raise UsageError(f"--matrix has dimension {m.d}, not {args.d}")
    return m


def _classes_from(docs) -> ClassSet:
    """Class set from lattice documents and/or class-set arrays."""
    out = []
    for doc in docs:
        if isinstance(doc, list):
            out.extend(io.classset_from_data(doc))
        else:
            out.append(class_of(io.lattice_from_data(doc)))
    if not out:
        raise UsageError("no lattice classes given")
    return ClassSet(out)


def _single_order(args):
    (doc,) = _inputs(args, 1)
    return io.order_from_data(doc)


def cmd_distance(args):
    a, b = _inputs(args, 2)
    la, lb = io.lattice_from_data(a), io.lattice_from_data(b)
    if la.ctx != lb.ctx:
        raise UsageError("lattices over different primes")
    return {"distance": distance(la, lb)}


def cmd_pz(args):
    return io.order_to_data(pz_order(_classes_from(_inputs(args))))


def cmd_invariant_lattices(args):
    return io.classset_to_data(invariant_classes(_single_order(args)))


def cmd_radical_chain(args):
    chain = radical_idealizer_chain(_single_order(args))
    return io.chain_to_data(chain, chain_class_sets(chain))


def cmd_ball_order(args):
    if args.r is None:
        raise UsageError("--r is required")
    docs = _inputs(args)
    if docs:
        lat = io.lattice_from_data(docs[0])
    else:
        if args.d is None:
            raise UsageError("--d or an --in lattice is required")
        lat = Lattice.standard(_ctx(args), args.d)
    return io.order_to_data(ball_order(lat.ctx, lat, args.r))


def cmd_bolytrope_order(args):
    ctx = _ctx(args)
    m = _matrix(args)
    return io.order_to_data(bolytrope_order(ctx, None, m, args.r or 0))


def cmd_canonical_d2(args):
    r, m, apt = d2_canonical_form(_single_order(args))
    return {"r": r, "m": m, "frame": [[str(x) for x in row] for row in apt.frame]}


def cmd_export_dot(args):
    if args.matrix is not None:
        ctx = _ctx(args)
        m = _matrix(args)
        apt = Apartment.standard(ctx, m.d)
        center = [apt.vertex(u) for u in polytrope_points(m)]
        classes = ball_around_set(center, args.r or 0)
        return io.export_dot(classes, apt, highlight=center)
    classes = _classes_from(_inputs(args))
    apt = Apartment.standard(classes[0].ctx, classes[0].d) if args.standard_apartment else None
    return io.export_dot(classes, apt)


def cmd_verify(args):
    ids = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; available: all, {', '.join(SUITES)}")
    lines, ok = [], True
    for sid in ids:
        report = run_suite(sid, seed=args.seed)
        lines.append(report.summary())
        ok = ok and report.passed
    return "\n".join(lines) + "\n", ok


COMMANDS = {
    "distance": (cmd_distance, "building distance between two lattice classes"),
    "pz": (cmd_pz, "Plesken-Zassenhaus order of lattice classes"),
    "invariant-lattices": (cmd_invariant_lattices, "invariant lattice classes of an order"),
    "radical-chain": (cmd_radical_chain, "radical idealizer chain with class sets"),
    "ball-order": (cmd_ball_order, "ball order of radius r"),
    "bolytrope-order": (cmd_bolytrope_order, "bolytrope order of an exponent matrix"),
    "canonical-d2": (cmd_canonical_d2, "(r, m, frame) of a closed order in dimension 2"),
    "export-dot": (cmd_export_dot, "distance-1 graph of a class set in DOT"),
    "verify": (cmd_verify, "run a verification suite"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="the prime")
    common.add_argument("--d", type=int, help="dimension")
    common.add_argument("--r", type=int, help="radius")
    common.add_argument("--matrix", help="exponent matrix as a bracketed integer grid")
    common.add_argument("--in", dest="inputs", action="append", metavar="PATH",
                        help="input JSON file (repeatable)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--cap", type=int, help="enumeration cap (overrides BOLYTROPE_CAP)")

    parser = argparse.ArgumentParser(prog="bolytrope", description="Lattices, orders and bolytropes over Z_(p).")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if name == "export-dot":
            sp.add_argument("--standard-apartment", action="store_true",
                            help="label classes by exponent vectors in the standard frame")
        if name == "verify":
            sp.add_argument("suite", help="suite id or 'all'")
            sp.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cap is not None and args.cap <= 0:
        parser.error("--cap must be positive")
    fn = COMMANDS[args.command][0]
    status = EXIT_OK
    saved = os.environ.get("BOLYTROPE_CAP")
    try:
        if args.cap is not None:
            os.environ["BOLYTROPE_CAP"] = str(args.cap)
        result = fn(args)
        if args.command == "verify":
            result, ok = result
            status = EXIT_OK if ok else EXIT_VERIFY
        text = result if isinstance(result, str) else io.dumps(result)
    except CapExceeded as e:
        print(f"bolytrope: resource cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, io.FormatError, SingularMatrixError, InvalidExponentMatrix,
            NotAnOrder, ValueError, json.JSONDecodeError) as e:
        print(f"bolytrope: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if saved is None:
            os.environ.pop("BOLYTROPE_CAP", None)
        else:
            os.environ["BOLYTROPE_CAP"] = saved
    if args.out:
        io.write_output(text, args.out)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
