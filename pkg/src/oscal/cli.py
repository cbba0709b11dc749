"""Command-line front end.

Reads documents, runs one computation or verification, writes a JSON
result (documents for document-valued outputs, small result objects
otherwise) to standard output.  Exit code 0 means success or a verified
true; 1 means a verified false, an undecided comparison, an exhausted
search, a stage cap, or an extraction whose preconditions fail on valid
input; 2 means the input itself was unusable (malformed document, wrong
kind, invalid arguments).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import documents
from .errors import (
    DocumentError,
    ExactnessError,
    InternalCheckError,
    MismatchError,
    PreconditionError,
    ResourceCapError,
    SearchExhaustedError,
    SpaceError,
)
from .extraction import (
    CIFunction,
    FunctionSeq,
    WitnessBundle,
    build_jump_chain,
    check_difference_witness,
    check_jump_chain,
)
from .func import QFunction, lsc_envelope, usc_envelope
from .oracle import lift_function, oracle_dnorm
from .rationals import Verdict, format_rational, parse_rational
from .seqlab import (
    PolyBasis,
    basis_constant,
    check_identities,
    duc_norm,
    eps_cc_value,
    wuc_norm,
)
from .space import TreeSpace, unroll
from .transfinite import DEFAULT_CAP, CapExceeded, d_index, d_norm, decompose, iterate

_VERDICT_TEXT = {
    Verdict.TRUE: "true",
    Verdict.FALSE: "false",
    Verdict.UNDECIDED: "undecided",
}


def _diag(message: str) -> None:
    print("oscal: %s" % message, file=sys.stderr)


def _emit(args, obj) -> None:
    if getattr(args, "quiet", False):
        return
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _emit_verdict(args, obj, verdict: str) -> None:
    if getattr(args, "quiet", False):
        sys.stdout.write(verdict + "\n")
    else:
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise DocumentError("cannot read %s: %s" % (path, exc.strerror)) from None


_KIND_NAME = {
    TreeSpace: "space",
    QFunction: "qfunction",
    CIFunction: "cifunction",
    FunctionSeq: "sequence",
    PolyBasis: "basis",
    WitnessBundle: "witness",
}


def _load(path: str, *expected) -> documents.Document:
    doc = documents.loads(_read_text(path))
    if expected and not isinstance(doc, expected):
        raise DocumentError(
            "%s: expected a %s document, got %s"
            % (
                path,
                " or ".join(_KIND_NAME[cls] for cls in expected),
                documents.document_kind(doc),
            )
        )
    return doc


def _load_function(path: str) -> QFunction:
    doc = _load(path, QFunction, CIFunction)
    if isinstance(doc, CIFunction):
        return doc.as_qfunction()
    return doc


def _cap(args) -> int:
    value = getattr(args, "cap", None)
    if value is not None:
        if value < 1:
            raise PreconditionError("cap must be a positive integer")
        return value
    env = os.environ.get("OSCAL_CAP")
    if env is not None:
        if not env.isdigit() or int(env) < 1:
            raise PreconditionError(
                "OSCAL_CAP must be a positive integer, got %r" % env
            )
        return int(env)
    return DEFAULT_CAP


def _write_out(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise DocumentError("cannot write %s: %s" % (path, exc.strerror)) from None


# -- commands ------------------------------------------------------------------


def cmd_space_validate(args) -> int:
    doc = _load(args.file, TreeSpace)
    violations = doc.validate()
    if violations:
        for line in violations:
            _diag(line)
        return 2
    if args.quiet:
        sys.stdout.write("ok\n")
    else:
        sys.stdout.write(documents.dumps(doc))
    return 0


def cmd_fn_envelope(args) -> int:
    f = _load_function(args.file)
    out = usc_envelope(f) if args.kind == "upper" else lsc_envelope(f)
    if not args.quiet:
        sys.stdout.write(documents.dumps(out))
    return 0


def cmd_fn_osc(args) -> int:
    f = _load_function(args.file)
    kind = "v" if args.positive else "osc"
    trace = iterate(f, kind, _cap(args))
    if args.alpha is not None:
        if args.alpha < len(trace.stages):
            out = trace.stages[args.alpha]
        elif trace.stabilized_at is not None:
            out = trace.stages[-1]
        else:
            _diag(
                "stage %d not reached within cap %d and the chain has not "
                "stabilized" % (args.alpha, trace.cap)
            )
            return 1
    else:
        if trace.stabilized_at is None:
            _diag("chain did not stabilize within cap %d" % trace.cap)
            return 1
        out = trace.stages[trace.stabilized_at]
    if not args.quiet:
        sys.stdout.write(documents.dumps(out))
    return 0


def cmd_fn_index(args) -> int:
    f = _load_function(args.file)
    res = d_index(f, _cap(args))
    if isinstance(res, CapExceeded):
        _diag("chain did not stabilize within cap %d" % res.cap)
        return 1
    if args.quiet:
        sys.stdout.write("%d\n" % res)
    else:
        _emit(args, {"i_D": str(res)})
    return 0


def cmd_fn_dnorm(args) -> int:
    f = _load_function(args.file)
    if args.unroll is not None:
        unrolled, node_map = unroll(f.space, args.unroll)
        f = lift_function(f, unrolled, node_map)
    formula = d_norm(f, _cap(args))
    if isinstance(formula, CapExceeded):
        _diag("chain did not stabilize within cap %d" % formula.cap)
        return 1
    if not args.oracle:
        if args.quiet:
            sys.stdout.write(format_rational(formula) + "\n")
        else:
            _emit(args, {"d_norm": format_rational(formula)})
        return 0
    res = oracle_dnorm(f)
    agree = formula == res.optimum
    obj = {
        "formula": format_rational(formula),
        "oracle": format_rational(res.optimum),
        "agree": agree,
    }
    _emit_verdict(args, obj, "true" if agree else "false")
    return 0 if agree else 1


def cmd_fn_decompose(args) -> int:
    f = _load_function(args.file)
    dec = decompose(f, _cap(args))
    if isinstance(dec, CapExceeded):
        _diag("chain did not stabilize within cap %d" % dec.cap)
        return 1
    obj = {
        "norm": format_rational(dec.norm),
        "u": documents.document_obj(dec.u),
        "v": documents.document_obj(dec.v),
    }
    text = json.dumps(obj, indent=2) + "\n"
    _write_out(args.out, text)
    if not args.quiet:
        sys.stdout.write(text)
    return 0


def cmd_seq_identities(args) -> int:
    basis = _load(args.file, PolyBasis)
    rep = check_identities(basis)
    obj = {
        "checks": {name: bool(ok) for name, ok in rep.checks.items()},
        "lambda": format_rational(rep.lambda_),
        "summing_norm": format_rational(rep.summing_norm),
        "coefficient_norms": [format_rational(v) for v in rep.coefficient_norms],
        "block_projection_norms": [
            format_rational(v) for v in rep.block_projection_norms
        ],
        "sup_basis_norm": format_rational(rep.sup_basis_norm),
        "all_pass": rep.all_pass,
    }
    _emit_verdict(args, obj, "true" if rep.all_pass else "false")
    return 0 if rep.all_pass else 1


def cmd_seq_basis_constant(args) -> int:
    basis = _load(args.file, PolyBasis)
    value = basis_constant(basis)
    if args.quiet:
        sys.stdout.write(format_rational(value) + "\n")
    else:
        _emit(args, {"basis_constant": format_rational(value)})
    return 0


def cmd_seq_wuc(args) -> int:
    basis = _load(args.file, PolyBasis)
    value = wuc_norm(basis.space, basis.vectors)
    if args.quiet:
        sys.stdout.write(format_rational(value) + "\n")
    else:
        _emit(args, {"wuc": format_rational(value)})
    return 0


def cmd_seq_duc(args) -> int:
    basis = _load(args.file, PolyBasis)
    value = duc_norm(basis.space, basis.vectors)
    if args.quiet:
        sys.stdout.write(format_rational(value) + "\n")
    else:
        _emit(args, {"duc": format_rational(value)})
    return 0


def _parse_zeros(text: str) -> frozenset[int]:
    if not text:
        return frozenset()
    out = set()
    for part in text.split(","):
        part = part.strip()
        if not part.isdigit():
            raise PreconditionError(
                "--zeros expects comma-separated positions, got %r" % part
            )
        out.add(int(part))
    return frozenset(out)


def cmd_seq_eps_cc(args) -> int:
    basis = _load(args.file, PolyBasis)
    value = eps_cc_value(basis, _parse_zeros(args.zeros), args.j0)
    if args.quiet:
        sys.stdout.write(format_rational(value) + "\n")
    else:
        _emit(
            args,
            {
                "eps_cc": format_rational(value),
                "label": "stage-%d bound" % basis.size,
            },
        )
    return 0


def cmd_extract_run(args) -> int:
    seq = _load(args.file, FunctionSeq)
    eta = parse_rational(args.eta)
    try:
        bundle = build_jump_chain(seq, args.alpha, args.x, eta)
    except (PreconditionError, SearchExhaustedError) as exc:
        _diag(str(exc))
        return 1
    text = documents.dumps(bundle)
    _write_out(args.out, text)
    if not args.quiet:
        sys.stdout.write(text)
    return 0


def cmd_extract_check(args) -> int:
    seq = _load(args.seqfile, FunctionSeq)
    witness = _load(args.witnessfile, WitnessBundle)
    if witness.points:
        rep = check_jump_chain(seq, witness)
        verdict = rep.verdict
        obj = {
            "conditions": {
                name: _VERDICT_TEXT[v] for name, v in rep.conditions.items()
            },
            "verdict": _VERDICT_TEXT[verdict],
        }
    else:
        verdict = check_difference_witness(
            seq,
            witness.indices,
            witness.m,
            witness.t,
            witness.k,
            witness.lam,
            witness.eta,
        )
        obj = {"verdict": _VERDICT_TEXT[verdict]}
    _emit_verdict(args, obj, _VERDICT_TEXT[verdict])
    return 0 if verdict is Verdict.TRUE else 1


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscal",
        description="exact oscillation calculus on finitely presented spaces",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--quiet", action="store_true", help="print only the verdict"
    )
    capper = argparse.ArgumentParser(add_help=False)
    capper.add_argument(
        "--cap", type=int, default=None, help="stage cap (default OSCAL_CAP or 64)"
    )
    sub = parser.add_subparsers(dest="command")

    p_space = sub.add_parser("space", help="space documents")
    space_sub = p_space.add_subparsers(dest="subcommand")
    p = space_sub.add_parser("validate", parents=[common])
    p.add_argument("file")
    p.set_defaults(handler=cmd_space_validate)

    p_fn = sub.add_parser("fn", help="node functions")
    fn_sub = p_fn.add_subparsers(dest="subcommand")

    p = fn_sub.add_parser("envelope", parents=[common])
    p.add_argument("file")
    p.add_argument("--kind", choices=("upper", "lower"), required=True)
    p.set_defaults(handler=cmd_fn_envelope)

    p = fn_sub.add_parser("osc", parents=[common, capper])
    p.add_argument("file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--alpha", type=int, default=None)
    group.add_argument("--stabilize", action="store_true")
    p.add_argument("--positive", action="store_true")
    p.set_defaults(handler=cmd_fn_osc)

    p = fn_sub.add_parser("index", parents=[common, capper])
    p.add_argument("file")
    p.set_defaults(handler=cmd_fn_index)

    p = fn_sub.add_parser("dnorm", parents=[common, capper])
    p.add_argument("file")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--unroll", type=int, default=None)
    p.set_defaults(handler=cmd_fn_dnorm)

    p = fn_sub.add_parser("decompose", parents=[common, capper])
    p.add_argument("file")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(handler=cmd_fn_decompose)

    p_seq = sub.add_parser("seq", help="finite bases and series")
    seq_sub = p_seq.add_subparsers(dest="subcommand")

    p = seq_sub.add_parser("identities", parents=[common])
    p.add_argument("file")
    p.set_defaults(handler=cmd_seq_identities)

    p = seq_sub.add_parser("basis-constant", parents=[common])
    p.add_argument("file")
    p.set_defaults(handler=cmd_seq_basis_constant)

    p = seq_sub.add_parser("wuc", parents=[common])
    p.add_argument("file")
    p.set_defaults(handler=cmd_seq_wuc)

    p = seq_sub.add_parser("duc", parents=[common])
    p.add_argument("file")
    p.set_defaults(handler=cmd_seq_duc)

    p = seq_sub.add_parser("eps-cc", parents=[common])
    p.add_argument("file")
    p.add_argument("--zeros", required=True)
    p.add_argument("--j0", type=int, required=True)
    p.set_defaults(handler=cmd_seq_eps_cc)

    p_extract = sub.add_parser("extract", help="subsequence extraction")
    extract_sub = p_extract.add_subparsers(dest="subcommand")

    p = extract_sub.add_parser("run", parents=[common])
    p.add_argument("file")
    p.add_argument("--alpha", type=int, choices=(1, 2), required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--eta", required=True)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(handler=cmd_extract_run)

    p = extract_sub.add_parser("check", parents=[common])
    p.add_argument("seqfile")
    p.add_argument("witnessfile")
    p.set_defaults(handler=cmd_extract_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return handler(args)
    except DocumentError as exc:
        _diag(str(exc))
        return 2
    except (PreconditionError, SpaceError, MismatchError, ExactnessError) as exc:
        _diag(str(exc))
        return 2
    except ValueError as exc:
        _diag(str(exc))
        return 2
    except (ResourceCapError, SearchExhaustedError) as exc:
        _diag(str(exc))
        return 1
    except InternalCheckError as exc:
        _diag("internal check failed: %s" % exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
