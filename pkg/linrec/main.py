"""linrec command line: argument parsing, logging setup and dispatch."""

import argparse
import logging
import sys

from pydantic import ValidationError

from linrec.cli.commands import AnalysisRequest, Command, run
from linrec.config import Caps, settings
from linrec.errors import Diagnostic, FuelExhausted, InvariantViolation, LinrecError, ResourceLimit

logger = logging.getLogger("linrec")

TERM_COMMANDS = {
    Command.PARSE: "echo the canonical form of a term",
    Command.TYPECHECK: "type a closed term and report R and I",
    Command.EVAL: "normalize a term and decode the result",
    Command.GRAPH: "build the interaction graph of a typing",
    Command.TREES: "enumerate the tree set of the interaction graph",
    Command.CHECK: "run completeness, preservation, diamond and structural checks",
    Command.AUDIT: "measure a term against its bound family (JSON)",
}


def _common() -> argparse.ArgumentParser:
    # SUPPRESS keeps subcommand defaults from clobbering flags given before the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--caps", default=argparse.SUPPRESS, help="key=value,... exploration limits")
    common.add_argument("--log-level", default=argparse.SUPPRESS, help="logging level (default from LINREC_LOG_LEVEL)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print JSON reports")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="linrec",
        description="Linear higher-order recursion over free algebras: typing, evaluation and bounds.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for command, help_text in TERM_COMMANDS.items():
        p = sub.add_parser(command.value, help=help_text, parents=[common])
        p.add_argument("source", help="inline term, a file path, or - for stdin")
        if command not in (Command.PARSE, Command.EVAL):
            p.add_argument("--system", default="H(A)", help="typing subsystem, e.g. H(A) or RH(0)")
        if command in (Command.TYPECHECK, Command.GRAPH, Command.TREES, Command.CHECK):
            p.add_argument("--type", dest="expected_type", help="type to check against")
        if command is Command.TYPECHECK:
            p.add_argument("--derivation", action="store_true", help="print the derivation tree")
        if command is Command.EVAL:
            p.add_argument("--trace", action="store_true", help="print one line per reduction step")
            p.add_argument("--fuel", type=int, help="maximum number of reduction steps")
        if command is Command.GRAPH:
            p.add_argument("--dot", action="store_true", help="print Graphviz DOT")

    p = sub.add_parser(Command.STDLIB.value, help="build a library term and run it on arguments", parents=[common])
    p.add_argument("name", help="builder name, e.g. Add or Exp")
    p.add_argument("arguments", nargs="*", help="argument terms; integers are unary numerals")
    p.add_argument("--tier", type=int, default=0)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--fuel", type=int)

    p = sub.add_parser(Command.PRIMREC.value, help="compile a primitive recursive scheme and run it", parents=[common])
    p.add_argument("expression", help="e.g. rec(proj(1,1), comp(succ, proj(3,2)))")
    p.add_argument("arguments", nargs="*")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--fuel", type=int)

    sub.add_parser(Command.SYSTEMS.value, help="list the typing subsystems", parents=[common])
    return parser


def request_from_args(args: argparse.Namespace) -> AnalysisRequest:
    fields = {
        k: v
        for k, v in vars(args).items()
        if k in AnalysisRequest.model_fields and v is not None and k not in ("caps",)
    }
    return AnalysisRequest(
        **fields,
        caps=Caps.parse(getattr(args, "caps", ""), settings.caps),
        output="json" if getattr(args, "json", False) else "text",
    )


def _report(exc: LinrecError | Diagnostic) -> None:
    diagnostic = exc if isinstance(exc, Diagnostic) else exc.diagnostic()
    print(diagnostic.model_dump_json(), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(args, "log_level", settings.LOG_LEVEL).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        request = request_from_args(args)
    except (ValidationError, ValueError) as exc:
        _report(Diagnostic(code="UsageError", explanation=str(exc)))
        return 1
    try:
        outcome = run(request)
    except InvariantViolation as exc:
        logger.error("internal invariant violated: %s", exc.explanation)
        _report(exc)
        return 3
    except (FuelExhausted, ResourceLimit) as exc:
        _report(exc)
        return 2
    except LinrecError as exc:
        _report(exc)
        return 1
    print(outcome.output)
    return outcome.status


if __name__ == "__main__":
    sys.exit(main())
