"""Command-line front end.

Thin client over the handlers in ``service``: by default everything
runs in-process; with ``--server URL`` the same request is POSTed to a
running instance of the FastAPI app instead.

Exit codes: 0 ok, 1 usage, 2 input error, 3 invariant violation,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    ContractError,
    DimensionError,
    DivergenceError,
    DomainError,
    InvariantViolation,
    NumericalError,
    PsdlineError,
    TrackingError,
)
from . import service

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INVARIANT = 3
EXIT_NUMERICAL = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="psdline",
        description="Exact characteristic-polynomial expansion, Newton "
        "diagrams and alternating-projection rate analysis for PSD pencils.",
    )
    parser.add_argument(
        "--server",
        metavar="URL",
        default=None,
        help="send the request to a running psdline server instead of "
        "computing in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, with_output=True):
        p.add_argument("input", help="instance JSON file with matrices A and B")
        if with_output:
            p.add_argument("-o", "--output", default=None, help="output file")

    add_io(sub.add_parser("expand", help="expand p_{A+tB}(x) exactly"))
    add_io(sub.add_parser("diagram", help="Newton diagram and leading terms"))

    it = sub.add_parser("iterate", help="run alternating projections")
    add_io(it)
    it.add_argument("--t0", type=float, required=True, help="initial parameter")
    it.add_argument("--max-iter", type=int, default=10**6)
    it.add_argument("--tol", type=float, default=1e-12)
    it.add_argument("--path", choices=["scalar", "matrix"], default="scalar")

    add_io(sub.add_parser("classify", help="a-priori rate verdict"), with_output=False)

    ver = sub.add_parser("verify", help="randomized invariant suite")
    ver.add_argument("--seed", type=int, default=42)
    ver.add_argument("--nmax", type=int, default=5)
    ver.add_argument("--trials", type=int, default=100)
    return parser


def _read_instance(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read input file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"input {path} is not valid JSON: {exc}") from exc
    for key in ("A", "B"):
        if key not in doc:
            raise DomainError(f"input {path} is missing matrix field {key!r}")
    return doc


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _post(server: str, endpoint: str, payload: dict) -> dict:
    import httpx

    resp = httpx.post(server.rstrip("/") + endpoint, json=payload, timeout=600.0)
    if resp.status_code == 422:
        detail = resp.json().get("detail", resp.text)
        raise DomainError(f"server rejected request: {detail}")
    resp.raise_for_status()
    return resp.json()


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_expand(args) -> int:
    instance = _read_instance(args.input)
    if args.server:
        result = _post(args.server, "/expand", instance)
    else:
        result = service.handle_expand(instance)
    _emit(_dump(result), args.output)
    return EXIT_OK


def cmd_diagram(args) -> int:
    instance = _read_instance(args.input)
    if args.server:
        result = _post(args.server, "/diagram", instance)
    else:
        result = service.handle_diagram(instance)
    _emit(_dump(result), args.output)
    return EXIT_OK


def cmd_iterate(args) -> int:
    instance = _read_instance(args.input)
    opts = dict(t0=args.t0, max_iter=args.max_iter, tol=args.tol, path=args.path)
    if args.server:
        result = _post(args.server, "/iterate", {**instance, **opts})
    else:
        result = service.handle_iterate(instance, **opts)
    _emit(_dump(result["verdict"]), args.output)
    if args.output:
        # trace goes next to the verdict file
        trace_path = Path(args.output).with_suffix(".trace.csv")
        trace_path.write_text(result["trace_csv"])
    return EXIT_OK


def cmd_classify(args) -> int:
    instance = _read_instance(args.input)
    if args.server:
        result = _post(args.server, "/classify", instance)
    else:
        result = service.handle_classify(instance)
    _emit(_dump(result), None)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.server:
        result = _post(
            args.server,
            "/verify",
            {"seed": args.seed, "n_max": args.nmax, "trials": args.trials},
        )
    else:
        result = service.handle_verify(args.seed, args.nmax, args.trials)
    sys.stdout.write(_dump(result))
    if not result["ok"]:
        for failure in result["failures"]:
            sys.stderr.write(
                f"trial {failure['trial']}: {failure['message']}\n"
                + json.dumps(failure["counterexample"], sort_keys=True)
                + "\n"
            )
        return EXIT_INVARIANT
    return EXIT_OK


_COMMANDS = {
    "expand": cmd_expand,
    "diagram": cmd_diagram,
    "iterate": cmd_iterate,
    "classify": cmd_classify,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit2 as exc:
        sys.stderr.write(f"psdline: error: {exc}\n")
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except InvariantViolation as exc:
        sys.stderr.write(f"psdline: invariant violation: {exc}\n")
        return EXIT_INVARIANT
    except (NumericalError, TrackingError, DivergenceError) as exc:
        sys.stderr.write(f"psdline: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (DomainError, DimensionError, ContractError) as exc:
        sys.stderr.write(f"psdline: input error: {exc}\n")
        return EXIT_INPUT
    except PsdlineError as exc:  # anything else from the pipeline
        sys.stderr.write(f"psdline: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
