"""Command-line front end.

    anglican run FILE [--algorithm lmh] [--samples N] [--burn B] ...
    anglican check FILE [--dump-ir]

Exit codes: 0 success, 1 parse or compile error, 2 runtime error,
3 bad flags.
"""

import argparse
import csv
import itertools
import json
import math
import sys

from .compiler import CompileError, QueryError, load_program
from .forms import pretty
from .inference import InferenceError, QueryRuntimeError, infer
from .inference.addressing import DEFAULT_PADDING
from .reader import ReadError, read_forms
from .runtime.distributions import DistributionError
from .runtime.values import is_number, to_json
from . import stat

EXIT_COMPILE, EXIT_RUNTIME, EXIT_FLAGS = 1, 2, 3
DEFAULT_PARTICLES = 100


class BadFlags(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadFlags(message)


def _int_at_least(lo):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer: {text!r}") from None
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be at least {lo}, got {value}")
        return value
    return parse


def build_parser():
    parser = _Parser(prog="anglican", description="Run inference on query programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an inference algorithm and print samples")
    run.add_argument("program", help="source file")
    run.add_argument("--algorithm", choices=("importance", "lmh", "smc"), default="lmh")
    run.add_argument("--samples", type=_int_at_least(1), default=1000,
                     help="number of retained samples")
    run.add_argument("--burn", type=_int_at_least(0), default=0,
                     help="states dropped before retaining")
    run.add_argument("--particles", type=_int_at_least(1), default=None,
                     help=f"particles per epoch (smc only, default {DEFAULT_PARTICLES})")
    run.add_argument("--seed", type=_int_at_least(-(2 ** 63)), default=0)
    run.add_argument("--padding", type=_int_at_least(1), default=DEFAULT_PADDING)
    run.add_argument("--output", choices=("jsonl", "csv"), default="jsonl")
    run.add_argument("--query", default=None, help="query name when the file defines several")
    run.add_argument("--value", default=None,
                     help="argument passed to the query, as source text")

    check = sub.add_parser("check", help="parse and compile only")
    check.add_argument("program", help="source file")
    check.add_argument("--dump-ir", action="store_true", help="print the compiled target code")
    check.add_argument("--query", default=None)
    return parser


def _load(path):
    with open(path, encoding="utf-8") as f:
        text = f.read()
    return load_program(text, path)


def summarize(states):
    """Summary record: count, effective sample size and weighted means of
    numeric (or boolean) results, per key for map-valued results."""
    n = len(states)
    summary = {"type": "summary", "n": n, "ess": None, "means": {}}
    if not n:
        return summary
    log_weights = [s.log_weight for s in states]
    try:
        summary["ess"] = stat.ess(log_weights)
    except stat.StatError:
        return summary
    pairs = [(s.result, s.log_weight) for s in states]
    results = [r for r, _ in pairs]
    if all(isinstance(r, dict) for r in results):
        keys = []
        for r in results:
            keys.extend(k for k in r if k not in keys)
        for k in keys:
            if all(_numeric(r.get(k)) for r in results):
                name = k if isinstance(k, str) else to_json(k)
                summary["means"][str(name)] = stat.weighted_mean(pairs, lambda r: float(r[k]))
    elif all(_numeric(r) for r in results):
        summary["means"]["result"] = stat.weighted_mean(pairs, float)
    return summary


def _numeric(v):
    return v is True or v is False or is_number(v)


def _dumps(obj):
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _float_json(x):
    return to_json(float(x))


def cmd_run(args, out, err):
    if args.particles is not None and args.algorithm != "smc":
        raise BadFlags("--particles applies to --algorithm smc only")
    program = _load(args.program)
    query = program.query(args.query)
    value = None
    if args.value is not None:
        try:
            forms = read_forms(args.value)
        except ReadError as e:
            raise BadFlags(f"--value: {e}") from None
        if len(forms) != 1:
            raise BadFlags("--value must contain exactly one form")
        try:
            value = program.evaluate(forms[0])
        except CompileError as e:
            raise BadFlags(f"--value: {e}") from None
        except Exception as e:
            raise QueryRuntimeError(e, "--value") from e
    options = {"seed": args.seed, "padding": args.padding}
    if args.algorithm == "smc":
        options["particles"] = args.particles or DEFAULT_PARTICLES
    states = list(itertools.islice(infer(args.algorithm, query, value, **options),
                                   args.burn, args.burn + args.samples))
    if args.output == "jsonl":
        for i, s in enumerate(states):
            out.write(_dumps({"type": "sample", "index": i, "log_weight": _float_json(s.log_weight),
                              "result": to_json(s.result)}) + "\n")
        out.write(_dumps(_json_summary(states)) + "\n")
    else:
        writer = csv.writer(out, lineterminator="\r\n")
        writer.writerow(["index", "log_weight", "result"])
        for i, s in enumerate(states):
            lw = s.log_weight
            writer.writerow([i, repr(lw) if math.isfinite(lw) else _float_json(lw),
                             _dumps(to_json(s.result))])
        err.write(_dumps(_json_summary(states)) + "\n")
    return 0


def _json_summary(states):
    summary = summarize(states)
    if summary["ess"] is not None:
        summary["ess"] = _float_json(summary["ess"])
    summary["means"] = {k: _float_json(v) for k, v in summary["means"].items()}
    return summary


def cmd_check(args, out, err):
    program = _load(args.program)
    if args.query is not None:
        program.query(args.query)
    if args.dump_ir:
        names = [args.query] if args.query is not None else list(program.ir)
        for name in names:
            out.write(f";; {name}\n{pretty(program.ir[name])}\n")
    return 0


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        if args.command == "run":
            return cmd_run(args, out, err)
        return cmd_check(args, out, err)
    except BadFlags as e:
        err.write(f"anglican: bad flags: {e}\n")
        return EXIT_FLAGS
    except OSError as e:
        err.write(f"anglican: {e}\n")
        return EXIT_COMPILE
    except (ReadError, CompileError) as e:
        err.write(f"anglican: error: {e}\n")
        return EXIT_COMPILE
    except (QueryRuntimeError, InferenceError, QueryError, DistributionError) as e:
        err.write(f"anglican: runtime error: {e}\n")
        return EXIT_RUNTIME
    except RecursionError as e:
        err.write(f"anglican: runtime error: {e}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
