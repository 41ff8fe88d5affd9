"""Command-line driver.

Exit codes: 0 success, 1 the program fail-stopped (``run`` only), 2 a
mismatch or counterexample was found, 3 usage, input or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .core import FailStop, format_entry
from .harness.diff import CampaignSpec, campaign, diff_run, dumps, total_failures
from .harness.validate import validate_flags
from .hll import interp as hll
from .hll.parser import ParseError, WellFormednessError, parse_program
from .lowering import dispatch_table, lower
from .opt.pipeline import apply_passes, parse_passes
from .policies import POLICIES, get_policy
from .rtl import interp as rtl
from .rtl.ir import wf_program
from .rtl.text import DumpError, dot_program, dump_program, parse_dump
from .rtlgen import compile_program

EXIT_OK, EXIT_FAILSTOP, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_source(path: str, policy):
    text = _read(path)
    try:
        return parse_program(text, policy)
    except ParseError as exc:
        raise UsageError(f"{path}:{exc.line}:{exc.col}: {exc.msg}") from None
    except WellFormednessError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _passes(text):
    try:
        return parse_passes(text or "")
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _seed(args) -> int:
    env = os.environ.get("TAGC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"TAGC_SEED must be an integer, got {env!r}") from None
    return args.seed


def _compiled(args, policy):
    names = _passes(getattr(args, "passes", ""))
    prog = _load_source(args.input, policy)
    code = compile_program(prog, policy)
    reports = {}
    if names or getattr(args, "compact", False):
        code = apply_passes(code, lower(policy), names, do_compact=args.compact, reports=reports)
    return code, reports


# ---------------------------------------------------------------------------
# subcommands


def cmd_compile(args) -> int:
    policy = get_policy(args.policy)
    code, _ = _compiled(args, policy)
    _write(args.output, dump_program(code))
    if args.dot:
        _write(args.dot, dot_program(code))
    return EXIT_OK


def cmd_opt(args) -> int:
    policy = get_policy(args.policy)
    code, reports = _compiled(args, policy)
    _write(args.output, dump_program(code))
    print(json.dumps(reports, indent=2, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_dot(args) -> int:
    policy = get_policy(args.policy)
    code, _ = _compiled(args, policy)
    _write(args.output, dot_program(code))
    return EXIT_OK


def _listener(verbose: bool):
    def show(channel, entry):
        if channel == "rule":
            print(format_entry(entry), flush=True)
        elif verbose:
            print("# " + format_entry(entry), flush=True)
    return show


def cmd_run(args) -> int:
    policy = get_policy(args.policy)
    trace = None
    if args.trace:
        from .core import Trace
        trace = Trace(listener=_listener(args.verbose))
    names = _passes(args.passes)
    if args.input.endswith(".rtlt"):
        try:
            code = parse_dump(_read(args.input), policy)
        except DumpError as exc:
            raise UsageError(f"{args.input}: {exc}") from None
        defects = wf_program(code)
        if defects:
            raise UsageError(f"{args.input}: ill-formed code: {defects}")
        if names:
            code = apply_passes(code, lower(policy), names)
        behavior, _ = rtl.run(code, lower(policy), args.fuel, trace)
    elif args.compiled or names:
        code, _ = _compiled(args, policy)
        behavior, _ = rtl.run(code, lower(policy), args.fuel, trace)
    else:
        prog = _load_source(args.input, policy)
        behavior, _ = hll.run(prog, policy, args.fuel, trace)
    print(behavior)
    return EXIT_FAILSTOP if isinstance(behavior, FailStop) else EXIT_OK


def cmd_diff(args) -> int:
    names = _passes(args.passes)
    if args.program:
        policy = get_policy(args.policy)
        prog = _load_source(args.program, policy)
        v = diff_run(prog, policy, args.fuel, names)
        print(json.dumps(v.to_json(), indent=2, sort_keys=True))
        return EXIT_MISMATCH if v.failed else EXIT_OK
    start = _seed(args)
    spec = CampaignSpec(args.policy, range(start, start + args.seeds), fuel=args.fuel,
                        pipelines=(tuple(names),), shrink=not args.no_shrink)
    report = campaign(spec, jobs=args.jobs)
    if args.validate:
        report["flag_validation"] = validate_flags(get_policy(args.policy), seed=start).to_json()
    _write(args.output, dumps(report) + "\n")
    failed = total_failures(report)
    if args.validate and report["flag_validation"]["findings"]:
        failed += 1
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_validate(args) -> int:
    policy = get_policy(args.policy)
    target = lower(policy) if args.lowered else policy
    report = validate_flags(target, samples=args.samples, seed=_seed(args), lowered=args.lowered)
    print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_dump_dispatch(args) -> int:
    lp = lower(get_policy(args.policy)) if args.policy else None
    for opc, it, prov in dispatch_table():
        line = f"{opc:5} {it:14} -> {prov}"
        if lp is not None:
            fl = lp.flags[(opc, it)]
            line += "  [" + " ".join(f"{p}={getattr(fl, p).value}" for p in ("dfs", "pcp", "wpci", "spci")) + "]"
        print(line)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tagc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    policies = sorted(POLICIES)

    def common(p, passes=True):
        p.add_argument("input", help="HLL source file, or - for stdin")
        p.add_argument("--policy", choices=policies, default="ifc")
        if passes:
            p.add_argument("--passes", default="", help="comma-separated passes, or 'all'")
            p.add_argument("--compact", action="store_true", help="rethread around removed instructions")

    p = sub.add_parser("compile", help="translate to tagged RTL")
    common(p)
    p.add_argument("-o", "--output")
    p.add_argument("--dot", help="also write a Graphviz file")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("opt", help="compile and optimize, printing pass counts to stderr")
    common(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("dot", help="write the control-flow graphs in Graphviz syntax")
    common(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("run", help="run a program (source, or .rtlt dump)")
    common(p)
    p.add_argument("--fuel", type=int, default=100000)
    p.add_argument("--compiled", action="store_true", help="compile and run the target code")
    p.add_argument("--trace", action="store_true", help="stream rule firings")
    p.add_argument("-v", "--verbose", action="store_true", help="with --trace, include compiler-introduced firings")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("diff", help="differential testing campaign")
    p.add_argument("--policy", choices=policies, default="ifc")
    p.add_argument("--passes", default="")
    p.add_argument("--seeds", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0, help="first seed (TAGC_SEED overrides)")
    p.add_argument("--fuel", type=int, default=10000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--program", help="check one program instead of generating")
    p.add_argument("--no-shrink", action="store_true")
    p.add_argument("--validate", action="store_true", help="include flag validation in the report")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("validate", help="check declared rule flags")
    p.add_argument("--policy", choices=policies, default="ifc")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lowered", action="store_true", help="check the instruction-level flags")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dump-dispatch", help="print the I-tag dispatch table")
    p.add_argument("--policy", choices=policies, help="also show lowered flags")
    p.set_defaults(func=cmd_dump_dispatch)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("fuel", "seeds", "jobs", "samples"):
        if getattr(args, name, 1) is not None and getattr(args, name, 1) < 0:
            print(f"tagc: error: --{name} must not be negative", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tagc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
