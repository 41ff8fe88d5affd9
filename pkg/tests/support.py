"""Shared helpers for the test suite."""

from __future__ import annotations

from pathlib import Path

from tagc.core import FlagSet, TagErr, make_flags
from tagc.hll.parser import parse_program
from tagc.policies import TAINT_FLAGS, TaintPolicy, Taint

GOLDEN = Path(__file__).parent / "golden"
SCENARIOS = ("explicit_flow", "implicit_flow", "label_creep")

DOUBLE_TAINT = TagErr("DoubleTaint")

# under pytest, conftest prints the collected acceptance lines in the summary
UNDER_PYTEST = False
CRITERIA_LINES = []


def announce_line(line: str):
    CRITERIA_LINES.append(line)
    if not UNDER_PYTEST:
        print(line, flush=True)


class StrictTaintPolicy(TaintPolicy):
    """Taint tracking that refuses to combine two tainted operands.

    The operator rule ignores the PC tag entirely, so it is strongly
    PC-insensitive, but it can fail.
    """

    name = "strict-taint"
    flags = TAINT_FLAGS.replace(binop=make_flags("!dfs pcp wpci spci"))

    def binop(self, op, p, t1, t2):
        if t1 is Taint.T and t2 is Taint.T:
            return DOUBLE_TAINT
        return t1 | t2


def golden(name: str, policy):
    src = (GOLDEN / f"{name}.hll").read_text()
    expected = (GOLDEN / f"{name}.expected").read_text().strip()
    trace = (GOLDEN / f"{name}.trace").read_text().splitlines()
    return parse_program(src, policy), expected, trace


def parse(text: str, policy):
    return parse_program(text, policy)


def ops_of(f, cls):
    return {n: i for n, i in f.graph.items() if isinstance(i, cls)}


def mis_flag(policy, rule: str, spec: str):
    return policy.with_flags(FlagSet({**dict(policy.flags), rule: make_flags(spec)}))
