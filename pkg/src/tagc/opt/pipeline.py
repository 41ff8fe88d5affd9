"""Pass registry and whole-program application."""

from __future__ import annotations

from dataclasses import asdict

from ..rtl.ir import RtlProgram
from .constprop import ConstpropReport, constprop
from .cse import CseReport, cse
from .deadcode import DeadcodeReport, compact, deadcode

PASSES = ("deadcode", "cse", "constprop")

# deliberately broken variants, for checking that the test harness notices
MUTANTS = ("deadcode-noguard", "cse-noguard", "constprop-nofailstop")

_REPORTS = {"deadcode": DeadcodeReport, "cse": CseReport, "constprop": ConstpropReport}


def known_pass(name: str) -> bool:
    return name in PASSES or name in MUTANTS


def parse_passes(text: str) -> list:
    """Comma-separated pass list; ``all`` stands for every real pass in order."""
    names = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        if part == "all":
            names.extend(PASSES)
        elif known_pass(part):
            names.append(part)
        else:
            raise ValueError(f"unknown pass {part!r} (known: {', '.join(PASSES + MUTANTS)})")
    return names


def _run_pass(name: str, f, policy, report):
    flags = policy.flags
    if name == "deadcode":
        return deadcode(f, flags, report=report)
    if name == "deadcode-noguard":
        return deadcode(f, flags, guard=False, report=report)
    if name == "cse":
        return cse(f, flags, report=report)
    if name == "cse-noguard":
        return cse(f, flags, guard=False, report=report)
    if name == "constprop":
        return constprop(f, flags, policy, report=report)
    if name == "constprop-nofailstop":
        return constprop(f, flags, policy, failstop_guard=False, report=report)
    raise ValueError(f"unknown pass {name!r}")


def apply_passes(prog: RtlProgram, policy, names, do_compact: bool = False, reports: dict = None):
    """Run ``names`` in order over every function under the lowered ``policy``.

    If ``reports`` is given it is filled with per-pass, per-function counters.
    """
    funcs = dict(prog.functions)
    for name in names:
        base = name.split("-")[0]
        for fname, f in funcs.items():
            rep = _REPORTS[base]()
            funcs[fname] = _run_pass(name, f, policy, rep)
            if reports is not None:
                reports.setdefault(name, {})[fname] = asdict(rep)
    if do_compact:
        funcs = {n: compact(f) for n, f in funcs.items()}
    return RtlProgram(funcs)
