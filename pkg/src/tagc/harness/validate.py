"""Checking declared rule-property flags against the rules themselves.

Each property is checked by its defining formula:

* DFS: the rule never returns an error;
* PCP: the output PC tag equals the input PC tag;
* WPCI: changing only the PC input changes neither the error status nor any
  value-tag output;
* SPCI: changing only the PC input changes no output at all, except an
  output PC tag that is just the input passed through (error tokens must
  match too).

Argument tuples are enumerated when the domain is small enough and sampled
otherwise.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable

from ..core import OPS, RELS, TagErr, it_p, parse_itag
from ..lowering import NULL_TRACE, PROVENANCE, LoweredPolicy, lower
from ..policies import RULES


@dataclass
class RuleCase:
    """A rule viewed as ``fn(pc, *args)`` plus its argument domains."""

    name: Any
    fn: Callable
    domains: list
    pc_out: str  # "none", "only" or "first"
    flags: Any


@dataclass
class Finding:
    rule: str
    prop: str
    inputs: str
    detail: str


@dataclass
class ValidationReport:
    checked: dict = field(default_factory=dict)  # "rule/prop" -> number of inputs checked
    findings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def to_json(self) -> dict:
        return {"checked": self.checked,
                "findings": [vars(f) for f in self.findings]}


def _tag_tuples(vtags, max_len: int = 2):
    out = []
    for n in range(max_len + 1):
        out.extend(itertools.product(vtags, repeat=n))
    return out


def hll_cases(policy) -> list:
    vt, pt = list(policy.vtags), list(policy.ptags)
    kinds = {"vtag": vt, "ptag": pt, "rel": list(RELS), "op": list(OPS),
             "vtags": _tag_tuples(vt)}
    cases = []
    for name, (meth, args, pc_out) in RULES.items():
        rule = getattr(policy, meth)
        pc_index = args.index("pc")
        doms = [kinds[a] for i, a in enumerate(args) if i != pc_index]

        def fn(p, *rest, _rule=rule, _i=pc_index):
            full = list(rest)
            full.insert(_i, p)
            return _rule(*full)

        cases.append(RuleCase(name, fn, doms, pc_out, policy.flags[name]))
    return cases


def lowered_cases(lowered) -> list:
    vt, pt = list(lowered.vtags), list(lowered.ptags)
    cases = []
    for (opc, key), _prov in PROVENANCE.items():
        flags = lowered.flags[(opc, key)]
        if key.startswith("ITp"):
            itags = [it_p(key[3:], a, b) for a in vt for b in vt]
        else:
            itags = [parse_itag(key, lowered.parse_tag)]
        for it in itags:
            name = f"{opc} {it}"
            if opc == "nop":
                cases.append(RuleCase(name, lambda p, _it=it: lowered.nop(_it, p, NULL_TRACE),
                                      [], "only", flags))
            elif opc == "movi":
                cases.append(RuleCase(name, lambda p, t, _it=it: lowered.movi(_it, p, t, NULL_TRACE),
                                      [vt], "first", flags))
            elif opc == "mov":
                cases.append(RuleCase(
                    name, lambda p, ts, td, _it=it: lowered.mov(_it, p, ts, td, NULL_TRACE),
                    [vt, vt], "first", flags))
            elif opc == "op":
                cases.append(RuleCase(
                    name, lambda p, t1, t2, _it=it: lowered.op(_it.op, _it, p, t1, t2, NULL_TRACE),
                    [vt, vt], "first", flags))
            elif opc == "cond":
                cases.append(RuleCase(
                    name, lambda p, rel, t1, t2, _it=it: lowered.cond(rel, _it, p, t1, t2, NULL_TRACE),
                    [list(RELS), vt, vt], "only", flags))
            elif opc == "call":
                cases.append(RuleCase(
                    name, lambda p, pf, ts, _it=it: lowered.call(_it, p, pf, ts, NULL_TRACE),
                    [pt, _tag_tuples(vt)], "first", flags))
            elif opc == "ret":
                cases.append(RuleCase(
                    name, lambda p, ps, t, _it=it: lowered.ret(_it, p, ps, t, NULL_TRACE),
                    [pt, vt], "first", flags))
    return cases


def _inputs(domains, limit: int, rng: random.Random):
    size = 1
    for d in domains:
        size *= len(d)
    if size <= limit:
        return list(itertools.product(*domains))
    return [tuple(rng.choice(d) for d in domains) for _ in range(limit)]


def _out_pc(r, shape):
    if shape == "only":
        return r
    if shape == "first":
        return r[0]
    return None


def _value_outs(r, shape):
    if shape == "none":
        return (r,)
    if shape == "first":
        return tuple(r[1:])
    return ()


def _normal(r, p, shape):
    if isinstance(r, TagErr) or shape == "none":
        return r
    if shape == "only":
        return "<pc>" if r == p else r
    return ("<pc>" if r[0] == p else r[0], *r[1:])


def check_case(case: RuleCase, ptags, samples: int, rng: random.Random, report: ValidationReport):
    props = [p for p in ("dfs", "pcp", "wpci", "spci") if case.flags.holds(p)]
    if not props:
        return
    # non-PC arguments, then every PC value for each of them
    rest_inputs = _inputs(case.domains, max(1, samples // max(1, len(ptags))), rng)
    counts = dict.fromkeys(props, 0)
    bad = set()

    def flag(prop, inputs, detail):
        if prop not in bad:
            bad.add(prop)
            report.findings.append(Finding(str(case.name), prop, inputs, detail))

    for rest in rest_inputs:
        results = [(p, case.fn(p, *rest)) for p in ptags]
        for p, r in results:
            shown = f"pc={p} args={_show(rest)}"
            if "dfs" in props:
                counts["dfs"] += 1
                if isinstance(r, TagErr):
                    flag("dfs", shown, f"returned error {r}")
            if "pcp" in props and case.pc_out != "none":
                counts["pcp"] += 1
                if not isinstance(r, TagErr) and _out_pc(r, case.pc_out) != p:
                    flag("pcp", shown, f"output PC {_out_pc(r, case.pc_out)}")
        for (p1, r1), (p2, r2) in itertools.combinations(results, 2):
            shown = f"pc={p1}/{p2} args={_show(rest)}"
            e1, e2 = isinstance(r1, TagErr), isinstance(r2, TagErr)
            if "wpci" in props:
                counts["wpci"] += 1
                if e1 != e2 or (not e1 and _value_outs(r1, case.pc_out) != _value_outs(r2, case.pc_out)):
                    flag("wpci", shown, f"results {_show(r1)} vs {_show(r2)}")
            if "spci" in props:
                counts["spci"] += 1
                if _normal(r1, p1, case.pc_out) != _normal(r2, p2, case.pc_out):
                    flag("spci", shown, f"results {_show(r1)} vs {_show(r2)}")
    for prop, n in counts.items():
        report.checked[f"{case.name}/{prop}"] = n


def _show(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(_show(y) for y in x) + ")"
    return str(x)


def validate_flags(policy, samples: int = 10000, seed: int = 0, lowered: bool = False) -> ValidationReport:
    """Check every declared-Holds flag of ``policy`` (or of its lowering)."""
    if lowered and not isinstance(policy, LoweredPolicy):
        policy = lower(policy)
    rng = random.Random(seed)
    report = ValidationReport()
    cases = lowered_cases(policy) if lowered else hll_cases(policy)
    for case in cases:
        check_case(case, list(policy.ptags), samples, rng, report)
    return report
