"""Differential execution of source programs against their compiled code."""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass, field
from typing import Optional

from ..core import Terminate, Timeout, behavior_eq, behavior_json, first_divergence, format_entry
from ..hll import interp as hll
from ..hll.syntax import print_program
from ..lowering import lower
from ..opt.pipeline import apply_passes
from ..policies import get_policy
from ..rtl import interp as rtl
from ..rtlgen import compile_program
from .gen import GenConfig, gen_program

# target fuel for a given source fuel
STEP_FACTOR = 64
STEP_SLACK = 1024


def target_fuel(fuel: int) -> int:
    return STEP_FACTOR * fuel + STEP_SLACK


@dataclass
class Verdict:
    kind: str  # "agree", "mismatch" or "inconclusive"
    source: object = None
    target: object = None
    passes: tuple = ()
    trace_divergence: Optional[int] = None  # index of first differing rule firing
    detail: str = ""
    # optimized runs may legitimately skip rule firings; this is only reported
    opt_trace_differs: bool = False

    @property
    def trace_mismatch(self) -> bool:
        return self.trace_divergence is not None

    @property
    def failed(self) -> bool:
        return self.kind == "mismatch" or self.trace_mismatch

    def to_json(self) -> dict:
        out = {"kind": self.kind, "passes": list(self.passes)}
        if self.source is not None:
            out["source"] = behavior_json(self.source)
        if self.target is not None:
            out["target"] = behavior_json(self.target)
        if self.trace_divergence is not None:
            out["trace_divergence"] = self.trace_divergence
        if self.detail:
            out["detail"] = self.detail
        if self.opt_trace_differs:
            out["opt_trace_differs"] = True
        return out


_LOWERED = {}


def lowered_for(policy):
    # the cached lowering keeps its source alive, so ids are not reused
    lp = _LOWERED.get(id(policy))
    if lp is None:
        if len(_LOWERED) > 32:
            _LOWERED.clear()
        lp = _LOWERED[id(policy)] = lower(policy)
    return lp


_SHARED = {}


def shared_policy(name: str):
    """One policy instance per name and process, so its lowering is reused."""
    if name not in _SHARED:
        _SHARED[name] = get_policy(name)
    return _SHARED[name]


def diff_run(prog, policy, fuel: int, passes=(), source=None, compiled=None) -> Verdict:
    """Compare the source run of ``prog`` with its compiled and optimized run.

    ``source`` may carry a precomputed ``(behavior, trace)`` of the source run
    and ``compiled`` the unoptimized target program, so that campaigns
    testing several pipelines do each only once.
    """
    passes = tuple(passes)
    if source is None:
        source = hll.run(prog, policy, fuel)
    b_src, t_src = source
    if isinstance(b_src, Timeout):
        return Verdict("inconclusive", b_src, None, passes, detail="source timed out")
    lp = lowered_for(policy)
    code = compiled if compiled is not None else compile_program(prog, policy)
    if passes:
        code = apply_passes(code, lp, passes)
    b_tgt, t_tgt = rtl.run(code, lp, target_fuel(fuel))
    if isinstance(b_tgt, Timeout):
        return Verdict("mismatch", b_src, b_tgt, passes,
                       detail=f"target exceeded {target_fuel(fuel)} steps")
    v = Verdict("agree" if behavior_eq(b_src, b_tgt) else "mismatch", b_src, b_tgt, passes)
    if passes:
        v.opt_trace_differs = t_src.rules != t_tgt.rules
    else:
        i = first_divergence(t_src.rules, t_tgt.rules)
        if i is not None:
            v.trace_divergence = i
            a = t_src.rules[i] if i < len(t_src.rules) else None
            b = t_tgt.rules[i] if i < len(t_tgt.rules) else None
            v.detail = (f"source: {format_entry(a) if a else '<end>'}; "
                        f"target: {format_entry(b) if b else '<end>'}")
    return v


# ---------------------------------------------------------------------------
# campaigns


@dataclass
class CampaignSpec:
    policy: str
    seeds: range
    fuel: int = 10000
    pipelines: tuple = ((),)  # each a tuple of pass names
    gen: dict = field(default_factory=dict)  # GenConfig overrides
    shrink: bool = True
    max_reports: int = 5  # counterexamples kept per pipeline


def _pipeline_name(passes) -> str:
    return ",".join(passes) if passes else "none"


def check_seed(policy_name: str, seed: int, fuel: int, pipelines, gen: dict) -> list:
    """Verdicts for one generated program across all pipelines."""
    policy = shared_policy(policy_name)
    prog = gen_program(GenConfig(seed=seed, **gen), policy)
    source = hll.run(prog, policy, fuel)
    compiled = None if isinstance(source[0], Timeout) else compile_program(prog, policy)
    return [diff_run(prog, policy, fuel, p, source=source, compiled=compiled) for p in pipelines]


def _worker(args):
    policy_name, seeds, fuel, pipelines, gen = args
    out = []
    for s in seeds:
        vs = check_seed(policy_name, s, fuel, pipelines, gen)
        out.append((s, [(v.kind, v.trace_divergence, isinstance(v.source, Terminate),
                         v.opt_trace_differs, v.to_json() if v.failed else None) for v in vs]))
    return out


def _chunks(seeds, n):
    seeds = list(seeds)
    size = max(1, -(-len(seeds) // n))
    return [seeds[i:i + size] for i in range(0, len(seeds), size)]


def campaign(spec: CampaignSpec, jobs: int = 1) -> dict:
    """Run every seed through every pipeline; counts plus shrunk counterexamples."""
    pipelines = tuple(tuple(p) for p in spec.pipelines)
    args = [(spec.policy, chunk, spec.fuel, pipelines, spec.gen)
            for chunk in _chunks(spec.seeds, max(1, jobs) * 4)]
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            parts = pool.map(_worker, args)
    else:
        parts = [_worker(a) for a in args]
    rows = sorted((r for part in parts for r in part), key=lambda r: r[0])
    report = {"policy": spec.policy, "seeds": len(spec.seeds), "fuel": spec.fuel, "pipelines": {}}
    for i, passes in enumerate(pipelines):
        name = _pipeline_name(passes)
        counts = {"agree": 0, "mismatch": 0, "inconclusive": 0, "trace_mismatch": 0,
                  "terminate": 0, "failstop": 0, "opt_trace_differs": 0}
        examples = []
        for seed, vs in rows:
            kind, div, term, opt_diff, js = vs[i]
            counts[kind] += 1
            counts["opt_trace_differs"] += opt_diff
            if div is not None:
                counts["trace_mismatch"] += 1
            if kind == "agree":
                counts["terminate" if term else "failstop"] += 1
            if js is not None and len(examples) < spec.max_reports:
                examples.append(_counterexample(spec, seed, passes, js))
        counts["inconclusive_rate"] = counts["inconclusive"] / max(1, len(rows))
        report["pipelines"][name] = {"counts": counts, "counterexamples": examples}
    return report


def _counterexample(spec: CampaignSpec, seed: int, passes, verdict_json) -> dict:
    from .shrink import shrink

    policy = get_policy(spec.policy)
    prog = gen_program(GenConfig(seed=seed, **spec.gen), policy)
    out = {"seed": seed, "verdict": verdict_json, "program": print_program(prog)}
    if spec.shrink:
        def still_fails(p):
            return diff_run(p, policy, spec.fuel, passes).failed

        small = shrink(prog, still_fails)
        out["shrunk"] = print_program(small)
        out["shrunk_verdict"] = diff_run(small, policy, spec.fuel, passes).to_json()
    return out


def total_failures(report: dict) -> int:
    return sum(p["counts"]["mismatch"] + p["counts"]["trace_mismatch"]
               for p in report["pipelines"].values())


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
