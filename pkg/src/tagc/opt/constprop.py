"""Constant propagation over (value, tag) pairs, and op folding.

The analysis tracks, per register, an abstract value and an abstract tag,
plus an abstract PC tag. Tags are computed by evaluating the lowered rule
on every combination of concrete tags the abstract inputs allow (all tag
universes are finite), so a tag is known only when every successful
outcome agrees.

Folding has two forms. A parameterized ``ITp(op, t1, t2)`` movi keeps the
rule firing at run time, so the exact tag and any fail-stop survive. When
the op rule does not look at the PC tag at all, the rule can instead be run
at compile time and the fold becomes a rule-silent ``Movi@ITdc``; that fold
is declined if the rule fails.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Any, NamedTuple

from ..core import IT_DC, Atom, TagErr, arith, it_p
from ..lowering import NULL_TRACE
from ..rtl.ir import (Call, Cond, Mov, Movi, Nop, Op, Ret, RtlFunction,
                      opcode, reachable, successors)

TOP = None  # abstract Top; constants are stored as-is


class AbsAtom(NamedTuple):
    val: Any = TOP  # int or TOP
    tag: Any = TOP

    @property
    def const_val(self) -> bool:
        return self.val is not TOP

    @property
    def const_tag(self) -> bool:
        return self.tag is not TOP


TOP_ATOM = AbsAtom()


def _join1(a, b):
    return a if a == b else TOP


def join_atoms(a: AbsAtom, b: AbsAtom) -> AbsAtom:
    return AbsAtom(_join1(a.val, b.val), _join1(a.tag, b.tag))


class AbsState(NamedTuple):
    pc: Any  # concrete PC tag or TOP
    regs: dict  # register -> AbsAtom; missing means Top


def join_states(s1: AbsState, s2: AbsState) -> AbsState:
    r1, r2 = s1.regs, s2.regs
    if r1 == r2:
        regs = r1
    else:
        regs = {}
        for r, a in r1.items():
            b = r2.get(r)
            if b is None:
                continue
            if a == b:
                regs[r] = a
            else:
                j = join_atoms(a, b)
                if j != TOP_ATOM:
                    regs[r] = j
    return AbsState(_join1(s1.pc, s2.pc), regs)


class _Evaluator:
    """Runs lowered rules on all concretizations of abstract tags."""

    def __init__(self, policy):
        self.policy = policy
        self.vtags = tuple(policy.vtags)
        self.ptags = tuple(policy.ptags)
        self.memo = {}
        self.pairs = {}  # id of a memoized outcome list -> (list, summary)

    def _pcs(self, pc):
        return self.ptags if pc is TOP else (pc,)

    def _tags(self, t):
        return self.vtags if t is TOP else (t,)

    def outcomes(self, key, rule, pc, *tags):
        """Successful results of ``rule(p, *tags)`` over all concretizations.

        Rules are pure, so results are memoized under ``key`` (which must
        identify the rule) and the abstract inputs.
        """
        mk = (key, pc, tags)
        hit = self.memo.get(mk)
        if hit is not None:
            return hit
        out = self.memo[mk] = self._outcomes(rule, pc, tags)
        return out

    def pair(self, outs):
        hit = self.pairs.get(id(outs))
        if hit is None:
            hit = self.pairs[id(outs)] = (outs, _pair(outs))
        return hit[1]

    def _outcomes(self, rule, pc, tags):
        out = []
        for p in self._pcs(pc):
            for combo in itertools.product(*(self._tags(t) for t in tags)):
                r = rule(p, *combo)
                if not isinstance(r, TagErr):
                    out.append(r)
        return out


def _agree(values):
    if not values:
        return TOP
    first = values[0]
    return first if all(v == first for v in values) else TOP


def _pair(outs):
    """Abstract (pc, tag) from a list of (pc, tag) outcomes."""
    return _agree([o[0] for o in outs]), _agree([o[1] for o in outs])


def transfer(ev: _Evaluator, ins, st: AbsState) -> AbsState:
    pol = ev.policy
    cls = type(ins)
    it = ins.itag
    get = st.regs.get
    if cls is Nop or cls is Ret:
        return st
    if cls is Cond:
        a1, a2 = get(ins.r1, TOP_ATOM), get(ins.r2, TOP_ATOM)
        outs = ev.outcomes(("cond", ins.rel, it),
                           lambda p, t1, t2: pol.cond(ins.rel, it, p, t1, t2, NULL_TRACE),
                           st.pc, a1.tag, a2.tag)
        return AbsState(_agree(outs), st.regs)
    if cls is Call:
        regs = dict(st.regs)
        regs.pop(ins.rd, None)
        return AbsState(TOP, regs)
    if cls is Op:
        a1, a2 = get(ins.r1, TOP_ATOM), get(ins.r2, TOP_ATOM)
        val = arith(ins.op, a1.val, a2.val) if a1.const_val and a2.const_val else TOP
        outs = ev.outcomes(("op", ins.op, it),
                           lambda p, t1, t2: pol.op(ins.op, it, p, t1, t2, NULL_TRACE),
                           st.pc, a1.tag, a2.tag)
    elif cls is Mov:
        src, dst = get(ins.rs, TOP_ATOM), get(ins.rd, TOP_ATOM)
        val = src.val
        outs = ev.outcomes(("mov", it), lambda p, ts, td: pol.mov(it, p, ts, td, NULL_TRACE),
                           st.pc, src.tag, dst.tag)
    else:  # Movi
        val = ins.atom.value
        outs = ev.outcomes(("movi", it, ins.atom.tag),
                           lambda p: pol.movi(it, p, ins.atom.tag, NULL_TRACE), st.pc)
    pc, tag = ev.pair(outs)
    regs = dict(st.regs)
    a = AbsAtom(val, tag)
    if a == TOP_ATOM:
        regs.pop(ins.rd, None)
    else:
        regs[ins.rd] = a
    return AbsState(pc, regs)


def analyze(f: RtlFunction, policy) -> dict:
    """Abstract state before each reachable node (forward worklist fixpoint).

    ``policy`` is the lowered policy whose rules give the tags.
    """
    ev = evaluator(policy)
    order = reachable(f)
    index = {n: i for i, n in enumerate(order)}
    before = {f.entry: AbsState(TOP, {})}
    work = [index[f.entry]]
    queued = {f.entry}
    while work:
        n = order[heapq.heappop(work)]
        queued.discard(n)
        out = transfer(ev, f.graph[n], before[n])
        for s in successors(f.graph[n]):
            old = before.get(s)
            new = out if old is None else join_states(old, out)
            if new != old:
                before[s] = new
                if s not in queued:
                    queued.add(s)
                    heapq.heappush(work, index[s])
    return before


_EVALUATORS = {}


def evaluator(policy) -> _Evaluator:
    # memo tables stay valid as long as the policy object does
    ev = _EVALUATORS.get(id(policy))
    if ev is None or ev.policy is not policy:
        if len(_EVALUATORS) > 32:
            _EVALUATORS.clear()
        ev = _EVALUATORS[id(policy)] = _Evaluator(policy)
    return ev


@dataclass
class ConstpropReport:
    folded_param: int = 0  # parameterized I-tag folds
    folded_static: int = 0  # compile-time evaluated folds
    declined_failstop: int = 0


def constprop(f: RtlFunction, flags, policy, failstop_guard: bool = True,
              report: ConstpropReport = None) -> RtlFunction:
    """Fold ops with constant operands into movis.

    ``policy`` is the lowered policy (for compile-time rule evaluation);
    ``failstop_guard=False`` folds even when the compile-time rule fails,
    which exists only for mutation testing.
    """
    states = analyze(f, policy)
    graph = dict(f.graph)
    for n, st in states.items():
        ins = f.graph[n]
        if type(ins) is not Op:
            continue
        a1, a2 = st.regs.get(ins.r1, TOP_ATOM), st.regs.get(ins.r2, TOP_ATOM)
        if not (a1.const_val and a2.const_val and a1.const_tag and a2.const_tag):
            continue
        v = arith(ins.op, a1.val, a2.val)
        fl = flags[(opcode(ins), ins.itag.flag_key)]
        if fl.holds("spci"):
            # the PC input is irrelevant, so any PC tag gives the run-time result
            r = policy.op(ins.op, ins.itag, policy.init_pc, a1.tag, a2.tag, NULL_TRACE)
            if isinstance(r, TagErr):
                if failstop_guard:
                    if report is not None:
                        report.declined_failstop += 1
                    continue
                tag = policy.def_tag
            else:
                tag = r[1]
            graph[n] = Movi(Atom(v, tag), ins.rd, ins.succ, IT_DC)
            if report is not None:
                report.folded_static += 1
        else:
            # the literal's tag is a placeholder: the ITp rule computes the real one
            graph[n] = Movi(Atom(v, policy.def_tag), ins.rd, ins.succ,
                            it_p(ins.op, a1.tag, a2.tag))
            if report is not None:
                report.folded_param += 1
    return f.with_graph(graph)
