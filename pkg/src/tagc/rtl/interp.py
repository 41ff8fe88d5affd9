"""Small-step semantics of tagged RTL.

Every instruction fires its opcode's lowered rule, passing its I-tag first.
Registers never written hold the default atom.
"""

from __future__ import annotations

from typing import Any, NamedTuple, Optional

from ..core import (IT_CALL, Atom, FailStop, ITag, StuckError, TagErr,
                    Terminate, Timeout, Trace, arith, compare)
from .ir import Call, Cond, Mov, Movi, Nop, Op, Ret, RtlFunction, RtlProgram


class Frame(NamedTuple):
    caller: RtlFunction
    dest: int
    ret_node: int
    bank: dict
    p_saved: Any


class Regular(NamedTuple):
    fn: RtlFunction
    node: int
    p: Any
    c: tuple
    bank: dict


class CallSt(NamedTuple):
    fn: RtlFunction
    args: tuple
    p: Any
    c: tuple
    itag: ITag


class RetSt(NamedTuple):
    atom: Atom
    p: Any
    c: tuple


class ErrSt(NamedTuple):
    err: TagErr


class Machine:
    def __init__(self, prog: RtlProgram, policy, trace: Optional[Trace] = None):
        self.prog = prog
        self.policy = policy
        self.trace = trace if trace is not None else Trace()
        self.steps = 0
        self.default = Atom(0, policy.def_tag)

    def initial(self) -> CallSt:
        return CallSt(self.prog.main, (), self.policy.init_pc, (), IT_CALL)

    def step(self, st, inplace: bool = False):
        """One transition. With ``inplace`` the register bank is updated destructively."""
        pol, trace = self.policy, self.trace
        cls = type(st)
        if cls is Regular:
            fn, n, p, c, bank = st
            try:
                ins = fn.graph[n]
            except KeyError:
                raise StuckError(f"{fn.name}: no instruction at node {n}") from None
            icls = type(ins)
            get = bank.get
            d = self.default
            if icls is Cond:
                a1, a2 = get(ins.r1, d), get(ins.r2, d)
                res = pol.cond(ins.rel, ins.itag, p, a1.tag, a2.tag, trace)
                if isinstance(res, TagErr):
                    return ErrSt(res)
                nxt = ins.ifso if compare(ins.rel, a1.value, a2.value) else ins.ifnot
                return Regular(fn, nxt, res, c, bank)
            if icls is Op:
                a1, a2 = get(ins.r1, d), get(ins.r2, d)
                res = pol.op(ins.op, ins.itag, p, a1.tag, a2.tag, trace)
                value = arith(ins.op, a1.value, a2.value) if not isinstance(res, TagErr) else 0
            elif icls is Mov:
                src = get(ins.rs, d)
                res = pol.mov(ins.itag, p, src.tag, get(ins.rd, d).tag, trace)
                value = src.value
            elif icls is Movi:
                res = pol.movi(ins.itag, p, ins.atom.tag, trace)
                value = ins.atom.value
            elif icls is Nop:
                res = pol.nop(ins.itag, p, trace)
                if isinstance(res, TagErr):
                    return ErrSt(res)
                return Regular(fn, ins.succ, res, c, bank)
            elif icls is Call:
                args = tuple(get(r, d) for r in ins.args)
                try:
                    callee = self.prog[ins.func]
                except KeyError:
                    raise StuckError(f"unknown function {ins.func!r}") from None
                frame = Frame(fn, ins.rd, ins.succ, bank, p)
                return CallSt(callee, args, p, c + (frame,), ins.itag)
            elif icls is Ret:
                a = get(ins.r, d)
                p_saved = c[-1].p_saved if c else pol.init_pc
                res = pol.ret(ins.itag, p, p_saved, a.tag, trace)
                if isinstance(res, TagErr):
                    return ErrSt(res)
                return RetSt(Atom(a.value, res[1]), res[0], c)
            else:
                raise StuckError(f"unknown instruction {ins!r}")
            if isinstance(res, TagErr):
                return ErrSt(res)
            if not inplace:
                bank = dict(bank)
            bank[ins.rd] = Atom(value, res[1])
            return Regular(fn, ins.succ, res[0], c, bank)
        if cls is CallSt:
            fn, args, p, c, itag = st
            if len(args) != len(fn.params):
                raise StuckError(f"arity mismatch calling {fn.name}")
            tags = tuple(a.tag for a in args)
            res = pol.call(itag, p, fn.fn_tag, tags, trace)
            if isinstance(res, TagErr):
                return ErrSt(res)
            p2, tags2 = res
            bank = {r: Atom(a.value, t) for r, a, t in zip(fn.params, args, tags2)}
            return Regular(fn, fn.entry, p2, c, bank)
        if cls is RetSt:
            a, p, c = st
            if not c:
                raise StuckError("no transition from a final state")
            fr = c[-1]
            bank = fr.bank if inplace else dict(fr.bank)
            bank[fr.dest] = a
            return Regular(fr.caller, fr.ret_node, p, c[:-1], bank)
        raise StuckError(f"no transition from {cls.__name__}")


def run(prog: RtlProgram, policy, fuel: int, trace: Optional[Trace] = None):
    """Run ``main`` under a lowered policy for at most ``fuel`` steps."""
    m = Machine(prog, policy, trace)
    st = m.initial()
    step = m.step
    steps = 0
    while True:
        cls = type(st)
        if cls is ErrSt:
            m.steps = steps
            return FailStop(st.err), m.trace
        if cls is RetSt and not st.c:
            m.steps = steps
            return Terminate(st.atom), m.trace
        if steps >= fuel:
            m.steps = steps
            return Timeout(steps), m.trace
        st = step(st, True)
        steps += 1
