"""Small-step HLL semantics with tag rules fired at every control point.

Expressions are evaluated big-step inside a statement step. Every expression
rule firing and every statement transition costs one unit of fuel.
"""

from __future__ import annotations

from typing import Any, NamedTuple, Optional

from ..core import (Atom, FailStop, StuckError, TagErr, Terminate, Timeout,
                    Trace, arith, compare)
from .syntax import (SKIP, Assign, BinOp, Call, FunDef, If, Lit, Program,
                     Return, Seq, Skip, Var, While)

# -- local continuations: None is the empty continuation


class SeqK(NamedTuple):
    stmt: Any
    k: Any


class JoinK(NamedTuple):
    join: str  # "ifJoin" or "whileExit"
    p_s: Any
    k: Any


EMP = None


class Frame(NamedTuple):
    caller: FunDef
    dest: str
    k: Any
    env: dict
    p_saved: Any


# -- states (call continuations are tuples of frames, innermost last)


class Regular(NamedTuple):
    fn: FunDef
    stmt: Any
    p: Any
    k: Any
    c: tuple
    env: dict


class CallSt(NamedTuple):
    fn: FunDef
    args: tuple
    p: Any
    c: tuple


class RetSt(NamedTuple):
    atom: Atom
    p: Any
    c: tuple


class ErrSt(NamedTuple):
    err: TagErr


def is_final(st) -> bool:
    return isinstance(st, ErrSt) or (isinstance(st, RetSt) and not st.c)


class Machine:
    """Steps HLL states for one program under one policy, recording rule firings."""

    def __init__(self, prog: Program, policy, trace: Optional[Trace] = None):
        self.prog = prog
        self.policy = policy
        self.trace = trace if trace is not None else Trace()
        self.steps = 0
        self.default = Atom(0, policy.def_tag)

    def initial(self) -> CallSt:
        return CallSt(self.prog.main, (), self.policy.init_pc, ())

    # -- expressions

    def eval_expr(self, env: dict, p, e):
        """Atom on success, TagErr if a rule fails. The left operand goes first."""
        self.steps += 1
        pol, fire = self.policy, self.trace.fire
        cls = type(e)
        if cls is Lit:
            t = pol.const(p, e.atom.tag)
            fire("const", (p, e.atom.tag), t)
            return t if isinstance(t, TagErr) else Atom(e.atom.value, t)
        if cls is Var:
            try:
                a = env[e.name]
            except KeyError:
                raise StuckError(f"unbound variable {e.name!r}") from None
            t = pol.var(p, a.tag)
            fire("var", (p, a.tag), t)
            return t if isinstance(t, TagErr) else Atom(a.value, t)
        if cls is BinOp:
            l = self.eval_expr(env, p, e.left)
            if isinstance(l, TagErr):
                return l
            r = self.eval_expr(env, p, e.right)
            if isinstance(r, TagErr):
                return r
            t = pol.binop(e.op, p, l.tag, r.tag)
            fire("binop", (e.op, p, l.tag, r.tag), t)
            return t if isinstance(t, TagErr) else Atom(arith(e.op, l.value, r.value), t)
        raise StuckError(f"not an expression: {e!r}")

    # -- statements

    def _saved_pc(self, c: tuple):
        return c[-1].p_saved if c else self.policy.init_pc

    def _leave(self, value: int, t, p, c):
        # the function-exit control point, shared by return and fall-through
        p_saved = self._saved_pc(c)
        res = self.policy.ret(p, p_saved, t)
        self.trace.fire("ret", (p, p_saved, t), res)
        if isinstance(res, TagErr):
            return ErrSt(res)
        return RetSt(Atom(value, res[1]), res[0], c)

    def step(self, st):
        pol, fire = self.policy, self.trace.fire
        cls = type(st)
        if cls is Regular:
            fn, s, p, k, c, env = st
            scls = type(s)
            if scls is Skip:
                if k is EMP:
                    return self._leave(0, pol.def_tag, p, c)
                if type(k) is SeqK:
                    return Regular(fn, k.stmt, p, k.k, c, env)
                rule = pol.if_join if k.join == "ifJoin" else pol.while_exit
                res = rule(p, k.p_s)
                fire(k.join, (p, k.p_s), res)
                if isinstance(res, TagErr):
                    return ErrSt(res)
                return Regular(fn, SKIP, res, k.k, c, env)
            if scls is Seq:
                return Regular(fn, s.first, p, SeqK(s.second, k), c, env)
            if scls is Assign:
                a = self.eval_expr(env, p, s.expr)
                if isinstance(a, TagErr):
                    return ErrSt(a)
                try:
                    t_old = env[s.var].tag
                except KeyError:
                    raise StuckError(f"unbound variable {s.var!r}") from None
                res = pol.assign(p, t_old, a.tag)
                fire("assign", (p, t_old, a.tag), res)
                if isinstance(res, TagErr):
                    return ErrSt(res)
                env = dict(env)
                env[s.var] = Atom(a.value, res[1])
                return Regular(fn, SKIP, res[0], k, c, env)
            if scls is If or scls is While:
                a1 = self.eval_expr(env, p, s.left)
                if isinstance(a1, TagErr):
                    return ErrSt(a1)
                a2 = self.eval_expr(env, p, s.right)
                if isinstance(a2, TagErr):
                    return ErrSt(a2)
                taken = compare(s.rel, a1.value, a2.value)
                if scls is If:
                    res = pol.if_split(p, s.rel, a1.tag, a2.tag)
                    fire("ifSplit", (p, s.rel, a1.tag, a2.tag), res)
                    if isinstance(res, TagErr):
                        return ErrSt(res)
                    branch = s.then if taken else s.orelse
                    return Regular(fn, branch, res, JoinK("ifJoin", p, k), c, env)
                res = pol.while_split(p, s.rel, a1.tag, a2.tag)
                fire("whileSplit", (p, s.rel, a1.tag, a2.tag), res)
                if isinstance(res, TagErr):
                    return ErrSt(res)
                if taken:
                    return Regular(fn, s.body, res, JoinK("whileExit", p, SeqK(s, k)), c, env)
                return Regular(fn, SKIP, res, JoinK("whileExit", p, k), c, env)
            if scls is Call:
                args = []
                for e in s.args:
                    a = self.eval_expr(env, p, e)
                    if isinstance(a, TagErr):
                        return ErrSt(a)
                    args.append(a)
                try:
                    callee = self.prog[s.func]
                except KeyError:
                    raise StuckError(f"unknown function {s.func!r}") from None
                return CallSt(callee, tuple(args), p, c + (Frame(fn, s.dest, k, env, p),))
            if scls is Return:
                a = self.eval_expr(env, p, s.expr)
                if isinstance(a, TagErr):
                    return ErrSt(a)
                return self._leave(a.value, a.tag, p, c)
            raise StuckError(f"no transition for statement {s!r}")
        if cls is CallSt:
            fn, args, p, c = st
            if len(args) != len(fn.params):
                raise StuckError(f"arity mismatch calling {fn.name}")
            tags = tuple(a.tag for a in args)
            res = pol.call(p, fn.fn_tag, tags)
            fire("call", (p, fn.fn_tag, tags), res)
            if isinstance(res, TagErr):
                return ErrSt(res)
            p2, tags2 = res
            env = {x: Atom(a.value, t) for x, a, t in zip(fn.params, args, tags2)}
            for x in fn.locals:
                env[x] = self.default
            return Regular(fn, fn.body, p2, EMP, c, env)
        if cls is RetSt:
            a, p, c = st
            if not c:
                raise StuckError("no transition from a final state")
            fr = c[-1]
            env = dict(fr.env)
            env[fr.dest] = a
            return Regular(fr.caller, SKIP, p, fr.k, c[:-1], env)
        raise StuckError(f"no transition from {cls.__name__}")


def run(prog: Program, policy, fuel: int, trace: Optional[Trace] = None):
    """Run ``main`` for at most ``fuel`` steps; returns (behavior, trace)."""
    m = Machine(prog, policy, trace)
    st = m.initial()
    step = m.step
    while True:
        cls = type(st)
        if cls is ErrSt:
            return FailStop(st.err), m.trace
        if cls is RetSt and not st.c:
            return Terminate(st.atom), m.trace
        if m.steps >= fuel:
            return Timeout(m.steps), m.trace
        st = step(st)
        m.steps += 1


def rule_trace_of(result) -> list:
    """The chronological rule entries of a ``run`` result."""
    return result[1].rules
