"""Lowering a source policy to instruction-level rules by I-tag dispatch.

Each lowered rule first matches on the instruction's I-tag. Arms with a
source provenance call the corresponding source rule (and record that firing
in the trace); administrative arms only move tags around and are recorded
in the trace's administrative channel.
"""

from __future__ import annotations

from .core import (ALL_HOLD, OPS, FlagSet, ITag, TagErr, Trace, make_flags)

ADMIN = "administrative"

# (opcode, I-tag flag key) -> source rule name, or ADMIN
PROVENANCE = {
    ("movi", "ITconst"): "const",
    ("mov", "ITvar"): "var",
    **{("op", f"IT{op}"): "binop" for op in OPS},
    ("mov", "ITassign"): "assign",
    ("mov", "ITsavePC"): ADMIN,
    ("cond", "ITifSplit"): "ifSplit",
    ("mov", "ITifJoin"): "ifJoin",
    ("cond", "ITwhileSplit"): "whileSplit",
    ("mov", "ITwhileJoin"): "whileExit",
    ("call", "ITcall"): "call",
    ("ret", "ITret"): "ret",
    ("movi", "ITlocalInit"): ADMIN,
    ("mov", "ITcopy"): ADMIN,
    ("mov", "ITdc"): ADMIN,
    ("nop", "ITdc"): ADMIN,
    ("movi", "ITdc"): ADMIN,
    **{("movi", f"ITp{op}"): "binop" for op in OPS},
}

_SAVEPC_FLAGS = make_flags("dfs pcp !wpci !spci")


class DispatchError(Exception):
    """An (opcode, I-tag) pair with no dispatch arm: a compiler bug."""


class _NullTrace(Trace):
    def fire(self, name, args, res):
        pass

    def fire_admin(self, name, args, res):
        pass


NULL_TRACE = _NullTrace()


def _lift(t, p):
    # expression rules never change the PC tag
    return t if isinstance(t, TagErr) else (p, t)


def lower_flags(flags) -> FlagSet:
    """Instruction-level flags inherited from the source rules they dispatch to."""
    out = {}
    for key, prov in PROVENANCE.items():
        if prov != ADMIN:
            out[key] = flags[prov]
        elif key == ("mov", "ITsavePC"):
            # its output tag is the PC tag itself
            out[key] = _SAVEPC_FLAGS
        else:
            out[key] = ALL_HOLD
    return FlagSet(out)


class LoweredPolicy:
    """Instruction-level policy built from a source policy."""

    def __init__(self, source):
        self.source = source
        self.name = source.name
        self.init_pc = source.init_pc
        self.def_tag = source.def_tag
        self.vtags = source.vtags
        self.ptags = source.ptags
        self.flags = lower_flags(source.flags)
        self.parse_tag = source.parse_tag

    def flag(self, opcode: str, itag: ITag):
        return self.flags[(opcode, itag.flag_key)]

    @staticmethod
    def _missing(opcode: str, itag: ITag):
        raise DispatchError(f"no {opcode} rule for I-tag {itag}")

    def nop(self, it: ITag, p, trace=NULL_TRACE):
        if it.kind == "dc":
            trace.fire_admin("nop ITdc", (p,), p)
            return p
        self._missing("nop", it)

    def movi(self, it: ITag, p, t, trace=NULL_TRACE):
        k = it.kind
        if k == "const":
            r = self.source.const(p, t)
            trace.fire("const", (p, t), r)
            return _lift(r, p)
        if k == "p":
            # the literal's own tag is ignored: the rule sees the recorded operand tags
            r = self.source.binop(it.op, p, it.t1, it.t2)
            trace.fire("binop", (it.op, p, it.t1, it.t2), r)
            return _lift(r, p)
        if k == "localInit" or k == "dc":
            trace.fire_admin(f"movi {it}", (p, t), (p, t))
            return (p, t)
        self._missing("movi", it)

    def mov(self, it: ITag, p, t_s, t_d, trace=NULL_TRACE):
        k = it.kind
        src = self.source
        if k == "var":
            r = src.var(p, t_s)
            trace.fire("var", (p, t_s), r)
            return _lift(r, p)
        if k == "assign":
            r = src.assign(p, t_d, t_s)
            trace.fire("assign", (p, t_d, t_s), r)
            return r
        if k == "savePC":
            trace.fire_admin("mov ITsavePC", (p, t_s, t_d), (p, p))
            return (p, p)
        if k == "ifJoin" or k == "whileJoin":
            name = "ifJoin" if k == "ifJoin" else "whileExit"
            r = (src.if_join if k == "ifJoin" else src.while_exit)(p, t_s)
            trace.fire(name, (p, t_s), r)
            return r if isinstance(r, TagErr) else (r, t_s)
        if k == "copy" or k == "dc":
            trace.fire_admin(f"mov {it}", (p, t_s, t_d), (p, t_s))
            return (p, t_s)
        self._missing("mov", it)

    def op(self, oper: str, it: ITag, p, t1, t2, trace=NULL_TRACE):
        if it.kind == "op" and it.op == oper:
            r = self.source.binop(oper, p, t1, t2)
            trace.fire("binop", (oper, p, t1, t2), r)
            return _lift(r, p)
        self._missing(f"op{oper}", it)

    def cond(self, rel: str, it: ITag, p, t1, t2, trace=NULL_TRACE):
        k = it.kind
        if k == "ifSplit":
            r = self.source.if_split(p, rel, t1, t2)
            trace.fire("ifSplit", (p, rel, t1, t2), r)
            return r
        if k == "whileSplit":
            r = self.source.while_split(p, rel, t1, t2)
            trace.fire("whileSplit", (p, rel, t1, t2), r)
            return r
        self._missing("cond", it)

    def call(self, it: ITag, p, p_f, arg_tags, trace=NULL_TRACE):
        if it.kind == "call":
            r = self.source.call(p, p_f, arg_tags)
            trace.fire("call", (p, p_f, arg_tags), r)
            return r
        self._missing("call", it)

    def ret(self, it: ITag, p, p_saved, t, trace=NULL_TRACE):
        if it.kind == "ret":
            r = self.source.ret(p, p_saved, t)
            trace.fire("ret", (p, p_saved, t), r)
            return r
        self._missing("ret", it)


def lower(policy) -> LoweredPolicy:
    return LoweredPolicy(policy)


def dispatch_table() -> list:
    """Rows of (opcode, I-tag, provenance) for auditing."""
    return [(op, it, prov) for (op, it), prov in PROVENANCE.items()]
