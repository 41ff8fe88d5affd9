"""Source-level tag policies: IFC secrecy, taint tracking and the unit policy.

A rule returns its outputs on success and a :class:`TagErr` on failure.
Expression rules (``const``, ``var``, ``binop``) return only a value tag;
they have no way to touch the PC tag.
"""

from __future__ import annotations

import copy
import enum
from typing import Any, Sequence

from .core import ALL_HOLD, FlagSet, TagErr, make_flags

# rule name -> (method name, argument kinds, how the PC tag appears in the output)
#   pc_out: "none"  -> returns a value tag only
#           "only"  -> returns a PC tag only
#           "first" -> returns a tuple whose first element is the PC tag
RULES = {
    "const": ("const", ("pc", "vtag"), "none"),
    "var": ("var", ("pc", "vtag"), "none"),
    "binop": ("binop", ("op", "pc", "vtag", "vtag"), "none"),
    "assign": ("assign", ("pc", "vtag", "vtag"), "first"),
    "ifSplit": ("if_split", ("pc", "rel", "vtag", "vtag"), "only"),
    "ifJoin": ("if_join", ("pc", "ptag"), "only"),
    "whileSplit": ("while_split", ("pc", "rel", "vtag", "vtag"), "only"),
    "whileExit": ("while_exit", ("pc", "ptag"), "only"),
    "call": ("call", ("pc", "ptag", "vtags"), "first"),
    "ret": ("ret", ("pc", "ptag", "vtag"), "first"),
}


class HllPolicy:
    """Base class for source policies.

    Subclasses fill in the rules, the tag universes, ``init_pc``/``def_tag``
    and the declared flags. Rules must be pure functions of their arguments.
    """

    name = "abstract"
    vtags: tuple = ()
    ptags: tuple = ()
    init_pc: Any = None
    def_tag: Any = None
    flags: FlagSet = FlagSet({})

    def parse_tag(self, text: str):
        for t in (*self.vtags, *self.ptags):
            if str(t) == text:
                return t
        raise ValueError(f"policy {self.name} has no tag {text!r}")

    def rule(self, name: str):
        return getattr(self, RULES[name][0])

    def with_flags(self, flags: FlagSet) -> "HllPolicy":
        """Same rules, different declarations (used to build mis-flagged variants)."""
        clone = copy.copy(self)
        clone.flags = flags
        return clone

    # rules
    def const(self, p, t):
        raise NotImplementedError

    def var(self, p, t):
        raise NotImplementedError

    def binop(self, op, p, t1, t2):
        raise NotImplementedError

    def assign(self, p, t_old, t_e):
        raise NotImplementedError

    def if_split(self, p, rel, t1, t2):
        raise NotImplementedError

    def if_join(self, p, p_s):
        raise NotImplementedError

    def while_split(self, p, rel, t1, t2):
        return self.if_split(p, rel, t1, t2)

    def while_exit(self, p, p_s):
        return self.if_join(p, p_s)

    def call(self, p, p_f, arg_tags: Sequence):
        raise NotImplementedError

    def ret(self, p, p_saved, t):
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<policy {self.name}>"


# ---------------------------------------------------------------------------
# information-flow control


class Level(enum.Enum):
    P = False  # public
    S = True  # secret

    def __or__(self, other: "Level") -> "Level":
        return Level.S if (self is Level.S or other is Level.S) else Level.P

    def __str__(self) -> str:
        return self.name


IFC_WRITE_VIOLATION = TagErr("IfcWriteViolation")

_expr = make_flags("dfs pcp !wpci !spci")
_join = make_flags("dfs !pcp !wpci !spci")

IFC_FLAGS = FlagSet({
    "const": _expr,
    "var": _expr,
    "binop": _expr,
    "assign": make_flags("!dfs pcp !wpci !spci"),
    "ifSplit": _join,
    "whileSplit": _join,
    "ifJoin": _join,
    "whileExit": _join,
    "call": make_flags("dfs pcp"),
    "ret": make_flags("dfs !pcp !wpci !spci"),
})


class IfcPolicy(HllPolicy):
    """Secrecy with a security-context PC tag that is lowered again at joins."""

    name = "ifc"
    vtags = (Level.P, Level.S)
    ptags = (Level.P, Level.S)
    init_pc = Level.P
    def_tag = Level.P
    flags = IFC_FLAGS

    def const(self, p, t):
        return t

    def var(self, p, t):
        return t

    def binop(self, op, p, t1, t2):
        return t1 | t2 | p

    def assign(self, p, t_old, t_e):
        # a secret value or context may only flow into a secret location
        if (t_e | p) is Level.S and t_old is Level.P:
            return IFC_WRITE_VIOLATION
        return (p, t_old)

    def if_split(self, p, rel, t1, t2):
        return t1 | t2 | p

    def if_join(self, p, p_s):
        return p_s

    def call(self, p, p_f, arg_tags):
        return (p, tuple(arg_tags))

    def ret(self, p, p_saved, t):
        return (p_saved, t)


# ---------------------------------------------------------------------------
# taint tracking


class Taint(enum.Enum):
    F = False
    T = True

    def __or__(self, other: "Taint") -> "Taint":
        return Taint.T if (self is Taint.T or other is Taint.T) else Taint.F

    def __str__(self) -> str:
        return self.name


_pure = make_flags("dfs pcp")

TAINT_FLAGS = FlagSet({
    "const": _pure,
    "var": _pure,
    "binop": make_flags("dfs pcp wpci spci"),
    "assign": _pure,
    "ifSplit": _pure,
    "whileSplit": _pure,
    "ifJoin": _pure,
    "whileExit": _pure,
    "call": _pure,
    "ret": _pure,
})


class TaintPolicy(HllPolicy):
    """Value tags join their inputs; the PC tag is carried along untouched."""

    name = "taint"
    vtags = (Taint.F, Taint.T)
    ptags = (Taint.F, Taint.T)
    init_pc = Taint.F
    def_tag = Taint.F
    flags = TAINT_FLAGS

    def const(self, p, t):
        return t

    def var(self, p, t):
        return t

    def binop(self, op, p, t1, t2):
        return t1 | t2

    def assign(self, p, t_old, t_e):
        return (p, t_old | t_e)

    def if_split(self, p, rel, t1, t2):
        return p

    def if_join(self, p, p_s):
        return p

    def call(self, p, p_f, arg_tags):
        return (p, tuple(arg_tags))

    def ret(self, p, p_saved, t):
        return (p, t)


# ---------------------------------------------------------------------------
# unit policy


class UnitTag(enum.Enum):
    U = 0

    def __str__(self) -> str:
        return self.name


U = UnitTag.U


class UnitPolicy(HllPolicy):
    """One tag, every rule succeeds: monitoring that observes nothing."""

    name = "unit"
    vtags = (U,)
    ptags = (U,)
    init_pc = U
    def_tag = U
    flags = FlagSet({name: ALL_HOLD for name in RULES})

    def const(self, p, t):
        return U

    def var(self, p, t):
        return U

    def binop(self, op, p, t1, t2):
        return U

    def assign(self, p, t_old, t_e):
        return (U, U)

    def if_split(self, p, rel, t1, t2):
        return U

    def if_join(self, p, p_s):
        return U

    def call(self, p, p_f, arg_tags):
        return (U, tuple(U for _ in arg_tags))

    def ret(self, p, p_saved, t):
        return (U, U)


POLICIES = {"ifc": IfcPolicy, "taint": TaintPolicy, "unit": UnitPolicy}


def get_policy(name: str) -> HllPolicy:
    try:
        return POLICIES[name]()
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; choose from {', '.join(POLICIES)}") from None
