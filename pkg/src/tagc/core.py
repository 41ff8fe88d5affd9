"""Shared vocabulary: values, atoms, tag errors, behaviors, I-tags, flags, traces.

Tags themselves are opaque: every policy brings its own tag objects, which
only need equality, hashing and ``str`` (the textual form that follows ``@``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, NamedTuple, Optional

WORD = 1 << 64
MASK = WORD - 1

OPS = ("+", "-")
RELS = ("==", "!=", "<=", "<", ">=", ">")


def arith(op: str, a: int, b: int) -> int:
    if op == "+":
        return (a + b) & MASK
    if op == "-":
        return (a - b) & MASK
    raise ValueError(f"unknown operator {op!r}")


def compare(rel: str, a: int, b: int) -> bool:
    # values are unsigned words, so plain int comparison is the unsigned one
    if rel == "==":
        return a == b
    if rel == "!=":
        return a != b
    if rel == "<=":
        return a <= b
    if rel == "<":
        return a < b
    if rel == ">=":
        return a >= b
    if rel == ">":
        return a > b
    raise ValueError(f"unknown relation {rel!r}")


class StuckError(RuntimeError):
    """No transition applies: an interpreter or well-formedness bug."""


@dataclass(frozen=True)
class TagErr:
    """A tag-rule failure token. Policies define these as named constants."""

    name: str

    def __str__(self) -> str:
        return self.name


class Atom(NamedTuple):
    value: int
    tag: Any

    def __str__(self) -> str:
        return f"{self.value}@{self.tag}"


# ---------------------------------------------------------------------------
# behaviors


@dataclass(frozen=True)
class Terminate:
    result: Atom

    def __str__(self) -> str:
        return f"Terminate: {self.result}"


@dataclass(frozen=True)
class FailStop:
    err: TagErr

    def __str__(self) -> str:
        return f"FailStop: {self.err}"


@dataclass(frozen=True)
class Timeout:
    steps: int

    def __str__(self) -> str:
        return f"Timeout: {self.steps}"


Behavior = Terminate | FailStop | Timeout


def behavior_eq(b1: Behavior, b2: Behavior) -> bool:
    """Equality up to results and errors; a Timeout only matches a Timeout."""
    if isinstance(b1, Timeout) or isinstance(b2, Timeout):
        return isinstance(b1, Timeout) and isinstance(b2, Timeout)
    return b1 == b2


def behavior_json(b: Behavior) -> dict:
    if isinstance(b, Terminate):
        return {"kind": "Terminate", "value": b.result.value, "tag": str(b.result.tag)}
    if isinstance(b, FailStop):
        return {"kind": "FailStop", "err": b.err.name}
    return {"kind": "Timeout", "steps": b.steps}


# ---------------------------------------------------------------------------
# instruction tags

IT_KINDS = (
    "const", "var", "op", "assign", "savePC", "ifSplit", "ifJoin",
    "whileSplit", "whileJoin", "call", "ret", "localInit", "copy", "dc", "p",
)


@dataclass(frozen=True)
class ITag:
    """Provenance tag on an RTL instruction.

    ``op`` is set for ``IT+``/``IT-`` and for the parameterized ``ITp``,
    which additionally carries the two operand value tags.
    """

    kind: str
    op: Optional[str] = None
    t1: Any = None
    t2: Any = None

    def __post_init__(self):
        if self.kind not in IT_KINDS:
            raise ValueError(f"unknown I-tag kind {self.kind!r}")
        if self.kind in ("op", "p") and self.op not in OPS:
            raise ValueError(f"I-tag {self.kind} needs an operator")

    @property
    def flag_key(self) -> str:
        """Key into lowered flag tables: ITp parameters are erased."""
        if self.kind == "op":
            return f"IT{self.op}"
        if self.kind == "p":
            return f"ITp{self.op}"
        return f"IT{self.kind}"

    def __str__(self) -> str:
        if self.kind == "op":
            return f"IT{self.op}"
        if self.kind == "p":
            return f"ITp({self.op},{self.t1},{self.t2})"
        return f"IT{self.kind}"


IT_CONST = ITag("const")
IT_VAR = ITag("var")
IT_ASSIGN = ITag("assign")
IT_SAVEPC = ITag("savePC")
IT_IFSPLIT = ITag("ifSplit")
IT_IFJOIN = ITag("ifJoin")
IT_WHILESPLIT = ITag("whileSplit")
IT_WHILEJOIN = ITag("whileJoin")
IT_CALL = ITag("call")
IT_RET = ITag("ret")
IT_LOCALINIT = ITag("localInit")
IT_COPY = ITag("copy")
IT_DC = ITag("dc")
IT_OP = {op: ITag("op", op) for op in OPS}
# rule-silent I-tags: their lowered rules only pass tags through
ADMIN_KINDS = frozenset({"savePC", "dc", "localInit", "copy"})


def it_p(op: str, t1, t2) -> ITag:
    return ITag("p", op, t1, t2)


def parse_itag(text: str, parse_tag: Callable[[str], Any]) -> ITag:
    if not text.startswith("IT"):
        raise ValueError(f"bad I-tag {text!r}")
    body = text[2:]
    if body in OPS:
        return IT_OP[body]
    if body.startswith("p(") and body.endswith(")"):
        op, t1, t2 = body[2:-1].split(",")
        return it_p(op, parse_tag(t1), parse_tag(t2))
    return ITag(body)


# ---------------------------------------------------------------------------
# rule-property flags


class Tri(enum.Enum):
    HOLDS = "Holds"
    NO = "DoesNotHold"
    UNKNOWN = "Unknown"


PROPS = ("dfs", "pcp", "wpci", "spci")


@dataclass(frozen=True)
class RuleFlags:
    dfs: Tri = Tri.UNKNOWN
    pcp: Tri = Tri.UNKNOWN
    wpci: Tri = Tri.UNKNOWN
    spci: Tri = Tri.UNKNOWN

    def holds(self, prop: str) -> bool:
        # Unknown is treated exactly like DoesNotHold
        return getattr(self, prop) is Tri.HOLDS

    def consistent(self) -> bool:
        if self.spci is Tri.HOLDS and self.wpci is not Tri.HOLDS:
            return False
        if self.wpci is Tri.HOLDS and self.pcp is not Tri.HOLDS:
            return False
        return True


UNKNOWN_FLAGS = RuleFlags()
ALL_HOLD = RuleFlags(Tri.HOLDS, Tri.HOLDS, Tri.HOLDS, Tri.HOLDS)


def make_flags(spec: str) -> RuleFlags:
    """Build flags from a compact string such as ``"dfs pcp !wpci"``.

    Bare names mean Holds, ``!name`` means DoesNotHold, omitted means Unknown.
    """
    kw = {}
    for word in spec.split():
        if word.startswith("!"):
            kw[word[1:]] = Tri.NO
        else:
            kw[word] = Tri.HOLDS
    return RuleFlags(**kw)


def flags_wf(flags: Mapping[Any, RuleFlags]) -> bool:
    return all(f.consistent() for f in flags.values())


class FlagSet(Mapping):
    """Per-rule flag declarations; lookups of undeclared rules yield all-Unknown."""

    def __init__(self, entries: Mapping[Any, RuleFlags]):
        bad = [k for k, f in entries.items() if not f.consistent()]
        if bad:
            raise ValueError(f"flag implications SPCI=>WPCI=>PCP violated for {bad}")
        self._entries = dict(entries)

    def __getitem__(self, key) -> RuleFlags:
        return self._entries.get(key, UNKNOWN_FLAGS)

    def __iter__(self) -> Iterator:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key) -> bool:
        return key in self._entries

    def holds(self, key, prop: str) -> bool:
        return self[key].holds(prop)

    def replace(self, **changes: RuleFlags) -> "FlagSet":
        return FlagSet({**self._entries, **changes})

    def __repr__(self) -> str:
        return f"FlagSet({self._entries!r})"


def all_unknown(flags: Mapping) -> FlagSet:
    return FlagSet({k: UNKNOWN_FLAGS for k in flags})


# ---------------------------------------------------------------------------
# rule traces


def _fmt(x) -> str:
    if isinstance(x, (list, tuple)):
        return "[" + ",".join(_fmt(y) for y in x) + "]"
    return str(x)


def format_result(res) -> str:
    if isinstance(res, TagErr):
        return f"ERR({res})"
    if isinstance(res, tuple):
        return "OK(" + ",".join(_fmt(x) for x in res) + ")"
    return f"OK({_fmt(res)})"


def format_entry(entry) -> str:
    name, args, res = entry
    return " ".join([name, *(_fmt(a) for a in args)]) + " -> " + format_result(res)


@dataclass
class Trace:
    """Chronological record of source-rule firings.

    ``rules`` holds the entries compared for policy independence;
    ``admin`` collects compiler-introduced rule firings (target side only).
    A listener, if set, sees every entry as it is appended.
    """

    rules: list = field(default_factory=list)
    admin: list = field(default_factory=list)
    listener: Optional[Callable[[str, tuple], None]] = None

    def fire(self, name: str, args: tuple, res) -> None:
        entry = (name, args, res)
        self.rules.append(entry)
        if self.listener is not None:
            self.listener("rule", entry)

    def fire_admin(self, name: str, args: tuple, res) -> None:
        entry = (name, args, res)
        self.admin.append(entry)
        if self.listener is not None:
            self.listener("admin", entry)

    def lines(self) -> list[str]:
        return [format_entry(e) for e in self.rules]


def first_divergence(t1: list, t2: list) -> Optional[int]:
    """Index of the first differing entry, or None if the traces are equal."""
    for i, (a, b) in enumerate(zip(t1, t2)):
        if a != b:
            return i
    if len(t1) != len(t2):
        return min(len(t1), len(t2))
    return None
