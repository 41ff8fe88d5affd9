"""Common subexpression elimination by local value numbering.

Numbering runs over extended basic blocks: trees of blocks in which every
non-root node has a single predecessor, so facts flow down each branch and
are dropped at join points. A repeated op is replaced by a copy of the
register that already holds its result, provided the skipped rule firing
would have seen the same PC tag as the first one (no PC-changing
instruction in between) or its result does not depend on the PC tag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core import IT_COPY
from ..rtl.ir import (Call, Mov, Movi, Op, RtlFunction, opcode,
                      predecessors, reachable, successors)

# rule-silent moves hand over the source atom untouched
_TRANSPARENT_MOV = frozenset({"copy", "dc"})
_TRANSPARENT_MOVI = frozenset({"localInit", "dc"})


def ebb_partition(f: RtlFunction) -> list:
    """Extended basic blocks as lists of nodes in depth-first order, root first."""
    nodes = reachable(f)
    preds = predecessors(f)
    roots = [n for n in nodes if n == f.entry or len(preds[n]) != 1]
    root_set = set(roots)
    out = []
    for r in roots:
        block, stack = [], [r]
        while stack:
            n = stack.pop()
            block.append(n)
            stack.extend(s for s in reversed(successors(f.graph[n])) if s not in root_set)
        out.append(block)
    return out


@dataclass
class ValueNumbering:
    reg_vn: dict = field(default_factory=dict)
    table: dict = field(default_factory=dict)  # expression key -> (vn, wpci_safe)
    holder: dict = field(default_factory=dict)  # vn -> register
    counter: list = field(default_factory=lambda: [0])  # shared across copies

    def fresh(self) -> int:
        self.counter[0] += 1
        return self.counter[0]

    def vn(self, r: int) -> int:
        v = self.reg_vn.get(r)
        if v is None:
            v = self.reg_vn[r] = self.fresh()
            self.holder.setdefault(v, r)
        return v

    def holding(self, v: int):
        h = self.holder.get(v)
        if h is not None and self.reg_vn.get(h) == v:
            return h
        for r, w in self.reg_vn.items():
            if w == v:
                self.holder[v] = r
                return r
        return None

    def define(self, r: int, v: int):
        self.reg_vn[r] = v
        h = self.holder.get(v)
        if h is None or self.reg_vn.get(h) != v:
            self.holder[v] = r

    def number(self, key, wpci_safe: bool) -> int:
        hit = self.table.get(key)
        if hit is not None:
            return hit[0]
        v = self.fresh()
        self.table[key] = (v, wpci_safe)
        return v

    def clear_unsafe(self):
        self.table = {k: e for k, e in self.table.items() if e[1]}

    def copy(self) -> "ValueNumbering":
        return ValueNumbering(dict(self.reg_vn), dict(self.table), dict(self.holder), self.counter)


@dataclass
class CseReport:
    replaced: int = 0


def cse(f: RtlFunction, flags, guard: bool = True, report: CseReport = None) -> RtlFunction:
    """Replace repeated ops by ``Mov@ITcopy``.

    ``guard=False`` ignores the PC-related conditions (no clearing, no
    applicability check); it exists only for mutation testing.
    """
    graph = dict(f.graph)
    preds = predecessors(f)
    nodes = reachable(f)
    roots = {n for n in nodes if n == f.entry or len(preds[n]) != 1}
    counter = [0]
    for r in sorted(roots):
        stack = [(r, ValueNumbering(counter=counter))]
        while stack:
            n, st = stack.pop()
            ins = f.graph[n]
            new = _visit(st, ins, flags, guard)
            if new is not ins:
                graph[n] = new
                if report is not None:
                    report.replaced += 1
            succ = [s for s in successors(ins) if s not in roots]
            for i, s in enumerate(succ):
                stack.append((s, st if i == len(succ) - 1 else st.copy()))
    return f.with_graph(graph)


def _visit(st: ValueNumbering, ins, flags, guard: bool):
    cls = type(ins)
    key = ins.itag.flag_key
    fl = flags[(opcode(ins), key)]
    wpci = fl.holds("wpci")
    pcp = fl.holds("pcp") and cls is not Call
    out = ins
    if cls is Op:
        ekey = ("op", ins.op, ins.itag, st.vn(ins.r1), st.vn(ins.r2))
        hit = st.table.get(ekey)
        h = st.holding(hit[0]) if hit is not None else None
        # a surviving non-WPCI entry saw only PC-preserving instructions
        # since its definition, because the clearing below removes it otherwise
        if h is not None and (not guard or wpci or pcp):
            out = Mov(h, ins.rd, ins.succ, IT_COPY)
            st.define(ins.rd, hit[0])
        else:
            st.define(ins.rd, st.number(ekey, wpci))
    elif cls is Mov:
        k = ins.itag.kind
        if k in _TRANSPARENT_MOV:
            st.define(ins.rd, st.vn(ins.rs))
        elif k == "var":
            st.define(ins.rd, st.number(("mov", ins.itag, st.vn(ins.rs)), wpci))
        else:
            st.define(ins.rd, st.fresh())
    elif cls is Movi:
        if ins.itag.kind in _TRANSPARENT_MOVI:
            st.define(ins.rd, st.number(("atom", ins.atom), True))
        else:
            st.define(ins.rd, st.number(("movi", ins.itag, ins.atom), wpci))
    elif cls is Call:
        st.define(ins.rd, st.fresh())
    if guard and not pcp:
        st.clear_unsafe()
    return out
