"""Tagged RTL: instruction set, CFG functions and the well-formedness check."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

from ..core import Atom, ITag


@dataclass(frozen=True)
class Nop:
    succ: int
    itag: ITag


@dataclass(frozen=True)
class Op:
    op: str
    r1: int
    r2: int
    rd: int
    succ: int
    itag: ITag


@dataclass(frozen=True)
class Mov:
    rs: int
    rd: int
    succ: int
    itag: ITag


@dataclass(frozen=True)
class Movi:
    atom: Atom
    rd: int
    succ: int
    itag: ITag


@dataclass(frozen=True)
class Cond:
    rel: str
    r1: int
    r2: int
    ifso: int
    ifnot: int
    itag: ITag


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    rd: int
    succ: int
    itag: ITag


@dataclass(frozen=True)
class Ret:
    r: int
    itag: ITag


OPCODE = {Nop: "nop", Op: "op", Mov: "mov", Movi: "movi", Cond: "cond", Call: "call", Ret: "ret"}


def opcode(ins) -> str:
    return OPCODE[type(ins)]


def successors(ins) -> tuple:
    if isinstance(ins, Cond):
        return (ins.ifso, ins.ifnot)
    if isinstance(ins, Ret):
        return ()
    return (ins.succ,)


def with_successors(ins, succs: tuple):
    if isinstance(ins, Cond):
        return replace(ins, ifso=succs[0], ifnot=succs[1])
    if isinstance(ins, Ret):
        return ins
    return replace(ins, succ=succs[0])


# mov I-tags whose lowered rule never looks at the destination's old tag
_MOV_IGNORES_DEST = frozenset({"var", "savePC", "ifJoin", "whileJoin", "copy", "dc"})


def uses(ins) -> frozenset:
    """Registers whose atoms (value or tag) the instruction reads."""
    cls = type(ins)
    if cls is Op or cls is Cond:
        return frozenset((ins.r1, ins.r2))
    if cls is Mov:
        if ins.itag.kind in _MOV_IGNORES_DEST:
            return frozenset((ins.rs,))
        return frozenset((ins.rs, ins.rd))
    if cls is Call:
        return frozenset(ins.args)
    if cls is Ret:
        return frozenset((ins.r,))
    return frozenset()


def defs(ins):
    """The destination register, or None."""
    cls = type(ins)
    if cls in (Op, Mov, Movi, Call):
        return ins.rd
    return None


@dataclass(frozen=True)
class RtlFunction:
    name: str
    graph: dict  # node label -> instruction
    entry: int
    params: tuple
    fn_tag: Any
    ret_reg: int
    n_def: int
    n_ret: int

    def with_graph(self, graph: dict, entry: int = None) -> "RtlFunction":
        return replace(self, graph=graph, entry=self.entry if entry is None else entry)

    def instr_count(self) -> int:
        """Instructions other than nops."""
        return sum(1 for i in self.graph.values() if not isinstance(i, Nop))


@dataclass(frozen=True)
class RtlProgram:
    functions: dict = field(default_factory=dict)  # name -> RtlFunction

    def __getitem__(self, name: str) -> RtlFunction:
        return self.functions[name]

    @property
    def main(self) -> RtlFunction:
        return self.functions["main"]

    def map(self, fn) -> "RtlProgram":
        return RtlProgram({name: fn(f) for name, f in self.functions.items()})


def reachable(f: RtlFunction) -> list:
    """Nodes reachable from the entry, in depth-first preorder."""
    seen, order, stack = set(), [], [f.entry]
    while stack:
        n = stack.pop()
        if n in seen or n not in f.graph:
            continue
        seen.add(n)
        order.append(n)
        stack.extend(reversed(successors(f.graph[n])))
    return order


def predecessors(f: RtlFunction, nodes=None) -> dict:
    nodes = f.graph.keys() if nodes is None else nodes
    preds = {n: [] for n in nodes}
    for n in nodes:
        for s in successors(f.graph[n]):
            if s in preds:
                preds[s].append(n)
    return preds


def wf_check(f: RtlFunction, program: RtlProgram = None) -> list:
    """Defects of ``f`` as human-readable strings; empty means well formed."""
    defects = []
    g = f.graph
    for n, ins in sorted(g.items()):
        for s in successors(ins):
            if s not in g:
                defects.append(f"dangling: node {n} jumps to missing node {s}")
        if isinstance(ins, Ret) and n != f.n_ret:
            defects.append(f"stray ret at node {n}")
        if isinstance(ins, Call) and program is not None:
            if ins.func not in program.functions:
                defects.append(f"node {n} calls unknown function {ins.func}")
            elif len(program[ins.func].params) != len(ins.args):
                defects.append(f"node {n} calls {ins.func} with wrong arity")
    if f.entry not in g:
        defects.append(f"missing entry node {f.entry}")
    ret = g.get(f.n_ret)
    if not (isinstance(ret, Ret) and ret.r == f.ret_reg):
        defects.append(f"exit protocol: node {f.n_ret} is not 'ret r{f.ret_reg}'")
    dflt = g.get(f.n_def)
    if not (isinstance(dflt, Movi) and dflt.rd == f.ret_reg and dflt.succ == f.n_ret):
        defects.append(f"exit protocol: node {f.n_def} is not the default-return movi")
    if len(set(f.params)) != len(f.params):
        defects.append("duplicate parameter registers")
    return defects


def wf_program(prog: RtlProgram) -> dict:
    """Defects per function name, only for functions that have some."""
    out = {}
    if "main" not in prog.functions:
        out["<program>"] = ["no main function"]
    for name, f in prog.functions.items():
        d = wf_check(f, prog)
        if d:
            out[name] = d
    return out
