"""Translation of HLL programs to tagged RTL.

CFGs are built backwards: each translation function receives the successor
node and returns the entry of the code it generated. Split/join constructs
save the PC tag in a dedicated register at the split and hand it to the join
rule; live save registers form a stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (IT_ASSIGN, IT_CALL, IT_CONST, IT_DC, IT_IFJOIN, IT_IFSPLIT,
                   IT_LOCALINIT, IT_OP, IT_RET, IT_SAVEPC, IT_VAR,
                   IT_WHILEJOIN, IT_WHILESPLIT, Atom)
from .hll import syntax as S
from .rtl.ir import (Call, Cond, Mov, Movi, Op, Ret, RtlFunction, RtlProgram,
                     defs)


@dataclass
class GenState:
    def_tag: object
    graph: dict = field(default_factory=dict)
    next_node: int = 0
    next_reg: int = 0
    var_map: dict = field(default_factory=dict)
    save_stack: list = field(default_factory=list)
    ret_reg: int = -1
    n_def: int = -1
    n_ret: int = -1
    max_save_depth: int = 0

    def fresh_reg(self) -> int:
        r = self.next_reg
        self.next_reg += 1
        return r

    def reserve(self) -> int:
        n = self.next_node
        self.next_node += 1
        return n

    def add(self, ins) -> int:
        n = self.reserve()
        self.graph[n] = ins
        return n

    def push_save(self) -> int:
        r = self.fresh_reg()
        self.save_stack.append(r)
        self.max_save_depth = max(self.max_save_depth, len(self.save_stack))
        return r

    def pop_save(self, r: int):
        assert self.save_stack.pop() == r


def _expr_into(g: GenState, e, rd: int, n_s: int) -> int:
    if isinstance(e, S.Lit):
        return g.add(Movi(e.atom, rd, n_s, IT_CONST))
    if isinstance(e, S.Var):
        return g.add(Mov(g.var_map[e.name], rd, n_s, IT_VAR))
    r1, r2 = g.fresh_reg(), g.fresh_reg()
    n2 = g.add(Op(e.op, r1, r2, rd, n_s, IT_OP[e.op]))
    n1 = _expr_into(g, e.right, r2, n2)
    return _expr_into(g, e.left, r1, n1)


def translate_expr(g: GenState, e, n_s: int):
    """Code evaluating ``e`` into a fresh register; returns (entry node, register)."""
    r = g.fresh_reg()
    return _expr_into(g, e, r, n_s), r


def _cond_prologue(g: GenState, s, n_cond_of) -> int:
    # both operands, left first, feeding the branch built by n_cond_of(r1, r2)
    r1, r2 = g.fresh_reg(), g.fresh_reg()
    n3 = n_cond_of(r1, r2)
    n2 = _expr_into(g, s.right, r2, n3)
    return _expr_into(g, s.left, r1, n2)


def translate_stmt(g: GenState, s, n_s: int) -> int:
    if isinstance(s, S.Skip):
        return n_s
    if isinstance(s, S.Seq):
        n1 = translate_stmt(g, s.second, n_s)
        return translate_stmt(g, s.first, n1)
    if isinstance(s, S.Assign):
        r = g.fresh_reg()
        n1 = g.add(Mov(r, g.var_map[s.var], n_s, IT_ASSIGN))
        return _expr_into(g, s.expr, r, n1)
    if isinstance(s, S.If):
        r_pc = g.push_save()
        join = g.add(Mov(r_pc, r_pc, n_s, IT_IFJOIN))
        n_t = translate_stmt(g, s.then, join)
        n_f = translate_stmt(g, s.orelse, join)
        n1 = _cond_prologue(
            g, s, lambda r1, r2: g.add(Cond(s.rel, r1, r2, n_t, n_f, IT_IFSPLIT)))
        entry = g.add(Mov(r_pc, r_pc, n1, IT_SAVEPC))
        g.pop_save(r_pc)
        return entry
    if isinstance(s, S.While):
        r_pc = g.push_save()
        n_save = g.reserve()
        exit_join = g.add(Mov(r_pc, r_pc, n_s, IT_WHILEJOIN))
        back_join = g.add(Mov(r_pc, r_pc, n_save, IT_WHILEJOIN))
        n_body = translate_stmt(g, s.body, back_join)
        n1 = _cond_prologue(
            g, s, lambda r1, r2: g.add(Cond(s.rel, r1, r2, n_body, exit_join, IT_WHILESPLIT)))
        g.graph[n_save] = Mov(r_pc, r_pc, n1, IT_SAVEPC)
        g.pop_save(r_pc)
        return n_save
    if isinstance(s, S.Call):
        regs = [g.fresh_reg() for _ in s.args]
        n = g.add(Call(s.func, tuple(regs), g.var_map[s.dest], n_s, IT_CALL))
        for e, r in reversed(list(zip(s.args, regs))):
            n = _expr_into(g, e, r, n)
        return n
    if isinstance(s, S.Return):
        r = g.fresh_reg()
        n1 = g.add(Mov(r, g.ret_reg, g.n_ret, IT_DC))
        return _expr_into(g, s.expr, r, n1)
    raise TypeError(f"not a statement: {s!r}")


def translate_function(f: S.FunDef, def_tag) -> RtlFunction:
    g = GenState(def_tag)
    for x in (*f.params, *f.locals):
        g.var_map[x] = g.fresh_reg()
    g.ret_reg = g.fresh_reg()
    a_d = Atom(0, def_tag)
    g.n_ret = g.add(Ret(g.ret_reg, IT_RET))
    g.n_def = g.add(Movi(a_d, g.ret_reg, g.n_ret, IT_DC))
    n = translate_stmt(g, f.body, g.n_def)
    for x in reversed(f.locals):
        n = g.add(Movi(a_d, g.var_map[x], n, IT_LOCALINIT))
    assert not g.save_stack
    return RtlFunction(f.name, g.graph, n, tuple(g.var_map[x] for x in f.params),
                       f.fn_tag, g.ret_reg, g.n_def, g.n_ret)


def compile_program(prog: S.Program, policy) -> RtlProgram:
    """Translate every function; ``policy`` only supplies the default tag."""
    return RtlProgram({f.name: translate_function(f, policy.def_tag) for f in prog.functions})


# ---------------------------------------------------------------------------
# structural scans over generated code


_EXPR_KINDS = frozenset({"const", "var", "op"})
_JOIN_KINDS = frozenset({"ifJoin", "whileJoin"})


def structural_defects(f: RtlFunction) -> list:
    """Check the invariants the translation promises about register use.

    * expression code only writes its own single-definition temporaries;
    * assignments and local initialisation only write variable registers;
    * every split/join construct owns a distinct save register, written only
      by its own save and join instructions (which keep ``rs == rd``);
    * returns write the return register and jump to the exit node.
    """
    out = []
    g = f.graph
    save_regs = {}
    var_regs = set(f.params)
    for n, ins in g.items():
        if isinstance(ins, Movi) and ins.itag.kind == "localInit":
            var_regs.add(ins.rd)
        if isinstance(ins, Mov) and ins.itag.kind == "savePC":
            if ins.rd in save_regs:
                out.append(f"save register r{ins.rd} shared by nodes {save_regs[ins.rd]} and {n}")
            save_regs[ins.rd] = n
    for n, ins in g.items():
        if isinstance(ins, Mov) and ins.itag.kind == "assign":
            var_regs.add(ins.rd)
    protected = var_regs | set(save_regs) | {f.ret_reg}
    temp_defs = {}
    for n, ins in sorted(g.items()):
        rd = defs(ins)
        kind = ins.itag.kind
        if kind in _EXPR_KINDS:
            if rd in protected:
                out.append(f"expression node {n} overwrites protected register r{rd}")
            temp_defs.setdefault(rd, []).append(n)
        elif kind in ("savePC", *_JOIN_KINDS):
            if ins.rs != ins.rd:
                out.append(f"{ins.itag} node {n} moves between different registers")
            if ins.rd not in save_regs:
                out.append(f"{ins.itag} node {n} uses r{ins.rd} which no save instruction owns")
        elif kind == "assign":
            if ins.rd in set(save_regs) | {f.ret_reg}:
                out.append(f"assignment node {n} overwrites protected register r{ins.rd}")
        elif isinstance(ins, Mov) and kind == "dc":
            if ins.rd != f.ret_reg or ins.succ != f.n_ret:
                out.append(f"return move at node {n} does not target the exit protocol")
        elif isinstance(ins, Call) and rd not in var_regs:
            out.append(f"call node {n} writes non-variable r{rd}")
    for r, nodes in temp_defs.items():
        if len(nodes) > 1:
            out.append(f"temporary r{r} defined at several nodes {nodes}")
    # each temporary feeds exactly one consumer
    readers = {}
    for n, ins in g.items():
        for r in _reads(ins):
            if r in temp_defs:
                readers.setdefault(r, []).append(n)
    for r, nodes in readers.items():
        if len(nodes) > 1:
            out.append(f"temporary r{r} read at several nodes {nodes}")
    return out


def _reads(ins):
    if isinstance(ins, (Op, Cond)):
        return (ins.r1, ins.r2)
    if isinstance(ins, Mov):
        return (ins.rs,)
    if isinstance(ins, Call):
        return ins.args
    if isinstance(ins, Ret):
        return (ins.r,)
    return ()
