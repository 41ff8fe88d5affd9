"""HLL abstract syntax and pretty-printer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from ..core import Atom


@dataclass(frozen=True)
class Lit:
    atom: Atom


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Lit, Var, BinOp]


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class If:
    left: Expr
    rel: str
    right: Expr
    then: "Stmt"
    orelse: "Stmt"


@dataclass(frozen=True)
class While:
    left: Expr
    rel: str
    right: Expr
    body: "Stmt"


@dataclass(frozen=True)
class Call:
    dest: str
    func: str
    args: tuple


@dataclass(frozen=True)
class Return:
    expr: Expr


Stmt = Union[Skip, Seq, Assign, If, While, Call, Return]

SKIP = Skip()


@dataclass(frozen=True)
class FunDef:
    name: str
    params: tuple
    locals: tuple
    body: Stmt
    fn_tag: Any


@dataclass(frozen=True)
class Program:
    functions: tuple  # of FunDef, in source order

    def __post_init__(self):
        object.__setattr__(self, "_by_name", {f.name: f for f in self.functions})

    def __getitem__(self, name: str) -> FunDef:
        return self._by_name[name]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    @property
    def main(self) -> FunDef:
        return self._by_name["main"]


def seq(*stmts: Stmt) -> Stmt:
    """Right-nested sequence of the given statements (Skip if none)."""
    if not stmts:
        return SKIP
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out)
    return out


def flatten(s: Stmt) -> list:
    if isinstance(s, Seq):
        return flatten(s.first) + flatten(s.second)
    return [s]


# ---------------------------------------------------------------------------
# printing


def print_expr(e: Expr) -> str:
    if isinstance(e, Lit):
        return str(e.atom)
    if isinstance(e, Var):
        return e.name
    right = print_expr(e.right)
    if isinstance(e.right, BinOp):
        right = f"({right})"
    return f"{print_expr(e.left)} {e.op} {right}"


def _block(s: Stmt, indent: int) -> str:
    pad = "  " * indent
    return (";\n").join(pad + line for line in _stmt_lines(s, indent))


def _stmt_lines(s: Stmt, indent: int) -> list:
    # one entry per sequenced statement; compound statements span lines
    out = []
    for part in flatten(s):
        out.append(_print_one(part, indent))
    return out


def _print_one(s: Stmt, indent: int) -> str:
    pad = "  " * indent
    if isinstance(s, Skip):
        return "skip"
    if isinstance(s, Assign):
        return f"{s.var} = {print_expr(s.expr)}"
    if isinstance(s, Call):
        return f"{s.dest} = {s.func}({', '.join(print_expr(a) for a in s.args)})"
    if isinstance(s, Return):
        return f"return({print_expr(s.expr)})"
    if isinstance(s, If):
        return (
            f"if ({print_expr(s.left)} {s.rel} {print_expr(s.right)}) {{\n"
            f"{_block(s.then, indent + 1)}\n{pad}}} else {{\n"
            f"{_block(s.orelse, indent + 1)}\n{pad}}}"
        )
    if isinstance(s, While):
        return (
            f"while ({print_expr(s.left)} {s.rel} {print_expr(s.right)}) {{\n"
            f"{_block(s.body, indent + 1)}\n{pad}}}"
        )
    raise TypeError(f"not a statement: {s!r}")


def print_fundef(f: FunDef) -> str:
    head = f"fun {f.name}({', '.join(f.params)}) tag {f.fn_tag} {{\n"
    decl = f"  var {', '.join(f.locals)};\n" if f.locals else ""
    return head + decl + _block(f.body, 1) + "\n}\n"


def print_program(prog: Program) -> str:
    return "\n".join(print_fundef(f) for f in prog.functions)
