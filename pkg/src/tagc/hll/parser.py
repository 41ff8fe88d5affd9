"""Concrete syntax for HLL and the well-formedness check.

    program := fundef+
    fundef  := "fun" ident "(" [ident {"," ident}] ")" "tag" TAG "{" [decl] stmt "}"
    decl    := "var" ident {"," ident} ";"
    stmt    := simple {";" simple}
    simple  := "skip" | ident "=" expr | ident "=" ident "(" [args] ")"
             | "if" "(" expr REL expr ")" block "else" block
             | "while" "(" expr REL expr ")" block | "return" "(" expr ")"
    block   := "{" stmt "}" | simple
    expr    := term {("+" | "-") term}
    term    := INT ["@" TAG] | ident | "(" expr ")"

``//`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from typing import NamedTuple

from ..core import MASK, RELS, Atom
from .syntax import (SKIP, Assign, BinOp, Call, FunDef, If, Lit, Program,
                     Return, Seq, Skip, Var, While, flatten)

KEYWORDS = {"fun", "tag", "var", "skip", "if", "else", "while", "return"}


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


class WellFormednessError(Exception):
    pass


class Token(NamedTuple):
    kind: str  # "int", "ident", "tag", "op", "eof"
    text: str
    line: int
    col: int


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>//[^\n]*)"
    r"|(?P<int>[0-9]+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>==|!=|<=|>=|[<>(){},;=+\-@])"
)
_TAGTEXT = re.compile(r"[A-Za-z0-9_]+")


def tokenize(text: str) -> list:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        col = pos - line_start + 1
        if toks and toks[-1].kind == "op" and toks[-1].text == "@":
            # a tag literal extends to the next token boundary
            m = _TAGTEXT.match(text, pos)
            if not m:
                raise ParseError("expected tag after '@'", line, col)
            toks.append(Token("tag", m.group(), line, col))
            pos = m.end()
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(Token(kind, m.group(), line, col))
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, policy):
        self.toks = tokenize(text)
        self.i = 0
        self.policy = policy

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("op", "ident")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    def tag(self):
        t = self.tok
        if t.kind not in ("tag", "ident"):
            self.error("expected tag")
        self.i += 1
        try:
            return self.policy.parse_tag(t.text)
        except ValueError as exc:
            self.error(str(exc), t)

    def ident_list(self, closer: str) -> tuple:
        names = []
        if not self.at(closer):
            names.append(self.ident())
            while self.at(","):
                self.i += 1
                names.append(self.ident())
        return tuple(names)

    # -- program structure

    def program(self) -> Program:
        funs = []
        while self.tok.kind != "eof":
            funs.append(self.fundef())
        if not funs:
            self.error("empty program")
        return Program(tuple(funs))

    def fundef(self) -> FunDef:
        self.expect("fun")
        name = self.ident()
        self.expect("(")
        params = self.ident_list(")")
        self.expect(")")
        self.expect("tag")
        fn_tag = self.tag()
        self.expect("{")
        locals_ = ()
        if self.at("var"):
            self.i += 1
            locals_ = self.ident_list(";")
            if not locals_:
                self.error("empty variable declaration")
            self.expect(";")
        body = self.stmt()
        self.expect("}")
        return FunDef(name, params, locals_, body, fn_tag)

    def stmt(self):
        parts = [self.simple()]
        while self.at(";"):
            self.i += 1
            if self.at("}"):  # tolerate a trailing separator
                break
            parts.append(self.simple())
        out = parts[-1]
        for s in reversed(parts[:-1]):
            out = Seq(s, out)
        return out

    def cond(self):
        self.expect("(")
        left = self.expr()
        t = self.tok
        if t.kind != "op" or t.text not in RELS:
            self.error("expected relational operator")
        self.i += 1
        right = self.expr()
        self.expect(")")
        return left, t.text, right

    def block(self):
        # a lone simple statement may stand without braces
        if not self.at("{"):
            return self.simple()
        self.i += 1
        s = self.stmt()
        self.expect("}")
        return s

    def simple(self):
        t = self.tok
        if self.at("skip"):
            self.i += 1
            return SKIP
        if self.at("if"):
            self.i += 1
            left, rel, right = self.cond()
            then = self.block()
            self.expect("else")
            return If(left, rel, right, then, self.block())
        if self.at("while"):
            self.i += 1
            left, rel, right = self.cond()
            return While(left, rel, right, self.block())
        if self.at("return"):
            self.i += 1
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Return(e)
        if t.kind == "ident" and t.text not in KEYWORDS:
            name = self.ident()
            self.expect("=")
            nxt = self.toks[self.i + 1]
            if self.tok.kind == "ident" and nxt.kind == "op" and nxt.text == "(":
                func = self.ident()
                self.expect("(")
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.at(","):
                        self.i += 1
                        args.append(self.expr())
                self.expect(")")
                return Call(name, func, tuple(args))
            return Assign(name, self.expr())
        self.error(f"expected statement, found {t.text or 'end of input'!r}")

    def expr(self):
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            value = int(t.text)
            if value > MASK:
                self.error("integer literal does not fit in 64 bits", t)
            tag = self.policy.def_tag
            if self.at("@"):
                self.i += 1
                tag = self.tag()
            return Lit(Atom(value, tag))
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        return Var(self.ident())


def parse_program(text: str, policy, check: bool = True) -> Program:
    prog = _Parser(text, policy).program()
    if check:
        check_program(prog)
    return prog


def parse_expr(text: str, policy):
    p = _Parser(text, policy)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error("trailing input after expression")
    return e


# ---------------------------------------------------------------------------
# well-formedness


def _expr_vars(e, out: set):
    if isinstance(e, Var):
        out.add(e.name)
    elif isinstance(e, BinOp):
        _expr_vars(e.left, out)
        _expr_vars(e.right, out)
    return out


def _check_stmt(s, f: FunDef, scope: set, prog: Program):
    def need(names, what):
        for n in sorted(names - scope):
            raise WellFormednessError(f"in {f.name}: undeclared variable {n!r} in {what}")

    if isinstance(s, Skip):
        return
    if isinstance(s, Seq):
        for part in flatten(s):
            _check_stmt(part, f, scope, prog)
    elif isinstance(s, Assign):
        need({s.var} | _expr_vars(s.expr, set()), "assignment")
    elif isinstance(s, (If, While)):
        need(_expr_vars(s.left, set()) | _expr_vars(s.right, set()), "condition")
        for sub in ((s.then, s.orelse) if isinstance(s, If) else (s.body,)):
            _check_stmt(sub, f, scope, prog)
    elif isinstance(s, Call):
        used = {s.dest}
        for a in s.args:
            _expr_vars(a, used)
        need(used, "call")
        if s.func not in prog:
            raise WellFormednessError(f"in {f.name}: unknown function {s.func!r}")
        callee = prog[s.func]
        if len(callee.params) != len(s.args):
            raise WellFormednessError(
                f"in {f.name}: {s.func} expects {len(callee.params)} arguments, got {len(s.args)}")
    elif isinstance(s, Return):
        need(_expr_vars(s.expr, set()), "return")
    else:
        raise WellFormednessError(f"not a statement: {s!r}")


def check_program(prog: Program) -> None:
    names = [f.name for f in prog.functions]
    dups = {n for n in names if names.count(n) > 1}
    if dups:
        raise WellFormednessError(f"duplicate function {sorted(dups)[0]!r}")
    if "main" not in prog:
        raise WellFormednessError("program has no main function")
    if prog.main.params:
        raise WellFormednessError("main must take no parameters")
    for f in prog.functions:
        decls = list(f.params) + list(f.locals)
        if len(set(decls)) != len(decls):
            dup = next(d for d in decls if decls.count(d) > 1)
            raise WellFormednessError(f"in {f.name}: duplicate declaration of {dup!r}")
        _check_stmt(f.body, f, set(decls), prog)
