"""Random generation of well-formed HLL programs.

Programs are safe by construction: every variable is declared, calls only
go to functions defined later in the program (so the call graph is acyclic)
with the right number of arguments. They may still fail-stop or diverge.

The variable and literal pools are kept small on purpose so that repeated
subexpressions, dead stores and constant operands show up often enough to
exercise the optimizations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from ..core import OPS, RELS, Atom
from ..hll import syntax as S

VALUES = (0, 1, 2, 3, 5)


@dataclass
class GenConfig:
    seed: int = 0
    max_functions: int = 3
    max_stmt_depth: int = 3
    max_expr_depth: int = 2
    max_seq: int = 4
    counted_loop_bias: float = 0.9  # chance a loop is counted (always terminates)
    reuse_rate: float = 0.5  # chance a full expression repeats an earlier one
    max_loop_count: int = 3
    # tag text -> weight; None means "mostly the default tag"
    tag_weights: Optional[dict] = None
    secret_rate: float = 0.15  # weight of non-default tags when tag_weights is None


@dataclass
class _Fn:
    name: str
    params: tuple
    locals: list
    counters: list = field(default_factory=list)
    seen: list = field(default_factory=list)  # compound expressions generated so far


class _Gen:
    def __init__(self, cfg: GenConfig, policy):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.policy = policy
        tags = list(policy.vtags)
        if cfg.tag_weights is not None:
            self.tags = [policy.parse_tag(t) for t in cfg.tag_weights]
            self.weights = list(cfg.tag_weights.values())
        else:
            d = policy.def_tag
            others = [t for t in tags if t != d]
            self.tags = [d, *others]
            self.weights = [1 - cfg.secret_rate] + [cfg.secret_rate / max(1, len(others))] * len(others)
        self.ptags = list(policy.ptags)

    def tag(self):
        return self.rng.choices(self.tags, self.weights)[0]

    def lit(self):
        return S.Lit(Atom(self.rng.choice(VALUES), self.tag()))

    def expr(self, fn: _Fn, depth: int):
        rng = self.rng
        names = list(fn.params) + fn.locals
        if depth <= 0 or rng.random() < 0.4:
            if names and rng.random() < 0.6:
                return S.Var(rng.choice(names))
            return self.lit()
        return S.BinOp(rng.choice(OPS), self.expr(fn, depth - 1), self.expr(fn, depth - 1))

    def full_expr(self, fn: _Fn):
        if fn.seen and self.rng.random() < self.cfg.reuse_rate:
            return self.rng.choice(fn.seen)
        e = self.expr(fn, self.cfg.max_expr_depth)
        if isinstance(e, S.BinOp):
            fn.seen.append(e)
        return e

    def stmt(self, fn: _Fn, depth: int, callees: list):
        rng = self.rng
        cfg = self.cfg
        choices = ["assign"] * 6 + ["return"] * 2
        if fn.locals and callees:
            choices += ["call"] * 2
        if depth > 0:
            choices += ["if"] * 3 + ["while"] * 2 + ["seq"] * 2
        kind = rng.choice(choices)
        if kind == "assign" and fn.locals:
            return S.Assign(rng.choice(fn.locals), self.full_expr(fn))
        if kind == "assign":
            return S.SKIP if rng.random() < 0.5 else S.Return(self.full_expr(fn))
        if kind == "return":
            return S.Return(self.full_expr(fn))
        if kind == "call":
            callee = rng.choice(callees)
            args = tuple(self.expr(fn, 1) for _ in callee.params)
            return S.Call(rng.choice(fn.locals), callee.name, args)
        if kind == "seq":
            return self.block(fn, depth - 1, callees)
        e1, e2 = self.expr(fn, 1), self.expr(fn, 1)
        rel = rng.choice(RELS)
        if kind == "if":
            orelse = self.block(fn, depth - 1, callees) if rng.random() < 0.6 else S.SKIP
            return S.If(e1, rel, e2, self.block(fn, depth - 1, callees), orelse)
        if rng.random() < cfg.counted_loop_bias:
            return self.counted_loop(fn, depth, callees)
        return S.While(e1, rel, e2, self.block(fn, depth - 1, callees))

    def counted_loop(self, fn: _Fn, depth: int, callees: list):
        # a dedicated counter that the body never assigns
        i = f"i{len(fn.counters)}"
        fn.counters.append(i)
        d = self.policy.def_tag
        bound = S.Lit(Atom(self.rng.randint(1, self.cfg.max_loop_count), d))
        init = S.Assign(i, S.Lit(Atom(0, d)))
        step = S.Assign(i, S.BinOp("+", S.Var(i), S.Lit(Atom(1, d))))
        body = self.block(fn, depth - 1, callees)
        return S.seq(init, S.While(S.Var(i), "<", bound, S.seq(body, step)))

    def block(self, fn: _Fn, depth: int, callees: list):
        n = self.rng.randint(1, self.cfg.max_seq)
        return S.seq(*(self.stmt(fn, depth, callees) for _ in range(n)))

    def function(self, name: str, params: tuple, callees: list) -> S.FunDef:
        rng = self.rng
        n_locals = rng.randint(1, 3)
        fn = _Fn(name, params, [f"x{k}" for k in range(n_locals)])
        body = self.block(fn, self.cfg.max_stmt_depth, callees)
        if rng.random() < 0.8:
            body = S.seq(body, S.Return(self.full_expr(fn)))
        fn_tag = self.policy.def_tag if rng.random() < 0.8 else rng.choice(self.ptags)
        return S.FunDef(name, params, tuple(fn.locals + fn.counters), body, fn_tag)


def gen_program(cfg: GenConfig, policy) -> S.Program:
    g = _Gen(cfg, policy)
    rng = g.rng
    n_aux = rng.randint(0, cfg.max_functions - 1)
    # helpers are built last-first so each one can call the ones after it
    helpers = []
    for k in reversed(range(n_aux)):
        n_params = rng.randint(0, 2)
        params = tuple(f"p{j}" for j in range(n_params))
        helpers.insert(0, g.function(f"f{k}", params, list(helpers)))
    main = g.function("main", (), list(helpers))
    return S.Program((main, *helpers))
