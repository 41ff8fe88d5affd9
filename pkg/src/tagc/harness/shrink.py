"""Greedy reduction of failing programs.

Candidates are one-step simplifications: drop a statement from a sequence,
replace a compound statement by one of its parts or by ``skip``, replace an
operation by one of its operands, or remove a function nobody calls. The
first candidate that still fails is kept, until none does. Declarations are
never touched, so every candidate stays well formed.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Callable, Iterator

from ..hll import syntax as S


def _expr_variants(e) -> Iterator:
    if isinstance(e, S.BinOp):
        yield e.left
        yield e.right
        for l2 in _expr_variants(e.left):
            yield replace(e, left=l2)
        for r2 in _expr_variants(e.right):
            yield replace(e, right=r2)


def _stmt_variants(s) -> Iterator:
    if isinstance(s, S.Skip):
        return
    if isinstance(s, S.Seq):
        yield s.first
        yield s.second
        for a in _stmt_variants(s.first):
            yield S.Seq(a, s.second)
        for b in _stmt_variants(s.second):
            yield S.Seq(s.first, b)
        return
    yield S.SKIP
    if isinstance(s, S.If):
        yield s.then
        yield s.orelse
        for t in _stmt_variants(s.then):
            yield replace(s, then=t)
        for o in _stmt_variants(s.orelse):
            yield replace(s, orelse=o)
        for e in _expr_variants(s.left):
            yield replace(s, left=e)
        for e in _expr_variants(s.right):
            yield replace(s, right=e)
    elif isinstance(s, S.While):
        yield s.body
        for b in _stmt_variants(s.body):
            yield replace(s, body=b)
    elif isinstance(s, S.Assign):
        for e in _expr_variants(s.expr):
            yield replace(s, expr=e)
    elif isinstance(s, S.Return):
        for e in _expr_variants(s.expr):
            yield replace(s, expr=e)
    elif isinstance(s, S.Call):
        for i, a in enumerate(s.args):
            for e in _expr_variants(a):
                yield replace(s, args=s.args[:i] + (e,) + s.args[i + 1:])


def _called(s, out: set):
    if isinstance(s, S.Seq):
        _called(s.first, out)
        _called(s.second, out)
    elif isinstance(s, S.If):
        _called(s.then, out)
        _called(s.orelse, out)
    elif isinstance(s, S.While):
        _called(s.body, out)
    elif isinstance(s, S.Call):
        out.add(s.func)


def variants(prog: S.Program) -> Iterator[S.Program]:
    funs = list(prog.functions)
    used = set()
    for f in funs:
        _called(f.body, used)
    for i, f in enumerate(funs):
        if f.name != "main" and f.name not in used:
            yield S.Program(tuple(funs[:i] + funs[i + 1:]))
    for i, f in enumerate(funs):
        for body in _stmt_variants(f.body):
            yield S.Program(tuple(funs[:i] + [replace(f, body=body)] + funs[i + 1:]))


def size(prog: S.Program) -> int:
    return len(S.print_program(prog))


def shrink(prog: S.Program, fails: Callable[[S.Program], bool], budget: int = 2000) -> S.Program:
    """A locally minimal program for which ``fails`` still holds."""
    tries = 0
    improved = True
    while improved and tries < budget:
        improved = False
        for cand in variants(prog):
            tries += 1
            if tries > budget:
                break
            if size(cand) < size(prog) and fails(cand):
                prog = cand
                improved = True
                break
    return prog
