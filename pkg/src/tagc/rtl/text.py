"""Textual dump, its parser, and a Graphviz emitter for RTL programs."""

from __future__ import annotations

import re

from ..core import Atom, parse_itag
from .ir import (Call, Cond, Mov, Movi, Nop, Op, Ret, RtlFunction, RtlProgram,
                 successors)


def format_instr(ins) -> str:
    """Instruction text without label, successors or I-tag."""
    if isinstance(ins, Nop):
        return "nop"
    if isinstance(ins, Op):
        return f"op {ins.op} r{ins.r1} r{ins.r2} r{ins.rd}"
    if isinstance(ins, Mov):
        return f"mov r{ins.rs} r{ins.rd}"
    if isinstance(ins, Movi):
        return f"movi {ins.atom} r{ins.rd}"
    if isinstance(ins, Cond):
        return f"cond {ins.rel} r{ins.r1} r{ins.r2}"
    if isinstance(ins, Call):
        return f"call {ins.func}({','.join(f'r{r}' for r in ins.args)}) r{ins.rd}"
    if isinstance(ins, Ret):
        return f"ret r{ins.r}"
    raise TypeError(ins)


def format_node(n: int, ins) -> str:
    succ = successors(ins)
    arrow = f" -> {', '.join(map(str, succ))}" if succ else ""
    return f"{n}: {format_instr(ins)}{arrow} @ {ins.itag}"


def dump_function(f: RtlFunction) -> str:
    params = ", ".join(f"r{r}" for r in f.params)
    lines = [f"function {f.name}({params}) tag {f.fn_tag} entry {f.entry} "
             f"ret r{f.ret_reg} def {f.n_def} exit {f.n_ret} {{"]
    for n in sorted(f.graph, reverse=True):
        lines.append("  " + format_node(n, f.graph[n]))
    lines.append("}")
    return "\n".join(lines) + "\n"


def dump_program(prog: RtlProgram) -> str:
    return "\n".join(dump_function(f) for f in prog.functions.values())


# ---------------------------------------------------------------------------
# parsing dumps back


class DumpError(Exception):
    pass


_HEADER = re.compile(
    r"function (\w+)\(([^)]*)\) tag (\S+) entry (\d+) ret r(\d+) def (\d+) exit (\d+) \{$")
_NODE = re.compile(r"(\d+): (.*?)(?: -> ([\d, ]+))? @ (\S+)$")


def _reg(text: str) -> int:
    if not text.startswith("r"):
        raise DumpError(f"expected register, got {text!r}")
    return int(text[1:])


def _atom(text: str, policy) -> Atom:
    value, _, tag = text.partition("@")
    return Atom(int(value), policy.parse_tag(tag))


def _parse_instr(body: str, succ: list, itag, policy):
    words = body.split()
    kind = words[0]
    if kind == "nop":
        return Nop(succ[0], itag)
    if kind == "op":
        return Op(words[1], _reg(words[2]), _reg(words[3]), _reg(words[4]), succ[0], itag)
    if kind == "mov":
        return Mov(_reg(words[1]), _reg(words[2]), succ[0], itag)
    if kind == "movi":
        return Movi(_atom(words[1], policy), _reg(words[2]), succ[0], itag)
    if kind == "cond":
        return Cond(words[1], _reg(words[2]), _reg(words[3]), succ[0], succ[1], itag)
    if kind == "call":
        m = re.match(r"(\w+)\(([^)]*)\)$", words[1])
        if not m:
            raise DumpError(f"bad call {body!r}")
        args = tuple(_reg(a) for a in m.group(2).split(",") if a)
        return Call(m.group(1), args, _reg(words[2]), succ[0], itag)
    if kind == "ret":
        return Ret(_reg(words[1]), itag)
    raise DumpError(f"unknown opcode {kind!r}")


def parse_dump(text: str, policy) -> RtlProgram:
    funcs = {}
    header, graph = None, None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            if header is None:
                m = _HEADER.match(line)
                if not m:
                    raise DumpError("expected function header")
                header, graph = m, {}
            elif line == "}":
                name, params, tag, entry, ret, n_def, n_ret = header.groups()
                regs = tuple(_reg(p.strip()) for p in params.split(",") if p.strip())
                funcs[name] = RtlFunction(name, graph, int(entry), regs, policy.parse_tag(tag),
                                          int(ret), int(n_def), int(n_ret))
                header = None
            else:
                m = _NODE.match(line)
                if not m:
                    raise DumpError("malformed node line")
                succ = [int(s) for s in (m.group(3) or "").replace(",", " ").split()]
                itag = parse_itag(m.group(4), policy.parse_tag)
                graph[int(m.group(1))] = _parse_instr(m.group(2), succ, itag, policy)
        except (DumpError, ValueError, IndexError) as exc:
            raise DumpError(f"line {lineno}: {exc}") from None
    if header is not None:
        raise DumpError("unterminated function")
    return RtlProgram(funcs)


# ---------------------------------------------------------------------------
# graphviz


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dot_function(f: RtlFunction) -> str:
    lines = [f"digraph {f.name} {{", '  node [shape=box, fontname="monospace"];']
    for n in sorted(f.graph, reverse=True):
        ins = f.graph[n]
        attrs = f"label={_quote(f'{n}: {format_instr(ins)}')}, xlabel={_quote(str(ins.itag))}"
        if n == f.entry:
            attrs += ", penwidth=2"
        lines.append(f"  n{n} [{attrs}];")
    for n in sorted(f.graph, reverse=True):
        ins = f.graph[n]
        for i, s in enumerate(successors(ins)):
            edge = ""
            if isinstance(ins, Cond):
                edge = ' [label="T"]' if i == 0 else ' [label="F"]'
            lines.append(f"  n{n} -> n{s}{edge};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_program(prog: RtlProgram) -> str:
    return "\n".join(dot_function(f) for f in prog.functions.values())
