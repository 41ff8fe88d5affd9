"""Dead-code elimination gated on the lowered rule's flags.

An instruction whose destination is dead may still matter to the monitor:
its rule could fail-stop or change the PC tag. It is removed only when the
flags promise neither can happen.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import IT_DC
from ..rtl.ir import (Mov, Movi, Nop, Op, RtlFunction, defs, opcode,
                      reachable, successors, uses,
                      with_successors)

# pseudo-instructions carrying split/join PC tags are never candidates
_PROTECTED = frozenset({"savePC", "ifJoin", "whileJoin"})


def liveness(f: RtlFunction) -> dict:
    """Registers live before each node (least fixpoint, round-robin in postorder)."""
    g = f.graph
    pre = reachable(f)
    seen = set(pre)
    # postorder-ish: late nodes first, unreachable nodes still get a solution
    order = list(reversed(pre)) + [n for n in g if n not in seen]
    succ = {n: successors(g[n]) for n in order}
    use = {n: uses(g[n]) for n in order}
    kill = {n: defs(g[n]) for n in order}
    empty = frozenset()
    live_in = dict.fromkeys(g, empty)
    changed = True
    while changed:
        changed = False
        for n in order:
            out = empty
            for s in succ[n]:
                out = out | live_in.get(s, empty)
            d = kill[n]
            if d is not None and d in out:
                out = out - {d}
            new = use[n] | out
            if new != live_in[n]:
                live_in[n] = new
                changed = True
    return live_in


def live_out(f: RtlFunction, live_in: dict, n: int) -> frozenset:
    return frozenset().union(*(live_in.get(s, frozenset()) for s in successors(f.graph[n])))


@dataclass
class DeadcodeReport:
    removed: int = 0
    kept_by_flags: int = 0


def deadcode(f: RtlFunction, flags, guard: bool = True, report: DeadcodeReport = None):
    """Replace removable dead instructions by ``Nop@ITdc``.

    ``guard=False`` drops the DFS/PCP condition; it exists only to show the
    condition is needed and must not be used for real compilation.
    """
    live_in = liveness(f)
    graph = dict(f.graph)
    for n, ins in f.graph.items():
        if not isinstance(ins, (Op, Mov, Movi)) or ins.itag.kind in _PROTECTED:
            continue
        if ins.rd in live_out(f, live_in, n):
            continue
        fl = flags[(opcode(ins), ins.itag.flag_key)]
        if guard and not (fl.holds("dfs") and fl.holds("pcp")):
            if report is not None:
                report.kept_by_flags += 1
            continue
        graph[n] = Nop(ins.succ, IT_DC)
        if report is not None:
            report.removed += 1
    return f.with_graph(graph)


def compact(f: RtlFunction) -> RtlFunction:
    """Rethread successors past ``Nop@ITdc`` nodes and drop unreachable ones.

    Chains of nops that loop back on themselves are left in place.
    """
    g = f.graph

    def skip(n):
        seen = set()
        while isinstance(g.get(n), Nop) and g[n].itag == IT_DC and n not in seen:
            seen.add(n)
            n = g[n].succ
        return n

    graph = {n: with_successors(ins, tuple(skip(s) for s in successors(ins)))
             for n, ins in g.items()}
    out = f.with_graph(graph, skip(f.entry))
    keep = set(reachable(out)) | {f.n_def, f.n_ret}
    return out.with_graph({n: i for n, i in graph.items() if n in keep})
