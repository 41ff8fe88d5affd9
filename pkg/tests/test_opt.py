from hypothesis import given, strategies as st

from support import StrictTaintPolicy, parse

from tagc.core import Timeout, behavior_eq
from tagc.harness.gen import GenConfig, gen_program
from tagc.lowering import lower
from tagc.opt.constprop import (TOP, AbsAtom, AbsState, ConstpropReport, analyze, constprop,
                                join_atoms, join_states)
from tagc.opt.cse import CseReport, cse, ebb_partition
from tagc.opt.deadcode import DeadcodeReport, deadcode, liveness
from tagc.opt.pipeline import PASSES, apply_passes, parse_passes
from tagc.policies import Level, get_policy
from tagc.rtl import interp as rtl
from tagc.rtl.ir import Call, Cond, Mov, Nop, Op, Ret, reachable, wf_program
from tagc.rtlgen import compile_program

import pytest

IFC, TAINT, UNIT = get_policy("ifc"), get_policy("taint"), get_policy("unit")


def compiled(src, policy):
    return compile_program(parse(src, policy), policy)


# ---------------------------------------------------------------------------
# pass list parsing


def test_parse_passes():
    assert parse_passes("all") == list(PASSES)
    assert parse_passes(" cse , deadcode ") == ["cse", "deadcode"]
    assert parse_passes("") == []
    with pytest.raises(ValueError):
        parse_passes("cse,inline")


# ---------------------------------------------------------------------------
# deadcode


def test_liveness_straight_line():
    f = compiled("fun main() tag P { var x; x = 1; return(x) }", IFC).main
    live = liveness(f)
    assert f.ret_reg in live[f.n_ret]
    assert live[f.entry] == frozenset()


def test_deadcode_never_touches_control_or_joins():
    src = """fun main() tag {t} {{ var x, y;
        if (x == 0) {{ y = 1 }} else skip;
        while (x < 2) {{ x = x + 1 }};
        y = f(x);
        return(0) }}
        fun f(a) tag {t} {{ return(a) }}"""
    for pol in (IFC, UNIT):
        code = compiled(src.format(t=pol.def_tag), pol)
        out = apply_passes(code, lower(pol), ["deadcode-noguard"])
        for name, f in code.functions.items():
            for n, ins in f.graph.items():
                if isinstance(ins, (Cond, Call, Ret)) or ins.itag.kind in ("savePC", "ifJoin", "whileJoin"):
                    assert out[name].graph[n] == ins


def test_deadcode_report_counts():
    code = compiled("fun main() tag P { var x; x = 1; x = 2; return(3) }", IFC)
    rep = DeadcodeReport()
    deadcode(code.main, lower(IFC).flags, report=rep)
    # only the second store is dead (an assign reads its target's old tag),
    # and it may fail-stop
    assert rep.removed == 0 and rep.kept_by_flags == 1
    rep = DeadcodeReport()
    deadcode(compiled("fun main() tag U { var x; x = 1; x = 2; return(3) }", UNIT).main,
             lower(UNIT).flags, report=rep)
    assert rep.removed == 1


def test_compact_removes_nops_and_keeps_behavior():
    code = compiled("fun main() tag U { var x; x = 1; x = 2; return(3) }", UNIT)
    lp = lower(UNIT)
    dc = apply_passes(code, lp, ["deadcode"])
    small = apply_passes(code, lp, ["deadcode"], do_compact=True)
    assert not any(isinstance(i, Nop) for i in small.main.graph.values())
    assert len(small.main.graph) < len(dc.main.graph)
    assert wf_program(small) == {}
    assert rtl.run(small, lp, 100)[0] == rtl.run(code, lp, 100)[0]


# ---------------------------------------------------------------------------
# cse


def test_ebb_partition_covers_reachable_nodes_once():
    f = compiled("""fun main() tag P { var x;
        if (x == 0) { x = 1 } else { x = 2 }; while (x < 3) { x = x + 1 }; return(x) }""", IFC).main
    blocks = ebb_partition(f)
    flat = [n for b in blocks for n in b]
    assert sorted(flat) == sorted(reachable(f))
    assert blocks[0][0] == f.entry


def test_cse_uses_copy_itag():
    code = compiled("fun main() tag F { var a, b; a = 1 + 2; b = 1 + 2; return(a + b) }", TAINT)
    rep = CseReport()
    out = cse(code.main, lower(TAINT).flags, report=rep)
    copies = [i for i in out.graph.values() if isinstance(i, Mov) and i.itag.kind == "copy"]
    assert rep.replaced == 1 and len(copies) == 1


def test_cse_respects_call_clearing_under_ifc():
    src = """fun main() tag P { var a, b, c; a = b + c; c = g(); a = b + c; return(a) }
             fun g() tag P { return(1) }"""
    rep = CseReport()
    cse(compiled(src, IFC).main, lower(IFC).flags, report=rep)
    assert rep.replaced == 0


# ---------------------------------------------------------------------------
# constprop


_abs = st.builds(AbsAtom, st.sampled_from([TOP, 0, 1, 2]), st.sampled_from([TOP, Level.P, Level.S]))


@given(_abs, _abs, _abs)
def test_atom_join_is_a_semilattice(a, b, c):
    assert join_atoms(a, a) == a
    assert join_atoms(a, b) == join_atoms(b, a)
    assert join_atoms(join_atoms(a, b), c) == join_atoms(a, join_atoms(b, c))
    assert join_atoms(a, AbsAtom()) == AbsAtom()


def test_state_join_missing_is_top():
    s1 = AbsState(Level.P, {1: AbsAtom(1, Level.P)})
    s2 = AbsState(Level.P, {})
    j = join_states(s1, s2)
    assert j.pc is Level.P and j.regs.get(1, AbsAtom()) == AbsAtom()


def test_analysis_through_loop_loses_counter():
    code = compiled("fun main() tag P { var i; i = 0; while (i < 3) { i = i + 1 }; return(i + 0) }", IFC)
    f = code.main
    states = analyze(f, lower(IFC))
    op_nodes = [n for n in reachable(f) if isinstance(f.graph[n], Op)]
    last = op_nodes[-1]
    ins = f.graph[last]
    assert states[last].regs.get(ins.r1, AbsAtom()).val is TOP


def test_constprop_ifc_keeps_rule_firing():
    code = compiled("fun main() tag P { return(3 + 4) }", IFC)
    lp = lower(IFC)
    rep = ConstpropReport()
    out = code.map(lambda f: constprop(f, lp.flags, lp, report=rep))
    assert rep.folded_param == 1 and rep.folded_static == 0
    _, t0 = rtl.run(code, lp, 100)
    _, t1 = rtl.run(out, lp, 100)
    assert [e[0] for e in t0.rules] == [e[0] for e in t1.rules]


def test_constprop_declines_and_mutant_folds():
    pol = StrictTaintPolicy()
    lp = lower(pol)
    code = compiled("fun main() tag F { return(1@T + 1@T) }", pol)
    kept = code.map(lambda f: constprop(f, lp.flags, lp))
    forced = code.map(lambda f: constprop(f, lp.flags, lp, failstop_guard=False))
    b0 = rtl.run(code, lp, 100)[0]
    assert rtl.run(kept, lp, 100)[0] == b0
    assert rtl.run(forced, lp, 100)[0] != b0


# ---------------------------------------------------------------------------
# all passes preserve behavior on generated programs


@given(st.integers(0, 10**6), st.sampled_from(["ifc", "taint", "unit"]),
       st.lists(st.sampled_from(PASSES), min_size=1, max_size=4), st.booleans())
def test_passes_preserve_behavior(seed, name, passes, do_compact):
    pol = get_policy(name)
    lp = lower(pol)
    code = compile_program(gen_program(GenConfig(seed=seed), pol), pol)
    out = apply_passes(code, lp, passes, do_compact=do_compact)
    assert wf_program(out) == {}
    b0 = rtl.run(code, lp, 50000)[0]
    if not isinstance(b0, Timeout):
        assert behavior_eq(b0, rtl.run(out, lp, 50000)[0])
