from hypothesis import given, strategies as st

from tagc.core import IT_DC, IT_RET, Atom
from tagc.harness.gen import GenConfig, gen_program
from tagc.policies import get_policy
from tagc.rtl.ir import Movi, Nop, Ret, RtlFunction, RtlProgram, reachable, wf_check, wf_program
from tagc.rtl.text import DumpError, dot_program, dump_program, parse_dump
from tagc.rtlgen import compile_program

import pytest

IFC = get_policy("ifc")


def tiny(def_tag, **over):
    graph = {0: Nop(1, IT_DC), 1: Movi(Atom(0, def_tag), 5, 2, IT_DC), 2: Ret(5, IT_RET)}
    kw = dict(name="main", graph=graph, entry=0, params=(), fn_tag=def_tag,
              ret_reg=5, n_def=1, n_ret=2)
    kw.update(over)
    return RtlFunction(**kw)


def test_wf_ok_and_defects():
    d = IFC.def_tag
    assert wf_check(tiny(d)) == []
    bad = tiny(d, graph={0: Nop(7, IT_DC), 1: Movi(Atom(0, d), 5, 2, IT_DC), 2: Ret(5, IT_RET)})
    assert any("dangling" in x for x in wf_check(bad))
    bad = tiny(d, n_ret=0)
    assert any("exit protocol" in x for x in wf_check(bad))
    assert wf_program(RtlProgram({})) == {"<program>": ["no main function"]}


@given(st.integers(0, 10**6), st.sampled_from(["ifc", "taint", "unit"]))
def test_dump_round_trip(seed, name):
    pol = get_policy(name)
    code = compile_program(gen_program(GenConfig(seed=seed), pol), pol)
    assert parse_dump(dump_program(code), pol) == code


def test_dump_errors():
    with pytest.raises(DumpError):
        parse_dump("function main\n  0: frobnicate r1\n", IFC)


def test_dot_has_one_graph_per_function():
    pol = IFC
    code = compile_program(gen_program(GenConfig(seed=3, max_functions=3), pol), pol)
    text = dot_program(code)
    assert text.count("digraph") == len(code.functions)
    for f in code.functions.values():
        assert f"digraph {f.name} " in text
        assert text.count("->") >= 1


def test_reachable_is_preorder_from_entry():
    f = tiny(IFC.def_tag)
    assert reachable(f) == [0, 1, 2]
