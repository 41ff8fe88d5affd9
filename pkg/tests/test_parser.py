import pytest
from hypothesis import given, strategies as st

from tagc.core import Atom
from tagc.harness.gen import GenConfig, gen_program
from tagc.hll import syntax as S
from tagc.hll.parser import ParseError, WellFormednessError, parse_expr, parse_program
from tagc.policies import Level, get_policy

IFC = get_policy("ifc")


def test_precedence_is_left_associative():
    e = parse_expr("1@P - 2@P + x", IFC)
    assert e == S.BinOp("+", S.BinOp("-", S.Lit(Atom(1, Level.P)), S.Lit(Atom(2, Level.P))), S.Var("x"))


def test_untagged_literal_gets_default_tag():
    assert parse_expr("7", IFC) == S.Lit(Atom(7, Level.P))


def test_unbraced_body():
    prog = parse_program("fun main() tag P { while (0@P == 0@P) skip }", IFC)
    assert isinstance(prog.main.body, S.While)


def test_parse_error_position():
    with pytest.raises(ParseError) as ei:
        parse_program("fun main() tag P {\n  var x;\n  x = = 1\n}", IFC)
    assert (ei.value.line, ei.value.col) == (3, 7)


@pytest.mark.parametrize("src,msg", [
    ("fun main() tag P { x = 1 }", "undeclared"),
    ("fun main() tag P { var x, x; skip }", "duplicate declaration"),
    ("fun f() tag P { skip }", "no main"),
    ("fun main(a) tag P { skip }", "no parameters"),
    ("fun main() tag P { var x; x = g(1) }", "unknown function"),
    ("fun main() tag P { var x; x = g(1) } fun g() tag P { skip }", "expects 0"),
])
def test_well_formedness(src, msg):
    with pytest.raises(WellFormednessError, match=msg):
        parse_program(src, IFC)


def test_unknown_tag():
    with pytest.raises(ParseError):
        parse_program("fun main() tag P { return(1@Q) }", IFC)


@given(st.integers(0, 10**6), st.sampled_from(["ifc", "taint", "unit"]))
def test_print_parse_round_trip(seed, name):
    pol = get_policy(name)
    prog = gen_program(GenConfig(seed=seed), pol)
    text = S.print_program(prog)
    again = parse_program(text, pol)
    # sequences may re-associate, which printing hides
    assert S.print_program(again) == text
    assert parse_program(S.print_program(again), pol) == again
