import pytest

from support import SCENARIOS, golden, parse

from tagc.core import Atom, FailStop, Terminate, Timeout, Trace
from tagc.hll import interp as hll
from tagc.lowering import lower
from tagc.policies import Level, Taint, get_policy
from tagc.rtl import interp as rtl
from tagc.rtlgen import compile_program

IFC, TAINT = get_policy("ifc"), get_policy("taint")
P, S = Level.P, Level.S


def both(src, policy, fuel=10000):
    prog = parse(src, policy)
    b1, t1 = hll.run(prog, policy, fuel)
    lp = lower(policy)
    b2, t2 = rtl.run(compile_program(prog, policy), lp, 64 * fuel + 1024)
    return b1, b2, t1, t2


@pytest.mark.parametrize("name", SCENARIOS)
def test_golden_source_runs(name):
    prog, expected, trace = golden(name, IFC)
    b, t = hll.run(prog, IFC, 1000)
    assert str(b) == expected
    assert t.lines() == trace


def test_counted_loop():
    src = """fun main() tag P { var i, s;
      i = 0; s = 0;
      while (i < 4) { s = s + i; i = i + 1 };
      return(s) }"""
    b1, b2, t1, t2 = both(src, IFC)
    assert b1 == b2 == Terminate(Atom(6, P))
    assert t1.rules == t2.rules


def test_falling_off_the_end_returns_default():
    b1, b2, *_ = both("fun main() tag P { skip }", IFC)
    assert b1 == b2 == Terminate(Atom(0, P))


def test_call_and_return():
    src = """fun main() tag P { var r; r = add(2, 3@S); return(r) }
             fun add(a, b) tag P { return(a + b) }"""
    b1, b2, t1, t2 = both(src, IFC)
    assert b1 == b2 == Terminate(Atom(5, S))
    assert [e[0] for e in t1.rules].count("call") == 2
    assert t1.rules == t2.rules


def test_taint_propagates_through_assignment():
    src = "fun main() tag F { var x; x = 1@T; x = x + 1; return(x) }"
    b1, b2, *_ = both(src, TAINT)
    assert b1 == b2 == Terminate(Atom(2, Taint.T))


def test_timeout():
    b1, b2, *_ = both("fun main() tag P { while (0 == 0) skip }", IFC, fuel=200)
    assert isinstance(b1, Timeout) and isinstance(b2, Timeout)


def test_secret_loop_guard_fails_on_public_write():
    src = "fun main() tag P { var x; while (x < 1@S) { x = x + 1 }; return(x) }"
    b1, b2, t1, t2 = both(src, IFC)
    assert b1 == b2 and isinstance(b1, FailStop)
    assert t1.rules == t2.rules


def test_listener_sees_admin_entries_on_target_only():
    prog = parse("fun main() tag P { var x; if (x == 0) { x = 1 } else skip; return(x) }", IFC)
    seen = []
    tr = Trace(listener=lambda ch, e: seen.append(ch))
    rtl.run(compile_program(prog, IFC), lower(IFC), 1000, tr)
    assert "admin" in seen and "rule" in seen
    assert len(tr.rules) == seen.count("rule")
