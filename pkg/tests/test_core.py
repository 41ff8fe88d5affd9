import pytest
from hypothesis import given, strategies as st

from tagc.core import (IT_KINDS, OPS, FlagSet, ITag, TagErr, Terminate, Timeout, FailStop, Tri,
                       Atom, arith, behavior_eq, compare, first_divergence, format_entry,
                       it_p, make_flags, parse_itag)
from tagc.policies import Level


def test_arith_and_compare():
    assert arith("+", 2, 3) == 5
    assert arith("-", 2, 3) == (1 << 64) - 1  # words wrap
    assert compare("==", 1, 1) and not compare("<", 2, 1)
    with pytest.raises(ValueError):
        arith("*", 1, 1)


def test_make_flags_tristate():
    f = make_flags("dfs !pcp")
    assert f.dfs is Tri.HOLDS and f.pcp is Tri.NO and f.wpci is Tri.UNKNOWN
    assert f.holds("dfs") and not f.holds("pcp") and not f.holds("wpci")


def test_flag_implications_enforced():
    with pytest.raises(ValueError):
        FlagSet({"r": make_flags("spci")})
    with pytest.raises(ValueError):
        FlagSet({"r": make_flags("wpci !pcp")})
    FlagSet({"r": make_flags("pcp wpci spci")})


def test_undeclared_rule_is_unknown():
    fs = FlagSet({})
    assert not fs.holds("anything", "dfs")
    assert fs["anything"].dfs is Tri.UNKNOWN


def test_behavior_eq():
    a = Terminate(Atom(1, Level.P))
    assert behavior_eq(a, Terminate(Atom(1, Level.P)))
    assert not behavior_eq(a, Terminate(Atom(1, Level.S)))
    assert behavior_eq(Timeout(3), Timeout(9))
    assert not behavior_eq(Timeout(3), a)
    assert not behavior_eq(FailStop(TagErr("E")), a)


def test_first_divergence():
    assert first_divergence([1, 2], [1, 2]) is None
    assert first_divergence([1, 2], [1, 3]) == 1
    assert first_divergence([1], [1, 2]) == 1


def test_format_entry():
    e = ("binop", ("+", Level.P, Level.S, Level.P), Level.S)
    assert format_entry(e) == "binop + P S P -> OK(S)"
    assert format_entry(("assign", (Level.P,), TagErr("X"))) == "assign P -> ERR(X)"


def test_itag_validation():
    with pytest.raises(ValueError):
        ITag("bogus")
    with pytest.raises(ValueError):
        ITag("op")
    assert it_p("+", Level.P, Level.S).flag_key == "ITp+"


_itags = st.one_of(
    st.sampled_from([k for k in IT_KINDS if k not in ("op", "p")]).map(ITag),
    st.sampled_from(OPS).map(lambda o: ITag("op", o)),
    st.builds(it_p, st.sampled_from(OPS), st.sampled_from(list(Level)), st.sampled_from(list(Level))),
)


@given(_itags)
def test_itag_text_round_trip(it):
    parse = {str(t): t for t in Level}.__getitem__
    assert parse_itag(str(it), parse) == it
