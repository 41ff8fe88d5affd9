from support import mis_flag, parse

from tagc.core import Timeout
from tagc.harness.diff import CampaignSpec, campaign, diff_run, target_fuel, total_failures
from tagc.harness.gen import GenConfig, gen_program
from tagc.harness.shrink import shrink, size, variants
from tagc.harness.validate import validate_flags
from tagc.hll import syntax as S
from tagc.policies import get_policy

IFC = get_policy("ifc")


def test_generation_is_deterministic():
    a = gen_program(GenConfig(seed=42), IFC)
    b = gen_program(GenConfig(seed=42), IFC)
    assert a == b
    assert gen_program(GenConfig(seed=43), IFC) != a


def _constructs(s, out):
    out.add(type(s).__name__)
    for sub in ("first", "second", "then", "orelse", "body"):
        if hasattr(s, sub):
            _constructs(getattr(s, sub), out)
    return out


def test_generator_covers_every_statement_form():
    seen = set()
    for seed in range(200):
        for f in gen_program(GenConfig(seed=seed), IFC).functions:
            _constructs(f.body, seen)
    assert {"Skip", "Seq", "Assign", "If", "While", "Call", "Return"} <= seen


def test_tag_weights_override():
    prog = gen_program(GenConfig(seed=1, tag_weights={"S": 1.0}), IFC)
    text = S.print_program(prog)
    assert "@S" in text


def test_diff_run_kinds():
    v = diff_run(parse("fun main() tag P { return(1) }", IFC), IFC, 100)
    assert v.kind == "agree" and not v.failed
    v = diff_run(parse("fun main() tag P { while (0 == 0) skip }", IFC), IFC, 50)
    assert v.kind == "inconclusive" and isinstance(v.source, Timeout)
    assert target_fuel(10) == 64 * 10 + 1024


def test_mutant_is_caught_and_shrunk():
    # the store in the secret branch is dead but fail-stops
    src = """fun main() tag P { var x, y;
        y = 1; y = y + 3;
        if (y == 1@S) { x = 2 } else { y = 2 };
        return(0) }"""
    prog = parse(src, IFC)
    v = diff_run(prog, IFC, 1000, ["deadcode-noguard"])
    assert v.failed
    small = shrink(prog, lambda p: diff_run(p, IFC, 1000, ["deadcode-noguard"]).failed)
    assert size(small) < size(prog)
    assert diff_run(small, IFC, 1000, ["deadcode-noguard"]).failed


def test_shrink_variants_stay_well_formed():
    from tagc.hll.parser import check_program
    prog = gen_program(GenConfig(seed=5), IFC)
    for cand in variants(prog):
        check_program(cand)


def test_campaign_report_shape_and_jobs():
    spec = CampaignSpec("taint", range(30), fuel=2000, pipelines=((), ("cse",)))
    r1 = campaign(spec, jobs=1)
    r2 = campaign(spec, jobs=2)
    assert r1 == r2
    assert set(r1["pipelines"]) == {"none", "cse"}
    c = r1["pipelines"]["none"]["counts"]
    assert c["agree"] + c["mismatch"] + c["inconclusive"] == 30
    assert c["terminate"] + c["failstop"] == c["agree"]
    assert total_failures(r1) == 0


def test_campaign_reports_shrunk_counterexample():
    spec = CampaignSpec("ifc", range(60), fuel=2000, pipelines=(("deadcode-noguard",),), max_reports=1)
    rep = campaign(spec)
    p = rep["pipelines"]["deadcode-noguard"]
    assert p["counts"]["mismatch"] >= 1
    ex = p["counterexamples"][0]
    assert len(ex["shrunk"]) <= len(ex["program"])
    assert ex["shrunk_verdict"]["kind"] == "mismatch"


def test_validator_catches_each_misdeclaration():
    cases = [("assign", "dfs pcp", "dfs"), ("ifJoin", "dfs pcp", "pcp"),
             ("binop", "dfs pcp wpci", "wpci"), ("ret", "dfs pcp wpci spci", "pcp")]
    for rule, spec, prop in cases:
        rep = validate_flags(mis_flag(IFC, rule, spec))
        assert any(f.rule == rule and f.prop == prop for f in rep.findings), (rule, prop)


def test_validator_lowered_level():
    rep = validate_flags(IFC, lowered=True)
    assert rep.ok and any(k.startswith("movi ITp(") for k in rep.checked)


def test_failstop_rule_matters_for_a_failing_pc_insensitive_policy():
    from support import StrictTaintPolicy
    pol = StrictTaintPolicy()
    counts = {"constprop": 0, "constprop-nofailstop": 0}
    for seed in range(300):
        prog = gen_program(GenConfig(seed=seed, secret_rate=0.4), pol)
        for name in counts:
            counts[name] += diff_run(prog, pol, 2000, [name]).kind == "mismatch"
    assert counts["constprop"] == 0
    assert counts["constprop-nofailstop"] >= 1
