# coding: utf-8

# # Optimizing tagged code
#
# Each pass is the usual one plus a side condition on the rule flags of the
# instructions it touches. The flags say whether a rule can fail-stop,
# whether it changes the PC tag and whether it looks at the PC tag.

# In[1]:

from tagc import compile_program, get_policy, lower
from tagc.hll.parser import parse_program
from tagc.opt.pipeline import apply_passes
from tagc.rtl import interp as rtl
from tagc.rtl.text import dump_program


def show(src, policy_name, passes):
    pol = get_policy(policy_name)
    lp = lower(pol)
    code = compile_program(parse_program(src, pol), pol)
    reports = {}
    out = apply_passes(code, lp, passes, reports=reports)
    print(f"--- {policy_name}, {passes}: {reports}")
    print(dump_program(out))
    print(rtl.run(code, lp, 1000)[0], "->", rtl.run(out, lp, 1000)[0])


# ## Dead stores
#
# Under secrecy an assignment may fail-stop, so a dead one stays. Under the
# unit policy nothing can fail, and it goes.

# In[2]:

dead = "fun main() tag {t} {{ var x; x = 1; x = 2; return(0) }}"
show(dead.format(t="P"), "ifc", ["deadcode"])
show(dead.format(t="U"), "unit", ["deadcode"])


# ## Repeated expressions
#
# The second `x + y` is replaced by a copy, the third is not because `x`
# changed in between.

# In[3]:

cse_src = """
fun main() tag F {
  var x, y, a, b, z, c, w, v;
  x = 1; y = 2; a = 3; b = 4;
  z = x + y;
  c = a + b;
  w = x + y;
  x = 5;
  v = x + y;
  return(v)
}
"""
show(cse_src, "taint", ["cse"])


# ## Constant folding
#
# The secrecy operator rule reads the PC tag, so the fold keeps it firing at
# run time through a parameterized I-tag. The taint operator rule ignores
# the PC, so the tag is computed now and the fold is silent.

# In[4]:

show("fun main() tag P { return(3@P + 4@S) }", "ifc", ["constprop"])
show("fun main() tag F { return(3@T + 4@F) }", "taint", ["constprop"])
