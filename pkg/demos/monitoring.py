# coding: utf-8

# # Tag rules at source level and after compilation
#
# A policy attaches a tag to every value and to the program counter, and a
# rule fires at each control point. Here we run a few small programs under
# the secrecy policy, once in the source interpreter and once as compiled
# register code, and compare what the monitor saw.

# In[1]:

from tagc import compile_program, get_policy, lower
from tagc.hll import interp as hll
from tagc.hll.parser import parse_program
from tagc.rtl import interp as rtl
from tagc.rtl.text import dump_program

ifc = get_policy("ifc")
lowered = lower(ifc)


# A public variable written under a secret branch. The source run stops at
# the assignment:

# In[2]:

src = """
fun main() tag P {
  var x;
  if (1@S == 1@P) { x = 2@P } else { x = 3@P };
  return(x)
}
"""
prog = parse_program(src, ifc)
behavior, trace = hll.run(prog, ifc, 1000)
print(behavior)
for line in trace.lines():
    print("  ", line)


# The compiled code. Every instruction carries an I-tag naming the source
# construct it came from; the lowered policy dispatches on it.

# In[3]:

code = compile_program(prog, ifc)
print(dump_program(code))


# Same behavior, same rule firings. Save/join bookkeeping shows up only in
# the administrative channel.

# In[4]:

behavior2, trace2 = rtl.run(code, lowered, 10000)
print(behavior2, trace2.lines() == trace.lines())
print(len(trace2.admin), "administrative firings")


# Once the branch joins, the PC tag is public again, so a later public write
# is fine:

# In[5]:

src = """
fun main() tag P {
  var x;
  if (1@S == 1@P) { skip } else { skip };
  x = 2@P;
  return(x + 1@P)
}
"""
prog = parse_program(src, ifc)
print(hll.run(prog, ifc, 1000)[0], rtl.run(compile_program(prog, ifc), lowered, 10000)[0])
