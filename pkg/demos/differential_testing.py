# coding: utf-8

# # Differential testing
#
# Random programs are run at source level and compiled, with and without
# optimizations. A campaign counts agreements, mismatches, and runs that did
# not finish within the fuel budget.

# In[1]:

import json

from tagc.harness.diff import CampaignSpec, campaign
from tagc.harness.gen import GenConfig, gen_program
from tagc.hll.syntax import print_program
from tagc.policies import get_policy

print(print_program(gen_program(GenConfig(seed=7), get_policy("ifc"))))


# In[2]:

spec = CampaignSpec("ifc", range(300), pipelines=((), ("deadcode", "cse", "constprop")))
report = campaign(spec)
for name, p in report["pipelines"].items():
    print(name, p["counts"])


# ## Breaking a guard on purpose
#
# Without the flag check, dead-code elimination drops assignments that would
# have fail-stopped. The campaign notices and shrinks a witness.

# In[3]:

spec = CampaignSpec("ifc", range(300), pipelines=(("deadcode-noguard",),), max_reports=1)
report = campaign(spec)
p = report["pipelines"]["deadcode-noguard"]
print(p["counts"])
ex = p["counterexamples"][0]
print(ex["shrunk"])
print(json.dumps(ex["shrunk_verdict"], indent=2))
