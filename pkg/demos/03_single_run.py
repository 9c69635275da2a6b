"""
One scenario end to end
=======================

24 entities, half of them attackers: six drop half of what they relay, three
praise their accomplices, three slander honest nodes.
"""
from v2xtrust import ScenarioConfig, Simulation

sim = Simulation(ScenarioConfig(seed=1))
report = sim.run()

print(f"global FNR {report.fnr:.3f}  FPR {report.fpr:.3f}")
print(f"local  FNR {report.local_fnr:.3f}  FPR {report.local_fpr:.3f}")
print(f"PDR        {report.pdr:.3f}")

###############################################################################
# Who ended up on the global blacklist, and what they really were.

for node in sorted(report.global_blacklist):
    print(f"node {node:2d}  {report.roles[node]}")

###############################################################################
# The blacklist grows over time as RSU windows close.

for row in report.timeseries[9::10]:
    print(f"step {row['step']:3d}  blacklisted={row['global_blacklist_size']:2d}  pdr={row['pdr']:.3f}")
