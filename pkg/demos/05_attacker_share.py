"""
More attackers, more drops
==========================

The share of attackers is varied while keeping the 2:1:1 mix of forwarders,
good-mouthers and bad-mouthers. The global view pools alarms from several
RSUs and misses fewer attackers than any single observer does alone.
"""
from v2xtrust import ScenarioConfig, sweep

table = sweep("malicious_fraction", [0.125, 0.5, 0.875], ScenarioConfig(), repetitions=5)

print("share   pdr     global fnr   local fnr")
for row in table.rows:
    print(
        f"{row['value']:.3f}   {row['pdr']['mean']:.3f}   "
        f"{row['fnr']['mean']:.3f}        {row['local_fnr']['mean']:.3f}"
    )
