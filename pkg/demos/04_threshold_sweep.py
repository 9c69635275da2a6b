"""
Sweeping the malicious threshold
================================

Raising th_min makes observers quicker to call a neighbour malicious. False
positives climb slowly and then sharply once honest nodes with a few unlucky
relays fall below it.
"""
from v2xtrust import ScenarioConfig, sweep

table = sweep("th_min", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6], ScenarioConfig(), repetitions=5)

print("th_min   fpr     fnr     pdr")
for row in table.rows:
    print(f"{row['value']:.1f}     {row['fpr']['mean']:.3f}   {row['fnr']['mean']:.3f}   {row['pdr']['mean']:.3f}")
