"""
Road grid and coverage
======================

Entities move along two-lane roads and wrap at the edges. Nine RSUs on a
3x3 grid cover only part of the map, which is why multi-hop relaying matters.
"""
import numpy as np

from v2xtrust import ScenarioConfig
from v2xtrust.simulation import build_world
from v2xtrust.world import reachable_rsus, step_mobility

config = ScenarioConfig(seed=3)
rng = np.random.default_rng(config.seed)
world = build_world(config, rng)

print("lanes:", len(world.layout.lanes), "intersections:", world.layout.intersections)

covered = []
for step in range(200):
    step_mobility(world, rng, dt=config.dt)
    pos = world.positions()
    covered.append(np.mean([bool(reachable_rsus(world, i, 150.0, pos)) for i in range(world.n)]))

# Roughly how much of the time an entity can talk to an RSU directly
print(f"mean direct RSU coverage: {np.mean(covered):.2f}")

for cls in sorted(set(c.value for c in world.classes)):
    idx = [i for i, c in enumerate(world.classes) if c.value == cls]
    print(f"{cls:10s} n={len(idx):2d} mean speed {world.speed[idx].mean():5.1f} m/s")
