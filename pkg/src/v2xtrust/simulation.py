"""The discrete-time simulation loop and its report."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .agents import (
    Agent,
    BehaviorKind,
    BehaviorProfile,
    NetworkView,
    TransactionPacket,
    emit_beacon,
    end_of_interval,
    gather_recommendations,
    route_transaction,
)
from .authority import CentralAuthority, broadcast_blacklist
from .config import ScenarioConfig
from .metrics import compute_fnr_fpr, compute_pdr, local_fnr_fpr
from .rsu import RoadSideUnit, Severity
from .trust import Verdict, local_decision
from .world import (
    EntityClass,
    Road,
    RoadLayout,
    World,
    distance_matrix,
    place_entities,
    step_mobility,
)

log = logging.getLogger(__name__)

TIMESERIES_FIELDS = ["step", "fnr_global", "fpr_global", "fnr_local", "fpr_local", "pdr", "global_blacklist_size"]


@dataclass
class MetricsReport:
    fnr: Optional[float]
    fpr: Optional[float]
    pdr: float
    local_fnr: Optional[float]
    local_fpr: Optional[float]
    timeseries: List[Dict[str, Any]]
    global_blacklist: List[int]
    roles: Dict[int, str]
    packets: Dict[str, int]
    beacons: int
    warnings: Dict[str, int]
    invariants: Dict[str, int] = field(default_factory=dict)
    trajectory: Optional[List[tuple]] = None
    seed: int = 0

    def summary(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "global": {"fnr": self.fnr, "fpr": self.fpr},
            "local": {"fnr": self.local_fnr, "fpr": self.local_fpr},
            "pdr": self.pdr,
            "global_blacklist": self.global_blacklist,
            "roles": {str(k): v for k, v in sorted(self.roles.items())},
            "packets": self.packets,
            "beacons": self.beacons,
            "warnings": self.warnings,
            "invariant_violations": self.invariants,
        }


def build_world(config: ScenarioConfig, rng: np.random.Generator) -> World:
    layout = RoadLayout(
        [Road(r["orientation"], float(r["coord"])) for r in config.roads],
        width=float(config.area[0]),
        height=float(config.area[1]),
        lane_offset=config.lane_offset,
    )
    ranges = {EntityClass(k): (float(v[0]), float(v[1])) for k, v in config.speed_ranges.items()}
    return place_entities(
        layout,
        config.class_list(),
        np.array(config.rsu_positions, dtype=float),
        rng,
        ranges,
        config.speed_resample_probability,
    )


def build_agents(config: ScenarioConfig, rng: np.random.Generator) -> List[Agent]:
    """Assign behaviour profiles to a random subset of ids."""
    counts = config.attacker_counts()
    order = [int(i) for i in rng.permutation(config.entity_count)]
    kinds = {i: BehaviorKind.NORMAL for i in range(config.entity_count)}
    pos = 0
    for name in ("selective_forwarding", "good_mouthing", "bad_mouthing"):
        for i in order[pos : pos + counts[name]]:
            kinds[i] = BehaviorKind(name)
        pos += counts[name]
    malicious = frozenset(i for i, k in kinds.items() if k.malicious)
    normal = frozenset(kinds) - malicious

    agents = []
    for i in range(config.entity_count):
        kind = kinds[i]
        if kind is BehaviorKind.SELECTIVE_FORWARDING:
            profile = BehaviorProfile(kind, config.drop_probability, lies_in_recommendations=config.selective_forwarders_lie)
        elif kind is BehaviorKind.GOOD_MOUTHING:
            profile = BehaviorProfile(kind, accomplices=malicious - {i})
        elif kind is BehaviorKind.BAD_MOUTHING:
            profile = BehaviorProfile(kind, victims=normal)
        else:
            profile = BehaviorProfile()
        agents.append(
            Agent(
                i,
                profile,
                config.initial_trust,
                firsthand_only=config.firsthand_recommendations,
                sticky_blacklist=config.sticky_local_blacklist,
            )
        )
    return agents


class Simulation:
    """One seeded scenario instance; call :meth:`run` once."""

    def __init__(self, config: ScenarioConfig, check_invariants: bool = True):
        self.config = config
        self.check_invariants = check_invariants
        streams = [np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(5)]
        self.rng_place, self.rng_roles, self.rng_move, self.rng_forward, self.rng_recs = streams
        self.world = build_world(config, self.rng_place)
        self.agents = build_agents(config, self.rng_roles)
        self.rsus = [RoadSideUnit(r, tuple(p)) for r, p in enumerate(config.rsu_positions)]
        self.authority = CentralAuthority(len(self.rsus), accumulate=config.accumulate_alarms)
        self.truth = {a.node_id: a.profile.kind.malicious for a in self.agents}
        self.packets: List[TransactionPacket] = []
        self.relay_log: list = []
        self.beacons = 0
        self.warning_counts: Counter = Counter()
        self.violations: Counter = Counter()
        self.timeseries: List[Dict[str, Any]] = []
        self.trajectory: Optional[list] = [] if config.record_trajectory else None
        self.step = 0
        self._broadcast_version = 0
        self._sequence = [0] * config.entity_count

    def connectivity(self) -> NetworkView:
        pos = self.world.positions()
        d = distance_matrix(pos)
        d_rsu = distance_matrix(pos, self.world.rsu_positions)
        n = self.world.n
        neigh = {i: {int(j) for j in np.flatnonzero(d[i] <= self.config.comm_range) if j != i} for i in range(n)}
        reach = {i: {int(r) for r in np.flatnonzero(d_rsu[i] <= self.config.effective_rsu_range)} for i in range(n)}
        nearest = {i: (min(reach[i], key=lambda r: (d_rsu[i, r], r)) if reach[i] else None) for i in range(n)}
        self._positions = pos
        return NetworkView(neigh, reach, nearest)

    def run(self) -> MetricsReport:
        for _ in range(self.config.iterations):
            self.advance()
        return self.report()

    def advance(self) -> None:
        cfg = self.config
        self.step += 1
        step_mobility(self.world, self.rng_move, cfg.dt)
        view = self.connectivity()
        if self.check_invariants:
            self._check_positions()
        if self.trajectory is not None:
            for i in range(self.world.n):
                x, y = self._positions[i]
                self.trajectory.append((self.step, i, float(x), float(y), float(self.world.speed[i])))

        self._deliver_blacklist(view)

        for agent in self.agents:
            _, delivered = emit_beacon(agent, self.world, [self.agents[j] for j in sorted(view.neighbors[agent.node_id])])
            self.beacons += 1

        thresholds = cfg.thresholds
        for agent in self.agents:
            for _ in range(cfg.packets_per_iteration):
                start = len(self.relay_log)
                packet = route_transaction(
                    agent, self.agents, view, thresholds, self.rng_forward,
                    cfg.hop_limit, self._sequence[agent.node_id], self.step, self.relay_log,
                )
                self._sequence[agent.node_id] += 1
                self.packets.append(packet)
                if self.check_invariants:
                    for _, chooser, relay in self.relay_log[start:]:
                        if relay in self.agents[chooser].global_blacklist:
                            self.violations["relay_globally_blacklisted"] += 1

        self._end_interval(view)

        for rsu in self.rsus:
            rsu.tick()
        if self.step % cfg.rsu_window == 0:
            alarms = [(self.step, rsu.rsu_id, subject) for rsu in self.rsus for subject in rsu.evaluate()]
            newly = self.authority.process_alarms(alarms)
            if newly:
                log.debug("step %d: globally blacklisted %s", self.step, newly)
            if broadcast_blacklist(self.authority.blacklist, self.rsus, self.step, self._broadcast_version):
                self._broadcast_version = self.authority.blacklist.version

        self._record_metrics()

    def _deliver_blacklist(self, view: NetworkView) -> None:
        """Entities in range of an RSU holding a newer list merge it."""
        for agent in self.agents:
            for r in sorted(view.reachable[agent.node_id]):
                rsu = self.rsus[r]
                if rsu.blacklist_version > agent.global_version:
                    agent.merge_global(rsu.blacklist, rsu.blacklist_version)

    def _end_interval(self, view: NetworkView) -> None:
        cfg = self.config
        thresholds = cfg.thresholds
        # answers reflect trust as it stood before anyone closes this interval
        pending = {}
        for agent in self.agents:
            i = agent.node_id
            recs = {}
            for j in sorted(view.neighbors[i]):
                pool = sorted(view.neighbors[i] - {j})
                if cfg.recommendation_fanout is not None and len(pool) > cfg.recommendation_fanout:
                    pool = sorted(int(k) for k in self.rng_recs.choice(pool, cfg.recommendation_fanout, replace=False))
                recs[j] = gather_recommendations(agent, j, [self.agents[k] for k in pool], thresholds)
            pending[i] = recs

        for agent in self.agents:
            i = agent.node_id
            warnings = end_of_interval(agent, view.neighbors[i], pending[i], thresholds, self.step)
            for w in warnings:
                self.warning_counts[w.severity.value] += 1
                if self.check_invariants:
                    verdict = local_decision(agent.records[w.subject].local, thresholds)
                    expected = Severity.MALICIOUS if verdict is Verdict.MALICIOUS else Severity.UNCERTAIN
                    if verdict is Verdict.TRUSTED or w.severity is not expected:
                        self.violations["warning_severity_mismatch"] += 1
                for r in sorted(view.reachable[i]):
                    self.rsus[r].receive(w)
            if self.check_invariants:
                self._check_trust(agent)

    def _check_trust(self, agent: Agent) -> None:
        for rec in agent.records.values():
            for v in (rec.past, rec.current, rec.direct, rec.local):
                if v is not None and not 0.0 <= v <= 1.0:
                    self.violations["trust_out_of_range"] += 1
            c = rec.direct_counters
            if c.successful > c.total or c.successful < 0:
                self.violations["counter_inconsistent"] += 1

    def _check_positions(self) -> None:
        layout = self.world.layout
        for x, y in self._positions:
            if not (0.0 <= x <= layout.width and 0.0 <= y <= layout.height):
                self.violations["position_out_of_bounds"] += 1
            if not layout.on_lane(float(x), float(y), tol=1e-6):
                self.violations["position_off_lane"] += 1
        for i, cls in enumerate(self.world.classes):
            lo, hi = self.world.speed_ranges[cls]
            if not lo <= self.world.speed[i] <= hi:
                self.violations["speed_out_of_range"] += 1

    def _record_metrics(self) -> None:
        fnr, fpr = compute_fnr_fpr(set(self.authority.blacklist.members), self.truth)
        lfnr, lfpr = local_fnr_fpr({a.node_id: a.local_blacklist for a in self.agents}, self.truth)
        self.timeseries.append(
            {
                "step": self.step,
                "fnr_global": fnr,
                "fpr_global": fpr,
                "fnr_local": lfnr,
                "fpr_local": lfpr,
                "pdr": compute_pdr(self.packets),
                "global_blacklist_size": len(self.authority.blacklist.members),
            }
        )

    def report(self) -> MetricsReport:
        last = self.timeseries[-1] if self.timeseries else {}
        causes = Counter(p.cause for p in self.packets if p.cause)
        packets = {"generated": len(self.packets), "dropped": sum(causes.values())}
        packets.update({f"dropped_{k}": v for k, v in sorted(causes.items())})
        return MetricsReport(
            fnr=last.get("fnr_global"),
            fpr=last.get("fpr_global"),
            pdr=compute_pdr(self.packets),
            local_fnr=last.get("fnr_local"),
            local_fpr=last.get("fpr_local"),
            timeseries=self.timeseries,
            global_blacklist=sorted(self.authority.blacklist.members),
            roles={a.node_id: a.profile.kind.value for a in self.agents},
            packets=packets,
            beacons=self.beacons,
            warnings=dict(sorted(self.warning_counts.items())),
            invariants=dict(sorted(self.violations.items())),
            trajectory=self.trajectory,
            seed=self.config.seed,
        )


def run_scenario(config: ScenarioConfig, check_invariants: bool = True) -> MetricsReport:
    """Run one scenario end to end and score it against the assigned roles."""
    return Simulation(config, check_invariants).run()
