"""Road-entity agents: messaging, watchdog accounting, trusted relaying and attacks."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from .rsu import Severity, WarningMessage
from .trust import (
    InteractionCounters,
    NodeId,
    Recommendation,
    TrustRecord,
    TrustThresholds,
    Verdict,
    confidence,
    evaluate_subject,
    local_decision,
)


class BehaviorKind(enum.Enum):
    NORMAL = "normal"
    SELECTIVE_FORWARDING = "selective_forwarding"
    GOOD_MOUTHING = "good_mouthing"
    BAD_MOUTHING = "bad_mouthing"

    @property
    def malicious(self) -> bool:
        return self is not BehaviorKind.NORMAL


class Outcome(enum.Enum):
    FORWARDED = "forwarded"
    DROPPED = "dropped"


class PacketStatus(enum.Enum):
    IN_FLIGHT = "in_flight"
    DELIVERED = "delivered"
    DROPPED = "dropped"


@dataclass(frozen=True)
class BehaviorProfile:
    kind: BehaviorKind = BehaviorKind.NORMAL
    drop_probability: float = 0.0
    accomplices: frozenset = frozenset()
    victims: frozenset = frozenset()
    lies_in_recommendations: bool = False

    def __post_init__(self):
        if not 0.0 <= self.drop_probability <= 1.0:
            raise ValueError("drop_probability must lie in [0, 1]")
        if self.drop_probability > 0.0 and self.kind is not BehaviorKind.SELECTIVE_FORWARDING:
            raise ValueError("only selective forwarders drop packets")


@dataclass
class TransactionPacket:
    origin: NodeId
    sequence: int
    hop_path: List[NodeId] = field(default_factory=list)
    status: PacketStatus = PacketStatus.IN_FLIGHT
    cause: Optional[str] = None
    rsu: Optional[int] = None
    step: int = 0

    def deliver(self, rsu: int) -> None:
        self._close(PacketStatus.DELIVERED)
        self.rsu = rsu

    def drop(self, cause: str) -> None:
        self._close(PacketStatus.DROPPED)
        self.cause = cause

    def _close(self, status: PacketStatus) -> None:
        if self.status is not PacketStatus.IN_FLIGHT:
            raise RuntimeError(f"packet {self.origin}/{self.sequence} already {self.status.value}")
        self.status = status


@dataclass(frozen=True)
class BeaconMessage:
    origin: NodeId
    position: Tuple[float, float]
    speed: float
    heading: Tuple[float, float]
    step: int


@dataclass
class Agent:
    node_id: NodeId
    profile: BehaviorProfile = field(default_factory=BehaviorProfile)
    initial_trust: float = 0.5
    firsthand_only: bool = True
    sticky_blacklist: bool = False
    records: Dict[NodeId, TrustRecord] = field(default_factory=dict)
    local_blacklist: Set[NodeId] = field(default_factory=set)
    global_blacklist: Set[NodeId] = field(default_factory=set)
    global_version: int = 0
    neighbor_table: Dict[NodeId, BeaconMessage] = field(default_factory=dict)

    def record(self, subject: NodeId) -> TrustRecord:
        rec = self.records.get(subject)
        if rec is None:
            rec = self.records[subject] = TrustRecord(subject)
        return rec

    def trust_of(self, subject: NodeId) -> float:
        rec = self.records.get(subject)
        if rec is None or rec.local is None:
            return self.initial_trust
        return rec.local

    def blocked(self, subject: NodeId) -> bool:
        return subject in self.local_blacklist or subject in self.global_blacklist

    def merge_global(self, members: Iterable[NodeId], version: int) -> None:
        self.global_blacklist.update(m for m in members if m != self.node_id)
        self.global_version = max(self.global_version, version)


def emit_beacon(agent: Agent, world, neighbor_agents: Sequence[Agent]) -> Tuple[BeaconMessage, int]:
    """Broadcast a truthful status beacon; returns it with the number of deliveries."""
    beacon = BeaconMessage(
        agent.node_id,
        world.position(agent.node_id),
        float(world.speed[agent.node_id]),
        world.heading(agent.node_id),
        world.step_count,
    )
    for other in neighbor_agents:
        other.neighbor_table[agent.node_id] = beacon
    return beacon, len(neighbor_agents)


def forward_or_drop(agent: Agent, packet: TransactionPacket, rng: np.random.Generator) -> Outcome:
    """Relay decision: only selective forwarders drop, independently per packet."""
    p = agent.profile.drop_probability
    if agent.profile.kind is BehaviorKind.SELECTIVE_FORWARDING and p > 0.0 and rng.random() < p:
        return Outcome.DROPPED
    return Outcome.FORWARDED


def observe_interaction(counters: InteractionCounters, outcome: Outcome, in_range: bool = True) -> InteractionCounters:
    """Watchdog overhear of a hand-off; uncounted when the observer cannot hear the relay."""
    if in_range:
        counters.record(outcome is Outcome.FORWARDED)
    return counters


def select_relay(holder: Agent, candidates: Iterable[NodeId], thresholds: TrustThresholds) -> Optional[NodeId]:
    """Most trusted usable neighbour; ties go to the lowest id."""
    best = None
    for k in sorted(candidates):
        if holder.blocked(k):
            continue
        t = holder.trust_of(k)
        if local_decision(t, thresholds) is Verdict.MALICIOUS:
            continue
        if best is None or t > best[0]:
            best = (t, k)
    return None if best is None else best[1]


@dataclass
class NetworkView:
    """Connectivity frozen for one iteration."""

    neighbors: Mapping[NodeId, Set[NodeId]]
    reachable: Mapping[NodeId, Set[int]]
    nearest_rsu: Mapping[NodeId, Optional[int]]


def route_transaction(
    source: Agent,
    agents: Sequence[Agent],
    view: NetworkView,
    thresholds: TrustThresholds,
    rng: np.random.Generator,
    hop_limit: int = 5,
    sequence: int = 0,
    step: int = 0,
    relay_log: Optional[list] = None,
) -> TransactionPacket:
    """Carry one packet from ``source`` to the core network.

    Each holder with an RSU in range hands it to the nearest one; otherwise it
    picks a relay with :func:`select_relay`. The previous holder's watchdog
    scores the relay once the relay either forwards or drops. A relay that
    itself has nowhere to send the packet is not scored.
    """
    packet = TransactionPacket(source.node_id, sequence, [source.node_id], step=step)
    holder = source
    watcher: Optional[Agent] = None

    while True:
        if watcher is not None:
            outcome = forward_or_drop(holder, packet, rng)
            if outcome is Outcome.DROPPED:
                observe_interaction(watcher.record(holder.node_id).direct_counters, outcome)
                packet.drop("attack")
                return packet

        if view.reachable[holder.node_id]:
            if watcher is not None:
                observe_interaction(watcher.record(holder.node_id).direct_counters, Outcome.FORWARDED)
            packet.deliver(view.nearest_rsu[holder.node_id])
            return packet

        candidates = view.neighbors[holder.node_id] - set(packet.hop_path)
        relay = select_relay(holder, candidates, thresholds)
        if relay is None:
            packet.drop("no-route")
            return packet
        if len(packet.hop_path) - 1 >= hop_limit:
            packet.drop("ttl")
            return packet

        if watcher is not None:
            observe_interaction(watcher.record(holder.node_id).direct_counters, Outcome.FORWARDED)
        if relay_log is not None:
            relay_log.append((step, holder.node_id, relay))
        packet.hop_path.append(relay)
        watcher, holder = holder, agents[relay]


def answer_recommendation_request(agent: Agent, requester: NodeId, subject: NodeId) -> Optional[float]:
    """Opinion about ``subject`` as reported to ``requester``; ``None`` if ``agent`` has none.

    With ``agent.firsthand_only`` an agent only speaks about subjects it has
    interacted with in an earlier interval. Mouthing attackers lie only about
    subjects they would otherwise answer for.
    """
    rec = agent.records.get(subject)
    if rec is None or rec.local is None:
        return None
    if agent.firsthand_only and not rec.had_previous_communication:
        return None
    profile = agent.profile
    if profile.kind is BehaviorKind.GOOD_MOUTHING and subject in profile.accomplices:
        return 1.0
    if profile.kind is BehaviorKind.BAD_MOUTHING and subject in profile.victims:
        return 0.0
    if profile.lies_in_recommendations and profile.kind is BehaviorKind.SELECTIVE_FORWARDING:
        return 1.0 - rec.local
    return rec.local


def gather_recommendations(
    observer: Agent,
    subject: NodeId,
    recommenders: Iterable[Agent],
    thresholds: TrustThresholds,
) -> List[Recommendation]:
    recs = []
    for k in recommenders:
        if k.node_id in (observer.node_id, subject) or observer.blocked(k.node_id):
            continue
        value = answer_recommendation_request(k, observer.node_id, subject)
        if value is None:
            continue
        c = confidence(observer.trust_of(k.node_id), thresholds)
        recs.append(Recommendation(k.node_id, subject, value, c))
    return recs


def end_of_interval(
    agent: Agent,
    neighbor_ids: Iterable[NodeId],
    recommendations: Mapping[NodeId, Sequence[Recommendation]],
    thresholds: TrustThresholds,
    interval: int,
) -> List[WarningMessage]:
    """Evaluate every current neighbour, update the local blacklist and roll the interval.

    Returns one warning per neighbour judged malicious or uncertain. Unless
    ``agent.sticky_blacklist`` is set, a re-evaluated neighbour leaves the local
    blacklist when its verdict is no longer malicious.
    """
    neighbor_ids = sorted(neighbor_ids)
    if not agent.sticky_blacklist:
        agent.local_blacklist.difference_update(neighbor_ids)
    count = len(neighbor_ids)
    warnings = []
    for j in neighbor_ids:
        rec = agent.record(j)
        _, verdict, _ = evaluate_subject(rec, recommendations.get(j, ()), count, thresholds, agent.initial_trust)
        if verdict is Verdict.MALICIOUS:
            agent.local_blacklist.add(j)
            warnings.append(WarningMessage(agent.node_id, j, Severity.MALICIOUS, interval))
        elif verdict is Verdict.UNCERTAIN:
            warnings.append(WarningMessage(agent.node_id, j, Severity.UNCERTAIN, interval))
    for rec in agent.records.values():
        rec.roll()
    return warnings
