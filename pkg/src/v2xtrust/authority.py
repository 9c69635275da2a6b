"""Central server: quorum decision over RSU alarms and global blacklist dissemination."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Set, Tuple

from .trust import NodeId


class GlobalVerdict(enum.Enum):
    MALICIOUS = "malicious"
    NORMAL = "normal"


def global_decision(malicious_alarm_count: int, total_rsus: int) -> GlobalVerdict:
    """Quorum rule: malicious when at least ``total_rsus / 2 - 1`` RSUs alarmed (real-valued)."""
    if malicious_alarm_count >= total_rsus / 2.0 - 1.0:
        return GlobalVerdict.MALICIOUS
    return GlobalVerdict.NORMAL


@dataclass
class GlobalBlacklist:
    members: frozenset = frozenset()
    version: int = 0

    def add(self, nodes: Iterable[NodeId]) -> bool:
        new = frozenset(nodes) - self.members
        if not new:
            return False
        self.members = self.members | new
        self.version += 1
        return True


@dataclass(frozen=True)
class Delivery:
    """One hop of blacklist dissemination, to an RSU or to an entity."""

    step: int
    target_kind: str
    target: int
    version: int


@dataclass
class CentralAuthority:
    total_rsus: int
    accumulate: bool = True
    blacklist: GlobalBlacklist = field(default_factory=GlobalBlacklist)
    alarmed_by: Dict[NodeId, Set[int]] = field(default_factory=dict)
    broadcast_version: int = 0

    def process_alarms(self, alarms: Iterable[Tuple[int, int, NodeId]]) -> List[NodeId]:
        """Fold ``(step, rsu_id, subject)`` alarms in arrival order and return new members.

        With ``accumulate`` (default) an RSU's alarm about a subject counts once per run;
        otherwise counts start from zero for every batch.
        """
        if not self.accumulate:
            self.alarmed_by = {}
        for _, rsu_id, subject in sorted(alarms):
            self.alarmed_by.setdefault(subject, set()).add(rsu_id)
        newly = [
            subject
            for subject in sorted(self.alarmed_by)
            if subject not in self.blacklist.members
            and global_decision(len(self.alarmed_by[subject]), self.total_rsus) is GlobalVerdict.MALICIOUS
        ]
        self.blacklist.add(newly)
        return newly


def broadcast_blacklist(blacklist: GlobalBlacklist, rsus, step: int, last_version: int) -> List[Delivery]:
    """Push the blacklist to every RSU in the same step.

    Returns no events when the version has not advanced since ``last_version``.
    Entities pick the list up from any in-range RSU from ``step + 1`` on.
    """
    if blacklist.version <= last_version:
        return []
    events = []
    for rsu in rsus:
        rsu.blacklist = blacklist.members
        rsu.blacklist_version = blacklist.version
        events.append(Delivery(step, "rsu", rsu.rsu_id, blacklist.version))
    return events
