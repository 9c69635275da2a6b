"""Road-side unit: warning collection and the alarm-rate decision."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .trust import NodeId


class Severity(enum.Enum):
    MALICIOUS = "malicious"
    UNCERTAIN = "uncertain"


class RsuVerdict(enum.Enum):
    MALICIOUS = "malicious"
    NOT_MALICIOUS = "not_malicious"


@dataclass(frozen=True)
class WarningMessage:
    issuer: NodeId
    subject: NodeId
    severity: Severity
    interval: int

    def __post_init__(self):
        if self.issuer == self.subject:
            raise ValueError("an entity cannot warn about itself")


@dataclass
class RsuTally:
    subject: NodeId
    m_prime: int = 0
    u: int = 0
    window: int = 0


def alarm_fractions(tally: RsuTally) -> Tuple[float, float]:
    """Malicious and uncertain warnings per elapsed interval of the window."""
    if tally.window < 1:
        raise ValueError("window must contain at least one interval")
    return tally.m_prime / tally.window, tally.u / tally.window


def rsu_decision(M: float, U: float) -> RsuVerdict:
    """Flag the subject when malicious alarms outweigh uncertain ones.

    Ties and the no-evidence case are not malicious.
    """
    total = M + U
    if total <= 0.0:
        return RsuVerdict.NOT_MALICIOUS
    decision = M / total - U / total
    return RsuVerdict.MALICIOUS if decision > 0.0 else RsuVerdict.NOT_MALICIOUS


@dataclass
class TallyStore:
    """Per-subject warning counters over one evaluation window.

    Duplicate ``(issuer, subject, interval, severity)`` tuples are counted once.
    """

    tallies: Dict[NodeId, RsuTally] = field(default_factory=dict)
    seen: set = field(default_factory=set)
    window: int = 0

    def ingest(self, msg: WarningMessage) -> "TallyStore":
        key = (msg.issuer, msg.subject, msg.interval, msg.severity)
        if key in self.seen:
            return self
        self.seen.add(key)
        tally = self.tallies.setdefault(msg.subject, RsuTally(msg.subject))
        if msg.severity is Severity.MALICIOUS:
            tally.m_prime += 1
        else:
            tally.u += 1
        return self

    def reset(self) -> None:
        self.tallies.clear()
        self.seen.clear()
        self.window = 0


def ingest_warning(store: TallyStore, msg: WarningMessage) -> TallyStore:
    return store.ingest(msg)


@dataclass
class RoadSideUnit:
    rsu_id: int
    position: Tuple[float, float]
    store: TallyStore = field(default_factory=TallyStore)
    blacklist_version: int = 0
    blacklist: frozenset = frozenset()

    def receive(self, msg: WarningMessage) -> None:
        self.store.ingest(msg)

    def tick(self) -> None:
        """Count one elapsed entity interval in the current window."""
        self.store.window += 1

    def evaluate(self) -> List[NodeId]:
        """Close the window, returning the subjects to raise alarms for (sorted)."""
        alarms = []
        window = max(self.store.window, 1)
        for subject in sorted(self.store.tallies):
            tally = self.store.tallies[subject]
            tally.window = window
            M, U = alarm_fractions(tally)
            if rsu_decision(M, U) is RsuVerdict.MALICIOUS:
                alarms.append(subject)
        self.store.reset()
        return alarms
