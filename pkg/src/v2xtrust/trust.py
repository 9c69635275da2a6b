"""Entity-level trust: direct, current, indirect and local trust plus the local verdict.

Everything here is a pure function of its inputs except :class:`TrustRecord`,
which is owned and mutated by a single observing entity.

Trust fusion follows an eight-way case matrix keyed on three flags:

====  ===========  ============  =====  ===========  ===========
case  first time   current comm  recs   Trust1       Trust2
====  ===========  ============  =====  ===========  ===========
1     yes          yes           yes    indirect     direct
2     yes          yes           no     direct       --
3     yes          no            yes    indirect     --
4     yes          no            no     initial      --
5     no           yes           yes    indirect     current
6     no           yes           no     current      --
7     no           no            yes    indirect     past
8     no           no            no     past         --
====  ===========  ============  =====  ===========  ===========

Two-source cases blend as ``w1 * Trust1 + (1 - w1) * Trust2``; single-source
cases give that source weight 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

NodeId = int


class Verdict(enum.IntEnum):
    """Local decision about a neighbour, ordered so that larger means more trusted."""

    MALICIOUS = 0
    UNCERTAIN = 1
    TRUSTED = 2


@dataclass(frozen=True)
class TrustThresholds:
    th_min: float = 0.4
    th_max: float = 0.7
    rc: float = 0.3
    c_w: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.th_min < self.th_max <= 1.0:
            raise ValueError(
                f"need 0 <= th_min < th_max <= 1, got th_min={self.th_min}, th_max={self.th_max}"
            )
        if not 0.0 < self.rc <= 1.0:
            raise ValueError(f"rc must lie in (0, 1], got {self.rc}")
        if not 0.0 <= self.c_w <= 1.0:
            raise ValueError(f"c_w must lie in [0, 1], got {self.c_w}")


@dataclass
class InteractionCounters:
    successful: int = 0
    total: int = 0

    def record(self, success: bool) -> None:
        self.total += 1
        if success:
            self.successful += 1

    def reset(self) -> None:
        self.successful = 0
        self.total = 0


@dataclass(frozen=True)
class Recommendation:
    recommender: NodeId
    subject: NodeId
    value: float
    confidence: float


@dataclass
class TrustRecord:
    """What observer ``i`` remembers about one subject ``j``."""

    subject: NodeId
    past: Optional[float] = None
    current: Optional[float] = None
    direct: Optional[float] = None
    local: Optional[float] = None
    direct_counters: InteractionCounters = field(default_factory=InteractionCounters)
    had_previous_communication: bool = False
    recommendations: list = field(default_factory=list)

    def roll(self) -> None:
        """Close the interval: carry local trust forward as past trust and reset counters."""
        if self.direct_counters.total > 0:
            self.had_previous_communication = True
        if self.local is not None:
            self.past = self.local
        self.direct_counters.reset()
        self.recommendations = []


class Case(enum.IntEnum):
    FIRST_COMM_RECS = 1
    FIRST_COMM_ONLY = 2
    FIRST_RECS_ONLY = 3
    FIRST_NOTHING = 4
    PREV_COMM_RECS = 5
    PREV_COMM_ONLY = 6
    PREV_RECS_ONLY = 7
    PREV_NOTHING = 8


def select_case(previous_communication: bool, current_communication: bool, has_recommendations: bool) -> Case:
    """Map the three case flags onto exactly one of the eight fusion cases."""
    index = 1 + 4 * bool(previous_communication)
    index += 2 * (not current_communication)
    index += not has_recommendations
    return Case(index)


def direct_trust(counters: InteractionCounters) -> Optional[float]:
    """Success ratio of observed interactions, or ``None`` when nothing was observed."""
    if counters.total == 0:
        return None
    return counters.successful / counters.total


def current_trust(past: float, direct: float) -> float:
    return (past + direct) / 2.0


def confidence(recommender_local_trust: float, thresholds: TrustThresholds) -> float:
    """Credibility of a recommender from the observer's own local trust in it."""
    if recommender_local_trust >= thresholds.th_max:
        return 1.0
    if recommender_local_trust >= thresholds.th_min:
        return thresholds.c_w
    return 0.0


def cluster_recommendations(recs: Iterable[Recommendation], thresholds: TrustThresholds):
    """Split recommendations into ``(positive, negative)`` around ``th_min``.

    A value equal to ``th_min`` counts as positive.
    """
    positive, negative = [], []
    for rec in recs:
        (positive if rec.value >= thresholds.th_min else negative).append(rec)
    return positive, negative


def _weighted_mean(recs: Sequence[Recommendation]) -> float:
    weight = sum(r.confidence for r in recs)
    if weight <= 0.0:
        return sum(r.value for r in recs) / len(recs)
    return sum(r.confidence * r.value for r in recs) / weight


def indirect_trust(positive: Sequence[Recommendation], negative: Sequence[Recommendation]) -> Optional[float]:
    """Blend confidence-weighted positive and negative means by their counts.

    Returns ``None`` when there are no recommendations at all.
    """
    n, m = len(positive), len(negative)
    if n + m == 0:
        return None
    value = 0.0
    if n:
        value += n / (n + m) * _weighted_mean(positive)
    if m:
        value += m / (n + m) * _weighted_mean(negative)
    return min(1.0, max(0.0, value))


def recommendation_weight(n_plus_m: int, rc: float, neighbor_count: int) -> float:
    """Weight of indirect trust in the local blend, clamped to [0, 1].

    The complementary weight is ``1 - w1``.
    """
    if neighbor_count <= 0:
        raise ValueError("recommendation weight needs at least one neighbour")
    return min(1.0, max(0.0, n_plus_m * rc / neighbor_count))


def local_trust(
    record: TrustRecord,
    indirect: Optional[float],
    w1: float,
    initial: float = 0.5,
) -> float:
    """Fuse the available trust sources for ``record.subject``.

    ``record.direct_counters`` decides whether there was current communication and
    ``record.past`` must be set whenever ``record.had_previous_communication`` is.
    The computed direct/current values are written back onto ``record``.
    """
    direct = direct_trust(record.direct_counters)
    case = select_case(record.had_previous_communication, direct is not None, indirect is not None)
    record.direct = direct

    if case is Case.FIRST_NOTHING:
        return initial
    if case is Case.FIRST_COMM_ONLY:
        return direct
    if case is Case.FIRST_RECS_ONLY:
        return indirect

    if case is Case.FIRST_COMM_RECS:
        return w1 * indirect + (1.0 - w1) * direct

    past = record.past
    if case is Case.PREV_NOTHING:
        return past
    if case is Case.PREV_RECS_ONLY:
        return w1 * indirect + (1.0 - w1) * past

    current = current_trust(past, direct)
    record.current = current
    if case is Case.PREV_COMM_ONLY:
        return current
    return w1 * indirect + (1.0 - w1) * current


def local_decision(t_l: float, thresholds: TrustThresholds) -> Verdict:
    if t_l >= thresholds.th_max:
        return Verdict.TRUSTED
    if t_l >= thresholds.th_min:
        return Verdict.UNCERTAIN
    return Verdict.MALICIOUS


def evaluate_subject(
    record: TrustRecord,
    recommendations: Sequence[Recommendation],
    neighbor_count: int,
    thresholds: TrustThresholds,
    initial: float = 0.5,
) -> tuple:
    """Run the whole entity-level pipeline for one subject.

    Zero-confidence recommendations are discarded before clustering. Returns
    ``(local_trust, verdict, case)`` and stores the local trust on the record.
    """
    usable = [r for r in recommendations if r.confidence > 0.0]
    record.recommendations = list(usable)
    positive, negative = cluster_recommendations(usable, thresholds)
    indirect = indirect_trust(positive, negative)
    w1 = recommendation_weight(len(usable), thresholds.rc, neighbor_count) if usable else 0.0
    case = select_case(record.had_previous_communication, record.direct_counters.total > 0, indirect is not None)
    t_l = local_trust(record, indirect, w1, initial)
    record.local = t_l
    return t_l, local_decision(t_l, thresholds), case
