"""Detection and delivery metrics."""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence, Set, Tuple

from .agents import PacketStatus, TransactionPacket


def compute_fnr_fpr(flagged: Set[int], ground_truth: Mapping[int, bool]) -> Tuple[Optional[float], Optional[float]]:
    """FNR over malicious nodes and FPR over normal nodes; ``None`` when a class is empty.

    ``ground_truth`` maps every node id to ``True`` for malicious.
    """
    malicious = [n for n, bad in ground_truth.items() if bad]
    normal = [n for n, bad in ground_truth.items() if not bad]
    fnr = sum(n not in flagged for n in malicious) / len(malicious) if malicious else None
    fpr = sum(n in flagged for n in normal) / len(normal) if normal else None
    return fnr, fpr


def local_fnr_fpr(
    local_blacklists: Mapping[int, Set[int]],
    ground_truth: Mapping[int, bool],
) -> Tuple[Optional[float], Optional[float]]:
    """Mean per-observer FNR/FPR of normal observers judging everybody else by their own blacklist."""
    fnrs, fprs = [], []
    for observer, bad in sorted(ground_truth.items()):
        if bad:
            continue
        others = {n: b for n, b in ground_truth.items() if n != observer}
        fnr, fpr = compute_fnr_fpr(local_blacklists[observer], others)
        if fnr is not None:
            fnrs.append(fnr)
        if fpr is not None:
            fprs.append(fpr)
    return mean_or_none(fnrs), mean_or_none(fprs)


def compute_pdr(packet_log: Sequence[TransactionPacket]) -> float:
    """Fraction of generated packets that were dropped (0 for an empty log)."""
    if not packet_log:
        return 0.0
    return sum(p.status is PacketStatus.DROPPED for p in packet_log) / len(packet_log)


def improvement_rate(metric_a: float, metric_b: float) -> Optional[float]:
    """Relative reduction from baseline ``metric_a`` to ``metric_b``, in percent."""
    if metric_a == 0:
        return None
    return (metric_a - metric_b) / metric_a * 100.0


def mean_or_none(values: Iterable[Optional[float]]) -> Optional[float]:
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None
