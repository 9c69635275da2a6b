"""
Scoring a single neighbour
==========================

An observer fuses what it saw a neighbour do with what other neighbours say
about it. This walks one subject through a few intervals by hand.
"""
from v2xtrust.trust import (
    InteractionCounters,
    Recommendation,
    TrustRecord,
    TrustThresholds,
    evaluate_subject,
)

th = TrustThresholds(th_min=0.4, th_max=0.7, rc=0.3, c_w=0.9)

###############################################################################
# First contact: the observer relayed four packets through node 7 and three
# were forwarded. Nobody has anything to say about node 7 yet.

rec = TrustRecord(subject=7)
rec.direct_counters = InteractionCounters(successful=3, total=4)
t_l, verdict, case = evaluate_subject(rec, [], neighbor_count=5, thresholds=th)
print(f"interval 1: {case.name:16s} local={t_l:.3f} -> {verdict.name}")
rec.roll()

###############################################################################
# Next interval node 7 drops everything. Two neighbours vouch for it and one
# does not. The observer trusts recommender 1 fully and recommender 2 only a
# little, so their opinions carry confidence 1.0 and c_w.

rec.direct_counters = InteractionCounters(successful=0, total=3)
recs = [
    Recommendation(recommender=1, subject=7, value=0.9, confidence=1.0),
    Recommendation(recommender=2, subject=7, value=0.8, confidence=th.c_w),
    Recommendation(recommender=3, subject=7, value=0.1, confidence=1.0),
]
t_l, verdict, case = evaluate_subject(rec, recs, neighbor_count=5, thresholds=th)
print(f"interval 2: {case.name:16s} local={t_l:.3f} -> {verdict.name}")
print(f"  past={rec.past:.3f} direct={rec.direct:.3f} current={rec.current:.3f}")
rec.roll()

###############################################################################
# Silence: no traffic and no recommendations. The last local value carries.

t_l, verdict, case = evaluate_subject(rec, [], neighbor_count=5, thresholds=th)
print(f"interval 3: {case.name:16s} local={t_l:.3f} -> {verdict.name}")
