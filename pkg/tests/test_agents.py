import math

import numpy as np
import pytest

from v2xtrust.agents import (
    Agent,
    BehaviorKind,
    BehaviorProfile,
    NetworkView,
    Outcome,
    PacketStatus,
    TransactionPacket,
    answer_recommendation_request,
    emit_beacon,
    end_of_interval,
    forward_or_drop,
    gather_recommendations,
    observe_interaction,
    route_transaction,
)
from v2xtrust.rsu import Severity
from v2xtrust.trust import InteractionCounters, TrustThresholds

from test_world import make_world

TH = TrustThresholds()
SF = BehaviorKind.SELECTIVE_FORWARDING


def agents(n, profiles=None):
    profiles = profiles or {}
    return [Agent(i, profiles.get(i, BehaviorProfile())) for i in range(n)]


def view(neigh, reach):
    ids = set(neigh) | set(reach) | {j for v in neigh.values() for j in v}
    n = max(ids) + 1
    return NetworkView(
        {i: set(neigh.get(i, ())) for i in range(n)},
        {i: set(reach.get(i, ())) for i in range(n)},
        {i: (min(reach[i]) if reach.get(i) else None) for i in range(n)},
    )


def known(agent, subject, t_l, previous=True):
    r = agent.record(subject)
    r.local = t_l
    r.past = t_l
    r.had_previous_communication = previous
    return r


def test_beacon_deliveries():
    w = make_world([0, 0, 0, 0], [100.0, 150.0, 200.0, 250.0])
    ag = agents(4)
    beacon, n = emit_beacon(ag[0], w, ag[1:])
    assert n == 3 and all(0 in a.neighbor_table for a in ag[1:])
    assert beacon.position == w.position(0) and beacon.heading == (1.0, 0.0)
    assert emit_beacon(ag[0], w, [])[1] == 0


def test_route_direct_to_rsu():
    ag = agents(2)
    p = route_transaction(ag[0], ag, view({0: [1]}, {0: [3]}), TH, np.random.default_rng(0))
    assert p.status is PacketStatus.DELIVERED and p.hop_path == [0] and p.rsu == 3


def test_route_through_trusted_relay_scores_it():
    ag = agents(3)
    known(ag[0], 1, 0.9)
    known(ag[0], 2, 0.6)
    v = view({0: [1, 2], 1: [0], 2: [0]}, {1: [4]})
    p = route_transaction(ag[0], ag, v, TH, np.random.default_rng(0))
    assert p.status is PacketStatus.DELIVERED and p.hop_path == [0, 1]
    c = ag[0].records[1].direct_counters
    assert (c.successful, c.total) == (1, 1)


def test_route_no_route_when_all_neighbours_blacklisted():
    ag = agents(3)
    ag[0].local_blacklist.update({1})
    ag[0].global_blacklist.update({2})
    p = route_transaction(ag[0], ag, view({0: [1, 2]}, {1: [0], 2: [0]}), TH, np.random.default_rng(0))
    assert p.status is PacketStatus.DROPPED and p.cause == "no-route"


def test_route_skips_locally_malicious_and_breaks_ties_by_id():
    ag = agents(4)
    known(ag[0], 1, 0.1)  # malicious verdict
    v = view({0: [1, 2, 3]}, {2: [0], 3: [0]})
    log = []
    p = route_transaction(ag[0], ag, v, TH, np.random.default_rng(0), relay_log=log)
    assert p.hop_path == [0, 2] and log == [(0, 0, 2)]


def test_route_ttl_and_cycle_guard():
    n = 8
    ag = agents(n)
    chain = {i: [i - 1, i + 1] for i in range(1, n - 1)}
    chain[0] = [1]
    chain[n - 1] = [n - 2]
    p = route_transaction(ag[0], ag, view(chain, {}), TH, np.random.default_rng(0), hop_limit=5)
    assert p.status is PacketStatus.DROPPED and p.cause == "ttl"
    assert len(p.hop_path) == 6 and len(set(p.hop_path)) == 6


def test_dropping_relay_is_scored_as_failure():
    ag = agents(2, {1: BehaviorProfile(SF, 1.0)})
    p = route_transaction(ag[0], ag, view({0: [1], 1: [0]}, {1: [0]}), TH, np.random.default_rng(0))
    assert p.status is PacketStatus.DROPPED and p.cause == "attack"
    c = ag[0].records[1].direct_counters
    assert (c.successful, c.total) == (0, 1)


def test_relay_without_route_is_not_scored():
    ag = agents(2)
    p = route_transaction(ag[0], ag, view({0: [1], 1: [0]}, {}), TH, np.random.default_rng(0))
    assert p.cause == "no-route"
    rec = ag[0].records.get(1)
    assert rec is None or rec.direct_counters.total == 0


def test_packet_closes_once():
    p = TransactionPacket(0, 0, [0])
    p.deliver(1)
    with pytest.raises(RuntimeError):
        p.drop("attack")


def test_forward_or_drop_examples():
    rng = np.random.default_rng(0)
    p = TransactionPacket(0, 0)
    for kind in (BehaviorKind.NORMAL, BehaviorKind.GOOD_MOUTHING, BehaviorKind.BAD_MOUTHING):
        a = Agent(1, BehaviorProfile(kind))
        assert all(forward_or_drop(a, p, rng) is Outcome.FORWARDED for _ in range(1000))
    a = Agent(1, BehaviorProfile(SF, 1.0))
    assert all(forward_or_drop(a, p, rng) is Outcome.DROPPED for _ in range(1000))


@pytest.mark.parametrize("prob", [0.1, 0.5, 0.9])
def test_selective_forwarding_rate_binomial(prob):
    n = 10_000
    a = Agent(1, BehaviorProfile(SF, prob))
    rng = np.random.default_rng(42)
    drops = sum(forward_or_drop(a, TransactionPacket(0, i), rng) is Outcome.DROPPED for i in range(n))
    sigma = math.sqrt(prob * (1 - prob) / n)
    assert abs(drops / n - prob) <= 3 * sigma


def test_only_selective_forwarders_may_drop():
    with pytest.raises(ValueError):
        BehaviorProfile(BehaviorKind.BAD_MOUTHING, 0.3)


def test_observe_interaction():
    c = InteractionCounters(2, 3)
    observe_interaction(c, Outcome.FORWARDED)
    assert (c.successful, c.total) == (3, 4)
    observe_interaction(c, Outcome.DROPPED)
    assert (c.successful, c.total) == (3, 5)
    observe_interaction(c, Outcome.FORWARDED, in_range=False)
    assert (c.successful, c.total) == (3, 5)


def test_answers_by_behaviour():
    normal = Agent(1)
    known(normal, 5, 0.62)
    assert answer_recommendation_request(normal, 0, 5) == 0.62
    assert answer_recommendation_request(normal, 0, 6) is None

    gm = Agent(2, BehaviorProfile(BehaviorKind.GOOD_MOUTHING, accomplices=frozenset({5})))
    known(gm, 5, 0.1)
    known(gm, 6, 0.3)
    assert answer_recommendation_request(gm, 0, 5) == 1.0
    assert answer_recommendation_request(gm, 0, 6) == 0.3

    bm = Agent(3, BehaviorProfile(BehaviorKind.BAD_MOUTHING, victims=frozenset({7})))
    known(bm, 7, 0.95)
    assert answer_recommendation_request(bm, 0, 7) == 0.0

    sf = Agent(4, BehaviorProfile(SF, 0.5))
    known(sf, 7, 0.8)
    assert answer_recommendation_request(sf, 0, 7) == 0.8


def test_firsthand_only_answers():
    a = Agent(1)
    known(a, 5, 0.62, previous=False)
    assert answer_recommendation_request(a, 0, 5) is None
    a.firsthand_only = False
    assert answer_recommendation_request(a, 0, 5) == 0.62


def test_gather_recommendations_sets_confidence_and_skips_blocked():
    obs = Agent(0)
    known(obs, 1, 0.9)  # trusted recommender
    known(obs, 2, 0.5)  # uncertain recommender
    obs.local_blacklist.add(3)
    recs = [Agent(k) for k in (1, 2, 3)]
    for k in recs:
        known(k, 9, 0.8)
    out = gather_recommendations(obs, 9, recs, TH)
    assert [(r.recommender, r.confidence) for r in out] == [(1, 1.0), (2, 0.9)]


def test_end_of_interval_warnings_and_blacklist():
    a = Agent(0)
    bad = known(a, 1, 0.2)
    bad.direct_counters = InteractionCounters(0, 2)  # current = (0.2 + 0) / 2
    good = known(a, 2, 0.9)
    good.direct_counters = InteractionCounters(3, 3)
    unsure = known(a, 3, 0.5)
    warnings = end_of_interval(a, [1, 2, 3], {}, TH, interval=4)
    assert [(w.subject, w.severity) for w in warnings] == [(1, Severity.MALICIOUS), (3, Severity.UNCERTAIN)]
    assert a.local_blacklist == {1}
    assert a.records[1].past == pytest.approx(0.1) and a.records[1].direct_counters.total == 0


def test_end_of_interval_all_trusted_is_silent():
    a = Agent(0)
    for j in (1, 2):
        known(a, j, 0.95).direct_counters = InteractionCounters(1, 1)
    assert end_of_interval(a, [1, 2], {}, TH, 0) == []


def test_local_blacklist_follows_latest_verdict_unless_sticky():
    a = Agent(0)
    known(a, 1, 0.1)
    end_of_interval(a, [1], {}, TH, 0)
    assert 1 in a.local_blacklist
    a.records[1].direct_counters = InteractionCounters(4, 4)
    a.records[1].past = 0.9
    end_of_interval(a, [1], {}, TH, 1)
    assert 1 not in a.local_blacklist

    b = Agent(0, sticky_blacklist=True)
    known(b, 1, 0.1)
    end_of_interval(b, [1], {}, TH, 0)
    b.records[1].past = 0.9
    end_of_interval(b, [1], {}, TH, 1)
    assert 1 in b.local_blacklist
