import itertools

import pytest

from v2xtrust.authority import CentralAuthority, GlobalBlacklist, GlobalVerdict, broadcast_blacklist, global_decision
from v2xtrust.rsu import (
    RoadSideUnit,
    RsuTally,
    RsuVerdict,
    Severity,
    TallyStore,
    WarningMessage,
    alarm_fractions,
    ingest_warning,
    rsu_decision,
)


def warn(issuer=1, subject=2, sev=Severity.MALICIOUS, interval=1):
    return WarningMessage(issuer, subject, sev, interval)


def test_ingest_counts_and_dedups():
    store = TallyStore()
    ingest_warning(store, warn())
    assert store.tallies[2].m_prime == 1
    ingest_warning(store, warn())
    assert store.tallies[2].m_prime == 1
    ingest_warning(store, warn(sev=Severity.UNCERTAIN))
    assert store.tallies[2].u == 1
    ingest_warning(store, warn(issuer=3))
    ingest_warning(store, warn(interval=2))
    assert store.tallies[2].m_prime == 3


def test_self_warning_rejected():
    with pytest.raises(ValueError):
        WarningMessage(4, 4, Severity.MALICIOUS, 0)


@pytest.mark.parametrize(
    "m,u,w,expected", [(3, 1, 10, (0.3, 0.1)), (0, 0, 10, (0.0, 0.0)), (10, 10, 10, (1.0, 1.0))]
)
def test_alarm_fractions(m, u, w, expected):
    assert alarm_fractions(RsuTally(0, m, u, w)) == pytest.approx(expected)


def test_alarm_fractions_need_window():
    with pytest.raises(ValueError):
        alarm_fractions(RsuTally(0, 1, 1, 0))


def test_rsu_decision_examples():
    assert rsu_decision(0.3, 0.1) is RsuVerdict.MALICIOUS
    assert rsu_decision(0.1, 0.1) is RsuVerdict.NOT_MALICIOUS
    assert rsu_decision(0.0, 0.0) is RsuVerdict.NOT_MALICIOUS


def test_rsu_decision_is_majority_of_malicious_by_brute_force():
    for m, u, w in itertools.product(range(12), range(12), range(1, 12)):
        M, U = alarm_fractions(RsuTally(0, m, u, w))
        assert (rsu_decision(M, U) is RsuVerdict.MALICIOUS) == (m > u)
        if M + U > 0:
            assert M / (M + U) + U / (M + U) == pytest.approx(1.0)


def test_rsu_window_evaluation_resets():
    rsu = RoadSideUnit(0, (0.0, 0.0))
    for i in range(3):
        rsu.tick()
    rsu.receive(warn(issuer=1, subject=5))
    rsu.receive(warn(issuer=2, subject=5))
    rsu.receive(warn(issuer=3, subject=6, sev=Severity.UNCERTAIN))
    assert rsu.evaluate() == [5]
    assert rsu.store.tallies == {} and rsu.store.window == 0
    assert rsu.evaluate() == []


@pytest.mark.parametrize("a_m,expected", [(4, GlobalVerdict.MALICIOUS), (3, GlobalVerdict.NORMAL), (0, GlobalVerdict.NORMAL)])
def test_global_decision_nine_rsus(a_m, expected):
    assert global_decision(a_m, 9) is expected


def test_global_decision_monotone():
    for total in range(1, 20):
        verdicts = [global_decision(a, total) is GlobalVerdict.MALICIOUS for a in range(total + 1)]
        assert verdicts == sorted(verdicts)


def test_blacklist_versioning():
    bl = GlobalBlacklist()
    assert bl.add([3])
    assert bl.version == 1
    assert not bl.add([3])
    assert bl.version == 1
    bl.add([1, 3])
    assert bl.members == {1, 3} and bl.version == 2


def test_authority_counts_distinct_rsus_across_windows():
    auth = CentralAuthority(9)
    assert auth.process_alarms([(10, 0, 7), (10, 0, 7), (10, 1, 7), (10, 2, 7)]) == []
    assert auth.process_alarms([(20, 1, 7)]) == []
    assert auth.process_alarms([(30, 5, 7)]) == [7]
    assert auth.blacklist.members == {7}


def test_authority_without_accumulation_needs_quorum_in_one_batch():
    auth = CentralAuthority(9, accumulate=False)
    auth.process_alarms([(10, r, 7) for r in range(3)])
    assert auth.process_alarms([(20, 3, 7)]) == []
    assert auth.process_alarms([(30, r, 7) for r in range(4)]) == [7]


def test_broadcast_reaches_every_rsu_once_per_version():
    rsus = [RoadSideUnit(r, (0.0, 0.0)) for r in range(9)]
    bl = GlobalBlacklist()
    assert broadcast_blacklist(bl, rsus, 5, 0) == []
    bl.add([4])
    events = broadcast_blacklist(bl, rsus, 5, 0)
    assert len(events) == 9 and all(e.version == 1 and e.step == 5 for e in events)
    assert all(r.blacklist == {4} for r in rsus)
    assert broadcast_blacklist(bl, rsus, 6, 1) == []
