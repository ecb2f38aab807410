import random

import pytest

from sumset_orders.assembly import construct_extension, construct_int
from sumset_orders.core import IntegerSet, ModpVectorSet, dumps, hfold_int, hfold_modp
from sumset_orders.errors import BudgetExceeded, DomainError
from sumset_orders.verify import (SizeSequence, certify, khovanskii_probe, oracle_hfold,
                                  oracle_hfold_modp, order_sequence)


def test_oracle_agrees_with_kernel():
    rng = random.Random(9)
    for _ in range(1000):
        a = IntegerSet(rng.sample(range(50), rng.randint(1, 7)))
        h = rng.randint(0, 5)
        assert oracle_hfold(a, h) == hfold_int(a, h)


def test_oracle_examples():
    a = IntegerSet([2, 5, 9])
    assert oracle_hfold(a, 1) == a
    assert oracle_hfold(IntegerSet.interval(0, 6), 4) == IntegerSet.interval(0, 24)


def test_oracle_budget():
    with pytest.raises(BudgetExceeded):
        oracle_hfold(IntegerSet([0, 10 ** 6]), 5, budget=1000)


def test_modp_oracle_agrees():
    rng = random.Random(1)
    for p, t in [(2, 5), (3, 3), (7, 2)]:
        for _ in range(15):
            vecs = [tuple(rng.randrange(p) for _ in range(t)) for _ in range(rng.randint(1, 4))]
            a = ModpVectorSet(p, t, vecs)
            h = rng.randint(0, 4)
            assert oracle_hfold_modp(a, h) == hfold_modp(a, h)


def test_certify_end_to_end():
    cert = construct_int(2, 2, [(1, 2), (2, 1)])
    again = certify(cert.sets, sorted(cert.expected.items()))
    assert again.passed
    assert again.sizes == cert.sizes
    assert set(again.methods.values()) == {"kernel+oracle"}


def test_certify_reports_failing_pair():
    cert = certify([IntegerSet([0, 1]), IntegerSet([0, 1, 2])], [(1, (2, 1))])
    assert not cert.passed
    assert "fold 1" in cert.failures()[0] and "hA_2" in cert.failures()[0]


def test_certify_tie_on_identical_sets():
    a = IntegerSet([0, 2, 3])
    assert certify([a, a], [(1, (1, 1)), (4, (1, 1))]).passed


def test_certify_threads_and_determinism():
    cert = construct_extension(3, 2, [(1, 2, 3), (3, 2, 1)], (1, 1, 2))
    exp = sorted(cert.expected.items())
    one = dumps(certify(cert.sets, exp, threads=1, oracle_budget=0).to_json())
    four = dumps(certify(cert.sets, exp, threads=4, oracle_budget=0).to_json())
    assert one == four


def test_certify_kernel_only_above_oracle_budget():
    cert = certify([IntegerSet([0, 1, 4])] * 2, [(3, (1, 1))], oracle_budget=1)
    assert cert.methods[3] == "kernel"


def test_certify_rejects_mixed_ambient():
    with pytest.raises(DomainError):
        certify([IntegerSet([0]), ModpVectorSet(2, 1, [(1,)])], [(1, (1, 1))])
    with pytest.raises(DomainError):
        certify([IntegerSet([0])], [(1, (1, 2))])


def test_probe_interval():
    seq = khovanskii_probe(IntegerSet.interval(0, 5), 8)
    assert seq.sizes == [5 * h + 1 for h in range(1, 9)]
    assert seq.stabilization_index == 1 and seq.slope == 5


def test_probe_Y14():
    seq = khovanskii_probe(IntegerSet([0, 1, 3, 4]), 10)
    assert seq.sizes[:4] == [4, 9, 13, 17]
    assert seq.slope == 4 and seq.stabilization_index == 2


def test_probe_too_short():
    seq = khovanskii_probe(IntegerSet([0, 1, 20]), 4)
    assert seq.stabilization_index is None and seq.slope is None


def test_probe_csv_and_json():
    seq = khovanskii_probe(IntegerSet([0, 2, 3]), 6)
    assert seq.to_csv().splitlines()[:2] == ["h,size", "1,3"]
    assert seq.to_json()["h_max"] == 6


def test_probe_modp_degree_zero():
    a = ModpVectorSet(3, 2, [(0, 0), (1, 0), (0, 1)])
    seq = khovanskii_probe(a, 8)
    assert seq.degree == 0 and seq.slope == 9


def test_probe_is_nondecreasing_with_zero():
    rng = random.Random(3)
    for _ in range(20):
        a = IntegerSet({0, *rng.sample(range(1, 30), 4)})
        s = khovanskii_probe(a, 12).sizes
        assert all(x <= y for x, y in zip(s, s[1:]))


def test_size_sequence_detection_rule():
    seq = SizeSequence("synthetic", [1, 4, 9, 12, 15, 18, 21])
    assert seq.stabilization_index == 3 and seq.slope == 3
    assert SizeSequence("short", [1, 4, 9, 12, 15]).stabilization_index is None


def test_extension_order_stabilizes_to_tau_inf():
    cert = construct_extension(3, 2, [(1, 1, 2), (3, 2, 1)], (2, 3, 1))
    orders = order_sequence(cert.sets, range(3, 8))
    assert all(o == (2, 3, 1) for o in orders.values())
