import itertools
import json

import numpy as np
import pytest

from sumset_orders import _bitset
from sumset_orders.core import (IntegerSet, ModpVectorSet, PointSet, all_permutations,
                                cartesian_product, dilate, dumps, hfold_int, hfold_modp,
                                hfold_points, matches_pattern, minkowski_sum, parse_pattern,
                                relative_order, set_from_json, set_to_json)
from sumset_orders.errors import BudgetExceeded, DomainError


def naive_sum(a, b):
    return sorted({x + y for x in a for y in b})


def naive_hfold(a, h):
    acc = {0}
    for _ in range(h):
        acc = {x + y for x in acc for y in a}
    return sorted(acc)


# -- integer sets -------------------------------------------------------------

def test_integer_set_normalizes_and_is_immutable():
    a = IntegerSet([3, 1, 3, 0])
    assert list(a) == [0, 1, 3]
    assert a.min == 0 and a.max == 3 and len(a) == 3
    assert 1 in a and 2 not in a
    with pytest.raises(ValueError):
        a.elements[0] = 5


def test_integer_set_rejects_negative():
    with pytest.raises(DomainError):
        IntegerSet([-1, 2])


def test_interval_and_shift():
    assert list(IntegerSet.interval(2, 5)) == [2, 3, 4, 5]
    assert IntegerSet.interval(0, 4).is_interval()
    assert not IntegerSet([0, 2]).is_interval()
    assert list(IntegerSet([0, 2]).shift(3)) == [3, 5]


@pytest.mark.parametrize("a, b, want", [
    ([0], [0, 5], [0, 5]),
    ([0, 1, 3, 4], [0, 1, 3, 4], list(range(9))),
    ([0, 1], [0, 10], [0, 1, 10, 11]),
])
def test_minkowski_examples(a, b, want, kernels):
    assert list(minkowski_sum(IntegerSet(a), IntegerSet(b), kernels=kernels)) == want


def test_hfold_examples(kernels):
    a = IntegerSet([0, 1, 3, 4])
    assert list(hfold_int(a, 2, kernels=kernels)) == list(range(9))
    assert list(hfold_int(a, 0)) == [0]
    assert hfold_int(a, 1) == a


def test_hfold_against_naive(kernels):
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = sorted(set(rng.integers(0, 60, size=rng.integers(1, 9)).tolist()))
        h = int(rng.integers(0, 6))
        assert list(hfold_int(IntegerSet(a), h, kernels=kernels)) == naive_hfold(a, h)


def test_hfold_nonzero_minimum(kernels):
    a = IntegerSet([5, 7, 12])
    assert list(hfold_int(a, 3, kernels=kernels)) == naive_hfold([5, 7, 12], 3)


def test_hfold_budget():
    with pytest.raises(BudgetExceeded) as e:
        hfold_int(IntegerSet([0, 1000]), 10, budget=100)
    assert e.value.predicted == 10 * 1000 + 1


def test_dilate():
    assert list(dilate(IntegerSet([0, 1, 2]), 5)) == [0, 5, 10]
    a = IntegerSet([0, 3, 4])
    assert dilate(a, 1) == a
    assert len(dilate(a, 7)) == len(a)
    with pytest.raises(DomainError):
        dilate(a, 0)


# -- bitset strategies --------------------------------------------------------

@pytest.mark.parametrize("strategy", [_bitset._sum_pairs, _bitset._sum_shifts, _bitset._sum_runs])
def test_every_strategy_is_exact(strategy, kernels):
    rng = np.random.default_rng(3)
    for _ in range(60):
        xs = sorted({0, *rng.integers(0, 300, size=rng.integers(1, 40)).tolist()})
        ys = sorted({0, *rng.integers(0, 300, size=rng.integers(1, 40)).tolist()})
        # add long runs so the dilation path sees varied lengths
        xs = sorted(set(xs) | set(range(100, 100 + int(rng.integers(0, 90)))))
        x, y = _bitset.BitSet.from_elements(xs), _bitset.BitSet.from_elements(ys)
        nbits = x.nbits + y.nbits - 1
        out = np.zeros(_bitset.nwords(nbits) + 1, dtype=np.uint64)
        strategy(x, y, out, kernels)
        got = _bitset.BitSet(out[:_bitset.nwords(nbits)], nbits).to_elements().tolist()
        assert got == naive_sum(xs, ys)


def test_runs_and_count():
    b = _bitset.BitSet.from_elements([0, 1, 2, 5, 63, 64, 65, 130])
    starts, ends = b.runs()
    assert starts.tolist() == [0, 5, 63, 130]
    assert ends.tolist() == [2, 5, 65, 130]
    assert b.run_count() == 4 and b.count() == 8


def test_interval_bitset():
    for length in (1, 63, 64, 65, 200):
        assert _bitset.BitSet.interval(length).to_elements().tolist() == list(range(length))


def test_backends_agree_on_hfold():
    from sumset_orders import _kernels
    backends = _kernels.backends()
    rng = np.random.default_rng(11)
    for _ in range(40):
        a = IntegerSet(sorted({0, *rng.integers(0, 500, size=12).tolist()}))
        results = [hfold_int(a, 7, kernels=k) for k in backends]
        assert all(r == results[0] for r in results)


# -- mod p --------------------------------------------------------------------

def test_modp_encoding_roundtrip():
    a = ModpVectorSet(3, 3, [(0, 1, 2), (2, 2, 2)])
    assert a.decode(a.encode((1, 0, 2))) == (1, 0, 2)
    assert a.vectors() == [(0, 1, 2), (2, 2, 2)]


def test_hfold_modp_examples(kernels):
    x12 = ModpVectorSet(2, 2, [(0, 0), (0, 1), (1, 0)])
    assert len(hfold_modp(x12, 2, kernels=kernels)) == 4
    assert hfold_modp(x12, 1, kernels=kernels) == x12
    zero = ModpVectorSet(3, 2, [(0, 0)])
    assert hfold_modp(zero, 5, kernels=kernels) == zero


def test_hfold_modp_against_naive(kernels):
    rng = np.random.default_rng(5)
    for p, t in [(2, 4), (3, 3), (5, 2)]:
        for _ in range(20):
            vecs = {tuple(rng.integers(0, p, size=t).tolist()) for _ in range(rng.integers(1, 5))}
            h = int(rng.integers(0, 5))
            acc = {(0,) * t}
            for _ in range(h):
                acc = {tuple((a + b) % p for a, b in zip(u, v)) for u in acc for v in vecs}
            got = hfold_modp(ModpVectorSet(p, t, vecs), h, kernels=kernels)
            assert set(got.vectors()) == acc


# -- products -----------------------------------------------------------------

def test_cartesian_product_sizes():
    a, b = IntegerSet([0, 1, 3]), IntegerSet([0, 2, 5, 6])
    assert len(cartesian_product(a, b)) == 12
    assert len(cartesian_product(a, IntegerSet([0]))) == len(a)


def test_cartesian_product_modp_and_mixed():
    a = ModpVectorSet(2, 1, [(0,), (1,)])
    b = ModpVectorSet(2, 2, [(0, 1)])
    prod = cartesian_product(a, b)
    assert prod.t == 3 and set(prod.vectors()) == {(0, 0, 1), (1, 0, 1)}
    with pytest.raises(DomainError):
        cartesian_product(a, IntegerSet([0]))


def test_hfold_of_product_is_product_of_hfolds():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = IntegerSet({0, *rng.integers(0, 7, size=3).tolist()})
        b = IntegerSet({0, *rng.integers(0, 7, size=3).tolist()})
        for h in range(1, 5):
            lhs = hfold_points(cartesian_product(a, b), h)
            rhs = cartesian_product(hfold_int(a, h), hfold_int(b, h))
            assert lhs == rhs


def test_point_set_roundtrip():
    p = PointSet(2, [(1, 2), (0, 0), (1, 2)])
    assert len(p) == 2


# -- orders -------------------------------------------------------------------

@pytest.mark.parametrize("values, want", [((5, 2, 9), (2, 1, 3)), ((7, 7, 3), (2, 2, 1)), ((4,), (1,))])
def test_relative_order(values, want):
    assert relative_order(values) == want


def test_relative_order_big_counts():
    big = 10 ** 400
    assert relative_order([big + 1, big, big + 1]) == (2, 1, 2)


@pytest.mark.parametrize("values, tau, want", [
    ((3, 8, 5), (1, 3, 2), True),
    ((3, 3, 5), (1, 1, 2), True),
    ((3, 4, 5), (1, 1, 2), False),
])
def test_matches_pattern(values, tau, want):
    assert matches_pattern(values, tau) is want


def test_matches_pattern_length_mismatch():
    with pytest.raises(DomainError):
        matches_pattern((1, 2), (1, 2, 3))


def test_parse_pattern_and_permutations():
    assert parse_pattern("3, 1,2") == (3, 1, 2)
    with pytest.raises(DomainError):
        parse_pattern("1,x")
    assert len(all_permutations(3)) == 6
    assert all(sorted(p) == [1, 2, 3] for p in all_permutations(3))


# -- serialization ------------------------------------------------------------

def test_set_json_roundtrip():
    for s in (IntegerSet([0, 4, 9]), ModpVectorSet(3, 2, [(1, 2), (0, 0)])):
        again = set_from_json(json.loads(dumps(set_to_json(s))))
        assert again == s


def test_set_from_json_rejects_unsorted():
    with pytest.raises(DomainError):
        set_from_json([3, 1])


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": [1, 2]}) == dumps({"a": [1, 2], "b": 1})
    assert dumps({}).endswith("\n")


def test_exhaustive_tiny_sets(kernels):
    for r in range(1, 5):
        for combo in itertools.combinations(range(7), r):
            for h in (2, 3):
                assert list(hfold_int(IntegerSet(combo), h, kernels=kernels)) == naive_hfold(combo, h)
