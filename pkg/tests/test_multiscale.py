import itertools

import pytest

from sumset_orders.core import IntegerSet, all_permutations, hfold_int, relative_order
from sumset_orders.errors import BudgetExceeded, DomainError
from sumset_orders.multiscale import (ScaleSystem, build_multiscale_set, canonical_gamma,
                                      choose_scale_system, construct_multiscale, empirical_lemma43,
                                      exponent_closed_form, exponent_E, full_expansion_check,
                                      gap_classes, union_sumset_bounds)

PAPER_ROW = (0, 1, 7, 9, 10, 20, 30, 32)


def test_gap_classes_example():
    part = gap_classes(PAPER_ROW, 3)
    assert [(c.first, c.last) for c in part.classes] == [(0, 1), (2, 4), (5, 5), (6, 7)]
    mid = part.classes[1]
    assert (mid.c_min, mid.c_max) == (7, 10)


def test_gap_classes_gamma_one():
    assert len(gap_classes((0, 3, 6, 10), 1)) == 4
    with pytest.raises(DomainError):
        gap_classes((0, 2, 6), 1)


@pytest.mark.parametrize("row", [(0, 3), (0, 4, 8), (0, 1, 4)])
def test_gap_classes_rejects_forbidden_gap(row):
    with pytest.raises(DomainError):
        gap_classes(row, 3)


def test_exponent_E_examples():
    assert exponent_E(PAPER_ROW, 3) == 22
    assert exponent_E((0, 1, 2), 5) == 2 + 5 + 1
    assert exponent_E((0,), 7) == 8


def test_scale_system_checks_all_pairs():
    # adjacent gaps are fine but 0 and 3 differ by exactly gamma
    with pytest.raises(DomainError):
        ScaleSystem(((0, 1, 3),), (3,))
    ScaleSystem(((0, 1, 2),), (3,))


def test_scale_system_validation():
    with pytest.raises(DomainError):
        ScaleSystem(((1, 5),), (2,))
    with pytest.raises(DomainError):
        ScaleSystem(((0, 5), (0, 5, 10)), (2,))
    with pytest.raises(DomainError):
        ScaleSystem(((0, 5),), (3, 2))


def test_choose_scale_system_n2_R1():
    s = choose_scale_system(2, 1, [(1, 2)])
    assert s.gamma == (20 ** 10,)
    assert s.alpha == ((0, 20 ** 9), (0, 2 * 20 ** 9))
    assert s.d == 1


def test_class_counts_and_closed_form():
    for n, R in [(2, 2), (3, 2), (2, 3)]:
        for sig in itertools.islice(itertools.product(all_permutations(n), repeat=R), 8):
            s = choose_scale_system(n, R, sig)
            assert s.d == 2 ** R - 1
            for r in range(1, R + 1):
                for k in range(1, n + 1):
                    assert len(s.partition(r, k)) == 2 ** (R - r)
                    assert s.E(r, k) == exponent_closed_form(n, R, sig, r, k)
                assert relative_order(s.exponents(r)) == sig[r - 1]


def test_scale_system_json_roundtrip():
    s = choose_scale_system(3, 2, [(1, 2, 3), (3, 1, 2)])
    obj = s.to_json()
    assert all(isinstance(g, str) for g in obj["gamma"])
    assert ScaleSystem.from_json(obj) == s


def test_build_multiscale_set_examples():
    assert list(build_multiscale_set(4, (0, 3))) == [0, 1, 2, 3, 4, 64, 128, 192, 256]
    assert build_multiscale_set(6, (0,)) == IntegerSet.interval(0, 6)
    a = build_multiscale_set(5, (0, 2, 5))
    assert len(a) <= 3 * 6


def test_build_multiscale_set_budget_never_expands_power():
    with pytest.raises(BudgetExceeded) as e:
        build_multiscale_set(4, (0, 10 ** 12))
    assert isinstance(e.value.predicted, str)


def test_union_bounds_examples():
    a = IntegerSet([0, 3, 4])
    b = union_sumset_bounds([a], 3)
    assert b.lower == b.upper == len(hfold_int(a, 3))
    b = union_sumset_bounds([IntegerSet([0, 1]), IntegerSet([0, 100])], 2)
    assert b.lower <= b.middle <= b.upper and b.middle == len(hfold_int(IntegerSet([0, 1, 100]), 2))
    with pytest.raises(DomainError):
        union_sumset_bounds([IntegerSet([1, 2])], 2)


def test_full_expansion_examples():
    assert full_expansion_check(IntegerSet.interval(0, 3), IntegerSet([0, 100, 200]))
    assert not full_expansion_check(IntegerSet([0, 1]), IntegerSet([0, 1]))


def test_lemma43_single_class():
    rep = empirical_lemma43((0,), 2, [4, 6])
    for row in rep.rows:
        assert row.size == row.M ** 3 + 1 and row.predicted == row.M ** 3


def test_lemma43_desk_sweep():
    rep = empirical_lemma43((0, 4), 2, [4, 6, 8])
    assert len(rep.partition) == 2
    assert rep.sandwiched() and rep.bounded(4)
    assert rep.to_csv().splitlines()[0] == "M,h,size,predicted,ratio,lower,upper"


def test_lemma43_rejects_dichotomy_violation():
    with pytest.raises(DomainError):
        empirical_lemma43((0, 3), 2, [4])


def test_lemma43_budget_names_M():
    with pytest.raises(BudgetExceeded) as e:
        empirical_lemma43((0, 4), 2, [4, 60], budget=10 ** 7)
    assert "M=60" in str(e.value)


def test_construct_multiscale_symbolic():
    for sig in itertools.product(all_permutations(2), repeat=2):
        assert construct_multiscale(2, 2, sig).passed


def test_construct_multiscale_concrete_custom():
    system = ScaleSystem(((0, 4), (0, 1)), (2,))
    cert = construct_multiscale(2, 1, [(2, 1)], M=4, system=system)
    assert cert.passed, cert.failures()
    assert cert.sizes[1][0] > cert.sizes[1][1]
    wrong = construct_multiscale(2, 1, [(1, 2)], M=4, system=system)
    assert not wrong.passed


def test_construct_multiscale_concrete_canonical_refused():
    with pytest.raises(BudgetExceeded) as e:
        construct_multiscale(2, 1, [(1, 2)], M=4)
    assert "canonical schedule" in str(e.value)


def test_canonical_gamma_digits():
    assert len(str(canonical_gamma(3, 3)[-1])) == 45
    assert len(str(canonical_gamma(3, 30)[-1])) > 400
