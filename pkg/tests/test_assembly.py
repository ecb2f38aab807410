import itertools
import random

import pytest

from sumset_orders.assembly import (AssemblyPlan, GroupSpec, construct_extension, construct_int,
                                    construct_modp, embed_factors, freiman_embed, integer_plan,
                                    make_plan, materialize_product, modp_plan, n_p, product_sizes,
                                    reduce_group, select_multiplicities)
from sumset_orders.blocks import choose_X_family, choose_Y_family, choose_Z_family, choose_w_extension
from sumset_orders.core import (IntegerSet, all_permutations, hfold_int, hfold_modp, hfold_points,
                                relative_order)
from sumset_orders.errors import BudgetExceeded, DomainError


# -- multiplicities -----------------------------------------------------------

def test_mu_top_fold_is_one():
    fams = [choose_Y_family(3, h) for h in (1, 2, 3)]
    assert select_multiplicities(fams)[-1] == 1


def test_mu_X_n2_H2_exact():
    fams = [choose_X_family(2, 1), choose_X_family(2, 2)]
    mu = select_multiplicities(fams)
    assert mu == [3, 1]
    # the fold-1 chain must outweigh the fold-1 spread of the fold-2 family, and barely
    lo, hi = fams[0].sizes(1)
    spread = fams[1].sizes(1)
    assert hi ** mu[0] * min(spread) > lo ** mu[0] * max(spread)
    assert not hi ** (mu[0] - 1) * min(spread) > lo ** (mu[0] - 1) * max(spread)


def test_mu_Z_families_all_one():
    H = 3
    w = choose_w_extension(3, H)
    fams = [choose_Z_family(3, h, H, w) for h in range(1, H + 1)]
    assert select_multiplicities(fams) == [1, 1, 1]


def test_unsaturated_lower_family_rejected():
    # a Y family for fold 2 placed at position 1: its fold-2 sizes differ
    with pytest.raises(DomainError):
        select_multiplicities([choose_Y_family(2, 2), choose_Y_family(2, 2)])


def test_plan_total_dim_counts_coordinates():
    plan = modp_plan(2, 2, 2)
    assert plan.mu == [3, 1]
    assert plan.total_dim == 3 * 2 + 1 * 6
    assert n_p(2, 2, 2) == 12


# -- product sizes ------------------------------------------------------------

def test_product_sizes_H1_is_reordered_block_sizes():
    fam = choose_Y_family(3, 1)
    plan = make_plan([fam], [(3, 1, 2)])
    assert product_sizes(plan, 1) == [fam.sizes(1)[2], fam.sizes(1)[0], fam.sizes(1)[1]]


def test_product_sizes_follow_sigma_random_plans():
    rng = random.Random(0)
    for _ in range(15):
        n, H = rng.randint(2, 4), rng.randint(1, 3)
        fams = [choose_Y_family(n, h) for h in range(1, H + 1)]
        sig = [rng.choice(all_permutations(n)) for _ in range(H)]
        plan = make_plan(fams, sig)
        for h in range(1, H + 1):
            assert relative_order(product_sizes(plan, h)) == sig[h - 1]


def test_product_formula_on_materialized_tiny_plan():
    fams = [choose_Y_family(2, 1), choose_Y_family(2, 2)]
    plan = AssemblyPlan(2, 2, [(1, 2), (2, 1)], fams, [1, 1])
    for k in (1, 2):
        a = materialize_product(plan, k)
        for h in (1, 2):
            assert len(hfold_points(a, h)) == product_sizes(plan, h)[k - 1]


def test_materialize_product_modp():
    plan = modp_plan(2, 1, 3, [(2, 1)])
    for k in (1, 2):
        a = materialize_product(plan, k)
        assert len(hfold_modp(a, 1)) == product_sizes(plan, 1)[k - 1]


# -- embedding ----------------------------------------------------------------

def test_freiman_embed_examples():
    assert list(freiman_embed([(2, 1)], 5, 1)) == [7]
    assert list(freiman_embed([(3,), (0,), (5,)], 11, 2)) == [0, 3, 5]


def test_freiman_embed_preserves_2fold_size():
    rng = random.Random(4)
    for _ in range(30):
        pts = {(rng.randint(0, 3), rng.randint(0, 3)) for _ in range(rng.randint(1, 8))}
        emb = freiman_embed(pts, 9, 2)
        naive = {(a[0] + b[0], a[1] + b[1]) for a in pts for b in pts}
        assert len(hfold_int(emb, 2)) == len(naive)


def test_freiman_embed_rejects_carries():
    with pytest.raises(DomainError):
        freiman_embed([(5, 0)], 9, 2)


def test_embed_factors_matches_pointwise():
    s = [IntegerSet([0, 1, 3]), IntegerSet([0, 2])]
    pts = list(itertools.product(*[list(x) for x in s]))
    assert embed_factors(s, 7) == freiman_embed(pts, 7, 1)


# -- integer and mod-p constructions ------------------------------------------

def test_construct_int_n2_H2_brute():
    cert = construct_int(2, 2, [(1, 2), (2, 1)], brute=True)
    assert cert.passed, cert.failures()
    assert all(m == "closed-form+brute-force" for m in cert.methods.values())


def test_construct_int_n1():
    cert = construct_int(1, 3, [(1,)] * 3)
    assert cert.passed


def test_construct_int_rejects_non_permutation():
    with pytest.raises(DomainError):
        construct_int(2, 1, [(1, 1)])


@pytest.mark.parametrize("sig", list(itertools.product(all_permutations(3), repeat=2))[:6])
def test_construct_int_n3_H2(sig):
    assert construct_int(3, 2, sig).passed


def test_construct_int_brute_over_budget():
    with pytest.raises(BudgetExceeded):
        construct_int(2, 2, [(1, 2), (2, 1)], brute=True, budget=10)


def test_construct_modp():
    cert = construct_modp(2, 2, [(2, 1), (1, 2)], 2)
    assert cert.passed and cert.generator["N_p"] == 12
    assert construct_modp(1, 2, [(1,), (1,)], 3).passed
    small = construct_modp(2, 1, [(2, 1)], 3, brute=True)
    assert small.passed and small.methods[1] == "closed-form+brute-force"
    with pytest.raises(DomainError):
        construct_modp(2, 1, [(1, 2)], 4)


# -- extension ----------------------------------------------------------------

def test_construct_extension_distinct_orders():
    cert = construct_extension(2, 2, [(2, 1), (1, 2)], (1, 2), brute=True)
    assert cert.passed, cert.failures()
    assert sorted(cert.sizes) == [1, 2, 3, 4, 5]


def test_construct_extension_tie():
    cert = construct_extension(2, 1, [(1, 1)], (2, 1), brute=True)
    assert cert.passed
    assert cert.sizes[1][0] == cert.sizes[1][1]
    above = [hfold_int(a, 2) for a in cert.sets]
    assert all(s.is_interval() and s.min == 0 for s in above)


def test_construct_extension_accepts_any_positive_ranks():
    cert = construct_extension(3, 1, [(10, 10, 40)], (7, 3, 5))
    assert cert.expected[1] == (1, 1, 2) and cert.expected[2] == (3, 1, 2)
    with pytest.raises(DomainError):
        construct_extension(2, 1, [(0, 1)], (1, 2))


# -- group reduction ----------------------------------------------------------

def test_reduce_group_paths():
    assert reduce_group(GroupSpec("infinite"), 2, 2).path == "cyclic"
    tor = reduce_group(GroupSpec("finite", (2,) * 1000), 2, 2)
    assert tor.path == "torsion" and tor.prime == 2 and tor.required_rank == 12
    assert reduce_group(GroupSpec("finite", (10 ** 6,)), 2, 2).path == "cyclic"
    small = reduce_group(GroupSpec("finite", (3, 3, 3)), 2, 2)
    assert small.path == "too-small" and small.threshold_exponent is not None


def test_group_spec_validation():
    with pytest.raises(DomainError):
        GroupSpec("finite", (1,))
    with pytest.raises(DomainError):
        GroupSpec("weird")


def test_certificate_json_is_deterministic():
    from sumset_orders.core import dumps
    a = dumps(construct_int(2, 2, [(1, 2), (2, 1)]).to_json())
    b = dumps(construct_int(2, 2, [(1, 2), (2, 1)]).to_json())
    assert a == b


def test_integer_plan_embedding_base():
    plan, base = integer_plan(2, 2)
    top = max(f.params[0][0].v for f in plan.families)
    assert base == 2 * top + 1
