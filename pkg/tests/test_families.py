from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import rationals
from movelab.domination import dominates, dominates_symmetric, p_max, sup_eps_down
from movelab.errors import ParameterOutOfRange, SizeExceeded
from movelab.families import (
    block_product,
    block_ratios_direct,
    cdf_dominated,
    claim3_threshold,
    conditioned_binomial,
    even_flips_enumerated,
    first_ratio,
    hajek_block,
    mixture_example,
    nonrigid_block,
    nonrigid_block_counts,
    paired_doubling,
    parity_after_noise,
    parity_even_probability,
    redominates_fair,
    redominates_fair_int,
    second_ratio,
    tensor,
    third_ratio,
    thinned_block_counts,
)
from movelab.measure import (
    NoiseChannel,
    apply_channel,
    count_distribution,
    ground,
    popcount,
    product_measure,
    thicken,
    thin,
)
from movelab.tolerance import insertion_tolerance

HALF = F(1, 2)


def test_parity_block_k2():
    assert list(hajek_block(2).probs) == [F(1, 3), F(1, 6), F(1, 6), F(1, 3)]


@pytest.mark.parametrize("k", range(2, 11))
def test_parity_block_statistics(k):
    mu = hajek_block(k)
    assert parity_even_probability(mu) == F(2, 3)
    if k <= 6:
        assert all(mu.marginal(i) == HALF for i in range(k))


def test_parity_after_noise_examples():
    assert parity_after_noise(5, F(1, 4), 0) == 1
    assert all(parity_after_noise(5, HALF, l) == HALF for l in range(1, 6))
    assert parity_after_noise(3, F(1, 4), 3) == F(9, 16)
    with pytest.raises(ParameterOutOfRange):
        parity_after_noise(3, F(3, 4), 2)
    with pytest.raises(ParameterOutOfRange):
        parity_after_noise(3, F(1, 4), 4)


@settings(max_examples=40)
@given(rationals(0, HALF), st.integers(0, 10))
def test_parity_after_noise_matches_enumeration(eps, l):
    assert parity_after_noise(10, eps, l) == even_flips_enumerated(eps, l)


@pytest.mark.parametrize("l", range(0, 8))
def test_parity_of_block_with_flipped_sites(l):
    # flip each of the first l sites independently with probability eps
    eps = F(1, 4)
    k = max(l, 2)
    mu = hajek_block(k)
    even = F(0)
    for x in range(1 << k):
        for f in range(1 << l):
            w = eps ** popcount(f) * (1 - eps) ** (l - popcount(f))
            if popcount(x ^ f) % 2 == 0:
                even += mu.probs[x] * w
    q = parity_after_noise(k, eps, l)
    assert even == F(2, 3) * q + F(1, 3) * (1 - q)


def test_nonrigid_block_k2():
    assert list(nonrigid_block(2).probs) == [0, F(1, 8), F(1, 8), F(3, 4)]
    assert list(nonrigid_block(3, base=F(1, 3)).probs)[1] == F(1, 81)
    with pytest.raises(ParameterOutOfRange):
        nonrigid_block(3, base=1)


@pytest.mark.parametrize("k", range(2, 13))
def test_fair_product_below_block(k):
    mu = nonrigid_block(k)
    fair = product_measure(ground(k), HALF)
    if k <= 8:
        cert = dominates(fair, mu)
        assert cert.dominated and cert.check(fair, mu)
    assert dominates_symmetric(count_distribution(fair), nonrigid_block_counts(k))


def test_switching_coupling_is_valid():
    # all-zeros goes to a uniform singleton, everything else to all-ones
    k = 4
    fair = product_measure(ground(k), HALF)
    mu = nonrigid_block(k)
    full = (1 << k) - 1
    coupling = {}
    for x in range(1 << k):
        if x == 0:
            for i in range(k):
                coupling[(0, 1 << i)] = fair.probs[0] / k
        else:
            coupling[(x, full)] = fair.probs[x]
    first = {x: 0 for x in range(1 << k)}
    second = {y: 0 for y in range(1 << k)}
    for (x, y), w in coupling.items():
        assert x & y == x
        first[x] += w
        second[y] += w
    assert all(first[x] == fair.probs[x] for x in first)
    assert all(second[y] == mu.probs[y] for y in second)


def test_first_ratio():
    assert first_ratio(6, F(1, 10)) == F(15625, 40960)
    assert first_ratio(6, 0.1) == pytest.approx(0.3814697265625, abs=1e-12)
    vals = [first_ratio(k, F(1, 10)) for k in range(4, 30)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert first_ratio(14, F(1, 10)) > 1


def test_block_p_max_trend():
    vals = [p_max(nonrigid_block(k), tol=1e-9) for k in range(2, 13)]
    assert all(v >= HALF for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert abs(float(vals[0]) - 3**0.5 / 2) < 1e-8
    # past the first-ratio crossover the block cannot dominate pi_{1/2 + delta}
    for delta in (F(1, 10), F(1, 5), F(1, 4)):
        k = next(k for k in range(2, 60) if first_ratio(k, delta) > 1)
        assert p_max(nonrigid_block(k), tol=1e-9) < HALF + delta


def test_conditioned_binomial_examples():
    assert conditioned_binomial(2, HALF, 1).probs == (0, F(2, 3), F(1, 3))
    assert conditioned_binomial(2, F(3, 4), 1).probs == (0, F(2, 5), F(3, 5))
    assert conditioned_binomial(3, F(1, 3), 0).probs == (F(8, 27), F(12, 27), F(6, 27), F(1, 27))
    assert cdf_dominated(conditioned_binomial(2, HALF, 1), conditioned_binomial(2, F(3, 4), 1))
    with pytest.raises(ParameterOutOfRange):
        conditioned_binomial(2, 1, 1)
    with pytest.raises(ParameterOutOfRange):
        conditioned_binomial(2, HALF, 3)


def test_conditioned_binomial_ordering_sweep():
    grid = [F(i, 8) for i in range(1, 8)]
    for k in range(1, 13):
        for m in range(k + 1):
            laws = [conditioned_binomial(k, p, m) for p in grid]
            for lo, hi in zip(laws, laws[1:]):
                assert cdf_dominated(lo, hi)


def test_mixture_example():
    q, p = F(1, 4), HALF
    for n in range(1, 5):
        nu, mu = mixture_example(p, q, n)
        assert dominates(nu, mu).dominated
        assert abs(sup_eps_down(nu, mu) - (1 - q / p)) <= F(1, 10**9)
        assert p_max(mu, tol=1e-12) <= 1 - 2 ** (-1 / n) + 1e-12
    with pytest.raises(ParameterOutOfRange):
        mixture_example(F(1, 4), HALF, 3)


def test_paired_doubling():
    mu_e, mu_o, mix = paired_doubling(2)
    assert list(mu_e.probs) == [HALF, 0, 0, HALF]
    mu_e, mu_o, mix = paired_doubling(6)
    for mu in (mu_e, mu_o, mix):
        assert all(mu.marginal(i) == HALF for i in range(6))
    assert insertion_tolerance(paired_doubling(4)[2]).insertion == 0
    with pytest.raises(ParameterOutOfRange):
        paired_doubling(5)
    with pytest.raises(SizeExceeded):
        paired_doubling(40)


def test_paired_doubling_rethickening_by_grid():
    eps = F(1, 10)
    mu_e = paired_doubling(6)[0]
    grid = [F(1, 2**j) for j in range(1, 12)]
    found = [d for d in grid if dominates(apply_channel(mu_e, NoiseChannel(eps * (1 - d), d)), mu_e).dominated]
    assert found
    d = found[0]
    # the pair-level criterion: P(max of a noised pair is 1) < 1/2
    pair_max = HALF * (1 - (eps * (1 - d)) ** 2) + HALF * (1 - (1 - d) ** 2)
    assert pair_max < HALF
    assert apply_channel(mu_e, NoiseChannel(eps * (1 - d), d)) == thicken(thin(mu_e, eps), d)


def test_tensor_and_block_product():
    a, b = hajek_block(2), nonrigid_block(2)
    t = tensor(a, b)
    assert t["0011"] == a["00"] * b["11"]
    assert block_product([2, 2], family="blocks").all_ones == F(9, 16)
    assert insertion_tolerance(block_product([2, 3])).insertion == F(1, 3)
    with pytest.raises(ValueError):
        block_product([2], family="other")


def test_block_product_p_max_is_min_of_factors():
    tol = 1e-9
    for family in ("hajek", "blocks"):
        parts = [p_max(block_product([k], family), tol=tol) for k in (2, 3)]
        joint = p_max(block_product([2, 3], family), tol=tol)
        assert abs(float(joint) - float(min(parts))) < 2e-9
        below = product_measure(ground(5), min(parts) - F(1, 10**6))
        above = product_measure(ground(5), min(parts) + F(1, 10**6))
        assert dominates(below, block_product([2, 3], family)).dominated
        assert not dominates(above, block_product([2, 3], family)).dominated


def test_boundary_ratios():
    eps = F(1, 4)
    for k in (5, 10, 20):
        assert block_ratios_direct(k, eps) == (second_ratio(k, eps), third_ratio(k, eps))
    assert abs(float(second_ratio(40, eps)) - 0.25) < 1e-11
    assert float(third_ratio(40, eps)) < 0.025
    assert float(third_ratio(80, eps)) < float(third_ratio(40, eps))


def test_thinned_counts_match_full_measure():
    eps = F(1, 3)
    for k in range(2, 7):
        assert thinned_block_counts(k, eps) == count_distribution(thin(nonrigid_block(k), eps))


def test_redomination_routes_agree():
    for eps in (F(1, 4), HALF, F(9, 10)):
        for k in range(2, 40):
            assert redominates_fair(k, eps) == redominates_fair_int(k, eps)
    # and the count reduction agrees with the full flow for small k
    for k in range(2, 8):
        full = dominates(product_measure(ground(k), HALF), thin(nonrigid_block(k), HALF)).dominated
        assert full == redominates_fair(k, HALF)


def test_redomination_threshold():
    assert claim3_threshold(F(1, 4), k_max=60, verify_to=200) == 2
    assert not redominates_fair_int(2, HALF)
