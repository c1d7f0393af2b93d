from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings

from conftest import exact_measures, rationals
from movelab.domination import dominates
from movelab.errors import ModeMismatch, NonInvertibleChannel, ParameterOutOfRange
from movelab.extraction import (
    choose_delta,
    composite_channel,
    corollary_check,
    delta_bound,
    extract_both,
    extract_down,
    extract_up,
    extraction_feasible,
    max_extract_eps,
    rethicken_dominated,
    rigidity_sufficient_condition,
)
from movelab.families import hajek_block, paired_doubling
from movelab.measure import (
    NoiseChannel,
    SignedVector,
    apply_channel,
    delta_zero,
    from_entries,
    ground,
    popcount,
    product_measure,
    support_is_up_set,
    thicken,
    thin,
)
from movelab.tolerance import insertion_tolerance


def pi(n, p):
    return product_measure(ground(n), p)


def literal_extract_up(mu, eps):
    """The signed inversion formula summed directly over pairs t <= s."""
    n = mu.n
    out = []
    for s in range(1 << n):
        acc = F(0)
        for t in range(1 << n):
            if t & s == t:
                acc += (-eps) ** (popcount(s) - popcount(t)) * (1 - eps) ** (popcount(t) - n) * mu.probs[t]
        out.append(acc)
    return out


@settings(max_examples=60)
@given(exact_measures(max_n=4), rationals(0, F(11, 12)))
def test_matches_literal_double_sum(mu, eps):
    assert list(extract_up(mu, eps).probs) == literal_extract_up(mu, eps)


@settings(max_examples=40)
@given(exact_measures(max_n=6), rationals(0, F(11, 12)))
def test_round_trip(nu, eps):
    assert extract_up(thicken(nu, eps), eps) == nu
    assert extract_down(thin(nu, eps), eps) == nu


@settings(max_examples=40)
@given(exact_measures(max_n=5), rationals(0, F(11, 12)))
def test_forward_check_even_when_signed(mu, eps):
    nu = extract_up(mu, eps)
    assert isinstance(nu, SignedVector)
    assert sum(nu.probs) == 1
    assert apply_channel(nu, NoiseChannel(0, eps)) == mu


@settings(max_examples=40)
@given(exact_measures(max_n=4), rationals(0, F(1, 2)), rationals(0, F(1, 2)))
def test_two_sided_round_trip(mu, eps, delta):
    if eps + delta >= 1:
        return
    nu = extract_both(mu, eps, delta)
    assert apply_channel(nu, NoiseChannel(eps, delta)) == mu


def test_zero_eps_is_identity():
    mu = hajek_block(3)
    assert extract_up(mu, 0) == mu
    assert extract_down(mu, 0) == mu
    assert extract_both(mu, 0, 0) == mu


def test_products():
    p = F(2, 5)
    for eps in (F(0), F(1, 10), F(1, 4), p):
        assert extract_up(pi(3, p), eps) == pi(3, (p - eps) / (1 - eps))
    for eps in (F(1, 10), F(3, 5)):
        assert extract_down(pi(3, p), eps) == pi(3, p / (1 - eps))
    assert extract_both(pi(3, F(1, 2)), F(1, 4), F(1, 4)) == pi(3, F(1, 2))
    # past the boundary the inverse turns negative
    assert not extract_up(pi(3, p), F(1, 2)).is_nonnegative()


def test_down_extraction_of_all_zeros():
    d0 = delta_zero(ground(3))
    for eps in (F(1, 10), F(1, 2), F(9, 10)):
        assert extract_down(d0, eps) == d0


def test_outside_support_stays_zero():
    # support {011, 111, 101, 110...} up-set; the inverse vanishes off the support
    mu = from_entries(ground(3), {"011": "1/4", "111": "1/2", "101": "1/4"})
    nu = extract_up(mu, F(1, 5))
    assert all(nu.probs[x] == 0 for x in range(8) if mu.probs[x] == 0)


def test_parameter_errors():
    mu = pi(2, F(1, 2))
    with pytest.raises(ParameterOutOfRange):
        extract_up(mu, 1)
    with pytest.raises(ParameterOutOfRange):
        extract_up(mu, F(-1, 2))
    with pytest.raises(NonInvertibleChannel):
        extract_both(mu, F(1, 2), F(1, 2))
    with pytest.raises(NonInvertibleChannel):
        extract_both(mu, F(3, 4), F(1, 2))


def test_max_extract_eps_products():
    tol = F(1, 2**20)
    for p in (F(1, 3), F(1, 2), F(3, 4)):
        v = max_extract_eps(pi(3, p), "up", tol)
        assert v <= p < v + tol
        v = max_extract_eps(pi(3, p), "down", tol)
        assert v <= 1 - p < v + tol


def test_max_extract_eps_not_up_set():
    mu = from_entries(ground(2), {"01": "1/2", "10": "1/2"})
    assert max_extract_eps(mu, "up") == 0
    assert max_extract_eps(paired_doubling(4)[0], "up") == 0


def test_max_extract_eps_two_sided():
    tol = F(1, 2**20)
    # the symmetric channel fixes pi_{1/2}, so every eps < 1/2 works
    v = max_extract_eps(pi(2, F(1, 2)), "both", tol)
    assert F(1, 2) - tol <= v < F(1, 2)
    assert max_extract_eps(delta_zero(ground(2)), "both") == 0


def test_max_extract_eps_refuses_float():
    with pytest.raises(ModeMismatch):
        max_extract_eps(pi(2, F(1, 2)).to_float())


def test_hajek_extraction_positive_and_closed_form():
    tol = F(1, 10**9)
    for k in range(2, 7):
        j = k if k % 2 else k - 1
        v = max_extract_eps(hajek_block(k), "up", tol)
        assert v > 0
        assert abs(float(v) - (1 - 3 ** (-1 / j)) / 2) < 2e-9


@settings(max_examples=30)
@given(exact_measures(max_n=3), rationals(0, F(1, 2)), rationals(0, F(1, 2)))
def test_feasibility_monotone_in_eps(mu, e1, e2):
    lo, hi = sorted((e1, e2))
    if extraction_feasible(mu, hi, "up"):
        assert extraction_feasible(mu, lo, "up")


@settings(max_examples=150)
@given(exact_measures(max_n=4))
def test_extractable_iff_tolerant_iff_up_set(mu):
    a = max_extract_eps(mu, "up", F(1, 2**16)) > 0
    b = insertion_tolerance(mu).insertion > 0
    c = support_is_up_set(mu)
    assert a == b == c


# -- channel composition -------------------------------------------------------

GRID = [F(0), F(1, 4), F(1, 3), F(1, 2), F(1)]


@settings(max_examples=20)
@given(exact_measures(max_n=4))
def test_composite_channel_identity(mu):
    for a, e, d in product(GRID, GRID, GRID):
        three = thicken(thin(thicken(mu, a), e), d)
        assert three == apply_channel(mu, composite_channel(a, e, d))


def test_delta_bound():
    for a, e in product([F(1, 5), F(1, 2), F(9, 10)], [F(1, 10), F(1, 2), F(1)]):
        b = delta_bound(a, e)
        up = lambda d: a * (1 - e) + a * e * d + (1 - a) * d  # noqa: E731
        assert up(b) == a
        d = choose_delta(a, e)
        assert 0 < d < b and up(d) < a


def test_rethicken_from_extraction_level():
    # pi_{1/2} = (pi_{1/3})^(+,1/4); any eps then admits the derived delta
    mu = pi(3, F(1, 2))
    got = rigidity_sufficient_condition(mu, [F(1, 10), F(1, 2)])
    for eps, d in got.items():
        assert d is not None and d > 0
        assert rethicken_dominated(mu, eps, d)
    alpha = max_extract_eps(mu, "up", F(1, 2**20))
    assert got[F(1, 10)] == choose_delta(alpha, F(1, 10))


def test_rethicken_none_without_all_ones():
    mu = from_entries(ground(2), {"00": "1/2", "10": "1/2"})
    got = rigidity_sufficient_condition(mu, [F(1, 4)], delta_grid=[F(1, 8), F(1, 64)])
    assert got == {F(1, 4): None}


def test_paired_doubling_rethickening():
    mu_e = paired_doubling(6)[0]
    got = rigidity_sufficient_condition(mu_e, [F(1, 10)])
    d = got[F(1, 10)]
    assert d is not None and rethicken_dominated(mu_e, F(1, 10), d)


# -- the movability corollary ------------------------------------------------------


def test_corollary_on_products():
    r = corollary_check(pi(3, F(1, 4)), pi(3, F(1, 2)))
    assert r["hypotheses"] and r["holds"] and r["sup_eps_up"] > 0


def test_corollary_vacuous_without_extraction():
    mu_e = paired_doubling(4)[0]
    r = corollary_check(thin(mu_e, F(1, 4)), mu_e)
    assert r["extraction_level"] == 0 and not r["hypotheses"] and r["holds"]


@settings(max_examples=12)
@given(exact_measures(max_n=3, zeros=False), rationals(F(1, 12), F(1, 2)), rationals(F(1, 12), F(1, 2)))
def test_corollary_random_pairs(mu, a, e):
    mu2 = thicken(mu, a)
    mu1 = thin(mu2, e)
    r = corollary_check(mu1, mu2, tol=F(1, 2**12))
    assert r["hypotheses"]
    assert r["holds"]
    assert dominates(thicken(mu1, r["sup_eps_up"]), mu2).dominated
