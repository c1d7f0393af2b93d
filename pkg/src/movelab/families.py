"""Example families: parity blocks, singleton/all-ones blocks, conditioned
binomials, two-component mixtures and paired doubling."""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct
from math import comb

import numpy as np

from .domination import dominates_symmetric
from .errors import ParameterOutOfRange, SizeExceeded
from .measure import (
    EXACT,
    FLOAT,
    CountDistribution,
    Measure,
    NoiseChannel,
    binomial_pmf,
    count_apply_channel,
    delta_zero,
    ground,
    infer_mode,
    mixture,
    n_cap,
    popcount,
    product_measure,
    scalar,
)


def _check_k(k, lo=2, mode=EXACT):
    if k < lo:
        raise ParameterOutOfRange(f"k={k} must be >= {lo}")
    if k > n_cap(mode):
        raise SizeExceeded(f"k={k} exceeds the size cap {n_cap(mode)}")


def hajek_block(k):
    """Uniform measure tilted toward even parity: 4/3 * 2^-k on even, 2/3 * 2^-k on odd."""
    _check_k(k)
    even, odd = Fraction(4, 3 * 2**k), Fraction(2, 3 * 2**k)
    return Measure(ground(k), [odd if popcount(x) & 1 else even for x in range(1 << k)], EXACT)


def parity_even_probability(mu):
    """P(number of 1s is even)."""
    return mu.mass(x for x in range(1 << mu.n) if popcount(x) % 2 == 0)


def parity_after_noise(k, eps, l):
    """P(an even number of l independent eps-flips occur) = 1/2 + 1/2 (1 - 2 eps)^l."""
    eps = scalar(eps, infer_mode(eps))
    if not 0 <= l <= k:
        raise ParameterOutOfRange(f"need 0 <= l <= k, got l={l}, k={k}")
    if not 0 <= eps <= Fraction(1, 2):
        raise ParameterOutOfRange(f"eps={eps} must lie in [0, 1/2]")
    half = Fraction(1, 2) if isinstance(eps, Fraction) else 0.5
    return half + half * (1 - 2 * eps) ** l


def even_flips_enumerated(eps, l):
    """Brute-force counterpart of parity_after_noise over all 2^l flip patterns."""
    total = 0 * eps
    for pattern in iproduct((0, 1), repeat=l):
        f = sum(pattern)
        if f % 2 == 0:
            total += eps**f * (1 - eps) ** (l - f)
    return total


def nonrigid_block(k, base=Fraction(1, 2)):
    """base^k spread over the k singletons, 1 - base^k on all ones."""
    _check_k(k)
    base = scalar(base, infer_mode(base))
    mode = EXACT if isinstance(base, Fraction) else FLOAT
    if not 0 < base < 1:
        raise ParameterOutOfRange(f"base={base} must lie in (0, 1)")
    probs = [0 * base] * (1 << k)
    for i in range(k):
        probs[1 << i] = base**k / k
    probs[(1 << k) - 1] = 1 - base**k
    if mode == FLOAT:
        probs = np.array(probs, dtype=np.float64)
    return Measure(ground(k), probs, mode)


def nonrigid_block_counts(k, base=Fraction(1, 2)):
    """Count law of nonrigid_block without building the 2^k table."""
    if k < 2:
        raise ParameterOutOfRange(f"k={k} must be >= 2")
    probs = [0 * base] * (k + 1)
    probs[1] = base**k
    probs[k] = 1 - base**k
    return CountDistribution(k, tuple(probs))


def conditioned_binomial(k, p, m):
    """Binomial(k, p) conditioned on being at least m."""
    p = scalar(p, infer_mode(p))
    if not 0 < p < 1:
        raise ParameterOutOfRange(f"p={p} must lie in (0, 1)")
    if not 0 <= m <= k:
        raise ParameterOutOfRange(f"need 0 <= m <= k, got m={m}, k={k}")
    pmf = binomial_pmf(k, p)
    z = sum(pmf[m:])
    if z <= 0:
        raise ParameterOutOfRange("conditioning event has zero probability")
    return CountDistribution(k, tuple(0 * p if j < m else pmf[j] / z for j in range(k + 1)))


def cdf_dominated(c1, c2):
    """c1 <= c2 in the usual stochastic order (tail comparison)."""
    return dominates_symmetric(c1, c2)


def mixture_example(p, q, n):
    """(nu, mu) = (1/2 pi_q + 1/2 delta_0, 1/2 pi_p + 1/2 delta_0) with 0 < q < p < 1."""
    mode = infer_mode(p, q)
    p, q = scalar(p, mode), scalar(q, mode)
    if not 0 < q < p < 1:
        raise ParameterOutOfRange(f"need 0 < q < p < 1, got q={q}, p={p}")
    g = ground(n)
    half = Fraction(1, 2) if mode == EXACT else 0.5
    z = delta_zero(g, mode)
    nu = mixture([half, half], [product_measure(g, q, mode), z])
    mu = mixture([half, half], [product_measure(g, p, mode), z])
    return nu, mu


def paired_doubling(n):
    """(mu_e, mu_o, mu) on n sites: mu_e pairs (0,1), (2,3), ... into equal fair
    bits; mu_o pairs (1,2), (3,4), ... and makes the sites 0 and n-1 independent
    fair bits; mu is their even mixture."""
    if n < 2 or n % 2:
        raise ParameterOutOfRange(f"n={n} must be a positive even integer")
    if n > n_cap(EXACT):
        raise SizeExceeded(f"n={n} exceeds the size cap {n_cap(EXACT)}")
    g = ground(n)

    def paired(blocks):
        probs = [Fraction(0)] * (1 << n)
        w = Fraction(1, 2 ** len(blocks))
        for bits in range(1 << len(blocks)):
            x = 0
            for b, sites in enumerate(blocks):
                if (bits >> b) & 1:
                    for s in sites:
                        x |= 1 << s
            probs[x] += w
        return Measure(g, probs, EXACT)

    mu_e = paired([(i, i + 1) for i in range(0, n, 2)])
    mu_o = paired([(0,)] + [(i, i + 1) for i in range(1, n - 1, 2)] + [(n - 1,)])
    half = Fraction(1, 2)
    return mu_e, mu_o, mixture([half, half], [mu_e, mu_o])


def tensor(mu1, mu2):
    """Independent product; mu1 occupies the low sites."""
    if mu1.mode != mu2.mode:
        from .errors import ModeMismatch

        raise ModeMismatch("tensor of measures in different modes")
    n1 = mu1.n
    if mu1.mode == EXACT:
        probs = [a * b for b in mu2.probs for a in mu1.probs]
    else:
        probs = np.outer(mu2.probs, mu1.probs).ravel()
    return Measure(ground(n1 + mu2.n), probs, mu1.mode, validate=False)


def block_product(ks, family="hajek", base=Fraction(1, 2)):
    """Product of independent blocks of sizes ``ks`` (hajek or nonrigid)."""
    if not ks:
        raise ParameterOutOfRange("need at least one block")
    if sum(ks) > n_cap(EXACT):
        raise SizeExceeded(f"total size {sum(ks)} exceeds the size cap {n_cap(EXACT)}")
    if family == "hajek":
        blocks = [hajek_block(k) for k in ks]
    elif family in ("blocks", "nonrigid"):
        blocks = [nonrigid_block(k, base) for k in ks]
    else:
        raise ValueError(f"unknown family {family!r}")
    out = blocks[0]
    for b in blocks[1:]:
        out = tensor(out, b)
    return out


# --------------------------------------------------------------------------
# the ratios used in the non-domination and re-domination arguments


def first_ratio(k, delta):
    """mu_k(A_k) / pi_{1/2+delta}(A_k), A_k = at most one 1, mu_k = nonrigid_block(k)."""
    half = Fraction(1, 2) if isinstance(delta, Fraction) else 0.5
    lo, hi = half - delta, half + delta
    return half**k / (lo**k + k * hi * lo ** (k - 1))


def second_ratio(k, eps):
    """P(no 1s) after eps-thinning nonrigid_block(k), relative to pi_{1/2}."""
    return eps + (2**k - 1) * eps**k


def third_ratio(k, eps):
    """P(at most one 1) after eps-thinning nonrigid_block(k), relative to pi_{1/2}."""
    return (1 + (2**k - 1) * (eps**k + k * eps ** (k - 1) * (1 - eps))) / (k + 1)


def thinned_block_counts(k, eps, base=Fraction(1, 2)):
    return count_apply_channel(nonrigid_block_counts(k, base), NoiseChannel.thinning(eps))


def block_ratios_direct(k, eps):
    """The two ratios recomputed from count laws rather than closed forms."""
    thinned = thinned_block_counts(k, eps)
    fair = CountDistribution(k, tuple(binomial_pmf(k, Fraction(1, 2))))
    return thinned.cdf(0) / fair.cdf(0), thinned.cdf(1) / fair.cdf(1)


def redominates_fair(k, eps):
    """pi_{1/2} <= nonrigid_block(k)^(-,eps), decided by the count reduction."""
    fair = CountDistribution(k, tuple(binomial_pmf(k, Fraction(1, 2))))
    return dominates_symmetric(fair, thinned_block_counts(k, eps))


def redominates_fair_int(k, eps):
    """Integer-scaled twin of redominates_fair for exact rational eps (fast for k in the hundreds).

    Both count laws are multiplied by (2b)^k, b the denominator of eps.
    """
    eps = Fraction(eps)
    a, b = eps.numerator, eps.denominator
    c = b - a
    fair = [comb(k, j) * b**k for j in range(k + 1)]
    thinned = [(2**k - 1) * comb(k, j) * c**j * a ** (k - j) for j in range(k + 1)]
    thinned[0] += a * b ** (k - 1)
    thinned[1] += c * b ** (k - 1)
    t_fair = t_thin = 0
    for j in range(k, 0, -1):
        t_fair += fair[j]
        t_thin += thinned[j]
        if t_fair > t_thin:
            return False
    return True


def claim3_threshold(eps, k_max=60, verify_to=500):
    """Smallest k0 <= k_max such that redominates_fair holds for every k in
    [k0, verify_to]; None if no such k0 exists."""
    test = redominates_fair_int if isinstance(eps, Fraction) else redominates_fair
    ok = {k: test(k, eps) for k in range(2, verify_to + 1)}
    k0 = None
    for k in range(verify_to, 1, -1):
        if not ok[k]:
            break
        k0 = k
    if k0 is None or k0 > k_max:
        return None
    return k0

