"""Stochastic domination with certificates, p_max, movability radii, rigidity.

Domination is decided by max-flow on the covering graph of {0,1}^n: the
source feeds configuration x with mu1(x), x drains mu2(x) to the sink, and
infinite-capacity arcs x -> x + e_i let mass climb.  Full flow means a
monotone coupling exists (read off by path decomposition); otherwise the
residual-reachable side of the minimum cut is an up-set A with
mu1(A) > mu2(A).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import NotDominated, SizeExceeded
from .measure import (
    EXACT,
    FLOAT,
    CountDistribution,
    binomial_pmf,
    count_distribution,
    format_bits,
    is_exchangeable,
    popcount,
    product_measure,
    same_space,
    thicken,
    thin,
    zero_scalar,
)

FLOW_NCAP = 14
UPSET_NCAP = 6
FLOAT_SCALE_BITS = 50
DEFAULT_SLACK = 1e-9
DEFAULT_TOL = 1e-9
MAX_ITER = 80


def flow_cap():
    env = os.environ.get("MOVELAB_NCAP")
    return int(env) if env else FLOW_NCAP


# --------------------------------------------------------------------------
# up-sets


@dataclass(frozen=True)
class UpSet:
    n: int
    members: frozenset

    @classmethod
    def from_mask(cls, mask, n):
        mask = int(mask)
        return cls(n, frozenset(x for x in range(1 << n) if (mask >> x) & 1))

    @classmethod
    def generated_by(cls, configs, n):
        """Smallest up-set containing ``configs``."""
        full = (1 << n) - 1
        members = {x for x in range(1 << n) if any((x & c) == c for c in configs)}
        assert all(c <= full for c in configs)
        return cls(n, frozenset(members))

    @property
    def mask(self):
        return sum(1 << x for x in self.members)

    def is_closed(self):
        return all((x | (1 << i)) in self.members for x in self.members for i in range(self.n))

    def __contains__(self, x):
        return x in self.members

    def __len__(self):
        return len(self.members)

    def bitstrings(self):
        return [format_bits(x, self.n) for x in sorted(self.members)]


def enumerate_up_sets(n):
    """Every up-set of {0,1}^n exactly once (Dedekind many), n <= 6."""
    if n > UPSET_NCAP:
        raise SizeExceeded(f"up-set enumeration limited to n <= {UPSET_NCAP}")
    for mask in kernels.upset_masks(n):
        yield UpSet.from_mask(mask, n)


def dominates_bruteforce(mu1, mu2):
    """Oracle: ``(True, None)`` or ``(False, worst up-set)`` by exhaustive up-set scan.

    Independent of the flow solver; used to cross-check it on tiny n.
    """
    same_space(mu1, mu2)
    diff = [a - b for a, b in zip(mu1.probs, mu2.probs)]
    best, best_mask = zero_scalar(mu1.mode), None
    for mask in kernels.upset_masks(mu1.n):
        m = int(mask)
        v = sum((diff[x] for x in range(len(diff)) if (m >> x) & 1), zero_scalar(mu1.mode))
        if v > best:
            best, best_mask = v, m
    if best_mask is None:
        return True, None
    return False, UpSet.from_mask(best_mask, mu1.n)


# --------------------------------------------------------------------------
# certificates


@dataclass
class DominationCertificate:
    verdict: str
    n: int
    mode: str
    coupling: dict | None = None
    violator: UpSet | None = None
    flow: object = None
    gap: object = None
    notes: list = field(default_factory=list)

    @property
    def dominated(self):
        return self.verdict == "dominated"

    def __bool__(self):
        return self.dominated

    def check(self, mu1, mu2, atol=None):
        """Re-verify the certificate without the flow solver. Raises AssertionError."""
        if atol is None:
            atol = 0 if self.mode == EXACT else 10 * DEFAULT_SLACK
        if self.dominated:
            rows = [zero_scalar(self.mode)] * (1 << self.n)
            cols = [zero_scalar(self.mode)] * (1 << self.n)
            for (x, y), v in self.coupling.items():
                assert (x & y) == x, f"coupling pair {x}->{y} not ordered"
                assert v >= 0
                rows[x] += v
                cols[y] += v
            for x in range(1 << self.n):
                assert abs(rows[x] - mu1.probs[x]) <= atol, f"row marginal at {x}"
                assert abs(cols[x] - mu2.probs[x]) <= atol, f"column marginal at {x}"
        else:
            assert self.violator.is_closed(), "violator is not an up-set"
            gap = mu1.mass(self.violator.members) - mu2.mass(self.violator.members)
            assert gap > atol, f"violator gap {gap} not positive"
        return True


def _integer_caps(mu1, mu2):
    if mu1.mode == EXACT:
        den = kernels.common_denominator(list(mu1.probs) + list(mu2.probs))
        a = [p.numerator * (den // p.denominator) for p in mu1.probs]
        b = [p.numerator * (den // p.denominator) for p in mu2.probs]
        return a, b, den
    scale = 1 << FLOAT_SCALE_BITS
    a = [int(round(float(p) * scale)) for p in mu1.probs]
    b = [int(round(float(p) * scale)) for p in mu2.probs]
    return a, b, scale


def _decompose(n, src_flow, sink_flow, up_flow):
    """Split an upward flow into (origin, destination) amounts.

    Nodes are visited in increasing bitmask order, which is topological for
    arcs x -> x | bit.
    """
    size = 1 << n
    incoming = [None] * size
    pairs = {}
    for x in range(size):
        bundle = incoming[x] or {}
        if src_flow[x]:
            bundle[x] = bundle.get(x, 0) + src_flow[x]
        if not bundle:
            continue
        outs = []
        if sink_flow[x]:
            outs.append((None, sink_flow[x]))
        for bit, f in up_flow.get(x, ()):
            if f:
                outs.append((x | bit, f))
        items = [[o, amt] for o, amt in bundle.items() if amt]
        k = 0
        for target, need in outs:
            while need:
                origin, have = items[k]
                take = have if have <= need else need
                if target is None:
                    pairs[(origin, x)] = pairs.get((origin, x), 0) + take
                else:
                    nxt = incoming[target]
                    if nxt is None:
                        nxt = incoming[target] = {}
                    nxt[origin] = nxt.get(origin, 0) + take
                need -= take
                items[k][1] -= take
                if not items[k][1]:
                    k += 1
        incoming[x] = None
    return pairs


def dominates(mu1, mu2, *, max_n=None, slack=DEFAULT_SLACK, certificate=True):
    """Decide ``mu1 <= mu2`` stochastically and return a certificate.

    Exact mode is bit-exact (integer capacities after clearing denominators).
    Float mode rounds capacities to multiples of 2^-50 and accepts a flow
    deficit up to ``slack``.  Ties on an up-set count as dominated.
    """
    same_space(mu1, mu2)
    n = mu1.n
    cap_n = max_n if max_n is not None else flow_cap()
    if n > cap_n:
        raise SizeExceeded(f"flow network for n={n} exceeds cap n <= {cap_n}")
    a, b, scale = _integer_caps(mu1, mu2)
    size = 1 << n
    S, T = size, size + 1
    total_a = sum(a)
    inf = total_a + sum(b) + 1
    tails, heads, caps, kinds = [], [], [], []
    for x in range(size):
        if a[x]:
            tails.append(S)
            heads.append(x)
            caps.append(a[x])
            kinds.append((0, x, 0))
        if b[x]:
            tails.append(x)
            heads.append(T)
            caps.append(b[x])
            kinds.append((1, x, 0))
    for x in range(size):
        for i in range(n):
            bit = 1 << i
            if not x & bit:
                tails.append(x)
                heads.append(x | bit)
                caps.append(inf)
                kinds.append((2, x, bit))
    value, flows, reach = kernels.maxflow(size + 2, S, T, tails, heads, caps)

    if mu1.mode == EXACT:
        ok = value == total_a
        conv = lambda v: Fraction(v, scale)  # noqa: E731
    else:
        ok = value >= total_a - slack * scale
        conv = lambda v: v / scale  # noqa: E731

    cert = DominationCertificate("dominated" if ok else "not_dominated", n, mu1.mode, flow=conv(value))
    if ok:
        if certificate:
            src = [0] * size
            snk = [0] * size
            up = {}
            for (kind, x, bit), f in zip(kinds, flows):
                if kind == 0:
                    src[x] = f
                elif kind == 1:
                    snk[x] = f
                elif f:
                    up.setdefault(x, []).append((bit, f))
            pairs = _decompose(n, src, snk, up)
            cert.coupling = {k: conv(v) for k, v in pairs.items()}
            if mu1.mode == FLOAT and value != total_a:
                cert.notes.append(f"float flow deficit {conv(total_a - value)!r} within slack")
    else:
        members = frozenset(x for x in range(size) if reach[x])
        cert.violator = UpSet(n, members)
        cert.gap = conv(sum(a[x] for x in members) - sum(b[x] for x in members))
    return cert


def dominates_symmetric(c1, c2, slack=0):
    """Count-law test for exchangeable measures: P(c1 >= j) <= P(c2 >= j) for all j.

    Sufficient and necessary for exchangeable pairs: a uniform K1-subset of a
    uniform K2-set is a uniform K1-set, so CDF ordering of the counts lifts
    to a monotone coupling of the configurations.
    """
    if c1.n != c2.n:
        from .errors import LengthMismatch

        raise LengthMismatch(f"count laws on {c1.n} and {c2.n} sites")
    t1 = t2 = zero_scalar(c1.mode if c1.mode == c2.mode else FLOAT)
    for j in range(c1.n, 0, -1):
        t1 += c1.probs[j]
        t2 += c2.probs[j]
        if t1 > t2 + slack:
            return False
    return True


# --------------------------------------------------------------------------
# bisection machinery


def _as_mode_scalar(x, mode):
    if mode == EXACT:
        return x if isinstance(x, Fraction) else Fraction(repr(float(x)))
    return float(x)


def bisect_feasible(feasible, mode, tol=DEFAULT_TOL, lo=0, hi=1, max_iter=MAX_ITER, verify=True):
    """Largest feasible point of a down-closed set [lo, *) within ``tol``.

    Requires ``feasible(lo)``.  Returns ``(lo, hi)`` with feasible(lo) and,
    unless hi is the initial bound, not feasible(hi).  Exact mode probes
    dyadic rationals so denominators stay small.
    """
    lo = _as_mode_scalar(lo, mode)
    hi = _as_mode_scalar(hi, mode)
    tol = _as_mode_scalar(tol, mode)
    hi0 = hi
    if feasible(hi):
        return hi, hi
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = (lo + hi) / 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    if verify:
        if not feasible(lo):
            raise AssertionError(f"bisection invariant broken: lower end {lo} infeasible")
        if hi != hi0 and feasible(hi):
            raise AssertionError(f"bisection invariant broken: upper end {hi} feasible")
    return lo, hi


def _binomial_counts(n, p):
    return CountDistribution(n, tuple(binomial_pmf(n, p)))


def _product(mu, p):
    return product_measure(mu.ground, p, mode=mu.mode)


def p_max(mu, tol=DEFAULT_TOL, method="auto"):
    """Largest p with pi_p <= mu, as a lower bound within ``tol``.

    method: ``"bisect"`` (flow or, for exchangeable mu, count-law probes),
    ``"flow"`` (always flow), ``"upsets"`` (exhaustive up-set oracle, n <= 6),
    ``"auto"`` = bisect.
    """
    if method == "upsets":
        return p_max_upsets(mu, tol)
    if method not in ("auto", "bisect", "flow"):
        raise ValueError(f"unknown method {method!r}")
    mode = mu.mode
    if method != "flow" and is_exchangeable(mu):
        counts = count_distribution(mu)
        slack = 0 if mode == EXACT else 1e-12

        def feasible(p):
            return dominates_symmetric(_binomial_counts(mu.n, p), counts, slack)

    else:
        if mu.n > flow_cap():
            raise SizeExceeded(f"p_max by flow needs n <= {flow_cap()}")

        def feasible(p):
            return dominates(_product(mu, p), mu, certificate=False).dominated

    lo, _ = bisect_feasible(feasible, mode, tol)
    return lo


def _updown_counts(masks, n, weights):
    """Per up-set: members per popcount layer, and total weight."""
    size = 1 << n
    layers = np.zeros((size, n + 1), dtype=np.int64)
    for x in range(size):
        layers[x, popcount(x)] = 1
    xs = np.arange(size, dtype=np.uint64)
    counts = []
    wsum = []
    for start in range(0, len(masks), 1 << 17):
        chunk = masks[start : start + (1 << 17)]
        bits = ((chunk[:, None] >> xs[None, :]) & np.uint64(1)).astype(np.int64)
        counts.append(bits @ layers)
        wsum.append(bits @ weights)
    return np.concatenate(counts), np.concatenate(wsum)


def _poly_value_int(a, n, k, m):
    """2^(m n) * sum_j a_j p^j (1-p)^(n-j) at p = k / 2^m."""
    one = 1 << m
    return sum(int(aj) * k**j * (one - k) ** (n - j) for j, aj in enumerate(a) if aj)


def p_max_upsets(mu, tol=1e-12):
    """Exhaustive oracle: min over nontrivial up-sets A of the root of pi_p(A) = mu(A).

    Independent of the flow solver.  Exact mode brackets each critical root
    by bisection on dyadic rationals with integer sign tests and returns the
    lower end (a certified lower bound within ``tol``); float mode returns
    the float root.
    """
    n = mu.n
    if n > UPSET_NCAP:
        raise SizeExceeded(f"up-set oracle limited to n <= {UPSET_NCAP}")
    masks = np.asarray(kernels.upset_masks(n), dtype=np.uint64)
    full = np.uint64((1 << (1 << n)) - 1)
    masks = masks[(masks != 0) & (masks != full)]
    exact = mu.mode == EXACT
    if exact:
        den = kernels.common_denominator(mu.probs)
        ints = [p.numerator * (den // p.denominator) for p in mu.probs]
        if den >= (1 << 56):
            weights = np.array(ints, dtype=object)
        else:
            weights = np.array(ints, dtype=np.int64)
    else:
        den = 1
        weights = np.asarray(mu.probs, dtype=np.float64)
    counts, wsum = _updown_counts(masks, n, weights)

    # min weight per distinct layer-count vector: root is increasing in mu(A)
    keys, inverse = np.unique(counts, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    if wsum.dtype != object:
        order = np.lexsort((wsum, inverse))
        srt = inverse[order]
        first = order[np.r_[True, srt[1:] != srt[:-1]]]
        best = {int(inverse[i]): wsum[i] for i in first}
    else:
        best = {}
        for idx in range(len(inverse)):
            g = int(inverse[idx])
            if g not in best or wsum[idx] < best[g]:
                best[g] = wsum[idx]
    groups = [(keys[g], best[g]) for g in range(len(keys))]

    # vectorized float roots to locate the binding candidates
    A = np.array([k for k, _ in groups], dtype=np.float64)
    target = np.array([float(w) / float(den) for _, w in groups])
    lo = np.zeros(len(groups))
    hi = np.ones(len(groups))
    js = np.arange(n + 1)
    for _ in range(60):
        mid = (lo + hi) / 2
        val = (A * mid[:, None] ** js * (1 - mid[:, None]) ** (n - js)).sum(axis=1)
        below = val <= target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    roots = np.where(target >= 1, 1.0, np.where(target <= 0, 0.0, lo))
    rmin = float(roots.min())
    if not exact:
        return rmin

    cand = [i for i in range(len(groups)) if roots[i] <= rmin + 1e-9]
    tol_f = Fraction(repr(float(tol))) if not isinstance(tol, Fraction) else tol
    best_lo = None
    for i in cand:
        a, w = groups[i]
        w = int(w)
        if w == 0:
            return Fraction(0)
        if w >= den:
            r_lo = Fraction(1)
        else:
            # bracket root of poly(p) = w/den with p = k / 2^m
            klo, khi, m = 0, 1, 0
            while Fraction(khi - klo, 1 << m) > tol_f:
                klo, khi, m = 2 * klo, 2 * khi, m + 1
                kmid = (klo + khi) // 2
                if _poly_value_int(a, n, kmid, m) * den <= w << (m * n):
                    klo = kmid
                else:
                    khi = kmid
            r_lo = Fraction(klo, 1 << m)
        if best_lo is None or r_lo < best_lo:
            best_lo = r_lo
    return best_lo


# --------------------------------------------------------------------------
# movability radii and rigidity


def _pair_feasibility(mu1, mu2, make_pair):
    """feasible(eps) for dominance of the transformed pair, symmetric when possible."""
    if is_exchangeable(mu1) and is_exchangeable(mu2):
        slack = 0 if mu1.mode == EXACT else 1e-12

        def feasible(eps):
            a, b = make_pair(eps)
            return dominates_symmetric(count_distribution(a), count_distribution(b), slack)

    else:

        def feasible(eps):
            a, b = make_pair(eps)
            return dominates(a, b, certificate=False).dominated

    return feasible


def _sup_eps(mu1, mu2, tol, make_pair):
    same_space(mu1, mu2)
    if not dominates(mu1, mu2, certificate=False).dominated:
        raise NotDominated("movability needs mu1 <= mu2")
    mode = mu1.mode
    feasible = _pair_feasibility(mu1, mu2, make_pair)
    tol_s = _as_mode_scalar(tol, mode)
    if not feasible(tol_s):
        return zero_scalar(mode)
    lo, _ = bisect_feasible(feasible, mode, tol, lo=0)
    return lo


def sup_eps_down(mu1, mu2, tol=DEFAULT_TOL):
    """sup{eps : mu1 <= mu2^(-,eps)} within ``tol`` (0 if infeasible at eps = tol)."""
    return _sup_eps(mu1, mu2, tol, lambda e: (mu1, thin(mu2, e)))


def sup_eps_up(mu1, mu2, tol=DEFAULT_TOL):
    """sup{eps : mu1^(+,eps) <= mu2} within ``tol`` (0 if infeasible at eps = tol)."""
    return _sup_eps(mu1, mu2, tol, lambda e: (thicken(mu1, e), mu2))


@dataclass
class AnalysisResult:
    p_max: object
    sup_eps_down: object
    rigid: bool
    tolerance_used: object
    probe_p: object = None


def rigidity(mu, tol=DEFAULT_TOL, eps_tol=1e-6, method="auto"):
    """Rigidity verdict by the finite-S criterion mu(all ones) > 0, plus the
    movability radius of (pi_{p_max - tol}, mu) as numeric corroboration."""
    pm = p_max(mu, tol=tol, method=method)
    step = _as_mode_scalar(tol, mu.mode)
    probe = pm - step if pm > step else zero_scalar(mu.mode)
    radius = sup_eps_down(_product(mu, probe), mu, tol=eps_tol)
    return AnalysisResult(p_max=pm, sup_eps_down=radius, rigid=mu.all_ones > 0, tolerance_used=tol, probe_p=probe)
