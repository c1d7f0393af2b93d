"""Insertion/deletion tolerance, Holley-type lower bounds, downwards FKG,
and the insertion-tolerance amplification inequality."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .domination import UpSet, dominates
from .errors import SizeExceeded, ToleranceTooLow
from .measure import EXACT, complement, product_measure, thin


@dataclass
class ToleranceReport:
    insertion: object
    deletion: object
    finite_energy: object
    # (site, mask of the conditioning configuration with the site bit cleared)
    witnesses: dict
    n: int
    all_witnesses: dict = field(default_factory=dict)
    excluded: list = field(default_factory=list)

    def witness_bits(self, kind):
        """Witness as (site, bitstring over the other sites in increasing order)."""
        w = self.witnesses.get(kind)
        if w is None:
            return None
        return w[0], other_sites_bits(w[1], w[0], self.n)


def other_sites_bits(mask, site, n):
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(n) if i != site)


def conditional_one(mu, site, mask):
    """mu(sigma(site) = 1 | the other sites agree with ``mask``); None if that event is null."""
    bit = 1 << site
    x0 = mask & ~bit
    p0, p1 = mu.probs[x0], mu.probs[x0 | bit]
    tot = p0 + p1
    if tot == 0:
        return None
    return p1 / tot


def _scan_insertion(mu, collect_all=False, audit=False):
    best, best_w = None, None
    attaining, excluded = [], []
    for s in range(mu.n):
        bit = 1 << s
        for x in range(1 << mu.n):
            if x & bit:
                continue
            c = conditional_one(mu, s, x)
            if c is None:
                if audit:
                    excluded.append((s, x))
                continue
            if best is None or c < best:
                best, best_w = c, (s, x)
                attaining = [(s, x)] if collect_all else []
            elif collect_all and c == best:
                attaining.append((s, x))
    return best, best_w, attaining, excluded


def insertion_tolerance(mu, all_witnesses=False, audit=False):
    """Infimum over sites and positive-probability conditionings of
    P(site = 1 | rest), and the same for 0 (deletion side, via complement)."""
    full = (1 << mu.n) - 1
    ins, ins_w, ins_all, ins_ex = _scan_insertion(mu, all_witnesses, audit)
    dele, del_w, del_all, del_ex = _scan_insertion(complement(mu), all_witnesses, audit)

    def back(w):
        # witness found on the complement: flip the conditioning bits back
        s, x = w
        return s, (~x & full) & ~(1 << s)

    del_w = back(del_w) if del_w else None
    rep = ToleranceReport(
        insertion=ins,
        deletion=dele,
        finite_energy=min(ins, dele),
        witnesses={"insertion": ins_w, "deletion": del_w},
        n=mu.n,
    )
    if all_witnesses:
        rep.all_witnesses = {"insertion": ins_all, "deletion": [back(w) for w in del_all]}
    if audit:
        rep.excluded = [("insertion", s, x) for s, x in ins_ex] + [("deletion",) + back(w) for w in del_ex]
    return rep


def holley_lower_bound_check(mu):
    """pi_eps <= mu with eps the insertion tolerance of mu."""
    eps = insertion_tolerance(mu).insertion
    return dominates(product_measure(mu.ground, eps, mode=mu.mode), mu, certificate=False).dominated


# --------------------------------------------------------------------------
# downwards FKG


@dataclass
class FKGResult:
    ok: bool
    zero_sites: tuple | None = None
    free_sites: tuple | None = None
    A: UpSet | None = None
    B: UpSet | None = None

    def __bool__(self):
        return self.ok

    def describe(self):
        if self.ok:
            return "downwards FKG holds"
        return (
            f"violation with S'={list(self.zero_sites)} on sites {list(self.free_sites)}: "
            f"A={self.A.bitstrings()} B={self.B.bitstrings()}"
        )


def downwards_fkg_check(mu, max_n=4, tol=1e-12):
    """Check mu(A & B | S' = 0) >= mu(A | S' = 0) mu(B | S' = 0) for every S'
    and every pair of up-sets A, B on the sites outside S'.

    On a finite ground set the increasing events are read as up-sets of the
    free coordinates; null conditioning events are skipped.  n = 5 needs
    ``max_n=5`` (7581 up-sets, ~2.9e7 pairs for S' empty).
    """
    n = mu.n
    if n > max_n or n > 5:
        raise SizeExceeded(f"downwards FKG check limited to n <= {min(max_n, 5)}")
    if n == 5:
        warnings.warn("downwards FKG on n=5 scans ~3e7 up-set pairs; expect a long run", stacklevel=2)
    exact = mu.mode == EXACT
    if exact:
        den = kernels.common_denominator(mu.probs)
        weights_all = [p.numerator * (den // p.denominator) for p in mu.probs]
    else:
        weights_all = [float(p) for p in mu.probs]
    for zmask in range(1 << n):
        free = [i for i in range(n) if not (zmask >> i) & 1]
        r = len(free)
        sub = []
        for y in range(1 << r):
            x = 0
            for j, site in enumerate(free):
                if (y >> j) & 1:
                    x |= 1 << site
            sub.append(weights_all[x])
        w_event = sum(sub)
        if w_event == 0 or r == 0:
            continue
        masks = kernels.upset_masks(r)
        hit = kernels.fkg_scan(masks, sub, w_event, exact, tol)
        if hit is not None:
            i, j = hit
            return FKGResult(
                False,
                tuple(i for i in range(n) if (zmask >> i) & 1),
                tuple(free),
                UpSet.from_mask(masks[i], r),
                UpSet.from_mask(masks[j], r),
            )
    return FKGResult(True)


# --------------------------------------------------------------------------
# amplification bound and the negative-association report


def amplification_sides(mu, delta, eps):
    """(P(thinned config is all zeros), (1 + eps delta/(1-delta))^n P(all zeros))."""
    lhs = thin(mu, eps).probs[0]
    rhs = (1 + eps * delta / (1 - delta)) ** mu.n * mu.probs[0]
    return lhs, rhs


def lemma_fkg_amplification_check(mu, delta, eps):
    """Verify the zero-probability amplification under thinning for a
    delta-insertion-tolerant mu (exact in exact mode)."""
    if mu.mode == EXACT:
        delta, eps = Fraction(delta), Fraction(eps)
    if not (0 < delta < 1 and 0 < eps < 1):
        raise ValueError("need 0 < delta < 1 and 0 < eps < 1")
    tol = insertion_tolerance(mu).insertion
    if tol < delta:
        raise ToleranceTooLow(f"insertion tolerance {tol} < delta = {delta}")
    lhs, rhs = amplification_sides(mu, delta, eps)
    return lhs >= rhs


def cna_rho_report(mu):
    """Per window length m: P(first m sites all 1) and the implied ceiling
    rho <= P^(1/m) from the all-ones criterion for product domination."""
    rows = []
    for m in range(1, mu.n + 1):
        want = (1 << m) - 1
        pm = mu.mass(x for x in range(1 << mu.n) if (x & want) == want)
        rows.append({"m": m, "all_ones": pm, "rho_ceiling": float(pm) ** (1.0 / m)})
    return rows


def format_witness(rep, kind):
    w = rep.witness_bits(kind)
    if w is None:
        return "-"
    return f"site {w[0]} | others={w[1]}"


__all__ = [
    "ToleranceReport",
    "insertion_tolerance",
    "holley_lower_bound_check",
    "downwards_fkg_check",
    "lemma_fkg_amplification_check",
    "amplification_sides",
    "cna_rho_report",
    "conditional_one",
]
