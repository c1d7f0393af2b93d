"""Inverting noise channels: upwards, downwards and two-sided extraction."""

from __future__ import annotations

from fractions import Fraction

from .domination import (
    DEFAULT_TOL,
    _as_mode_scalar,
    bisect_feasible,
    dominates,
    sup_eps_down,
    sup_eps_up,
)
from .errors import ModeMismatch, NonInvertibleChannel, ParameterOutOfRange
from .measure import (
    EXACT,
    NoiseChannel,
    SignedVector,
    apply_matrix,
    complement,
    scalar,
    thicken,
    thin,
)


def _param(mu, eps):
    if mu.mode == EXACT:
        return scalar(eps, EXACT)
    return float(eps)


def extract_up(mu, eps):
    """The unique signed nu with ``nu^(+,eps) = mu``.

    Per site this is the inverse of [[1-eps, eps], [0, 1]], i.e. the signed
    zeta transform nu(s) = sum_{t <= s} (-eps)^{|s|-|t|} (1-eps)^{|t|-n} mu(t),
    computed in O(n 2^n).
    """
    eps = _param(mu, eps)
    if not 0 <= eps < 1:
        raise ParameterOutOfRange(f"eps={eps} must lie in [0, 1)")
    r = 1 / (1 - eps)
    return apply_matrix(mu, (r, -eps * r, 0 * r, 1 + 0 * r), SignedVector)


def extract_down(mu, eps):
    """The unique signed nu with ``nu^(-,eps) = mu`` (complement-conjugate of extract_up)."""
    return complement(extract_up(complement(mu), eps))


def extract_both(mu, eps, delta):
    """The unique signed nu with ``nu^(-,eps,+,delta) = mu``; needs eps + delta < 1."""
    eps = _param(mu, eps)
    delta = _param(mu, delta)
    if not (0 <= eps <= 1 and 0 <= delta <= 1):
        raise ParameterOutOfRange("flip probabilities must lie in [0, 1]")
    det = 1 - eps - delta
    if det <= 0:
        raise NonInvertibleChannel(f"eps + delta = {eps + delta} >= 1")
    return apply_matrix(mu, ((1 - eps) / det, -delta / det, -eps / det, (1 - delta) / det), SignedVector)


_DIRECTIONS = {
    "up": (extract_up, Fraction(1)),
    "down": (extract_down, Fraction(1)),
    "both": (lambda mu, e: extract_both(mu, e, e), Fraction(1, 2)),
}


def extraction_feasible(mu, eps, direction="up"):
    fn, bound = _DIRECTIONS[direction]
    if eps >= bound:
        return False
    return fn(mu, eps).is_nonnegative()


def max_extract_eps(mu, direction="up", tol=DEFAULT_TOL):
    """sup{eps : extraction at eps is a probability measure}, within ``tol``.

    Exact mode only: the sign test near the boundary is ill-conditioned in
    floats.  Returns 0 when infeasible already at eps = tol.
    """
    if mu.mode != EXACT:
        raise ModeMismatch("max_extract_eps needs an exact-mode measure")
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {sorted(_DIRECTIONS)}")
    _, bound = _DIRECTIONS[direction]
    tol_s = _as_mode_scalar(tol, EXACT)
    if not extraction_feasible(mu, tol_s, direction):
        return Fraction(0)
    lo, _ = bisect_feasible(lambda e: extraction_feasible(mu, e, direction), EXACT, tol_s, lo=0, hi=bound)
    return lo


# --------------------------------------------------------------------------
# channel composition identities and the rigidity sufficient condition


def composite_channel(alpha, eps, delta):
    """Closed form for thicken(alpha), thin(eps), thicken(delta) applied in turn:
    down = eps (1 - delta), up = alpha (1 - eps) + alpha eps delta + (1 - alpha) delta."""
    return NoiseChannel(eps * (1 - delta), alpha * (1 - eps) + alpha * eps * delta + (1 - alpha) * delta)


def delta_bound(alpha, eps):
    """Supremum of delta with alpha(1-eps) + alpha eps delta + (1-alpha) delta < alpha."""
    return alpha * eps / (1 - alpha + alpha * eps)


def choose_delta(alpha, eps):
    """A concrete admissible delta (half the bound), > 0 whenever alpha, eps > 0."""
    return delta_bound(alpha, eps) / 2


def rethicken_dominated(mu, eps, delta):
    """Does ``(mu^(-,eps))^(+,delta) <= mu`` hold?"""
    return dominates(thicken(thin(mu, eps), delta), mu, certificate=False).dominated


def rigidity_sufficient_condition(mu, eps_values, delta_grid=None):
    """For each eps, a delta > 0 with ``(mu^(-,eps))^(+,delta) <= mu`` or None.

    Candidates: the extraction-derived delta when mu is upwards extractable,
    then ``delta_grid`` (default 1/2^j, j = 1..20).  Only the sufficient
    direction is asserted; a None entry proves nothing about rigidity.
    """
    if delta_grid is None:
        delta_grid = [Fraction(1, 2**j) for j in range(1, 21)]
    if mu.mode != EXACT:
        delta_grid = [float(d) for d in delta_grid]
    alpha = max_extract_eps(mu, "up", tol=Fraction(1, 2**20)) if mu.mode == EXACT else 0
    out = {}
    for eps in eps_values:
        eps = _param(mu, eps)
        cands = []
        if alpha > 0 and eps > 0:
            cands.append(choose_delta(alpha, eps))
        cands.extend(delta_grid)
        out[eps] = next((d for d in cands if d > 0 and rethicken_dominated(mu, eps, d)), None)
    return out


def corollary_check(mu1, mu2, tol=1e-6):
    """Downwards movable pair with uniformly upwards extractable mu2 must be upwards movable.

    Returns a dict with the two hypotheses, the conclusion, and whether the
    implication held (vacuous when a hypothesis fails).
    """
    alpha = max_extract_eps(mu2, "up", tol=tol)
    down = sup_eps_down(mu1, mu2, tol=tol)
    up = sup_eps_up(mu1, mu2, tol=tol)
    hyp = alpha > 0 and down > 0
    return {
        "extraction_level": alpha,
        "sup_eps_down": down,
        "sup_eps_up": up,
        "hypotheses": hyp,
        "holds": (not hyp) or up > 0,
    }

