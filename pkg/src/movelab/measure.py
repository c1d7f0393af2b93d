"""Measures on {0,1}^n and the noise-channel algebra acting on them.

Configurations are bitmasks: bit ``i`` holds the value at site ``i``.  A
measure is a dense vector of 2^n entries, either all ``Fraction`` (exact
mode) or a read-only float64 array (float mode).  Mixing modes raises
:class:`ModeMismatch`; conversions happen only when asked for.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import comb, isfinite

import numpy as np

from . import kernels
from .errors import (
    BadWeights,
    DuplicateConfiguration,
    GroundMismatch,
    ModeMismatch,
    NegativeMass,
    NotNormalized,
    ParameterOutOfRange,
    SizeExceeded,
    ZeroProbabilityEvent,
)

EXACT = "exact"
FLOAT = "float"
FLOAT_SUM_TOL = 1e-12

DEFAULT_NCAP = {FLOAT: 22, EXACT: 18}


def n_cap(mode):
    env = os.environ.get("MOVELAB_NCAP")
    if env:
        return int(env)
    return DEFAULT_NCAP[mode]


# --------------------------------------------------------------------------
# scalars and configurations


def scalar(value, mode=EXACT):
    """Coerce ``value`` into the scalar type of ``mode``.

    Strings may be ``"a/b"`` or decimals.  A Python float is refused in exact
    mode: it would silently carry binary rounding into exact results.
    """
    if mode == EXACT:
        if isinstance(value, (float, np.floating)):
            raise ModeMismatch(f"float {value!r} given in exact mode; pass a Fraction or string")
        if isinstance(value, str):
            value = value.strip()
        return Fraction(value)
    if mode == FLOAT:
        if isinstance(value, str):
            value = Fraction(value.strip())
        x = float(value)
        if not isfinite(x):
            raise ParameterOutOfRange(f"non-finite scalar {value!r}")
        return x
    raise ValueError(f"unknown mode {mode!r}")


def infer_mode(*values):
    """Float if any value is a float, else exact."""
    for v in values:
        if isinstance(v, (float, np.floating)):
            return FLOAT
    return EXACT


def parse_bits(text, n):
    text = text.strip()
    if len(text) != n or any(c not in "01" for c in text):
        raise ValueError(f"bad configuration {text!r} for n={n}")
    x = 0
    for i, c in enumerate(text):
        if c == "1":
            x |= 1 << i
    return x


def format_bits(x, n):
    return "".join("1" if (x >> i) & 1 else "0" for i in range(n))


def popcount(x):
    return x.bit_count()


# --------------------------------------------------------------------------
# core types


@dataclass(frozen=True)
class GroundSet:
    n: int
    labels: tuple | None = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ParameterOutOfRange(f"ground set size must be a positive integer, got {self.n!r}")
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.n:
                raise ParameterOutOfRange("need exactly n labels")
            if len(set(labels)) != self.n:
                raise ParameterOutOfRange("labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @property
    def size(self):
        return 1 << self.n

    @property
    def full(self):
        return (1 << self.n) - 1

    def label(self, i):
        return self.labels[i] if self.labels else str(i)


def ground(n, labels=None):
    return n if isinstance(n, GroundSet) else GroundSet(n, labels)


class SignedVector:
    """Vector on {0,1}^n summing to one; entries may be negative.

    The result of inverting a noise channel before positivity is known.
    """

    __slots__ = ("ground", "probs", "mode")

    def __init__(self, ground_set, probs, mode=None, *, validate=True):
        g = ground(ground_set)
        if mode is None:
            mode = FLOAT if isinstance(probs, np.ndarray) and probs.dtype.kind == "f" else EXACT
        if g.n > n_cap(mode):
            raise SizeExceeded(f"n={g.n} exceeds the {mode} cap {n_cap(mode)}")
        if mode == EXACT:
            probs = tuple(p if type(p) is Fraction else scalar(p, EXACT) for p in probs)
        elif mode == FLOAT:
            if not isinstance(probs, np.ndarray) or probs.dtype != np.float64:
                probs = np.array([scalar(p, FLOAT) for p in probs], dtype=np.float64)
            else:
                probs = probs.copy()
            probs.setflags(write=False)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if len(probs) != g.size:
            raise ParameterOutOfRange(f"expected {g.size} entries, got {len(probs)}")
        self.ground = g
        self.probs = probs
        self.mode = mode
        if validate:
            self._validate()

    def _validate(self):
        if self.mode == EXACT:
            total = sum(self.probs)
            if total != 1:
                raise NotNormalized(f"entries sum to {total}, not 1")
        else:
            if not np.all(np.isfinite(self.probs)):
                raise ParameterOutOfRange("non-finite entry")
            total = float(np.sum(self.probs))
            if abs(total - 1.0) > FLOAT_SUM_TOL:
                raise NotNormalized(f"entries sum to {total!r}, off by more than {FLOAT_SUM_TOL}")

    # basic protocol ---------------------------------------------------------

    @property
    def n(self):
        return self.ground.n

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, x):
        if isinstance(x, str):
            x = parse_bits(x, self.n)
        return self.probs[x]

    def __iter__(self):
        return iter(self.probs)

    def __eq__(self, other):
        if not isinstance(other, SignedVector):
            return NotImplemented
        if self.ground.n != other.ground.n or self.mode != other.mode:
            return False
        if self.mode == EXACT:
            return self.probs == other.probs
        return bool(np.array_equal(self.probs, other.probs))

    def __hash__(self):
        if self.mode == EXACT:
            return hash((self.ground.n, self.probs))
        return hash((self.ground.n, self.probs.tobytes()))

    def __repr__(self):
        name = type(self).__name__
        items = ", ".join(f"{format_bits(x, self.n)}:{p}" for x, p in enumerate(self.probs) if p != 0)
        return f"{name}(n={self.n}, mode={self.mode}, {{{items}}})"

    def allclose(self, other, atol=1e-12):
        a = np.array([float(p) for p in self.probs])
        b = np.array([float(p) for p in other.probs])
        return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))

    def values(self):
        return list(self.probs)

    def is_nonnegative(self):
        if self.mode == EXACT:
            return all(p >= 0 for p in self.probs)
        return bool(np.all(self.probs >= 0))

    def mass(self, configs):
        zero = Fraction(0) if self.mode == EXACT else 0.0
        return sum((self.probs[x] for x in configs), zero)

    def support(self):
        return [x for x, p in enumerate(self.probs) if p != 0]

    def _rebuild(self, probs, validate=False):
        return type(self)(self.ground, probs, self.mode, validate=validate)

    def to_float(self):
        return type(self)(self.ground, np.array([float(p) for p in self.probs]), FLOAT, validate=False)

    def to_measure(self):
        return Measure(self.ground, self.probs, self.mode)


class Measure(SignedVector):
    """Probability measure on {0,1}^n (nonnegative, normalized)."""

    __slots__ = ()

    def _validate(self):
        if self.mode == EXACT:
            if any(p < 0 for p in self.probs):
                raise NegativeMass("negative entry")
        elif np.any(self.probs < 0):
            raise NegativeMass("negative entry")
        super()._validate()

    @property
    def all_ones(self):
        return self.probs[self.ground.full]

    @property
    def all_zeros(self):
        return self.probs[0]

    def marginal(self, site):
        bit = 1 << site
        return self.mass(x for x in range(self.ground.size) if x & bit)


def zero_scalar(mode):
    return Fraction(0) if mode == EXACT else 0.0


def one_scalar(mode):
    return Fraction(1) if mode == EXACT else 1.0


def same_space(a, b):
    if a.ground.n != b.ground.n:
        raise GroundMismatch(f"ground sets differ: n={a.ground.n} vs n={b.ground.n}")
    if a.mode != b.mode:
        raise ModeMismatch(f"modes differ: {a.mode} vs {b.mode}")


# --------------------------------------------------------------------------
# constructors


def from_entries(ground_set, entries, mode=EXACT):
    """Build a measure from ``(configuration, scalar)`` pairs.

    Configurations may be bitmasks or bitstrings (leftmost char = site 0).
    Unlisted configurations get zero; normalization is checked, never fixed.
    """
    g = ground(ground_set)
    probs = [zero_scalar(mode)] * g.size
    seen = set()
    if isinstance(entries, dict):
        entries = entries.items()
    for conf, value in entries:
        x = parse_bits(conf, g.n) if isinstance(conf, str) else int(conf)
        if not 0 <= x < g.size:
            raise ParameterOutOfRange(f"configuration {conf!r} out of range for n={g.n}")
        if x in seen:
            raise DuplicateConfiguration(format_bits(x, g.n))
        seen.add(x)
        v = scalar(value, mode)
        if v < 0:
            raise NegativeMass(f"{format_bits(x, g.n)}: {v}")
        probs[x] = v
    if mode == FLOAT:
        probs = np.array(probs, dtype=np.float64)
    return Measure(g, probs, mode)


def _check_prob(p, name="p"):
    if not 0 <= p <= 1:
        raise ParameterOutOfRange(f"{name}={p} outside [0,1]")


def product_measure(ground_set, p, mode=None):
    """Uniform product measure: each site is 1 with probability ``p``."""
    g = ground(ground_set)
    mode = mode or infer_mode(p)
    p = scalar(p, mode)
    _check_prob(p)
    q = 1 - p
    if mode == FLOAT:
        pops = np.array([popcount(x) for x in range(g.size)])
        probs = p**pops * q ** (g.n - pops)
        return Measure(g, probs, FLOAT)
    pw = [p**j * q ** (g.n - j) for j in range(g.n + 1)]
    return Measure(g, [pw[popcount(x)] for x in range(g.size)], EXACT)


def point_mass(ground_set, config, mode=EXACT):
    g = ground(ground_set)
    x = parse_bits(config, g.n) if isinstance(config, str) else int(config)
    probs = [zero_scalar(mode)] * g.size
    probs[x] = one_scalar(mode)
    if mode == FLOAT:
        probs = np.array(probs, dtype=np.float64)
    return Measure(g, probs, mode)


def delta_zero(ground_set, mode=EXACT):
    return point_mass(ground_set, 0, mode)


def delta_ones(ground_set, mode=EXACT):
    g = ground(ground_set)
    return point_mass(g, g.full, mode)


def mixture(weights, measures):
    """Convex combination ``sum_i weights[i] * measures[i]``, entrywise."""
    if not measures or len(weights) != len(measures):
        raise BadWeights("need one weight per measure")
    first = measures[0]
    for m in measures[1:]:
        same_space(first, m)
    mode = first.mode
    ws = [scalar(w, mode) for w in weights]
    if any(w < 0 for w in ws):
        raise BadWeights("negative weight")
    total = sum(ws)
    if (mode == EXACT and total != 1) or (mode == FLOAT and abs(total - 1) > FLOAT_SUM_TOL):
        raise BadWeights(f"weights sum to {total}")
    if mode == FLOAT:
        probs = sum(w * m.probs for w, m in zip(ws, measures))
    else:
        probs = [sum(w * m.probs[x] for w, m in zip(ws, measures)) for x in range(first.ground.size)]
    cls = Measure if all(isinstance(m, Measure) for m in measures) else SignedVector
    return cls(first.ground, probs, mode)


# --------------------------------------------------------------------------
# noise channels


@dataclass(frozen=True)
class NoiseChannel:
    """Independent per-site flips: 1 -> 0 with prob ``down``, 0 -> 1 with prob ``up``."""

    down: object = Fraction(0)
    up: object = Fraction(0)

    def __post_init__(self):
        for name in ("down", "up"):
            v = getattr(self, name)
            if not isinstance(v, (float, np.floating)):
                v = Fraction(v)
            object.__setattr__(self, name, v)
            _check_prob(v, name)

    @property
    def mode(self):
        return infer_mode(self.down, self.up)

    @property
    def invertible(self):
        return self.down + self.up < 1

    def matrix(self):
        """Row-stochastic 2x2 transition ``(m00, m01, m10, m11)``."""
        d, u = self.down, self.up
        return (1 - u, u, d, 1 - d)

    def then(self, other):
        return compose_channels(self, other)

    def swapped(self):
        return NoiseChannel(self.up, self.down)

    @classmethod
    def identity(cls):
        return cls(Fraction(0), Fraction(0))

    @classmethod
    def thinning(cls, eps):
        return cls(eps, 0 * eps)

    @classmethod
    def thickening(cls, eps):
        return cls(0 * eps, eps)


def compose_channels(first, second):
    """Single channel equal to applying ``first`` and then ``second``."""
    a00, a01, a10, a11 = first.matrix()
    b00, b01, b10, b11 = second.matrix()
    up = a00 * b01 + a01 * b11
    down = a10 * b00 + a11 * b10
    return NoiseChannel(down, up)


def _channel_scalars(ch, mode):
    if mode == EXACT:
        if ch.mode == FLOAT:
            raise ModeMismatch("float channel applied to an exact measure")
        return ch.matrix()
    return tuple(float(x) for x in ch.matrix())


def apply_matrix(vec, matrix, cls=None):
    """Apply one 2x2 matrix at every site of ``vec`` (any SignedVector)."""
    cls = cls or type(vec)
    if vec.mode == EXACT:
        out = kernels.sweep_exact(vec.probs, vec.n, matrix)
    else:
        out = kernels.sweep_float(vec.probs, vec.n, matrix)
    return cls(vec.ground, out, vec.mode, validate=False)


def apply_channel(mu, ch):
    """Exact push-forward of ``mu`` through the per-site channel ``ch``."""
    return apply_matrix(mu, _channel_scalars(ch, mu.mode))


def thin(mu, eps):
    """``mu^(-,eps)``: each 1 independently becomes 0 with probability eps."""
    return apply_channel(mu, NoiseChannel(eps, 0 * eps))


def thicken(mu, eps):
    """``mu^(+,eps)``: each 0 independently becomes 1 with probability eps."""
    return apply_channel(mu, NoiseChannel(0 * eps, eps))


def complement(mu):
    """Swap 0 and 1 at every site."""
    if mu.mode == FLOAT:
        probs = mu.probs[::-1].copy()
    else:
        probs = mu.probs[::-1]
    return type(mu)(mu.ground, probs, mu.mode, validate=False)


def condition(mu, fixed):
    """Condition on the partial assignment ``fixed`` (site -> 0/1).

    Returns the normalized measure on the remaining sites, in increasing
    site order (labels carried over when present).
    """
    n = mu.n
    fixed = {int(s): int(v) for s, v in fixed.items()}
    for s, v in fixed.items():
        if not 0 <= s < n or v not in (0, 1):
            raise ParameterOutOfRange(f"bad assignment {s}->{v}")
    free = [i for i in range(n) if i not in fixed]
    if not free:
        raise ParameterOutOfRange("cannot condition on every site")
    want = sum(1 << s for s, v in fixed.items() if v)
    sub = []
    for y in range(1 << len(free)):
        x = want
        for j, site in enumerate(free):
            if (y >> j) & 1:
                x |= 1 << site
        sub.append(mu.probs[x])
    total = sum(sub, zero_scalar(mu.mode))
    if total == 0:
        raise ZeroProbabilityEvent(f"assignment {fixed} has probability zero")
    labels = tuple(mu.ground.labels[i] for i in free) if mu.ground.labels else None
    if mu.mode == FLOAT:
        probs = np.array(sub, dtype=np.float64) / total
    else:
        probs = [p / total for p in sub]
    return Measure(GroundSet(len(free), labels), probs, mu.mode, validate=mu.mode == EXACT)


def support_is_up_set(mu):
    """True iff the support is closed under raising single 0s to 1s."""
    probs = mu.probs
    for x, p in enumerate(probs):
        if p != 0:
            for i in range(mu.n):
                y = x | (1 << i)
                if probs[y] == 0:
                    return False
    return True


# --------------------------------------------------------------------------
# counts (exchangeable reduction)


@dataclass(frozen=True)
class CountDistribution:
    """Law of the number of 1s on ``n`` sites; ``probs[j] = P(count = j)``."""

    n: int
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(self.probs))
        if len(self.probs) != self.n + 1:
            raise ParameterOutOfRange("count distribution needs n+1 entries")
        if any(p < 0 for p in self.probs):
            raise NegativeMass("negative count probability")
        total = sum(self.probs)
        exact = all(isinstance(p, (Fraction, int)) for p in self.probs)
        if (exact and total != 1) or (not exact and abs(total - 1) > 1e-9):
            raise NotNormalized(f"count probabilities sum to {total}")

    @property
    def mode(self):
        return EXACT if all(isinstance(p, (Fraction, int)) for p in self.probs) else FLOAT

    def tail(self, j):
        """P(count >= j)."""
        return sum(self.probs[max(j, 0):], zero_scalar(self.mode))

    def cdf(self, j):
        """P(count <= j)."""
        return sum(self.probs[: max(j + 1, 0)], zero_scalar(self.mode))

    def mean(self):
        return sum(j * p for j, p in enumerate(self.probs))


def count_distribution(mu):
    acc = [zero_scalar(mu.mode)] * (mu.n + 1)
    for x, p in enumerate(mu.probs):
        if p != 0:
            acc[popcount(x)] += p
    if mu.mode == FLOAT:
        acc = [float(a) for a in acc]
    return CountDistribution(mu.n, tuple(acc))


def binomial_pmf(k, p):
    """Exact (or float) Binomial(k, p) probabilities."""
    q = 1 - p
    return [comb(k, j) * p**j * q ** (k - j) for j in range(k + 1)]


def count_apply_channel(c, ch):
    """Push a channel through a count law: j ones become Bin(j, 1-down) + Bin(n-j, up).

    Valid for exchangeable measures, where the count law determines the measure.
    """
    n = c.n
    mode = c.mode
    down = ch.down if mode == EXACT else float(ch.down)
    up = ch.up if mode == EXACT else float(ch.up)
    if mode == EXACT and ch.mode == FLOAT:
        raise ModeMismatch("float channel applied to an exact count law")
    out = [zero_scalar(mode)] * (n + 1)
    for j, pj in enumerate(c.probs):
        if pj == 0:
            continue
        keep = binomial_pmf(j, 1 - down) if down else [zero_scalar(mode)] * j + [one_scalar(mode)]
        if up:
            gain = binomial_pmf(n - j, up)
            for a, pa in enumerate(keep):
                if pa == 0:
                    continue
                for b, pb in enumerate(gain):
                    out[a + b] += pj * pa * pb
        else:
            for a, pa in enumerate(keep):
                out[a] += pj * pa
    return CountDistribution(n, tuple(out))


def is_exchangeable(mu):
    """True iff ``mu`` is constant on each popcount class."""
    first = {}
    for x, p in enumerate(mu.probs):
        j = popcount(x)
        if j in first:
            if first[j] != p:
                return False
        else:
            first[j] = p
    return True


def exchangeable_measure(c, ground_set=None):
    """The unique exchangeable measure with count law ``c``."""
    g = ground(ground_set or c.n)
    mode = c.mode
    per = [c.probs[j] / comb(g.n, j) for j in range(g.n + 1)]
    probs = [per[popcount(x)] for x in range(g.size)]
    if mode == FLOAT:
        probs = np.array(probs, dtype=np.float64)
    return Measure(g, probs, mode, validate=False)
