"""Finite windows of determinantal processes on the integers with a
piecewise-polynomial symbol f: [0, 1] -> [0, 1]."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from . import kernels
from .errors import NumericallyInvalid, ParameterOutOfRange, SizeExceeded
from .measure import FLOAT, Measure, ground, popcount

WINDOW_CAP = 12
FOURIER_CAP = 4096
DET_TOL = 1e-9
CLAMP_TOL = 1e-9
RANGE_TOL = 1e-12

GRAMMAR = """\
kernel spec: terms joined by ';', the kernel is their sum.
  const:p               p on [0,1]
  indicator:a,b:h       h on [a,b], 0 elsewhere
  poly:c0,c1,...        c0 + c1 x + c2 x^2 + ...
  [a,b]TERM             TERM restricted to [a,b] (0 elsewhere)
numbers may be decimals or fractions a/b, e.g. "[0,0.9]indicator:0,0.9:3/4"."""


def _num(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad number {text!r}") from None


def _poly_eval(coeffs, x):
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _real_roots_in(coeffs, a, b):
    """Real roots of a nonzero polynomial in [a, b] (float, endpoints exact)."""
    coeffs = _trim(coeffs)
    out = [float(e) for e in (a, b) if _poly_eval(coeffs, e) == 0]
    if len(coeffs) > 1:
        for r in np.roots([float(c) for c in reversed(coeffs)]):
            if abs(r.imag) < 1e-9 and float(a) - 1e-12 <= r.real <= float(b) + 1e-12:
                out.append(float(r.real))
    return sorted(set(out))


@dataclass(frozen=True)
class Piece:
    a: Fraction
    b: Fraction
    coeffs: tuple  # polynomial in x (not shifted), Fractions

    def __call__(self, x):
        return _poly_eval(self.coeffs, x)

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coeffs)


class KernelFunction:
    """Piecewise polynomial on a partition of [0, 1] with values in [0, 1]."""

    def __init__(self, pieces, check=True):
        pieces = sorted((Piece(Fraction(a), Fraction(b), _trim(Fraction(c) for c in cs)) for a, b, cs in pieces), key=lambda p: p.a)
        if check:
            if not pieces or pieces[0].a != 0 or pieces[-1].b != 1:
                raise ParameterOutOfRange("pieces must cover [0, 1]")
            for p, q in zip(pieces, pieces[1:]):
                if p.b != q.a:
                    raise ParameterOutOfRange("pieces must partition [0, 1]")
            for p in pieces:
                if not p.a < p.b:
                    raise ParameterOutOfRange("empty piece")
                lo, hi = self._range(p)
                if lo < -RANGE_TOL or hi > 1 + RANGE_TOL:
                    raise ParameterOutOfRange(f"kernel leaves [0, 1] on [{p.a}, {p.b}]: range [{lo}, {hi}]")
        self.pieces = tuple(pieces)

    @staticmethod
    def _range(p):
        pts = [float(p.a), float(p.b)]
        cs = p.coeffs
        if len(cs) > 2:
            deriv = [i * c for i, c in enumerate(cs)][1:]
            pts += _real_roots_in(deriv, p.a, p.b)
        vals = [float(_poly_eval(cs, Fraction(x))) for x in pts]
        return min(vals), max(vals)

    def __call__(self, x):
        for p in self.pieces:
            if p.a <= x <= p.b:
                return float(p(x))
        raise ValueError(f"x={x} outside [0, 1]")

    def __repr__(self):
        return f"KernelFunction({[(str(p.a), str(p.b), [str(c) for c in p.coeffs]) for p in self.pieces]})"

    def scale(self, c):
        c = Fraction(c)
        return KernelFunction([(p.a, p.b, [c * x for x in p.coeffs]) for p in self.pieces])

    def __le__(self, other):
        """Pointwise f <= g, checked on the common refinement."""
        diff = other.add(self.scale_unchecked(-1))
        return all(diff._range(p)[0] >= -RANGE_TOL for p in diff.pieces)

    def scale_unchecked(self, c):
        return KernelFunction([(p.a, p.b, [Fraction(c) * x for x in p.coeffs]) for p in self.pieces], check=False)

    def add(self, other):
        cuts = sorted({p.a for p in self.pieces} | {p.b for p in self.pieces} | {p.a for p in other.pieces} | {p.b for p in other.pieces})
        out = []
        for a, b in zip(cuts, cuts[1:]):
            mid = (a + b) / 2
            c1 = next(p for p in self.pieces if p.a <= mid <= p.b).coeffs
            c2 = next(p for p in other.pieces if p.a <= mid <= p.b).coeffs
            m = max(len(c1), len(c2))
            c1, c2 = list(c1) + [0] * (m - len(c1)), list(c2) + [0] * (m - len(c2))
            out.append((a, b, [x + y for x, y in zip(c1, c2)]))
        return KernelFunction(out, check=False)

    # constructors

    @classmethod
    def constant(cls, p):
        return cls([(0, 1, [p])])

    @classmethod
    def indicator(cls, a, b, height=1):
        a, b = Fraction(a), Fraction(b)
        if not 0 <= a < b <= 1:
            raise ParameterOutOfRange("indicator needs 0 <= a < b <= 1")
        pieces = [(a, b, [height])]
        if a > 0:
            pieces.append((0, a, [0]))
        if b < 1:
            pieces.append((b, 1, [0]))
        return cls(pieces)

    @classmethod
    def polynomial(cls, coeffs):
        return cls([(0, 1, list(coeffs))])

    @classmethod
    def parse(cls, text):
        """Parse the kernel spec grammar (see ``GRAMMAR``)."""
        total = None
        for raw in filter(None, (t.strip() for t in text.split(";"))):
            m = re.fullmatch(r"(?:\[([^,\]]+),([^\]]+)\])?\s*(const|indicator|poly):(.*)", raw)
            if not m:
                raise ValueError(f"bad kernel term {raw!r}")
            lo, hi, kind, args = m.groups()
            if kind == "const":
                term = cls([(0, 1, [_num(args)])], check=False)
            elif kind == "indicator":
                parts = args.split(":")
                if len(parts) != 2 or len(parts[0].split(",")) != 2:
                    raise ValueError(f"indicator needs 'a,b:height', got {args!r}")
                a, b = (_num(x) for x in parts[0].split(","))
                h = _num(parts[1])
                if not 0 <= a < b <= 1:
                    raise ValueError("indicator needs 0 <= a < b <= 1")
                pieces = [(a, b, [h])] + ([(0, a, [0])] if a > 0 else []) + ([(b, 1, [0])] if b < 1 else [])
                term = cls(pieces, check=False)
            else:
                term = cls([(0, 1, [_num(c) for c in args.split(",")])], check=False)
            if lo is not None:
                term = term.restrict(_num(lo), _num(hi))
            total = term if total is None else total.add(term)
        if total is None:
            raise ValueError("empty kernel spec")
        return cls([(p.a, p.b, p.coeffs) for p in total.pieces])

    def restrict(self, a, b):
        if not 0 <= a < b <= 1:
            raise ValueError("restriction interval must satisfy 0 <= a < b <= 1")
        mask = KernelFunction([(a, b, [1])] + ([(0, a, [0])] if a > 0 else []) + ([(b, 1, [0])] if b < 1 else []), check=False)
        cuts = sorted({p.a for p in self.pieces} | {p.b for p in self.pieces} | {a, b})
        out = []
        for lo, hi in zip(cuts, cuts[1:]):
            mid = (lo + hi) / 2
            on = next(p for p in mask.pieces if p.a <= mid <= p.b).coeffs[0]
            cs = next(p for p in self.pieces if p.a <= mid <= p.b).coeffs
            out.append((lo, hi, [c * on for c in cs]))
        return KernelFunction(out, check=False)


@dataclass(frozen=True)
class WindowSpec:
    points: tuple

    def __post_init__(self):
        pts = tuple(int(p) for p in self.points)
        if len(set(pts)) != len(pts):
            raise ParameterOutOfRange("window points must be distinct")
        if len(pts) > WINDOW_CAP:
            raise SizeExceeded(f"window size {len(pts)} exceeds {WINDOW_CAP}")
        object.__setattr__(self, "points", pts)


# --------------------------------------------------------------------------
# Fourier coefficients and determinants


def _monomial_integrals(a, b, omega, degree):
    """int_a^b x^m e^{-i omega x} dx for m = 0..degree (omega != 0), by parts."""
    ea, eb = np.exp(-1j * omega * a), np.exp(-1j * omega * b)
    out = [(eb - ea) / (-1j * omega)]
    for m in range(1, degree + 1):
        boundary = (b**m * eb - a**m * ea) / (-1j * omega)
        out.append(boundary + m / (1j * omega) * out[m - 1])
    return out


def fourier_coefficient(f, k):
    """f^(k) = int_0^1 f(x) e^{-2 pi i k x} dx in closed form."""
    k = int(k)
    if abs(k) > FOURIER_CAP:
        raise ParameterOutOfRange(f"|k| must be <= {FOURIER_CAP}")
    total = 0j
    for p in f.pieces:
        if p.is_zero:
            continue
        a, b = float(p.a), float(p.b)
        if k == 0:
            total += float(sum(c * (p.b ** (m + 1) - p.a ** (m + 1)) / (m + 1) for m, c in enumerate(p.coeffs)))
        else:
            ints = _monomial_integrals(a, b, 2 * math.pi * k, len(p.coeffs) - 1)
            total += sum(float(c) * v for c, v in zip(p.coeffs, ints))
    return complex(total)


def toeplitz_matrix(f, points):
    pts = list(points)
    lags = {e - d for d in pts for e in pts}
    fh = {lag: fourier_coefficient(f, lag) for lag in lags}
    return np.array([[fh[e - d] for e in pts] for d in pts], dtype=complex)


def _checked_det(values):
    values = np.asarray(values)
    if np.any(np.abs(values.imag) > DET_TOL):
        raise NumericallyInvalid("determinant has a non-negligible imaginary part")
    re_ = values.real
    if np.any(re_ < -DET_TOL) or np.any(re_ > 1 + DET_TOL):
        raise NumericallyInvalid(f"ones-probability outside [0, 1]: {re_[(re_ < -DET_TOL) | (re_ > 1 + DET_TOL)][:3]}")
    return np.clip(re_, 0.0, 1.0)


def ones_probability(f, window):
    """P(all points of the window are 1) = det[f^(e_j - e_i)]."""
    if not isinstance(window, WindowSpec):
        window = WindowSpec(tuple(window))
    if not window.points:
        return 1.0
    return float(_checked_det(np.linalg.det(toeplitz_matrix(f, window.points))))


def ones_table(f, n):
    """P(ones on A) for every A subset of {0..n-1}, indexed by bitmask."""
    if n > WINDOW_CAP:
        raise SizeExceeded(f"window size {n} exceeds {WINDOW_CAP}")
    T = toeplitz_matrix(f, range(n))
    table = np.ones(1 << n)
    by_size = {}
    for x in range(1, 1 << n):
        by_size.setdefault(popcount(x), []).append(x)
    for size, masks in by_size.items():
        idx = np.array([[i for i in range(n) if (x >> i) & 1] for x in masks])
        subs = T[idx[:, :, None], idx[:, None, :]]
        table[masks] = _checked_det(np.linalg.det(subs))
    return table


def window_measure(f, n):
    """Law of the window {0..n-1} (float mode), by inclusion-exclusion over ones-probabilities."""
    probs = kernels.sweep_float(ones_table(f, n), n, (1.0, 0.0, -1.0, 1.0))
    probs = np.asarray(probs, dtype=np.float64)
    if probs.min(initial=0.0) < -CLAMP_TOL:
        raise NumericallyInvalid(f"window measure entry {probs.min()} below -{CLAMP_TOL}")
    probs = np.maximum(probs, 0.0)
    s = probs.sum()
    if abs(s - 1) > CLAMP_TOL:
        raise NumericallyInvalid(f"window measure sums to {s}")
    return Measure(ground(n), probs / s, FLOAT)


# --------------------------------------------------------------------------
# geometric and harmonic means


def _quad(fn, a, b, breaks):
    pts = [x for x in breaks if a < x < b]
    val, _ = integrate.quad(fn, a, b, points=pts or None, epsabs=1e-11, epsrel=1e-11, limit=200)
    return val


def geometric_mean(f):
    """exp int log f; 0 when f vanishes on a set of positive length."""
    total = 0.0
    for p in f.pieces:
        if p.is_zero:
            return 0.0
        a, b = float(p.a), float(p.b)
        cs = [float(c) for c in p.coeffs]
        if len(cs) == 1:
            total += (b - a) * math.log(cs[0])
            continue
        roots = _real_roots_in(p.coeffs, p.a, p.b)
        total += _quad(lambda x: math.log(max(abs(_poly_eval(cs, x)), 1e-300)), a, b, roots)
    return math.exp(total)


def harmonic_mean(f):
    """(int 1/f)^-1; 0 when f has a zero anywhere on [0, 1] (the integral diverges)."""
    total = 0.0
    for p in f.pieces:
        if p.is_zero or _real_roots_in(p.coeffs, p.a, p.b):
            return 0.0
        a, b = float(p.a), float(p.b)
        cs = [float(c) for c in p.coeffs]
        if len(cs) == 1:
            total += (b - a) / cs[0]
        else:
            total += _quad(lambda x: 1.0 / _poly_eval(cs, x), a, b, [])
    return 1.0 / total
