import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from movelab.determinantal import (
    KernelFunction,
    WindowSpec,
    fourier_coefficient,
    geometric_mean,
    harmonic_mean,
    ones_probability,
    ones_table,
    toeplitz_matrix,
    window_measure,
)
from movelab.domination import dominates, p_max
from movelab.errors import ParameterOutOfRange, SizeExceeded
from movelab.measure import FLOAT, ground, product_measure, thin

X = KernelFunction.polynomial([0, 1])
HALF_IND = KernelFunction.indicator(0, F(1, 2))
G = KernelFunction.parse("[0,0.9]indicator:0,0.9:3/4")
KERNELS = {
    "x": X,
    "half-indicator": HALF_IND,
    "g": G,
    "affine": KernelFunction.polynomial([F(1, 2), F(1, 2)]),
    "quadratic": KernelFunction.polynomial([F(1, 10), 0, F(4, 5)]),
    "two-piece": KernelFunction.parse("[0,1/3]const:0.2;[1/3,1]poly:0,1"),
}


def quad_coefficient(f, k):
    breaks = sorted({float(p.a) for p in f.pieces} | {float(p.b) for p in f.pieces})
    re = sum(integrate.quad(lambda x: f(x) * math.cos(2 * math.pi * k * x), a, b, limit=400)[0] for a, b in zip(breaks, breaks[1:]))
    im = sum(integrate.quad(lambda x: -f(x) * math.sin(2 * math.pi * k * x), a, b, limit=400)[0] for a, b in zip(breaks, breaks[1:]))
    return complex(re, im)


def test_fourier_examples():
    c = KernelFunction.constant(F(3, 10))
    assert fourier_coefficient(c, 0) == pytest.approx(0.3)
    assert abs(fourier_coefficient(c, 5)) < 1e-15
    assert fourier_coefficient(HALF_IND, 0) == pytest.approx(0.5)
    assert abs(fourier_coefficient(HALF_IND, 1) - (-1j / math.pi)) < 1e-15
    assert fourier_coefficient(X, 0) == pytest.approx(0.5)
    for k in (1, 2, -3, 17):
        assert abs(fourier_coefficient(X, k) - 1j / (2 * math.pi * k)) < 1e-14


@pytest.mark.parametrize("name", sorted(KERNELS))
def test_fourier_against_quadrature(name):
    f = KERNELS[name]
    for k in range(-6, 7):
        assert abs(fourier_coefficient(f, k) - quad_coefficient(f, k)) < 1e-9
        assert abs(fourier_coefficient(f, -k) - fourier_coefficient(f, k).conjugate()) < 1e-15


def test_fourier_cap():
    with pytest.raises(ParameterOutOfRange):
        fourier_coefficient(X, 4097)


def test_ones_probability_examples():
    assert ones_probability(X, [0, 1]) == pytest.approx(0.25 - 1 / (4 * math.pi**2), abs=1e-15)
    assert ones_probability(KernelFunction.constant(F(2, 5)), [0, 3, 7]) == pytest.approx(0.4**3, abs=1e-15)
    assert ones_probability(G, [5]) == pytest.approx(0.675, abs=1e-15)
    assert ones_probability(G, []) == 1.0


@settings(max_examples=40)
@given(st.lists(st.integers(-30, 30), min_size=1, max_size=6, unique=True), st.integers(-100, 100), st.sampled_from(sorted(KERNELS)))
def test_translation_invariance(points, shift, name):
    f = KERNELS[name]
    a = ones_probability(f, points)
    b = ones_probability(f, [p + shift for p in points])
    assert abs(a - b) <= 1e-12


def test_toeplitz_is_hermitian():
    T = toeplitz_matrix(X, range(5))
    assert np.allclose(T, T.conj().T, atol=1e-15)


def test_window_spec_validation():
    with pytest.raises(ParameterOutOfRange):
        WindowSpec((1, 1))
    with pytest.raises(SizeExceeded):
        WindowSpec(tuple(range(13)))
    with pytest.raises(SizeExceeded):
        ones_table(X, 13)


def test_window_of_constant_is_product():
    for n in (1, 4, 8):
        mu = window_measure(KernelFunction.constant(F(1, 3)), n)
        assert mu.mode == FLOAT
        assert mu.allclose(product_measure(ground(n), F(1, 3)), atol=1e-12)


def test_window_of_identity_kernel():
    mu = window_measure(X, 2)
    assert mu["11"] == pytest.approx(0.22466970408941556, abs=1e-14)
    assert mu.marginal(0) == pytest.approx(0.5, abs=1e-14)
    assert mu.marginal(1) == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("n", range(1, 9))
def test_noise_identity(n):
    eps = F(1, 5)
    lhs = window_measure(G.scale(1 - eps), n)
    rhs = thin(window_measure(G, n), float(eps))
    assert lhs.allclose(rhs, atol=1e-10)


def test_geometric_mean_examples():
    assert geometric_mean(KernelFunction.constant(F(2, 5))) == pytest.approx(0.4, abs=1e-12)
    assert geometric_mean(X) == pytest.approx(1 / math.e, abs=1e-8)
    assert geometric_mean(G) == 0
    assert geometric_mean(KERNELS["affine"]) == pytest.approx(2 / math.e, abs=1e-8)


def test_harmonic_mean_examples():
    assert harmonic_mean(KernelFunction.constant(F(2, 5))) == pytest.approx(0.4, abs=1e-12)
    assert harmonic_mean(X) == 0
    assert harmonic_mean(G) == 0
    assert harmonic_mean(KERNELS["affine"]) == pytest.approx(1 / (2 * math.log(2)), abs=1e-8)


@pytest.mark.parametrize("name", ["x", "affine", "quadratic", "two-piece"])
@pytest.mark.parametrize("eps", [F(1, 10), F(1, 2), F(9, 10)])
def test_geometric_mean_scaling(name, eps):
    f = KERNELS[name]
    assert geometric_mean(f.scale(1 - eps)) == pytest.approx(float(1 - eps) * geometric_mean(f), abs=1e-8)


def test_monotone_kernels_give_ordered_windows():
    pairs = [
        (KERNELS["g"], KernelFunction.constant(F(3, 4))),
        (X.scale(F(1, 2)), X),
        (X, KERNELS["affine"]),
        (KernelFunction.parse("[0,0.5]const:0.5"), HALF_IND),
        (KERNELS["two-piece"], KernelFunction.parse("[0,1/3]const:0.3;[1/3,1]poly:1/20,19/20")),
    ]
    for f, g in pairs:
        assert f <= g
        for n in range(1, 9):
            assert dominates(window_measure(f, n), window_measure(g, n)).dominated


def test_kernel_order_detects_crossing():
    assert not (X <= KernelFunction.constant(F(1, 2)))
    assert not (KernelFunction.constant(F(1, 2)) <= X)


def test_identity_kernel_windows_stay_above_geometric_mean():
    gm = geometric_mean(X)
    vals = [float(p_max(window_measure(X, n), tol=1e-9)) for n in range(2, 11)]
    assert all(v >= gm - 1e-6 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(0.47399, abs=1e-5)
    assert vals[-1] == pytest.approx(0.41971, abs=1e-5)


def test_affine_kernel_windows_stay_above_geometric_mean():
    f = KERNELS["affine"]
    gm = geometric_mean(f)
    vals = [float(p_max(window_measure(f, n), tol=1e-9)) for n in range(1, 9)]
    assert all(v >= gm - 1e-6 for v in vals)
    assert all(a >= b - 1e-9 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize(
    "text",
    ["", "const", "const:", "const:abc", "box:0,1", "indicator:0.5:1", "indicator:0.6,0.2:1", "[0.5,0.2]const:1", "const:1.5", "const:-0.1", "poly:0,2"],
)
def test_grammar_errors(text):
    with pytest.raises(ValueError):
        KernelFunction.parse(text)


def test_grammar_sum_and_restriction():
    f = KernelFunction.parse("[0,1/2]const:1/4; [1/2,1]poly:0,1")
    assert f(0.25) == 0.25 and f(0.75) == 0.75
    h = KernelFunction.parse("const:0.25;indicator:0,0.5:0.5")
    assert h(0.1) == 0.75 and h(0.9) == 0.25
