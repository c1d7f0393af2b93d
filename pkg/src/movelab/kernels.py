"""Kernel dispatch: compiled ``_ckernels`` when importable, else pure Python.

Set ``MOVELAB_PURE_PYTHON=1`` to force the fallback, or call
:func:`set_backend` at runtime (the benchmark and tests do this).
"""

import os
from contextlib import contextmanager
from fractions import Fraction
from math import lcm

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

INT64_SAFE = 1 << 62

_backend = "python" if (_ckernels is None or os.environ.get("MOVELAB_PURE_PYTHON")) else "cython"


def available_backends():
    return ["python"] + (["cython"] if _ckernels is not None else [])


def get_backend():
    return _backend


def set_backend(name):
    global _backend
    if name not in available_backends():
        raise ValueError(f"backend {name!r} not available")
    _backend = name


@contextmanager
def backend(name):
    old = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)


def _impl():
    return _ckernels if _backend == "cython" else _pykernels


def common_denominator(values):
    d = 1
    for v in values:
        d = lcm(d, v.denominator)
    return d


def sweep_exact(values, n, matrix):
    """Per-site 2x2 sweep on Fractions, done on integers with a common
    denominator.  ``matrix`` is ``(m00, m01, m10, m11)``, rows = old value."""
    den = common_denominator(values)
    nums = [v.numerator * (den // v.denominator) for v in values]
    mats = [Fraction(x) for x in matrix]
    mden = common_denominator(mats)
    mi = [m.numerator * (mden // m.denominator) for m in mats]
    out = _pykernels.sweep_int(nums, n, *mi)
    total_den = den * mden**n
    return [Fraction(x, total_den) for x in out]


def sweep_float(arr, n, matrix):
    return _impl().sweep_float(arr, n, *(float(x) for x in matrix))


def maxflow(num_nodes, s, t, tails, heads, caps):
    """Integer max flow; returns ``(value, edge_flows, reachable)``."""
    # residual capacities never exceed the original ones and the flow value is
    # bounded by the capacity leaving s, so these two bounds rule out overflow
    out_of_s = sum(c for tl, c in zip(tails, caps) if tl == s)
    if _backend == "cython" and max(caps, default=0) < INT64_SAFE and out_of_s < INT64_SAFE:
        value, flows, reach = _ckernels.dinic(num_nodes, s, t, tails, heads, caps)
        return int(value), [int(f) for f in flows], [bool(r) for r in reach]
    return _pykernels.dinic(num_nodes, s, t, list(tails), list(heads), list(caps))


def upset_masks(n):
    return _impl().upset_masks(n)


def fkg_scan(masks, weights, w_event, exact, tol=0.0):
    if _backend == "cython":
        if not exact:
            return _ckernels.fkg_scan(masks, [float(w) for w in weights], float(w_event), False, tol)
        if sum(weights) < INT64_SAFE and w_event < INT64_SAFE:
            return _ckernels.fkg_scan(masks, weights, w_event, True, 0.0)
    return _pykernels.fkg_scan(masks, weights, w_event, exact, tol)
