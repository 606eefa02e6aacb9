"""Adaptive Simpson quadrature for piecewise-smooth 1-D integrands."""

import numpy as np


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=40, min_intervals=8):
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    The interval is pre-split into ``min_intervals`` panels so that kinks
    well inside the domain (piecewise ambit boundaries) are localized, then
    each panel is refined recursively with the usual Richardson criterion.
    """
    a = float(a)
    b = float(b)
    if not b > a:
        return 0.0
    edges = np.linspace(a, b, min_intervals + 1)
    per_panel_tol = tol / min_intervals
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += _simpson_panel(f, lo, hi, per_panel_tol, max_depth)
    return total


def _simp(f_lo, f_mid, f_hi, h):
    return h / 6.0 * (f_lo + 4.0 * f_mid + f_hi)


def _simpson_panel(f, lo, hi, tol, max_depth):
    mid = 0.5 * (lo + hi)
    f_lo, f_mid, f_hi = float(f(lo)), float(f(mid)), float(f(hi))
    whole = _simp(f_lo, f_mid, f_hi, hi - lo)
    return _refine(f, lo, hi, f_lo, f_mid, f_hi, whole, tol, max_depth)


def _refine(f, lo, hi, f_lo, f_mid, f_hi, whole, tol, depth):
    mid = 0.5 * (lo + hi)
    lmid = 0.5 * (lo + mid)
    rmid = 0.5 * (mid + hi)
    f_lmid, f_rmid = float(f(lmid)), float(f(rmid))
    left = _simp(f_lo, f_lmid, f_mid, mid - lo)
    right = _simp(f_mid, f_rmid, f_hi, hi - mid)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _refine(f, lo, mid, f_lo, f_lmid, f_mid, left, tol / 2.0, depth - 1) + _refine(
        f, mid, hi, f_mid, f_rmid, f_hi, right, tol / 2.0, depth - 1
    )
