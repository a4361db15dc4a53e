"""Adaptive Simpson integration for Gaussian-kernel payoff integrands.

The integrands priced here are a smooth Gaussian density times a payoff that
is smooth except for a single kink; callers place the kink on a panel
boundary so every panel sees a smooth function. Subdivision stops when the
Richardson error estimate meets the tolerance, or fails loudly at the depth
cap.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable

from .errors import NumericalError

_COARSE_BLOCKS = 16


def _simpson(fa: float, fm: float, fb: float, width: float) -> float:
    return width * (fa + 4.0 * fm + fb) / 6.0


def _coarse_panel(f: Callable[[float], float], a: float, b: float) -> float:
    """Composite Simpson estimate used only to set the error scale."""
    h = (b - a) / _COARSE_BLOCKS
    total = 0.0
    fa = f(a)
    for i in range(_COARSE_BLOCKS):
        lo = a + i * h
        hi = lo + h
        fm = f(0.5 * (lo + hi))
        fb = f(hi)
        total += _simpson(fa, fm, fb, h)
        fa = fb
    return total


def _adaptive(
    f: Callable[[float], float],
    a: float,
    fa: float,
    b: float,
    fb: float,
    fm: float,
    whole: float,
    eps: float,
    depth: int,
    max_depth: int,
) -> float:
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    # second condition: delta is at the rounding floor of the local pieces,
    # so further splits only chase floating-point noise
    if (
        abs(delta) <= 15.0 * eps
        or abs(delta) <= 4e-16 * (abs(left) + abs(right))
        or not (a < m < b)
    ):
        return left + right + delta / 15.0
    if depth >= max_depth:
        raise NumericalError(
            f"adaptive quadrature stalled on [{a:.6g}, {b:.6g}] at depth {depth}: "
            f"|error estimate| {abs(delta) / 15.0:.3g} exceeds tolerance {eps:.3g}"
        )
    half = 0.5 * eps
    return _adaptive(
        f, a, fa, m, fm, flm, left, half, depth + 1, max_depth
    ) + _adaptive(f, m, fm, b, fb, frm, right, half, depth + 1, max_depth)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    breakpoints: Iterable[float] = (),
    rel_tol: float = 1e-10,
    max_depth: int = 48,
) -> float:
    """Integrate f over [a, b] to a relative tolerance.

    Args:
        f: Smooth integrand on each panel between consecutive breakpoints.
        a, b: Integration bounds, a <= b.
        breakpoints: Interior points (payoff kinks) made mandatory panel
            boundaries; values outside (a, b) are ignored.
        rel_tol: Target relative accuracy against a coarse whole-interval
            estimate of the integral's magnitude.
        max_depth: Subdivision cap per panel.

    Returns:
        The integral estimate.

    Raises:
        NumericalError: If some panel still violates its tolerance at the
            subdivision cap.
    """
    if a > b:
        raise ValueError(f"integration bounds out of order: {a} > {b}")
    if a == b:
        return 0.0
    points = [a, *sorted(p for p in set(breakpoints) if a < p < b), b]
    panels = list(zip(points[:-1], points[1:]))
    scale = sum(_coarse_panel(f, lo, hi) for lo, hi in panels)
    eps = rel_tol * max(abs(scale), 1e-300) / len(panels)
    total = 0.0
    for lo, hi in panels:
        flo = f(lo)
        fhi = f(hi)
        fmid = f(0.5 * (lo + hi))
        whole = _simpson(flo, fmid, fhi, hi - lo)
        total += _adaptive(f, lo, flo, hi, fhi, fmid, whole, eps, 0, max_depth)
    return total
