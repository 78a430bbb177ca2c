"""Bracketed scalar root finding with geometric bracket growth."""

from __future__ import annotations

from typing import Callable

from scipy.optimize import brentq

from .errors import ConvergenceError

MAX_GROWTH = 200


def grow_up(f: Callable[[float], float], lo: float, hi: float,
            factor: float = 2.0, what: str = "root") -> float:
    """Return an upper end ``hi`` with ``f(hi)`` of opposite sign to ``f(lo)``."""
    f_lo = f(lo)
    for _ in range(MAX_GROWTH):
        f_hi = f(hi)
        if (f_hi > 0) != (f_lo > 0) or f_hi == 0:
            return hi
        hi *= factor
    raise ConvergenceError(f"could not bracket {what}", lo=lo, hi=hi,
                           f_lo=f_lo, f_hi=f_hi)


def grow_down(f: Callable[[float], float], lo: float, hi: float,
              factor: float = 2.0, what: str = "root") -> float:
    """Return a lower end ``lo`` with ``f(lo)`` of opposite sign to ``f(hi)``."""
    f_hi = f(hi)
    for _ in range(MAX_GROWTH):
        f_lo = f(lo)
        if (f_lo > 0) != (f_hi > 0) or f_lo == 0:
            return lo
        lo /= factor
    raise ConvergenceError(f"could not bracket {what}", lo=lo, hi=hi,
                           f_lo=f_lo, f_hi=f_hi)


def solve(f: Callable[[float], float], lo: float, hi: float, *,
          xtol: float = 1e-300, rtol: float = 8.9e-16,
          what: str = "root") -> float:
    """Brent's method on a sign-changing bracket, with a readable failure."""
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ConvergenceError(f"{what} is not bracketed", lo=lo, hi=hi,
                               f_lo=f_lo, f_hi=f_hi)
    try:
        return brentq(f, lo, hi, xtol=xtol, rtol=rtol, maxiter=200)
    except RuntimeError as exc:
        raise ConvergenceError(f"{what} did not converge", lo=lo, hi=hi) from exc
