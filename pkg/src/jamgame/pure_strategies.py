"""Inter-frame outage under pure (leader/follower) strategies.

The transmitter has average power ``P_bar`` per frame and the jammer
``J_bar``.  A frame is decoded when the transmitter's frame power reaches
the required power ``P_M(J_M)`` for the jammer's frame power.  A player who
cannot cover every frame concentrates its power on a fraction of frames:
``p_t`` is the fraction of frames the transmitter is on, ``p_j`` the
probability that an active frame is jammed into outage, and

    p_out = (1 - p_t) + p_j * p_t.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .channel import FadingModel
from .errors import CurveRangeError
from .frame_solver import PowerCurve, peak_game_solve, waterfill_power

__all__ = [
    "OutageReport",
    "peak_outage",
    "peak_report",
    "maximin_outage",
    "minimax_outage",
    "minimax_objective",
    "nonintelligent_outage",
]

REGIMES = ("peak", "maximin", "minimax", "nonintelligent", "mixed")


@dataclass(frozen=True)
class OutageReport:
    """Outage probability and how it arises.

    ``chosen_P_M`` is the transmitter's power in an active frame and
    ``jam_power`` the jammer's power in an attacked frame.
    """

    p_out: float
    p_t: float
    p_j: float
    chosen_P_M: float
    regime: str
    P_bar: float
    J_bar: float
    jam_power: float

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        for name in ("p_out", "p_t", "p_j"):
            value = getattr(self, name)
            if not -1e-15 <= value <= 1 + 1e-15:
                raise ValueError(f"{name}={value} outside [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


def _check_budgets(P_bar, J_bar):
    if P_bar < 0 or J_bar < 0:
        raise ValueError("budgets must be non-negative")


def peak_outage(C_star: float, R: float) -> int:
    """1 when the equilibrium capacity falls short of ``R``, else 0."""
    return 0 if C_star >= R else 1


def peak_report(model: FadingModel, R: float, sigma2: float, P_bar: float,
                J_bar: float) -> OutageReport:
    """Outage when both players must meet their budgets in every frame."""
    _check_budgets(P_bar, J_bar)
    if P_bar == 0:
        return OutageReport(1.0, 0.0, 0.0, 0.0, "peak", P_bar, J_bar, J_bar)
    sol = peak_game_solve(model, R, sigma2, P_bar, J_bar)
    out = float(peak_outage(sol.capacity, R))
    return OutageReport(out, 1.0, out, P_bar, "peak", P_bar, J_bar, J_bar)


def maximin_outage(curve, P_bar: float, J_bar: float) -> OutageReport:
    """The jammer commits to ``J_bar`` in every frame; the transmitter
    answers with ``P_M(J_bar)`` on as many frames as its budget allows."""
    _check_budgets(P_bar, J_bar)
    need = float(curve(J_bar))
    p_t = 1.0 if P_bar >= need else P_bar / need
    return OutageReport(1.0 - p_t, p_t, 0.0, need, "maximin", P_bar, J_bar, J_bar)


def minimax_objective(curve, P_bar: float, J_bar: float, P_M):
    """Outage ``(1 - p_t) + p_j p_t`` when the transmitter commits to ``P_M``.

    Returns ``(p_out, p_t, p_j)`` arrays.  The jammer attacks a fraction
    ``J_bar / J_M(P_M)`` of all frames, i.e. ``p_j`` of the active ones,
    capped at one.
    """
    P_M = np.asarray(P_M, dtype=float)
    p_t = np.minimum(1.0, P_bar / P_M)
    cover = p_t * np.asarray(curve.inverse(P_M, extrapolate=True), dtype=float)
    if J_bar == 0:
        p_j = np.zeros_like(P_M)
    else:
        with np.errstate(divide="ignore"):
            p_j = np.where(cover > 0, np.minimum(1.0, J_bar / np.where(cover > 0, cover, 1.0)), 1.0)
    return (1.0 - p_t) + p_j * p_t, p_t, p_j


def minimax_outage(curve, P_bar: float, J_bar: float, resolution: int = 2000,
                   epsilon: float = 1e-3) -> OutageReport:
    """The transmitter commits first to a frame power and frame fraction.

    Exhaustive search over ``resolution`` geometrically spaced frame powers
    in ``[max(P_bar, P_M(0)), P_bar / epsilon]``; above the upper end the
    outage is at least ``1 - epsilon``.  With extrapolation disabled the
    search stops at the curve's last sample.
    """
    if not P_bar > 0:
        raise ValueError("P_bar must be positive")
    if J_bar < 0:
        raise ValueError("J_bar must be non-negative")
    if resolution < 1 or not 0 < epsilon < 1:
        raise ValueError("need resolution >= 1 and 0 < epsilon < 1")
    lo = max(P_bar, curve.p_wf)
    hi = P_bar / epsilon
    if isinstance(curve, PowerCurve) and not curve.extrapolate:
        hi = min(hi, float(curve.p[-1]))
    if lo > hi:
        raise CurveRangeError(f"search interval [{lo}, {hi}] is empty; "
                              "extend the curve or enable extrapolation")
    grid = np.geomspace(lo, hi, resolution) if hi > lo else np.array([lo])
    grid[0] = lo
    f, p_t, p_j = minimax_objective(curve, P_bar, J_bar, grid)
    i = int(np.argmin(f))
    P_M = float(grid[i])
    jam = float(curve.inverse(P_M, extrapolate=True))
    return OutageReport(float(min(1.0, f[i])), float(p_t[i]), float(p_j[i]), P_M,
                        "minimax", P_bar, J_bar, jam)


def nonintelligent_outage(model: FadingModel, R: float, sigma2: float, P_bar: float,
                          J_bar: float) -> OutageReport:
    """The jammer spreads ``J_bar`` flat over frames and fading states."""
    _check_budgets(P_bar, J_bar)
    need = waterfill_power(model, sigma2 + J_bar, R).power
    p_t = 1.0 if P_bar >= need else P_bar / need
    if math.isnan(p_t):
        p_t = 0.0
    return OutageReport(1.0 - p_t, p_t, 0.0, need, "nonintelligent", P_bar, J_bar, J_bar)
