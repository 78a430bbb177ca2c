"""Intra-frame power allocation.

Everything in this module works inside a single frame: the transmitter
spreads its frame power over the fading states ``h`` and the jammer does the
same with its own budget.  The central object is the required-power curve
``P_M(J_M)``, the least transmitter frame power that still guarantees rate
``R`` when the jammer spends ``J_M`` optimally against it.

Rates are in nats per channel use; the noise power is ``sigma2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _roots
from .channel import FadingModel
from .errors import ConvergenceError, JamGameError, ResolutionError, StructureError

__all__ = [
    "Profile",
    "FrameSolution",
    "WaterFilling",
    "PeakGameSolution",
    "ergodic_capacity",
    "mean_power",
    "waterfill_power",
    "solve_problem1",
    "solve_problem1_discrete",
    "RequiredPower",
    "required_tx_power_curve",
    "required_jam_power",
    "peak_game_solve",
    "jammer_best_response",
    "transmitter_best_response",
    "bayes_frame_profiles",
    "nocsi_mu_prime",
    "nocsi_curve",
]

# Jammer budgets below this are treated as zero.
J_ZERO = 1e-9


class Profile:
    """A power allocation as a vectorized function of the gain.

    ``breakpoints`` lists the gains where the function changes formula; the
    capacity integrator splits there so each piece is smooth.
    """

    def __init__(self, func: Callable[[np.ndarray], np.ndarray],
                 breakpoints: Sequence[float] = ()):
        self._func = func
        self.breakpoints = tuple(float(b) for b in breakpoints if math.isfinite(b))

    @classmethod
    def constant(cls, value: float) -> Profile:
        value = float(value)
        return cls(lambda h: np.full(np.shape(h), value))

    def __call__(self, h):
        h = np.asarray(h, dtype=float)
        return self._func(h)


def _as_profile(obj) -> Profile:
    if isinstance(obj, Profile):
        return obj
    if callable(obj):
        return Profile(lambda h: np.broadcast_to(np.asarray(obj(h), dtype=float), h.shape))
    return Profile.constant(obj)


def _split_points(model: FadingModel, *profiles: Profile) -> list[float]:
    cuts = {0.0, math.inf}
    for prof in profiles:
        cuts.update(b for b in prof.breakpoints if 0 < b < model.h_max)
    return sorted(cuts)


def _integrate_pieces(model: FadingModel, f, edges: list[float]) -> float:
    return math.fsum(model.integrate(f, lo, hi) for lo, hi in zip(edges, edges[1:]))


def ergodic_capacity(model: FadingModel, tx, jam, sigma2: float) -> float:
    """``E[log(1 + h P(h) / (sigma2 + J(h)))]`` in nats per channel use.

    ``tx`` and ``jam`` may be numbers, vectorized callables or
    :class:`Profile` objects.
    """
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    tx, jam = _as_profile(tx), _as_profile(jam)

    def rate(h):
        p, j = tx(h), jam(h)
        if np.any(p < -1e-12) or np.any(j < -1e-12):
            raise ValueError("power profiles must be non-negative where the gain has mass")
        return np.log1p(h * np.maximum(p, 0) / (sigma2 + np.maximum(j, 0)))

    return _integrate_pieces(model, rate, _split_points(model, tx, jam))


def mean_power(model: FadingModel, profile) -> float:
    """Average of a power profile over the gain law."""
    profile = _as_profile(profile)
    return _integrate_pieces(model, profile, _split_points(model, profile))


# ---------------------------------------------------------------------------
# water-filling


@dataclass(frozen=True)
class WaterFilling:
    """Water-filling against a constant noise floor.

    ``level`` is the water level, ``power`` the average power and ``h0`` the
    gain below which nothing is sent (``floor / level``).
    """

    level: float
    power: float
    h0: float
    floor: float

    def profile(self) -> Profile:
        level, floor, h0 = self.level, self.floor, self.h0
        return Profile(lambda h: np.where(h > h0, level - floor / np.maximum(h, 1e-300), 0.0),
                       (h0,))


def _wf_threshold(model: FadingModel, R: float) -> float:
    # h0 with E[log(h/h0); h >= h0] = R; the left side decreases in h0.
    def excess(t):
        h0 = math.exp(t)
        return model.integrate(lambda h: np.log(h / h0), h0) - R

    top = math.log(model.h_max)
    lo = top - 1.0
    while excess(lo) <= 0:
        lo -= 1.0
        if lo < -700:
            raise ConvergenceError("water level exceeds the bracket cap", R=R, log_h0=lo)
    return math.exp(_roots.solve(excess, lo, top, what="water level"))


def waterfill_power(model: FadingModel, floor: float, R: float) -> WaterFilling:
    """Least average power reaching rate ``R`` against a constant floor.

    The allocation is ``P(h) = [level - floor/h]_+``.  The threshold does not
    depend on the floor, so the power is linear in it.
    """
    if R < 0:
        raise ValueError(f"R must be non-negative, got {R}")
    if not floor > 0:
        raise ValueError(f"floor must be positive, got {floor}")
    if R == 0:
        return WaterFilling(0.0, 0.0, math.inf, floor)
    h0 = _wf_threshold(model, R)
    power = floor * model.integrate(lambda h: 1.0 / h0 - 1.0 / h, h0)
    return WaterFilling(floor / h0, power, h0, floor)


# ---------------------------------------------------------------------------
# maximin frame problem (jammer commits first)


@dataclass(frozen=True)
class FrameSolution:
    """Optimal intra-frame allocations when the jammer commits first.

    The transmitter sends on ``[h0, inf)`` and the jammer is present on
    ``[h_star, inf)``; ``h_star`` is ``inf`` when there is no jammer.
    ``jam_profile`` is the total interference ``x(h) = J(h) + sigma2``.
    """

    h0: float
    h_star: float
    mu: float
    lam: float
    P_M: float
    J_M: float
    sigma2: float
    R: float
    tx_profile: Profile = field(repr=False)
    jam_profile: Profile = field(repr=False)

    @property
    def jammer_profile(self) -> Profile:
        """Jammer allocation ``J(h) = x(h) - sigma2``."""
        x, sigma2 = self.jam_profile, self.sigma2
        return Profile(lambda h: x(h) - sigma2, x.breakpoints)


def _continuous_profiles(h0, h_star, mu, lam, sigma2):
    def x(h):
        return np.where(h >= h_star, lam * h / (1.0 + mu * h), sigma2)

    def p(h):
        safe = np.maximum(h, 1e-300)
        below = np.where(h > h0, lam - sigma2 / safe, 0.0)
        return np.where(h >= h_star, mu * lam * h / (1.0 + mu * h), below)

    return Profile(p, (h0, h_star)), Profile(x, (h_star,))


def _waterfill_solution(model, R, sigma2) -> FrameSolution:
    wf = waterfill_power(model, sigma2, R)
    return FrameSolution(
        h0=wf.h0, h_star=math.inf, mu=0.0, lam=wf.level, P_M=wf.power, J_M=0.0,
        sigma2=sigma2, R=R, tx_profile=wf.profile(), jam_profile=Profile.constant(sigma2),
    )


def _check_inputs(R, sigma2, J_M):
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    if J_M < 0 or not math.isfinite(J_M):
        raise ValueError(f"J_M must be finite and non-negative, got {J_M}")


def solve_problem1(model: FadingModel, R: float, sigma2: float, J_M: float) -> FrameSolution:
    """Maximin intra-frame optimum for a jammer frame budget ``J_M``.

    Unknowns are the thresholds ``h0 < h_star`` and the jammer multiplier
    ``mu`` tied by ``h0 = h_star / (1 + mu h_star)``.  For each trial
    ``h_star`` the rate equation fixes ``mu`` (increasing in ``h_star``);
    the jammer budget residual is then decreasing in ``h_star`` and a single
    outer root search finishes the job.

    Discrete gain laws are routed to :func:`solve_problem1_discrete`.
    """
    _check_inputs(R, sigma2, J_M)
    if model.is_discrete:
        return solve_problem1_discrete(model, R, sigma2, J_M)
    if J_M < J_ZERO:
        return _waterfill_solution(model, R, sigma2)

    h0_wf = _wf_threshold(model, R)
    target = J_M / sigma2

    def rate_gap(h_star, h0):
        mu = 1.0 / h0 - 1.0 / h_star
        inner = model.integrate(lambda h: np.log(h / h0), h0, h_star)
        outer = model.integrate(lambda h: np.log1p(mu * h), h_star)
        return inner + outer - R

    def threshold(h_star):
        # h0 in (0, min(h_star, h0_wf)] from the rate equation.
        top = math.log(min(h_star, h0_wf))
        if rate_gap(h_star, math.exp(top)) >= 0:
            return math.exp(top)
        lo = top - 1.0
        while rate_gap(h_star, math.exp(lo)) < 0:
            lo -= 1.0
            if lo < -700:
                raise ConvergenceError("rate equation not bracketed", h_star=h_star)
        t = _roots.solve(lambda t: rate_gap(h_star, math.exp(t)), lo, top,
                         what="transmitter threshold")
        return math.exp(t)

    def budget_gap(s):
        h_star = math.exp(s)
        h0 = threshold(h_star)
        mu = 1.0 / h0 - 1.0 / h_star
        used = model.integrate(lambda h: h / (h0 * (1.0 + mu * h)) - 1.0, h_star)
        return used - target

    s_hi = math.log(h0_wf) + 1.0
    while budget_gap(s_hi) > 0:
        s_hi += 1.0
        if s_hi > math.log(model.h_max) + 1:
            raise StructureError(f"jammer region is empty for J_M={J_M}")
    s_lo = s_hi - 1.0
    while budget_gap(s_lo) < 0:
        s_lo -= 1.0
        if s_lo < -700:
            raise ConvergenceError("jammer threshold not bracketed", J_M=J_M)
    s = _roots.solve(budget_gap, s_lo, s_hi, what="jammer threshold")

    h_star = math.exp(s)
    h0 = threshold(h_star)
    mu = 1.0 / h0 - 1.0 / h_star
    lam = sigma2 / h0
    P_M = (model.integrate(lambda h: lam - sigma2 / h, h0, h_star)
           + model.integrate(lambda h: mu * lam * h / (1.0 + mu * h), h_star))
    tx, x = _continuous_profiles(h0, h_star, mu, lam, sigma2)
    return FrameSolution(h0=h0, h_star=h_star, mu=mu, lam=lam, P_M=P_M, J_M=J_M,
                         sigma2=sigma2, R=R, tx_profile=tx, jam_profile=x)


def _discrete_profiles(h0, h_star, mu, lam, sigma2):
    def x(h):
        return np.where(h >= h_star, lam * h / (1.0 + mu * h), sigma2)

    def p(h):
        safe = np.maximum(h, 1e-300)
        below = np.maximum(lam - sigma2 / safe, 0.0)
        return np.where(h >= h_star, mu * lam * h / (1.0 + mu * h), np.where(h > 0, below, 0.0))

    return Profile(p), Profile(x)


def solve_problem1_discrete(pmf: FadingModel, R: float, sigma2: float,
                            J_M: float) -> FrameSolution:
    """Maximin intra-frame optimum on a discrete gain law.

    The jammer threshold ``h_star`` is a support point.  Anchoring the
    interference at ``x(h_star) = sigma2`` gives two candidate multipliers
    per support point, one from the jammer budget (``m2``, growing as the
    threshold moves down) and one from the rate (``m3``, shrinking).  The
    lowest point where ``m2 <= m3`` is the threshold; with it fixed, the
    budget and rate equations are solved exactly and the result is checked
    against the sandwich ``x(h_prev) < sigma2 <= x(h_star)``.
    """
    _check_inputs(R, sigma2, J_M)
    if not pmf.is_discrete:
        raise TypeError("solve_problem1_discrete needs a point-mass or tabulated law")
    if J_M < J_ZERO:
        sol = _waterfill_solution(pmf, R, sigma2)
        tx, x = _discrete_profiles(sol.h0, math.inf, 0.0, sol.lam, sigma2)
        return FrameSolution(h0=sol.h0, h_star=math.inf, mu=0.0, lam=sol.lam, P_M=sol.P_M,
                             J_M=0.0, sigma2=sigma2, R=R, tx_profile=tx, jam_profile=x)

    h, p = pmf.support()
    keep = h > 0
    h, p = h[keep], p[keep]
    n = h.size
    if n == 0:
        raise StructureError("the gain law has no mass at positive gains")
    target = J_M / sigma2

    def j_low(k, mu):
        ratio = (h[k:] / (1.0 + mu * h[k:])) * ((1.0 + mu * h[k]) / h[k])
        return float(np.dot(ratio - 1.0, p[k:]))

    def r_low(k, mu):
        h0 = h[k] / (1.0 + mu * h[k])
        below = h[:k]
        sel = below > h0
        return float(np.dot(np.log(below[sel] / h0), p[:k][sel])
                     + np.dot(np.log1p(mu * h[k:]), p[k:]))

    def m2(k):
        if j_low(k, 0.0) <= target:
            return 0.0
        f = lambda mu: j_low(k, mu) - target
        hi = _roots.grow_up(f, 0.0, 1.0 / h[k], what="budget multiplier")
        return _roots.solve(f, 0.0, hi, what="budget multiplier")

    def m3(k):
        f = lambda mu: r_low(k, mu) - R
        hi = _roots.grow_up(f, 0.0, 1.0 / h[k], what="rate multiplier")
        return _roots.solve(f, 0.0, hi, what="rate multiplier")

    def crossed(k):
        return m2(k) <= m3(k)

    if not crossed(n - 1):
        raise ResolutionError("no jammer threshold satisfies both conditions; "
                              "try a smaller grid step")
    lo, hi = 0, n - 1
    if crossed(0):
        hi = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if crossed(mid):
            hi = mid
        else:
            lo = mid

    def exact(k):
        mass = float(p[k:].sum())

        def lam_of(mu):
            return (J_M + sigma2 * mass) / float(np.dot(h[k:] / (1.0 + mu * h[k:]), p[k:]))

        def rate(mu):
            lam = lam_of(mu)
            low = np.log(np.maximum(lam * h[:k] / sigma2, 1.0))
            return float(np.dot(low, p[:k]) + np.dot(np.log1p(mu * h[k:]), p[k:])) - R

        if rate(0.0) > 0:
            return None
        top = _roots.grow_up(rate, 0.0, 1.0 / h[k], what="discrete multiplier")
        mu = _roots.solve(rate, 0.0, top, what="discrete multiplier")
        lam = lam_of(mu)
        slack = 1e-12 * lam
        if lam * h[k] / (1.0 + mu * h[k]) < sigma2 - slack * h[k]:
            return None
        if k > 0 and lam * h[k - 1] / (1.0 + mu * h[k - 1]) >= sigma2 + slack * h[k - 1]:
            return None
        return mu, lam

    for k in (hi, hi - 1, hi + 1):
        if 0 <= k < n and (found := exact(k)) is not None:
            break
    else:
        raise ResolutionError(f"discrete sandwich fails near h_star={h[hi]}; "
                              "try a smaller grid step")
    mu, lam = found
    h_star = float(h[k])
    h0 = sigma2 / lam
    P_M = float(np.dot(np.maximum(lam - sigma2 / h[:k], 0.0), p[:k])
                + np.dot(mu * lam * h[k:] / (1.0 + mu * h[k:]), p[k:]))
    tx, x = _discrete_profiles(h0, h_star, mu, lam, sigma2)
    return FrameSolution(h0=h0, h_star=h_star, mu=mu, lam=lam, P_M=P_M, J_M=J_M,
                         sigma2=sigma2, R=R, tx_profile=tx, jam_profile=x)


# ---------------------------------------------------------------------------
# required-power curves


class RequiredPower:
    """Solver handle evaluating ``P_M(J_M)`` on demand."""

    def __init__(self, model: FadingModel, R: float, sigma2: float):
        self.model, self.R, self.sigma2 = model, R, sigma2

    def solve(self, J_M: float) -> FrameSolution:
        return solve_problem1(self.model, self.R, self.sigma2, J_M)

    def __call__(self, J_M: float) -> float:
        return self.solve(J_M).P_M

    @property
    def p_wf(self) -> float:
        return waterfill_power(self.model, self.sigma2, self.R).power


@dataclass(frozen=True, eq=False)
class PowerCurve:
    """Sampled required-power curve ``P_M(J_M)``.

    Between samples the curve is linear.  The true curve is concave, so the
    chords sit below it by at most the local sample gap.  Past the last
    sample a secant through the final two points is used when
    ``extrapolate`` is set; those values are approximate.
    """

    j: np.ndarray
    p: np.ndarray
    extrapolate: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        j = np.array(self.j, dtype=float)
        p = np.array(self.p, dtype=float)
        if j.ndim != 1 or j.shape != p.shape or j.size == 0:
            raise ValueError("samples must be two equal-length 1-D sequences")
        if j[0] != 0:
            raise ValueError("the first sample must be at J_M = 0")
        if np.any(np.diff(j) <= 0) or np.any(np.diff(p) <= 0):
            raise ValueError("samples must be strictly increasing in both coordinates")
        j.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "p", p)

    @property
    def p_wf(self) -> float:
        return float(self.p[0])

    @property
    def tail_slope(self) -> float:
        if self.j.size < 2:
            return 0.0
        return float((self.p[-1] - self.p[-2]) / (self.j[-1] - self.j[-2]))

    def _allow(self, extrapolate):
        return self.extrapolate if extrapolate is None else extrapolate

    def __call__(self, J, extrapolate: bool | None = None):
        J = np.asarray(J, dtype=float)
        if np.any(J < 0):
            raise ValueError("J_M must be non-negative")
        beyond = J > self.j[-1]
        if np.any(beyond):
            if not self._allow(extrapolate) or self.j.size < 2:
                raise_range("J_M", J[beyond].max(), self.j[-1])
        out = np.interp(J, self.j, self.p)
        out = np.where(beyond, self.p[-1] + self.tail_slope * (J - self.j[-1]), out)
        return float(out) if out.ndim == 0 else out

    def inverse(self, P, extrapolate: bool | None = None):
        """Left-continuous inverse ``J_M(P_M)``; zero up to ``P_M(0)``."""
        P = np.asarray(P, dtype=float)
        beyond = P > self.p[-1]
        if np.any(beyond):
            if not self._allow(extrapolate) or self.j.size < 2:
                raise_range("P_M", P[beyond].max(), self.p[-1])
        out = np.interp(P, self.p, self.j, left=0.0)
        out = np.where(beyond, self.j[-1] + (P - self.p[-1]) / self.tail_slope, out)
        return float(out) if out.ndim == 0 else out

    def second_differences(self) -> np.ndarray:
        """Second divided differences of the samples."""
        if self.j.size < 3:
            return np.zeros(0)
        d1 = np.diff(self.p) / np.diff(self.j)
        return np.diff(d1) / (self.j[2:] - self.j[:-2])

    def to_csv_text(self, header: dict | None = None) -> str:
        lines = [f"# {k}: {v}" for k, v in (header or self.meta).items()]
        lines.append("j_m,p_m")
        lines += [f"{a:.17g},{b:.17g}" for a, b in zip(self.j, self.p)]
        return "\n".join(lines) + "\n"

    def to_csv(self, path, header: dict | None = None) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv_text(header))

    @classmethod
    def from_csv(cls, path, extrapolate: bool = False) -> PowerCurve:
        meta, rows = {}, []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, value = line[1:].partition(":")
                    meta[key.strip()] = value.strip()
                elif line != "j_m,p_m":
                    a, b = line.split(",")
                    rows.append((float(a), float(b)))
        arr = np.array(rows, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], extrapolate=extrapolate, meta=meta)


@dataclass(frozen=True)
class AffineCurve:
    """Exact affine required-power curve ``P_M = slope * J_M + intercept``."""

    slope: float
    intercept: float

    def __post_init__(self):
        if not self.slope > 0:
            raise ValueError("slope must be positive")

    @property
    def p_wf(self) -> float:
        return self.intercept

    @property
    def tail_slope(self) -> float:
        return self.slope

    def __call__(self, J, extrapolate=None):
        J = np.asarray(J, dtype=float)
        if np.any(J < 0):
            raise ValueError("J_M must be non-negative")
        out = self.intercept + self.slope * J
        return float(out) if out.ndim == 0 else out

    def inverse(self, P, extrapolate=None):
        out = np.maximum((np.asarray(P, dtype=float) - self.intercept) / self.slope, 0.0)
        return float(out) if out.ndim == 0 else out

    def sampled(self, j_grid) -> PowerCurve:
        j = np.asarray(j_grid, dtype=float)
        return PowerCurve(j, self(j), extrapolate=True)


def raise_range(name, value, limit):
    from .errors import CurveRangeError

    raise CurveRangeError(f"{name}={value!r} lies beyond the sampled range (max {limit!r}); "
                          "enable extrapolation or extend the grid")


def required_tx_power_curve(model: FadingModel, R: float, sigma2: float,
                            J_grid: Sequence[float], extrapolate: bool = False) -> PowerCurve:
    """Sample ``P_M(J_M)`` on a sorted grid of jammer budgets.

    ``J_M = 0`` is added when missing so the curve always starts at the
    unjammed water-filling power.
    """
    grid = np.asarray(J_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("J_grid must be a non-empty 1-D sequence")
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("J_grid must be non-negative and strictly increasing")
    if grid[0] != 0:
        grid = np.concatenate(([0.0], grid))
    powers = []
    for J in grid:
        try:
            powers.append(solve_problem1(model, R, sigma2, float(J)).P_M)
        except JamGameError as exc:
            raise type(exc)(f"at J_M={J!r}: {exc}") from exc
    meta = {"R": repr(R), "sigma2": repr(sigma2), "model": model.describe(),
            "rtol": repr(model.rtol)}
    return PowerCurve(grid, np.array(powers), extrapolate=extrapolate, meta=meta)


def required_jam_power(curve, P_M: float) -> float:
    """Jammer budget that pins the transmitter at ``P_M``: the inverse curve.

    ``curve`` is a sampled or affine curve, or a :class:`RequiredPower`
    handle, in which case the forward solver is inverted by root search.
    """
    if P_M < 0:
        raise ValueError(f"P_M must be non-negative, got {P_M}")
    if not isinstance(curve, RequiredPower):
        return curve.inverse(P_M)
    p0 = curve.p_wf
    if P_M <= p0:
        return 0.0
    f = lambda J: curve(J) - P_M
    hi = _roots.grow_up(f, 0.0, max(1.0, curve.sigma2), what="jammer budget")
    return _roots.solve(f, hi / 2 if f(hi / 2) < 0 else 0.0, hi, rtol=1e-13,
                        what="jammer budget")


# ---------------------------------------------------------------------------
# peak-constraint game (both players see the gain and average over it)


@dataclass(frozen=True)
class PeakGameSolution:
    """Nash equilibrium of the single-frame game with average constraints.

    ``lambda_p`` is the transmitter multiplier (water level ``1/lambda_p``)
    and ``nu`` the jammer multiplier; ``nu == 0`` flags the jammer-free case.
    """

    lambda_p: float
    nu: float
    threshold: float
    capacity: float
    P_bar: float
    J_bar: float
    sigma2: float
    tx_profile: Profile = field(repr=False)
    jam_profile: Profile = field(repr=False)


def _peak_profiles(lam, nu, sigma2):
    th = sigma2 * lam / (1.0 - sigma2 * nu)
    lo = sigma2 * lam

    def p(h):
        safe = np.maximum(h, 1e-300)
        below = np.where(h > lo, 1.0 / lam - sigma2 / safe, 0.0)
        return np.where(h >= th, h * nu / (lam * (nu * h + lam)), below)

    def j(h):
        return np.where(h >= th, np.maximum(h / (nu * h + lam) - sigma2, 0.0), 0.0)

    return th, Profile(p, (lo, th)), Profile(j, (th,))


def peak_game_solve(model: FadingModel, R: float, sigma2: float, P_bar: float,
                    J_bar: float) -> PeakGameSolution:
    """Equilibrium allocations when both average budgets bind.

    For a fixed jammer multiplier the transmitter budget is monotone in its
    own multiplier; the jammer budget of the resulting pair is then monotone
    in the jammer multiplier, so two nested root searches suffice.  ``R`` is
    only carried along for the caller; the equilibrium does not depend on it.
    """
    if not P_bar > 0:
        raise ValueError(f"P_bar must be positive, got {P_bar}")
    if J_bar < 0 or not sigma2 > 0:
        raise ValueError("J_bar must be non-negative and sigma2 positive")
    if J_bar < J_ZERO:
        # Water-fill the whole budget against the noise alone.
        tx = transmitter_best_response(model, Profile.constant(0.0), P_bar, sigma2)
        cap = ergodic_capacity(model, tx, 0.0, sigma2)
        return PeakGameSolution(lambda_p=1.0 / tx.level, nu=0.0, threshold=math.inf,
                                capacity=cap, P_bar=P_bar, J_bar=0.0, sigma2=sigma2,
                                tx_profile=tx, jam_profile=Profile.constant(0.0))

    def tx_budget(lam, nu):
        th = sigma2 * lam / (1.0 - sigma2 * nu)
        lo = sigma2 * lam
        low = model.integrate(lambda h: 1.0 / lam - sigma2 / h, lo, th)
        high = model.integrate(lambda h: h * nu / (lam * (nu * h + lam)), th)
        return low + high

    def jam_budget(lam, nu):
        th = sigma2 * lam / (1.0 - sigma2 * nu)
        return model.integrate(lambda h: h / (nu * h + lam) - sigma2, th)

    def lam_of(nu):
        f = lambda t: tx_budget(math.exp(t), nu) - P_bar
        hi = 0.0
        while f(hi) > 0:
            hi += 2.0
        lo = hi - 2.0
        while f(lo) < 0:
            lo -= 2.0
            if lo < -700:
                raise ConvergenceError("transmitter multiplier not bracketed", nu=nu)
        return math.exp(_roots.solve(f, lo, hi, what="transmitter multiplier"))

    # nu = s / sigma2 with s in (0, 1).
    def gap(s):
        nu = s / sigma2
        return jam_budget(lam_of(nu), nu) - J_bar

    s_lo, s_hi = 0.5, 0.5
    while gap(s_lo) < 0:
        s_lo /= 4.0
        if s_lo < 1e-300:
            raise ConvergenceError("jammer multiplier not bracketed", P_bar=P_bar, J_bar=J_bar)
    while gap(s_hi) > 0:
        s_hi = 1.0 - (1.0 - s_hi) / 4.0
        if s_hi >= 1.0:
            raise ConvergenceError("jammer multiplier not bracketed", P_bar=P_bar, J_bar=J_bar)
    s = _roots.solve(gap, s_lo, s_hi, what="jammer multiplier")
    nu = s / sigma2
    lam = lam_of(nu)
    th, tx, jam = _peak_profiles(lam, nu, sigma2)
    cap = ergodic_capacity(model, tx, jam, sigma2)
    return PeakGameSolution(lambda_p=lam, nu=nu, threshold=th, capacity=cap, P_bar=P_bar,
                            J_bar=J_bar, sigma2=sigma2, tx_profile=tx, jam_profile=jam)


class _LevelProfile(Profile):
    level: float


def transmitter_best_response(model: FadingModel, jam, P_bar: float,
                              sigma2: float) -> Profile:
    """Capacity-maximizing allocation of ``P_bar`` against a fixed jammer.

    Water-fills against the effective floor ``sigma2 + J(h)``; the returned
    profile carries its water ``level``.
    """
    jam = _as_profile(jam)
    if P_bar <= 0:
        prof = _LevelProfile(lambda h: np.zeros(np.shape(h)), jam.breakpoints)
        prof.level = 0.0
        return prof

    def alloc(level):
        def p(h):
            floor = sigma2 + np.maximum(jam(h), 0.0)
            return np.maximum(level - floor / np.maximum(h, 1e-300), 0.0)
        return p

    def spent(t):
        level = math.exp(t)
        # The allocation switches on where h = floor/level; for a constant
        # floor that is a known breakpoint.
        edges = _split_points(model, jam) + [sigma2 / level]
        return _integrate_pieces(model, alloc(level), sorted(set(edges))) - P_bar

    hi = math.log(P_bar + 1.0)
    while spent(hi) < 0:
        hi += 1.0
    lo = hi - 1.0
    while spent(lo) > 0:
        lo -= 1.0
    level = math.exp(_roots.solve(spent, lo, hi, what="water level"))
    prof = _LevelProfile(alloc(level), tuple(jam.breakpoints) + (sigma2 / level,))
    prof.level = level
    return prof


def jammer_best_response(model: FadingModel, tx, J_bar: float, sigma2: float) -> Profile:
    """Capacity-minimizing allocation of ``J_bar`` against a fixed transmitter.

    Per state the interference solves ``x^2 + hP x = hP/nu``; the jammer
    spends ``[x - sigma2]_+`` and ``nu`` is set by the budget.
    """
    tx = _as_profile(tx)
    if J_bar <= 0:
        return Profile(lambda h: np.zeros(np.shape(h)))

    def alloc(nu):
        def j(h):
            s = h * np.maximum(tx(h), 0.0)
            x = (2.0 * s / nu) / (s + np.sqrt(s * s + 4.0 * s / nu) + 1e-300)
            return np.maximum(x - sigma2, 0.0)
        return j

    edges = _split_points(model, tx)

    def spent(t):
        return _integrate_pieces(model, alloc(math.exp(t)), edges) - J_bar

    lo = -math.log(sigma2)
    while spent(lo) < 0:
        lo -= 1.0
        if lo < -700:
            raise ConvergenceError("jammer cannot spend its budget", J_bar=J_bar)
    hi = lo + 1.0
    while spent(hi) > 0:
        hi += 1.0
    nu = math.exp(_roots.solve(spent, lo, hi, what="jammer multiplier"))
    return Profile(alloc(nu), tx.breakpoints)


def bayes_frame_profiles(model: FadingModel, R: float, sigma2: float, p_M: float,
                         j_M: float, curve=None) -> tuple[Profile, Profile]:
    """Per-frame allocations when each side only knows its own frame power.

    The transmitter plays the peak-game profile against the strongest jammer
    it can still beat (``J_M(p_M)``); the jammer plays against the weakest
    transmitter it can still defeat (``P_M(j_M)``).  ``curve`` may be a
    sampled curve or a :class:`RequiredPower` handle; the solver is used
    when omitted.
    """
    if p_M < 0 or j_M < 0:
        raise ValueError("frame powers must be non-negative")
    handle = curve if curve is not None else RequiredPower(model, R, sigma2)
    j_cap = required_jam_power(handle, p_M)
    if p_M > 0:
        tx = peak_game_solve(model, R, sigma2, p_M, j_cap).tx_profile
    else:
        tx = Profile.constant(0.0)
    p_need = handle(j_M)
    jam = peak_game_solve(model, R, sigma2, p_need, j_M).jam_profile
    return tx, jam


# ---------------------------------------------------------------------------
# no channel-state feedback


def nocsi_mu_prime(model: FadingModel, R: float) -> float:
    """Root ``mu'`` of ``E[log(1 + mu' h)] = R``."""
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    f = lambda t: model.integrate(lambda h: np.log1p(math.exp(t) * h)) - R
    hi = 0.0
    while f(hi) < 0:
        hi += 2.0
    lo = hi - 2.0
    while f(lo) > 0:
        lo -= 2.0
        if lo < -700:
            raise ConvergenceError("mu' not bracketed", R=R)
    return math.exp(_roots.solve(f, lo, hi, what="mu'"))


def nocsi_curve(mu_prime: float, sigma2: float) -> AffineCurve:
    """Affine required-power curve ``P_M = mu' (J_M + sigma2)``."""
    if not mu_prime > 0:
        raise ValueError("mu' must be positive")
    return AffineCurve(mu_prime, mu_prime * sigma2)
