"""Mixed-strategy equilibria of the budgeted zero-sum game ``Pr{X >= g(Y)}``.

Player 1 picks a random ``X >= 0`` with ``E[X] <= a`` and wants ``X`` to
clear ``g(Y)``; Player 2 picks ``Y >= 0`` with ``E[Y] <= b`` to prevent it.
At equilibrium ``g^{-1}(X)`` and ``g(Y)`` are uniform mixtures with an atom
at zero:

    V = g^{-1}(X) ~ k_x U[0, 2v] + (1 - k_x) delta_0
    W = g(Y)      ~ k_y U[0, g(2v)] + (1 - k_y) delta_0

In the jamming game ``X`` is the transmitter's frame power, ``Y`` the
jammer's and ``g`` the required-power curve.  The physical curve starts
with a jump (``P_M(0) > 0``) while the abstract game sets ``g(0) = 0``; both
readings are available.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from . import _roots
from .errors import ConsistencyError, ExistenceError
from .frame_solver import AffineCurve, PowerCurve

__all__ = [
    "MonotoneCurve",
    "MixedEquilibrium",
    "MixedStrategy",
    "EquilibriumPlay",
    "solve_general_game",
    "equilibrium_strategies",
    "hughes_narayan_closed_form",
    "nocsi_closed_form",
    "fullcsi_equilibrium",
    "sample_strategy",
]

RESIDUAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MonotoneCurve:
    """Non-decreasing piecewise-linear map ``g`` with ``g(0) = 0``.

    ``x[0]`` is the right limit ``g(0+)``; a positive value is a jump at the
    origin.  Past the last knot the curve continues with ``tail_slope``
    (zero means bounded).  The inverse is the left-continuous one,
    ``g^{-1}(x) = inf{y : g(y) >= x}``.
    """

    y: np.ndarray
    x: np.ndarray
    tail_slope: float
    digest: str = field(default="", compare=False)

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        x = np.array(self.x, dtype=float)
        if y.ndim != 1 or y.shape != x.shape or y.size == 0 or y[0] != 0:
            raise ValueError("knots must be equal-length 1-D arrays starting at y = 0")
        if np.any(np.diff(y) <= 0) or np.any(np.diff(x) < 0) or x[0] < 0:
            raise ValueError("g must be non-decreasing on strictly increasing knots")
        if self.tail_slope < 0:
            raise ValueError("tail slope must be non-negative")
        # Cumulative integrals at the knots, both exact for linear pieces.
        g_int = np.concatenate(([0.0], np.cumsum(np.diff(y) * (x[1:] + x[:-1]) / 2)))
        inv_int = np.concatenate(([0.0], np.cumsum(np.diff(x) * (y[1:] + y[:-1]) / 2)))
        for arr in (y, x, g_int, inv_int):
            arr.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "_g_int", g_int)
        object.__setattr__(self, "_inv_int", inv_int)
        if not self.digest:
            body = "".join(f"{a:.17g},{b:.17g}\n" for a, b in zip(y, x)) + f"{self.tail_slope:.17g}"
            object.__setattr__(self, "digest", hashlib.sha256(body.encode()).hexdigest())

    @classmethod
    def identity(cls) -> MonotoneCurve:
        return cls.affine(1.0, 0.0)

    @classmethod
    def affine(cls, slope: float, intercept: float = 0.0) -> MonotoneCurve:
        """``g(y) = slope*y + intercept`` for ``y > 0``, with ``g(0) = 0``."""
        return cls(np.array([0.0, 1.0]), np.array([intercept, intercept + slope]), slope)

    @classmethod
    def from_power_curve(cls, curve) -> MonotoneCurve:
        """Wrap a required-power curve; its ``P_M(0)`` becomes the jump at 0."""
        if isinstance(curve, AffineCurve):
            return cls.affine(curve.slope, curve.intercept)
        if not isinstance(curve, PowerCurve):
            raise TypeError(f"unsupported curve type {type(curve).__name__}")
        body = "".join(f"{a:.17g},{b:.17g}\n" for a, b in zip(curve.j, curve.p))
        return cls(curve.j, curve.p, curve.tail_slope,
                   digest=hashlib.sha256(body.encode()).hexdigest())

    @property
    def jump(self) -> float:
        """``g(0+)``."""
        return float(self.x[0])

    @property
    def unbounded(self) -> bool:
        return self.tail_slope > 0

    def g(self, y, physical: bool = False):
        """Evaluate ``g``; ``physical`` reads ``g(0)`` as ``g(0+)``."""
        y = np.asarray(y, dtype=float)
        inner = np.interp(y, self.y, self.x)
        out = np.where(y > self.y[-1], self.x[-1] + self.tail_slope * (y - self.y[-1]), inner)
        if not physical:
            out = np.where(y > 0, out, 0.0)
        return float(out) if out.ndim == 0 else out

    def g_inv(self, x):
        x = np.asarray(x, dtype=float)
        xs, ys = self.x, self.y
        idx = np.clip(np.searchsorted(xs, x, side="left"), 1, max(xs.size - 1, 1))
        if xs.size > 1:
            x_lo, x_hi = xs[idx - 1], xs[idx]
            y_lo, y_hi = ys[idx - 1], ys[idx]
            width = np.where(x_hi > x_lo, x_hi - x_lo, 1.0)
            inner = np.where(x_hi > x_lo, y_lo + (x - x_lo) * (y_hi - y_lo) / width, y_lo)
        else:
            inner = np.zeros_like(x)
        if self.tail_slope > 0:
            tail = ys[-1] + (x - xs[-1]) / self.tail_slope
        else:
            tail = np.full_like(x, math.inf)
        out = np.where(x <= xs[0], 0.0, np.where(x > xs[-1], tail, inner))
        return float(out) if out.ndim == 0 else out

    def G(self, y: float) -> float:
        """``int_0^y g``."""
        if y <= self.y[-1]:
            i = max(int(np.searchsorted(self.y, y, side="right")) - 1, 0)
            return float(self._g_int[i] + (y - self.y[i]) * (self.x[i] + self.g(y)) / 2)
        extra = y - self.y[-1]
        return float(self._g_int[-1] + extra * (2 * self.x[-1] + self.tail_slope * extra) / 2)

    def Ginv(self, x: float) -> float:
        """``int_0^x g^{-1}``."""
        if x <= self.x[0]:
            return 0.0
        if x <= self.x[-1]:
            i = max(int(np.searchsorted(self.x, x, side="right")) - 1, 0)
            return float(self._inv_int[i] + (x - self.x[i]) * (self.y[i] + self.g_inv(x)) / 2)
        if self.tail_slope == 0:
            return math.inf
        extra = x - self.x[-1]
        return float(self._inv_int[-1] + extra * (2 * self.y[-1] + extra / self.tail_slope) / 2)


@dataclass(frozen=True)
class MixedEquilibrium:
    """Equilibrium ``(v, k_x, k_y)`` of the budgeted game.

    ``payoff`` is the success probability when a silent jammer still
    leaves the requirement at ``g(0+)``, i.e. every zero-power transmitter
    frame is lost; this is the reading under which the uniform mixtures are
    mutual best responses.  ``atom_x`` and ``atom_y`` are the zero-power
    probabilities; reading ``g(0) = 0`` instead adds ``atom_x * atom_y``
    to the payoff (:attr:`abstract_payoff`).
    """

    v: float
    k_x: float
    k_y: float
    payoff: float
    branch: str
    v0: float
    S_v0: float
    a: float
    b: float
    g_top: float
    atom_x: float
    atom_y: float
    curve_digest: str = ""

    @property
    def p_out(self) -> float:
        """Outage probability ``1 - payoff``; zero-power frames are outages."""
        return 1.0 - self.payoff

    @property
    def zero_gap(self) -> float:
        """Mass of the (zero, zero) outcome, ``atom_x * atom_y``."""
        return self.atom_x * self.atom_y

    @property
    def abstract_payoff(self) -> float:
        """Payoff when ``g(0) = 0`` lets a silent transmitter beat a silent jammer."""
        return min(1.0, self.payoff + self.zero_gap)

    @property
    def security_x(self) -> float:
        """Payoff Player 1 can guarantee: ``k_x (1 - b / 2v)``."""
        if self.v == 0:
            return self.payoff
        return self.k_x * (1.0 - self.b / (2.0 * self.v))

    @property
    def security_y(self) -> float:
        """Payoff ceiling Player 2 can enforce: ``1 - k_y (1 - a / g(2v))``."""
        if self.v == 0:
            return self.payoff
        return 1.0 - self.k_y * (1.0 - self.a / self.g_top)

    def to_dict(self) -> dict:
        keys = ("v", "k_x", "k_y", "payoff", "branch", "v0", "S_v0", "curve_digest")
        d = asdict(self)
        return {k: d[k] for k in keys}

    def to_json(self, **extra) -> str:
        return json.dumps({**self.to_dict(), **extra}, indent=2, sort_keys=False)


@dataclass(frozen=True, eq=False)
class MixedStrategy:
    """One player's equilibrium mixture.

    The player draws ``V ~ k U[0, bound] + (1-k) delta_0`` and plays
    ``g(V)`` (transmitter) or ``g^{-1}(V)`` (jammer).  With ``bound == 0``
    the active draw is the fixed level ``g(0+)`` (on/off play).
    Calling the strategy on an array of uniforms returns power draws.
    """

    curve: MonotoneCurve
    role: str
    k: float
    bound: float

    def __post_init__(self):
        if self.role not in ("transmitter", "jammer"):
            raise ValueError("role must be 'transmitter' or 'jammer'")
        if not -1e-12 <= self.k <= 1 + 1e-12:
            raise ValueError(f"mixture weight {self.k} outside [0, 1]")

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        off = 1.0 - self.k
        active = u >= off
        if self.k <= 0:
            return np.zeros_like(u)
        if self.bound == 0:
            return np.where(active, self.curve.jump, 0.0)
        v = np.where(active, (u - off) / self.k * self.bound, 0.0)
        if self.role == "transmitter":
            return np.where(active, self.curve.g(v), 0.0)
        return np.where(active, self.curve.g_inv(v), 0.0)

    @property
    def mean(self) -> float:
        if self.k <= 0:
            return 0.0
        if self.bound == 0:
            return self.k * self.curve.jump
        if self.role == "transmitter":
            return self.k * self.curve.G(self.bound) / self.bound
        return self.k * self.curve.Ginv(self.bound) / self.bound

    @property
    def zero_atom(self) -> float:
        """Probability of a zero-power draw."""
        if self.k <= 0:
            return 1.0
        if self.bound == 0:
            return 1.0 - self.k
        if self.role == "transmitter":
            # g vanishes on (0, y_flat] when the curve starts flat at zero.
            flat = float(self.curve.g_inv(np.nextafter(0.0, 1.0))) if self.curve.jump == 0 else 0.0
            return (1.0 - self.k) + self.k * min(1.0, flat / self.bound)
        return (1.0 - self.k) + self.k * min(1.0, self.curve.jump / self.bound)


class EquilibriumPlay(NamedTuple):
    equilibrium: MixedEquilibrium
    transmitter: MixedStrategy
    jammer: MixedStrategy


def _clip_unit(k: float, name: str) -> float:
    if -1e-9 <= k < 0:
        return 0.0
    if 1 < k <= 1 + 1e-9:
        return 1.0
    if not 0 <= k <= 1:
        raise ConsistencyError(f"{name}={k} lies outside [0, 1]")
    return k


def _degenerate(g: MonotoneCurve, a: float) -> MixedEquilibrium:
    # No jammer budget: Player 1 turns on at g(0+) as often as it can.
    jump = g.jump
    k_x = 1.0 if jump <= a else a / jump
    return MixedEquilibrium(v=0.0, k_x=k_x, k_y=0.0, payoff=k_x, branch="degenerate",
                            v0=0.0, S_v0=0.0, a=a, b=0.0, g_top=jump, atom_x=1.0 - k_x,
                            atom_y=1.0, curve_digest=g.digest)


def _check_existence(g: MonotoneCurve, b: float) -> None:
    if g.unbounded:
        return
    # Bounded curve: S_L(v) tends to G(y_end) - (y_end - b) g_max, which must
    # be negative for the S > 0 branch to have a root.
    y_end, g_max = float(g.y[-1]), float(g.x[-1])
    if g.G(y_end) - (y_end - b) * g_max >= 0:
        raise ExistenceError("the curve is bounded and too flat: no equilibrium of "
                             "uniform-mixture form exists for this jammer budget")


def solve_general_game(g: MonotoneCurve, a: float, b: float,
                       tol: float = RESIDUAL_TOL) -> MixedEquilibrium:
    """Equilibrium of ``Pr{X >= g(Y)}`` with ``E[X] <= a`` and ``E[Y] <= b``.

    A pivot ``v0`` solves ``ab = (g(2v0) - a)(2v0 - b)``; the sign of
    ``S = int_0^{2v0} g - 2 v0 a`` picks which of two monotone equations
    fixes ``v``.  The two payoff expressions are compared as a consistency
    check.

    Raises
    ------
    ExistenceError
        If a bounded curve violates the existence condition.
    ConsistencyError
        If the two payoff expressions disagree by more than ``tol``.
    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if b < 0:
        raise ValueError(f"b must be non-negative, got {b}")
    if b == 0:
        return _degenerate(g, a)
    _check_existence(g, b)
    if not g.unbounded and a >= g.x[-1]:
        raise ExistenceError("Player 1 budget exceeds the bounded curve")

    v_min = max(b / 2.0, float(g.g_inv(a)) / 2.0)

    def pivot(v):
        return (g.g(2 * v) - a) * (2 * v - b) - a * b

    hi = _roots.grow_up(pivot, v_min, max(2 * v_min, b, 1e-12), what="pivot v0")
    v0 = _roots.solve(pivot, v_min, hi, what="pivot v0")

    S = g.G(2 * v0) - 2 * v0 * a
    scale = max(g.G(2 * v0), 2 * v0 * a)
    if abs(S) <= 1e-13 * scale:
        branch, v = "S_zero", v0
    elif S < 0:
        branch = "S_negative"
        f = lambda v: g.G(2 * v) - 2 * v * a
        v = _roots.solve(f, v0, _roots.grow_up(f, v0, 2 * v0, what="v"), what="v")
    else:
        branch = "S_positive"
        f = lambda v: g.G(2 * v) - g.g(2 * v) * (2 * v - b)
        v = _roots.solve(f, v0, _roots.grow_up(f, v0, 2 * v0, what="v"), what="v")

    top = g.g(2 * v)
    G2v = g.G(2 * v)
    H = g.Ginv(top)
    if abs(G2v + H - 2 * v * top) > tol * max(1.0, 2 * v * top):
        raise ConsistencyError("area identity fails for the curve integrals")
    k_x = _clip_unit(2 * v * a / G2v, "k_x")
    k_y = _clip_unit(top * b / H, "k_y")
    left = a * (2 * v - b) / G2v
    right = 1.0 - b * (top - a) / H
    if abs(left - right) > tol:
        raise ConsistencyError(f"payoff expressions disagree: {left!r} vs {right!r}")
    residual = k_x * (1 - b / (2 * v)) - (1 - k_y * (1 - a / top))
    if abs(residual) > tol:
        raise ConsistencyError(f"equilibrium residual {residual!r} exceeds {tol}")

    tx, jam = _strategies(g, v, k_x, k_y)
    return MixedEquilibrium(v=v, k_x=k_x, k_y=k_y, payoff=left, branch=branch, v0=v0,
                            S_v0=S, a=a, b=b, g_top=top, atom_x=tx.zero_atom,
                            atom_y=jam.zero_atom, curve_digest=g.digest)


def _strategies(g, v, k_x, k_y):
    tx = MixedStrategy(g, "transmitter", k_x, 2 * v)
    jam = MixedStrategy(g, "jammer", k_y, float(g.g(2 * v)) if v > 0 else 0.0)
    return tx, jam


def equilibrium_strategies(eq: MixedEquilibrium, g: MonotoneCurve) -> tuple[MixedStrategy, MixedStrategy]:
    """Transmitter and jammer mixtures attaining ``eq`` on curve ``g``."""
    if eq.branch == "degenerate":
        return (MixedStrategy(g, "transmitter", eq.k_x, 0.0),
                MixedStrategy(g, "jammer", 0.0, 0.0))
    return _strategies(g, eq.v, eq.k_x, eq.k_y)


def _branch_of(S: float, scale: float) -> str:
    if abs(S) <= 1e-13 * scale:
        return "S_zero"
    return "S_negative" if S < 0 else "S_positive"


def hughes_narayan_closed_form(a: float, b: float, c: float) -> MixedEquilibrium:
    """Closed-form equilibrium for ``g(y) = y + c`` (``y > 0``), ``g(0) = 0``."""
    if not (a > 0 and b > 0 and c >= 0):
        raise ValueError("need a > 0, b > 0 and c >= 0")
    root = math.sqrt(1.0 + 2.0 * c / b)
    v_l = b / 2.0 * (1.0 + root)
    if a <= c + v_l:
        v = v_l
        payoff = a / (c + 2 * v)
        k_x = 2 * v * a / ((2 * v + c) * (2 * v - b))
        k_y = 1.0
    else:
        v = a - c
        payoff = 1.0 - b / (2.0 * (a - c))
        k_x = 1.0
        k_y = b * (2 * a - c) / (2.0 * (a - c) ** 2)
    # Pivot: t = 2 v0 is the positive root of t^2 + (c - a - b) t - b c = 0.
    p = c - a - b
    t = (-p + math.sqrt(p * p + 4 * b * c)) / 2.0
    S = t * t / 2 + c * t - t * a
    g = MonotoneCurve.affine(1.0, c)
    atom_y = (1.0 - k_y) + k_y * min(1.0, c / (2 * v + c))
    return MixedEquilibrium(v=v, k_x=k_x, k_y=k_y, payoff=payoff,
                            branch=_branch_of(S, max(t * t / 2 + c * t, t * a)), v0=t / 2,
                            S_v0=S, a=a, b=b, g_top=2 * v + c, atom_x=1.0 - k_x,
                            atom_y=atom_y, curve_digest=g.digest)


def nocsi_closed_form(P_bar: float, J_bar: float, mu_prime: float, sigma2: float,
                      branch: int | None = None) -> MixedEquilibrium:
    """Equilibrium on the affine curve ``P_M = mu'(J_M + sigma2)``.

    The jammer's frame power is uniform on ``[0, 2v]`` with weight
    ``2v/(2v + sigma2) * k_j`` and zero otherwise.  ``branch`` (1 or 2)
    forces one of the two formulas, which must agree on the boundary.
    """
    if not (mu_prime > 0 and P_bar > 0 and J_bar > 0 and sigma2 > 0):
        raise ValueError("budgets, mu' and sigma2 must be positive")
    root = math.sqrt(1.0 + 2.0 * sigma2 / J_bar)
    threshold = mu_prime * sigma2 + 0.5 * mu_prime * J_bar * (1.0 + root)
    if branch is None:
        branch = 1 if P_bar >= threshold else 2
    if branch == 1:
        v = (P_bar - mu_prime * sigma2) / mu_prime
        k_p = 1.0
        top = mu_prime * (2 * v + sigma2)
        k_j = J_bar * top / (2 * v * (top - P_bar))
        payoff = 1.0 - J_bar / (2 * v)
    elif branch == 2:
        v = 0.5 * J_bar * (1.0 + root)
        k_p = 2 * v * P_bar / (mu_prime * (2 * v + sigma2) * (2 * v - J_bar))
        k_j = 1.0
        payoff = P_bar / (mu_prime * (2 * v + sigma2))
    else:
        raise ValueError("branch must be 1, 2 or None")
    pivot = hughes_narayan_closed_form(P_bar / mu_prime, J_bar, sigma2)
    S = mu_prime * pivot.S_v0
    g = MonotoneCurve.affine(mu_prime, mu_prime * sigma2)
    atom_y = 1.0 - 2 * v / (2 * v + sigma2) * k_j
    scale = mu_prime * max(abs(pivot.v0 * 2 * P_bar / mu_prime), 1.0)
    return MixedEquilibrium(v=v, k_x=k_p, k_y=k_j, payoff=payoff, branch=_branch_of(S, scale),
                            v0=pivot.v0, S_v0=S, a=P_bar, b=J_bar,
                            g_top=mu_prime * (2 * v + sigma2), atom_x=1.0 - k_p,
                            atom_y=atom_y, curve_digest=g.digest)


def fullcsi_equilibrium(curve, P_bar: float, J_bar: float) -> EquilibriumPlay:
    """Inter-frame equilibrium on a required-power curve.

    The curve's ``P_M(0)`` becomes the jump of ``g`` at zero and the frame
    outage probability is ``equilibrium.p_out = 1 - payoff``.
    """
    g = curve if isinstance(curve, MonotoneCurve) else MonotoneCurve.from_power_curve(curve)
    if not g.unbounded:
        raise ExistenceError("the required-power curve must be unbounded "
                             "(sample it further or enable secant extension)")
    eq = solve_general_game(g, P_bar, J_bar)
    tx, jam = equilibrium_strategies(eq, g)
    return EquilibriumPlay(eq, tx, jam)


def sample_strategy(strategy, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """``n`` reproducible draws from a strategy (stream ``stream`` of ``seed``)."""
    from .rng import stream_key, uniforms

    if n < 1:
        raise ValueError("n must be at least 1")
    return strategy(uniforms(stream_key(seed, stream), 0, n))
