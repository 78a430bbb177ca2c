"""Fading-gain distributions and the expectations taken over them.

Three kinds of gain law are supported: exponential (Rayleigh power gain),
a single point mass, and a tabulated law on a uniform grid ``k*q``.

Two integrators live here.  :func:`expectation` is the general purpose,
adaptive one.  :meth:`FadingModel.integrate` is a fixed composite
Gauss-Legendre rule used inside the solvers: it is vectorized, deterministic
and smooth in the integration limits, so nested root searches see no
quadrature noise.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate as _integrate

from .errors import IntegrationError

__all__ = [
    "FadingModel",
    "QuadratureSpec",
    "expectation",
    "quantile",
    "discretize",
]

DEFAULT_TRUNCATION = 1.0 - 1e-12

# Fixed rule: geometrically graded panels with Gauss-Legendre nodes on each.
_PANELS = 32
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class QuadratureSpec:
    """Truncation and tolerance policy for continuous expectations."""

    max_subdivisions: int
    rtol: float
    h_max: float

    def __post_init__(self):
        if not math.isfinite(self.h_max) or self.h_max <= 0:
            raise ValueError(f"h_max must be finite and positive, got {self.h_max}")
        if not 0 < self.rtol <= 1e-3:
            raise ValueError(f"rtol must lie in (0, 1e-3], got {self.rtol}")


@dataclass(frozen=True, eq=False)
class FadingModel:
    """Distribution of the channel power gain ``h``.

    Build instances with :meth:`exponential`, :meth:`point_mass` or
    :meth:`tabulated` rather than calling the constructor directly.
    """

    kind: str
    rate: float | None = None
    gain: float | None = None
    step: float | None = None
    masses: np.ndarray | None = field(default=None, repr=False)
    truncation_quantile: float = DEFAULT_TRUNCATION
    rtol: float = 1e-10
    max_subdivisions: int = 200

    # -- constructors -----------------------------------------------------

    @classmethod
    def exponential(cls, rate: float, **policy) -> FadingModel:
        """Exponential gain with density ``rate * exp(-rate * h)``."""
        if not rate > 0 or not math.isfinite(rate):
            raise ValueError(f"rate must be positive and finite, got {rate}")
        return cls("exponential", rate=float(rate), **policy)

    @classmethod
    def point_mass(cls, gain: float, **policy) -> FadingModel:
        if not gain > 0 or not math.isfinite(gain):
            raise ValueError(f"gain must be positive and finite, got {gain}")
        return cls("point_mass", gain=float(gain), **policy)

    @classmethod
    def tabulated(cls, step: float, masses, **policy) -> FadingModel:
        """Probability ``masses[k]`` at gain ``k * step``."""
        if not step > 0 or not math.isfinite(step):
            raise ValueError(f"grid step must be positive, got {step}")
        m = np.array(masses, dtype=float)
        if m.ndim != 1 or m.size == 0:
            raise ValueError("masses must be a non-empty 1-D sequence")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise ValueError("masses must be finite and non-negative")
        total = math.fsum(m)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"masses sum to {total!r}, expected 1")
        m.setflags(write=False)
        return cls("tabulated", step=float(step), masses=m, **policy)

    def __post_init__(self):
        if self.kind not in ("exponential", "point_mass", "tabulated"):
            raise ValueError(f"unknown fading kind {self.kind!r}")
        if not 0 < self.truncation_quantile < 1:
            raise ValueError("truncation_quantile must lie in (0, 1)")

    # -- basic properties -------------------------------------------------

    @property
    def is_discrete(self) -> bool:
        return self.kind != "exponential"

    @property
    def h_max(self) -> float:
        """Largest gain that carries mass after tail truncation."""
        if self.kind == "exponential":
            return -math.log1p(-self.truncation_quantile) / self.rate
        if self.kind == "point_mass":
            return self.gain
        return self.step * (self.masses.size - 1)

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(self.max_subdivisions, self.rtol, self.h_max)

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Gain points with positive mass and their masses (discrete kinds)."""
        if self.kind == "point_mass":
            return np.array([self.gain]), np.array([1.0])
        if self.kind == "tabulated":
            h = self.step * np.arange(self.masses.size)
            keep = self.masses > 0
            return h[keep], self.masses[keep]
        raise TypeError("a continuous model has no discrete support")

    def cdf(self, h):
        h = np.asarray(h, dtype=float)
        if self.kind == "exponential":
            return np.where(h < 0, 0.0, -np.expm1(-self.rate * np.maximum(h, 0)))
        points, mass = self.support()
        cum = np.cumsum(mass)
        idx = np.searchsorted(points, h, side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def sf(self, h):
        """Survival function ``P(gain >= h)`` (closed at ``h``)."""
        h = np.asarray(h, dtype=float)
        if self.kind == "exponential":
            return np.exp(-self.rate * np.maximum(h, 0))
        points, mass = self.support()
        tail = np.cumsum(mass[::-1])[::-1]
        idx = np.searchsorted(points, h, side="left")
        return np.where(idx < points.size, tail[np.minimum(idx, points.size - 1)], 0.0)

    def describe(self) -> str:
        """Stable one-line description used in output headers."""
        if self.kind == "exponential":
            return f"exponential(rate={self.rate!r})"
        if self.kind == "point_mass":
            return f"point_mass(gain={self.gain!r})"
        digest = _digest(self.masses)
        return f"tabulated(step={self.step!r},n={self.masses.size},sha256={digest[:16]})"

    # -- solver integrator -------------------------------------------------

    def integrate(self, f: Callable[[np.ndarray], np.ndarray],
                  lo: float = 0.0, hi: float = math.inf) -> float:
        """Integral of ``f(h) p(h)`` over ``[lo, hi)`` with a fixed rule.

        ``f`` must accept and return numpy arrays.  Discrete kinds sum exactly
        over the support points in the half-open interval.
        """
        if self.is_discrete:
            points, mass = self.support()
            sel = (points >= lo) & (points < hi)
            if not np.any(sel):
                return 0.0
            return float(np.dot(f(points[sel]), mass[sel]))
        a = max(lo, 0.0)
        b = min(hi, self.h_max)
        if not b > a:
            return 0.0
        h, w = _graded_nodes(a, b)
        return float(np.dot(f(h), w * self.rate * np.exp(-self.rate * h)))

    def probability(self, lo: float = 0.0, hi: float = math.inf) -> float:
        """Mass of ``[lo, hi)``."""
        if self.is_discrete:
            points, mass = self.support()
            return float(mass[(points >= lo) & (points < hi)].sum())
        a = max(lo, 0.0)
        if not hi > a:
            return 0.0
        upper = 0.0 if math.isinf(hi) else math.exp(-self.rate * hi)
        return math.exp(-self.rate * a) - upper

    # -- csv ---------------------------------------------------------------

    def to_csv(self, path) -> None:
        if self.kind != "tabulated":
            raise TypeError("only tabulated models serialize to CSV")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["h", "mass"])
            for k, m in enumerate(self.masses):
                writer.writerow([f"{k * self.step:.17g}", f"{m:.17g}"])

    @classmethod
    def from_csv(cls, path, **policy) -> FadingModel:
        """Load a ``h,mass`` table whose gains lie on a uniform grid ``k*q``."""
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        if not rows or [c.strip() for c in rows[0]] != ["h", "mass"]:
            raise ValueError(f"{path}: expected header 'h,mass'")
        h = np.array([float(r[0]) for r in rows[1:]])
        m = np.array([float(r[1]) for r in rows[1:]])
        if h.size == 0:
            raise ValueError(f"{path}: no rows")
        positive = np.diff(np.unique(h))
        step = float(positive.min()) if positive.size else float(h[0] or 1.0)
        k = np.rint(h / step).astype(int)
        if np.any(np.abs(k * step - h) > 1e-9 * max(step, 1.0)) or np.any(k < 0):
            raise ValueError(f"{path}: gains are not on a uniform grid")
        masses = np.zeros(k.max() + 1)
        np.add.at(masses, k, m)
        return cls.tabulated(step, masses, **policy)


def _digest(arr: np.ndarray) -> str:
    import hashlib

    return hashlib.sha256(np.ascontiguousarray(arr, dtype="<f8").tobytes()).hexdigest()


def _graded_nodes(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    # Panels are geometric in (h - a + delta): fine near the left end where
    # integrands like 1/h vary fastest, coarse in the exponential tail.
    delta = max(a, 1e-8 * b)
    edges = a - delta + delta * ((b - a + delta) / delta) ** np.linspace(0, 1, _PANELS + 1)
    edges[0], edges[-1] = a, b
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    h = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    w = (half[:, None] * _WEIGHTS[None, :]).ravel()
    return h, w


def _apply(f, h: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f(h), dtype=float)
        if out.shape == h.shape:
            return out
        if out.ndim == 0:
            return np.full(h.shape, float(out))
    except (TypeError, ValueError):
        pass
    return np.array([float(f(x)) for x in h])


def expectation(model: FadingModel, f: Callable, lo: float = 0.0,
                hi: float = math.inf) -> float:
    """Integral of ``f(h) p(h)`` over the closed interval ``[lo, hi]``.

    Continuous laws use adaptive quadrature on ``[lo, min(hi, h_max)]``;
    discrete laws return exact sums over support points in the interval.

    Raises
    ------
    ValueError
        If ``lo > hi``.
    IntegrationError
        If ``f`` is not finite where the law has mass.
    """
    if lo > hi:
        raise ValueError(f"empty interval: lo={lo} > hi={hi}")
    if model.is_discrete:
        points, mass = model.support()
        sel = (points >= lo) & (points <= hi)
        if not np.any(sel):
            return 0.0
        values = _apply(f, points[sel])
        if not np.all(np.isfinite(values)):
            raise IntegrationError("integrand is not finite on a support point")
        return float(np.dot(values, mass[sel]))

    a = max(lo, 0.0)
    b = min(hi, model.h_max)
    if not b > a:
        return 0.0
    rate = model.rate

    def integrand(h):
        return float(f(h)) * rate * math.exp(-rate * h)

    try:
        value, _ = _integrate.quad(integrand, a, b, epsabs=0.0, epsrel=model.rtol,
                                   limit=model.max_subdivisions)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise IntegrationError(f"integrand failed on [{a}, {b}]: {exc}") from exc
    if not math.isfinite(value):
        raise IntegrationError(f"integral over [{a}, {b}] is not finite")
    return value


def quantile(model: FadingModel, u: float) -> float:
    """Smallest gain ``h >= 0`` with ``CDF(h) >= u``."""
    if not 0 <= u < 1:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    if u == 0:
        return 0.0
    if model.kind == "exponential":
        return -math.log1p(-u) / model.rate
    points, mass = model.support()
    cum = np.cumsum(mass)
    idx = int(np.searchsorted(cum, u, side="left"))
    return float(points[min(idx, points.size - 1)])


def discretize(model: FadingModel, q: float, h_max: float | None = None) -> FadingModel:
    """Quantize ``model`` onto the grid ``k*q``.

    Grid point ``k*q`` receives the mass of ``[k*q, (k+1)*q)``; the tail
    beyond ``h_max`` is folded into the last point.  ``h_max`` defaults to
    the model's truncation point rounded up to the grid.
    """
    if not q > 0 or not math.isfinite(q):
        raise ValueError(f"grid step must be positive, got {q}")
    if h_max is None:
        h_max = math.ceil(model.h_max / q - 1e-9) * q
    n = int(round(h_max / q))
    if n < 0 or abs(n * q - h_max) > 1e-9 * max(h_max, q):
        raise ValueError(f"h_max={h_max} is not a multiple of q={q}")
    if model.kind == "exponential":
        k = np.arange(n + 1)
        # P[kq, (k+1)q) = exp(-r k q) (1 - exp(-r q)); last bin keeps the tail.
        masses = np.exp(-model.rate * q * k) * -np.expm1(-model.rate * q)
        masses[-1] = math.exp(-model.rate * q * n)
    else:
        points, mass = model.support()
        k = np.minimum(np.floor(points / q + 1e-12).astype(int), n)
        masses = np.zeros(n + 1)
        np.add.at(masses, k, mass)
    masses /= math.fsum(masses)
    return FadingModel.tabulated(q, masses, truncation_quantile=model.truncation_quantile,
                                 rtol=model.rtol, max_subdivisions=model.max_subdivisions)
