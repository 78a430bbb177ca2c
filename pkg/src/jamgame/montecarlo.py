"""Sampling checks of payoffs, security levels and outage probabilities.

All draws come from :mod:`jamgame.rng`, so a report depends only on its
seed and sample count, never on how the work is chunked.  Samplers are
callables mapping an array of uniforms in ``[0, 1)`` to power draws; an
optional ``mean`` attribute gives their exact mean.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import JamGameError
from .mixed_equilibrium import EquilibriumPlay, MixedEquilibrium, MonotoneCurve, equilibrium_strategies
from .pure_strategies import OutageReport
from .rng import mix64, stream_key, uniforms

__all__ = [
    "CHUNK",
    "SimulationReport",
    "DeviationReport",
    "Sampler",
    "atom",
    "uniform",
    "two_point",
    "standard_deviations",
    "estimate_payoff",
    "deviation_test",
    "estimate_outage",
]

CHUNK = 1 << 20
X_STREAM, Y_STREAM = 1, 2


class SamplingError(JamGameError):
    """A sampler raised or returned a malformed batch."""


class BudgetError(JamGameError, ValueError):
    """A deviation sampler spends more than its budget."""


@dataclass(frozen=True)
class SimulationReport:
    """Bernoulli estimate with its binomial standard error."""

    estimate: float
    stderr: float
    n: int
    seed: int
    target: float | None = None
    z: float | None = None

    @classmethod
    def from_count(cls, hits: int, n: int, seed: int, target: float | None = None):
        p = hits / n
        se = math.sqrt(p * (1.0 - p) / n)
        z = None
        if target is not None:
            z = (p - target) / se if se > 0 else (0.0 if p == target else math.copysign(math.inf, p - target))
        return cls(p, se, n, seed, target, z)

    def within(self, k: float = 3.0) -> bool:
        """Whether the target lies within ``k`` standard errors."""
        return self.target is not None and abs(self.estimate - self.target) <= k * self.stderr + 1e-15

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


# ---------------------------------------------------------------------------
# samplers


class Sampler:
    """Named callable sampler with an optional exact mean."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], mean: float | None = None,
                 name: str = ""):
        self._func = func
        self.mean = mean
        self.name = name

    def __call__(self, u):
        return self._func(np.asarray(u, dtype=float))

    def __repr__(self):
        return f"Sampler({self.name or 'custom'}, mean={self.mean})"


def atom(value: float) -> Sampler:
    """Always ``value``."""
    return Sampler(lambda u: np.full(u.shape, float(value)), float(value), f"atom({value})")


def uniform(lo: float, hi: float) -> Sampler:
    return Sampler(lambda u: lo + (hi - lo) * u, 0.5 * (lo + hi), f"uniform({lo}, {hi})")


def two_point(low: float, high: float, p_high: float) -> Sampler:
    """``high`` with probability ``p_high``, else ``low``."""
    return Sampler(lambda u: np.where(u >= 1.0 - p_high, high, low),
                   low + p_high * (high - low), f"two_point({low}, {high}, {p_high})")


def standard_deviations(budget: float) -> dict[str, Sampler]:
    """Budget-respecting deviations used for security-level checks."""
    return {
        "zero": atom(0.0),
        "all-in": atom(budget),
        "uniform": uniform(0.0, 2.0 * budget),
        "half-on": two_point(0.0, 2.0 * budget, 0.5),
        "quarter-on": two_point(0.0, 4.0 * budget, 0.25),
        "split": two_point(0.5 * budget, 1.5 * budget, 0.5),
    }


def _draw(sampler, key, start, count):
    u = uniforms(key, start, count)
    try:
        out = np.asarray(sampler(u), dtype=float)
    except Exception as exc:
        raise SamplingError(f"sampler {sampler!r} failed on draws {start}..{start + count - 1}") from exc
    if out.shape != u.shape or not np.all(np.isfinite(out)):
        raise SamplingError(f"sampler {sampler!r} returned a bad batch at draws "
                            f"{start}..{start + count - 1}")
    return out


def _chunks(n: int, chunk: int):
    for start in range(0, n, chunk):
        yield start, min(chunk, n - start)


def estimate_payoff(sampler_x, sampler_y, g: MonotoneCurve, n: int, seed: int,
                    physical: bool = True, target: float | None = None,
                    chunk: int = CHUNK) -> SimulationReport:
    """Fraction of i.i.d. pairs with ``X >= g(Y)``.

    ``physical`` evaluates ``g(0)`` as ``g(0+)`` so a silent jammer still
    demands the unjammed power; otherwise ``g(0) = 0``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    hits = _payoff_hits(sampler_x, sampler_y, g, n, seed, physical, chunk)
    return SimulationReport.from_count(hits, n, seed, target)


def _payoff_hits(sampler_x, sampler_y, g, n, seed, physical, chunk):
    kx, ky = stream_key(seed, X_STREAM), stream_key(seed, Y_STREAM)
    hits = 0
    for start, count in _chunks(n, chunk):
        x = _draw(sampler_x, kx, start, count)
        y = _draw(sampler_y, ky, start, count)
        hits += int(np.count_nonzero(x >= g.g(y, physical=physical)))
    return hits


def _empirical_mean(sampler, seed, n, chunk=CHUNK):
    key = stream_key(seed, 99)
    total = math.fsum(float(_draw(sampler, key, s, c).sum()) for s, c in _chunks(n, chunk))
    return total / n


@dataclass(frozen=True)
class DeviationReport:
    player: int
    label: str
    mean: float
    bound: float
    report: SimulationReport
    passed: bool


def deviation_test(equilibrium: MixedEquilibrium, g: MonotoneCurve, a: float, b: float,
                   player1: Mapping[str, Callable] | None = None,
                   player2: Mapping[str, Callable] | None = None,
                   n: int = 1_000_000, seed: int = 0, k: float = 3.0) -> list[DeviationReport]:
    """Play each deviation against the other side's equilibrium mixture.

    A Player-2 deviation must not push the payoff below ``k_x (1 - b/2v)``
    and a Player-1 deviation must not lift it above ``1 - k_y (1 - a/g(2v))``,
    both up to ``k`` standard errors.  Deviations default to
    :func:`standard_deviations` of the respective budget.

    Raises
    ------
    BudgetError
        If a deviation's mean exceeds its budget by more than 0.1 %.
    """
    tx, jam = equilibrium_strategies(equilibrium, g)
    player1 = standard_deviations(a) if player1 is None else player1
    player2 = standard_deviations(b) if player2 is None else player2
    results = []
    for player, family, budget in ((2, player2, b), (1, player1, a)):
        for idx, (label, dev) in enumerate(family.items()):
            sub_seed = int(mix64(np.uint64((seed ^ (player << 32) ^ idx) & ((1 << 64) - 1))))
            mean = getattr(dev, "mean", None)
            if mean is None:
                mean = _empirical_mean(dev, sub_seed, n)
            if mean > budget * (1 + 1e-3) + 1e-12:
                raise BudgetError(f"deviation {label!r} of player {player} has mean {mean} "
                                  f"above budget {budget}")
            if player == 2:
                bound = equilibrium.security_x
                rep = estimate_payoff(tx, dev, g, n, sub_seed, target=bound)
                ok = rep.estimate >= bound - k * rep.stderr - 1e-12
            else:
                bound = equilibrium.security_y
                rep = estimate_payoff(dev, jam, g, n, sub_seed, target=bound)
                ok = rep.estimate <= bound + k * rep.stderr + 1e-12
            results.append(DeviationReport(player, label, mean, bound, rep, ok))
    return results


# ---------------------------------------------------------------------------
# outage


def _bernoulli(seed, stream, start, count, p):
    return uniforms(stream_key(seed, stream), start, count) < p


def estimate_outage(setup, n: int, seed: int, curve=None, physical: bool = True,
                    chunk: int = CHUNK) -> SimulationReport:
    """Simulate frames and count outages.

    ``setup`` is an :class:`OutageReport` or an :class:`EquilibriumPlay`.
    A frame is lost when the transmitter's power is below the requirement
    for the jammer's power; ties go to the player who moves second.  With a
    ``curve`` the requirement is evaluated on it, otherwise the thresholds
    stored in the report are used.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if isinstance(setup, EquilibriumPlay):
        eq, tx, jam = setup
        target = eq.p_out if physical else 1.0 - eq.abstract_payoff
        hits = _payoff_hits(tx, jam, tx.curve, n, seed, physical, chunk)
        return SimulationReport.from_count(n - hits, n, seed, target)
    if not isinstance(setup, OutageReport):
        raise TypeError(f"cannot simulate {type(setup).__name__}")

    r = setup
    if r.regime == "peak":
        return SimulationReport.from_count(round(r.p_out) * n, n, seed, r.p_out)
    lost = 0
    for start, count in _chunks(n, chunk):
        on = _bernoulli(seed, 1, start, count, r.p_t)
        power = np.where(on, r.chosen_P_M, 0.0)
        if r.regime == "minimax":
            hit = _bernoulli(seed, 2, start, count, r.p_j)
            jam = np.where(hit, r.jam_power, 0.0)
            need_j = curve.inverse(r.chosen_P_M, extrapolate=True) if curve is not None else r.jam_power
            # The jammer moves second and wins ties.
            out = ~on | (hit & (jam >= need_j))
        else:
            need = float(curve(r.J_bar)) if (curve is not None and r.regime == "maximin") else r.chosen_P_M
            out = power < need
        lost += int(np.count_nonzero(out))
    return SimulationReport.from_count(lost, n, seed, r.p_out)
