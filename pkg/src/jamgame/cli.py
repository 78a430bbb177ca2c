"""Command-line experiment runner.

Every subcommand reads a flat ``key = value`` config file (optional; the
defaults are the reference setup) and writes CSV or JSON to ``--out`` or
stdout.  Outputs start with a header recording the config hash, solver
tolerances and package version, and contain nothing time-dependent, so the
same config always reproduces the same bytes.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .channel import FadingModel
from .errors import JamGameError
from .frame_solver import (
    AffineCurve,
    PowerCurve,
    nocsi_curve,
    nocsi_mu_prime,
    required_tx_power_curve,
)
from .mixed_equilibrium import fullcsi_equilibrium, nocsi_closed_form
from .montecarlo import estimate_outage
from .pure_strategies import (
    OutageReport,
    maximin_outage,
    minimax_outage,
    nonintelligent_outage,
    peak_report,
)

TOLERANCES = "root rtol 8.9e-16; quadrature rtol 1e-10; equilibrium tol 1e-8"

SUBCOMMANDS = ("curve", "outage-sweep", "rate-sweep", "equilibrium", "simulate", "compare-csi")
ALL_REGIMES = ("peak", "maximin", "minimax", "nonintelligent", "mixed")

DEFAULTS = {
    "rate": "2",
    "sigma2": "10",
    "channel": "exponential:0.16666666666666666",
    "P_bar": "30",
    "J_bar": "10",
    "J_curve": "0:50:51",
    "P_sweep": "5:60:56",
    "R_sweep": "0.5:3:11",
    "J_extent": "20000",
    "regimes": ",".join(ALL_REGIMES),
    "regime": "mixed",
    "csi": "full",
    "compare": "outage",
    "resolution": "2000",
    "epsilon": "0.001",
    "seed": "0",
    "samples": "1000000",
}


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class Config:
    rate: float
    sigma2: float
    channel: str
    P_bar: float
    J_bar: float
    J_curve: np.ndarray
    P_sweep: np.ndarray
    R_sweep: np.ndarray
    J_extent: float
    regimes: tuple[str, ...]
    regime: str
    csi: str
    compare: str
    resolution: int
    epsilon: float
    seed: int
    samples: int
    raw: dict

    @property
    def digest(self) -> str:
        text = "\n".join(f"{k}={self.raw[k]}" for k in sorted(self.raw))
        return hashlib.sha256(text.encode()).hexdigest()

    def model(self) -> FadingModel:
        kind, _, arg = self.channel.partition(":")
        if kind == "exponential":
            return FadingModel.exponential(float(arg))
        if kind == "point_mass":
            return FadingModel.point_mass(float(arg))
        return FadingModel.from_csv(arg)


def read_config_file(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError([f"{path}:{lineno}: expected key = value"])
            values[key.strip()] = value.strip()
    return values


def _sweep(text: str) -> np.ndarray:
    # "start:stop:count" or a comma list
    if ":" in text:
        start, stop, count = text.split(":")
        return np.linspace(float(start), float(stop), int(count))
    return np.array([float(v) for v in text.split(",")])


def build_config(raw: dict) -> Config:
    """Validate every field, reporting all problems at once."""
    unknown = sorted(set(raw) - set(DEFAULTS))
    problems = [f"{k}: unknown key" for k in unknown]
    merged = {**DEFAULTS, **{k: v for k, v in raw.items() if k in DEFAULTS}}
    parsed = {}

    def take(key, conv, check=None, message=""):
        try:
            value = conv(merged[key])
        except (TypeError, ValueError) as exc:
            problems.append(f"{key}: cannot parse {merged[key]!r} ({exc})")
            return
        if check is not None and not check(value):
            problems.append(f"{key}: {message} (got {merged[key]!r})")
        parsed[key] = value

    def increasing(a):
        return a.size > 0 and np.all(np.isfinite(a)) and np.all(np.diff(a) > 0)

    take("rate", float, lambda v: v > 0, "must be positive")
    take("sigma2", float, lambda v: v > 0, "must be positive")
    take("channel", str, lambda v: v.partition(":")[0] in ("exponential", "point_mass", "tabulated")
         and v.partition(":")[2] != "", "expected exponential:RATE, point_mass:GAIN or tabulated:PATH")
    take("P_bar", float, lambda v: v > 0, "must be positive")
    take("J_bar", float, lambda v: v >= 0, "must be non-negative")
    take("J_curve", _sweep, lambda a: increasing(a) and a[0] >= 0, "must be non-empty, increasing, >= 0")
    take("P_sweep", _sweep, lambda a: increasing(a) and a[0] > 0, "must be non-empty, increasing, > 0")
    take("R_sweep", _sweep, lambda a: increasing(a) and a[0] > 0, "must be non-empty, increasing, > 0")
    take("J_extent", float, lambda v: v > 50, "must exceed 50")
    take("regimes", lambda s: tuple(r.strip() for r in s.split(",") if r.strip()),
         lambda t: t and set(t) <= set(ALL_REGIMES), f"must be a subset of {ALL_REGIMES}")
    take("regime", str, lambda v: v in ALL_REGIMES, f"must be one of {ALL_REGIMES}")
    take("csi", str, lambda v: v in ("full", "none"), "must be 'full' or 'none'")
    take("compare", str, lambda v: v in ("outage", "curve"), "must be 'outage' or 'curve'")
    take("resolution", int, lambda v: v >= 1, "must be at least 1")
    take("epsilon", float, lambda v: 0 < v < 1, "must lie in (0, 1)")
    take("seed", int, lambda v: 0 <= v < 2**64, "must be a 64-bit unsigned integer")
    take("samples", int, lambda v: v >= 1, "must be at least 1")
    if problems:
        raise ConfigError(problems)
    return Config(**parsed, raw=dict(sorted(merged.items())))


# ---------------------------------------------------------------------------
# output helpers


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def _header(cmd: str, cfg: Config) -> list[str]:
    lines = [
        f"jamgame {__version__}",
        f"command: {cmd}",
        f"config_sha256: {cfg.digest}",
        f"tolerances: {TOLERANCES}",
    ]
    lines += [f"{k}: {v}" for k, v in cfg.raw.items()]
    return lines


def _csv(cmd, cfg, columns, rows) -> str:
    out = [f"# {line}" for line in _header(cmd, cfg)]
    out.append(",".join(columns))
    out += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(out) + "\n"


def _json(cmd, cfg, payload: dict) -> str:
    meta = dict(line.split(": ", 1) for line in _header(cmd, cfg)[1:4])
    meta["version"] = __version__
    return json.dumps({**payload, "meta": meta}, indent=2) + "\n"


# ---------------------------------------------------------------------------
# experiment pieces


def _wide_grid(cfg: Config) -> np.ndarray:
    # Dense where the curve is plotted, geometric out to where minimax looks.
    return np.unique(np.concatenate([np.linspace(0, 50, 51), np.geomspace(50, cfg.J_extent, 40)]))


def _curves(cfg: Config, rate: float):
    model = cfg.model()
    full = required_tx_power_curve(model, rate, cfg.sigma2, _wide_grid(cfg), extrapolate=True)
    affine = nocsi_curve(nocsi_mu_prime(model, rate), cfg.sigma2)
    return model, full, affine


def _mixed_row(curve, P_bar, J_bar, mu_prime=None, sigma2=None):
    if mu_prime is not None and J_bar > 0:
        eq = nocsi_closed_form(P_bar, J_bar, mu_prime, sigma2)
    else:
        eq = fullcsi_equilibrium(curve, P_bar, J_bar).equilibrium
    return (eq.p_out, 1.0 - eq.atom_x, 1.0 - eq.atom_y, math.nan, "mixed")


def _report_row(r: OutageReport):
    return (r.p_out, r.p_t, r.p_j, r.chosen_P_M, r.regime)


def _regime_rows(cfg, model, curve, rate, P_bar, J_bar, regimes, mu_prime=None):
    rows = []
    for regime in regimes:
        if regime == "peak":
            rows.append(_report_row(peak_report(model, rate, cfg.sigma2, P_bar, J_bar)))
        elif regime == "maximin":
            rows.append(_report_row(maximin_outage(curve, P_bar, J_bar)))
        elif regime == "minimax":
            rows.append(_report_row(minimax_outage(curve, P_bar, J_bar, cfg.resolution, cfg.epsilon)))
        elif regime == "nonintelligent":
            rows.append(_report_row(nonintelligent_outage(model, rate, cfg.sigma2, P_bar, J_bar)))
        else:
            rows.append(_mixed_row(curve, P_bar, J_bar, mu_prime, cfg.sigma2))
    return rows


SWEEP_COLUMNS = ("sweep_value", "p_out", "p_t", "p_j", "chosen_P_M", "regime")


def cmd_curve(cfg: Config) -> str:
    model = cfg.model()
    if cfg.csi == "none":
        curve = nocsi_curve(nocsi_mu_prime(model, cfg.rate), cfg.sigma2).sampled(
            np.unique(np.concatenate(([0.0], cfg.J_curve))))
    else:
        curve = required_tx_power_curve(model, cfg.rate, cfg.sigma2, cfg.J_curve)
    return _csv("curve", cfg, ("j_m", "p_m"), zip(curve.j, curve.p))


def cmd_outage_sweep(cfg: Config) -> str:
    model, full, affine = _curves(cfg, cfg.rate)
    curve = full if cfg.csi == "full" else affine
    mu = affine.slope if cfg.csi == "none" else None
    rows = []
    for P in cfg.P_sweep:
        rows += [(P, *r) for r in _regime_rows(cfg, model, curve, cfg.rate, P, cfg.J_bar,
                                               cfg.regimes, mu)]
    return _csv("outage-sweep", cfg, SWEEP_COLUMNS, rows)


def cmd_rate_sweep(cfg: Config) -> str:
    rows = []
    for R in cfg.R_sweep:
        model, full, affine = _curves(cfg, R)
        curve = full if cfg.csi == "full" else affine
        mu = affine.slope if cfg.csi == "none" else None
        rows += [(R, *r) for r in _regime_rows(cfg, model, curve, R, cfg.P_bar, cfg.J_bar,
                                               cfg.regimes, mu)]
    return _csv("rate-sweep", cfg, SWEEP_COLUMNS, rows)


def cmd_equilibrium(cfg: Config) -> str:
    model, full, affine = _curves(cfg, cfg.rate)
    if cfg.csi == "none" and cfg.J_bar > 0:
        eq = nocsi_closed_form(cfg.P_bar, cfg.J_bar, affine.slope, cfg.sigma2)
    else:
        eq = fullcsi_equilibrium(full if cfg.csi == "full" else affine, cfg.P_bar,
                                 cfg.J_bar).equilibrium
    return _json("equilibrium", cfg, eq.to_dict())


def cmd_simulate(cfg: Config) -> str:
    model, full, affine = _curves(cfg, cfg.rate)
    curve = full if cfg.csi == "full" else affine
    if cfg.regime == "mixed":
        setup = fullcsi_equilibrium(curve, cfg.P_bar, cfg.J_bar)
        rep = estimate_outage(setup, cfg.samples, cfg.seed)
    else:
        row = _regime_rows(cfg, model, curve, cfg.rate, cfg.P_bar, cfg.J_bar, (cfg.regime,))[0]
        report = OutageReport(*row[:4], regime=row[4], P_bar=cfg.P_bar, J_bar=cfg.J_bar,
                              jam_power=_jam_power(curve, cfg, row))
        rep = estimate_outage(report, cfg.samples, cfg.seed, curve=curve)
    return _json("simulate", cfg, {"regime": cfg.regime, **rep.__dict__})


def _jam_power(curve, cfg, row):
    if row[4] == "minimax":
        return float(curve.inverse(row[3], extrapolate=True))
    return cfg.J_bar


def cmd_compare_csi(cfg: Config) -> str:
    model, full, affine = _curves(cfg, cfg.rate)
    if cfg.compare == "curve":
        j = np.unique(np.concatenate(([0.0], cfg.J_curve)))
        exact = required_tx_power_curve(model, cfg.rate, cfg.sigma2, j)
        rows = zip(exact.j, exact.p, affine(exact.j))
        return _csv("compare-csi", cfg, ("j_m", "p_m_fullcsi", "p_m_nocsi"), rows)
    regimes = [r for r in cfg.regimes if r in ("maximin", "minimax", "mixed")]
    rows = []
    for P in cfg.P_sweep:
        a = _regime_rows(cfg, model, full, cfg.rate, P, cfg.J_bar, regimes)
        b = _regime_rows(cfg, model, affine, cfg.rate, P, cfg.J_bar, regimes, affine.slope)
        rows += [(P, ra[4], ra[0], rb[0]) for ra, rb in zip(a, b)]
    return _csv("compare-csi", cfg, ("sweep_value", "regime", "p_out_fullcsi", "p_out_nocsi"), rows)


COMMANDS = {
    "curve": cmd_curve,
    "outage-sweep": cmd_outage_sweep,
    "rate-sweep": cmd_rate_sweep,
    "equilibrium": cmd_equilibrium,
    "simulate": cmd_simulate,
    "compare-csi": cmd_compare_csi,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jamgame", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"jamgame {__version__}")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", metavar="PATH", help="flat key = value config file")
    parser.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    parser.add_argument("--seed", type=int, help="random seed for simulate")
    parser.add_argument("--samples", type=int, help="Monte Carlo sample count")
    parser.add_argument("--resolution", type=int, help="minimax search grid size")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override any config key")
    return parser


def _fail(kind: str, message: str, code: int, **extra) -> int:
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        raw = read_config_file(args.config) if args.config else {}
        for item in args.overrides:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError([f"--set {item!r}: expected KEY=VALUE"])
            raw[key.strip()] = value.strip()
        for key in ("seed", "samples", "resolution"):
            if getattr(args, key) is not None:
                raw[key] = str(getattr(args, key))
        cfg = build_config(raw)
    except ConfigError as exc:
        return _fail("ConfigError", str(exc), 2, fields=exc.problems)
    except OSError as exc:
        return _fail("ConfigError", str(exc), 2, fields=["config"])

    try:
        text = COMMANDS[args.subcommand](cfg)
    except (JamGameError, ValueError, OSError) as exc:
        return _fail(type(exc).__name__, str(exc), 1)

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
