"""Acceptance gate: one PASS/FAIL line per criterion.

Run with pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import functools
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from jamgame import (
    FadingModel,
    MonotoneCurve,
    RequiredPower,
    deviation_test,
    discretize,
    ergodic_capacity,
    estimate_payoff,
    fullcsi_equilibrium,
    hughes_narayan_closed_form,
    maximin_outage,
    mean_power,
    minimax_outage,
    nocsi_closed_form,
    nocsi_curve,
    nocsi_mu_prime,
    nonintelligent_outage,
    peak_game_solve,
    peak_outage,
    required_jam_power,
    required_tx_power_curve,
    solve_general_game,
    solve_problem1,
)

R, SIGMA2, J_BAR = 2.0, 10.0, 10.0
MODEL = FadingModel.exponential(1 / 6)
SWEEP = np.linspace(5, 60, 56)
RESULTS: dict[int, tuple[bool, str]] = {}


@functools.lru_cache(maxsize=None)
def wide_curve():
    grid = np.unique(np.concatenate([np.linspace(0, 50, 51), np.geomspace(50, 2e4, 40)]))
    return required_tx_power_curve(MODEL, R, SIGMA2, grid, extrapolate=True)


@functools.lru_cache(maxsize=None)
def mu_prime():
    return nocsi_mu_prime(MODEL, R)


def _close(a, b, tol):
    return abs(a - b) <= tol


def ac1():
    eq = solve_general_game(MonotoneCurve.identity(), 1.0, 1.0)
    errs = [abs(eq.payoff - 0.5), abs(eq.v - 1), abs(eq.k_x - 1), abs(eq.k_y - 1)]
    return max(errs) <= 1e-9, f"max error {max(errs):.2e}"


def ac2():
    worst = 0.0
    for a, b, c in [(2, 1, 1), (1, 2, 0), (1, 1, 0), (3, 1, 0.5)]:
        got = solve_general_game(MonotoneCurve.affine(1.0, c), a, b)
        ref = hughes_narayan_closed_form(a, b, c)
        worst = max(worst, *(abs(getattr(got, k) - getattr(ref, k))
                             for k in ("v", "k_x", "k_y", "payoff")))
    return worst <= 1e-6, f"max deviation {worst:.2e}"


def ac3():
    mu = mu_prime()
    g = MonotoneCurve.affine(mu, mu * SIGMA2)
    worst = 0.0
    for P in (15.0, 30.0, 45.0):
        got = solve_general_game(g, P, J_BAR)
        ref = nocsi_closed_form(P, J_BAR, mu, SIGMA2)
        worst = max(worst, *(abs(getattr(got, k) - getattr(ref, k))
                             for k in ("v", "k_x", "k_y", "payoff")))
    return worst <= 1e-6, f"max deviation {worst:.2e}"


def ac4():
    handle = RequiredPower(MODEL, R, SIGMA2)
    worst = 0.0
    for J in (1.0, 2.0, 5.0, 10.0, 20.0, 50.0):
        back = required_jam_power(handle, handle(J))
        worst = max(worst, abs(back - J) / J)
    return worst <= 1e-5, f"max relative error {worst:.2e}"


def ac5():
    rng = np.random.default_rng(20240611)
    worst = 0.0
    for _ in range(20):
        r, s2, jm = rng.uniform(0.5, 3.0), rng.uniform(1.0, 20.0), rng.uniform(0.5, 50.0)
        sol = solve_problem1(MODEL, r, s2, jm)
        hs, mu = sol.h_star, sol.mu
        hh = hs * np.array([1.0, 1.5, 3.0, 10.0, 50.0])
        errs = [
            abs(sol.h0 - hs / (1 + mu * hs)) / sol.h0,
            abs(sol.jam_profile(hs) - s2) / s2,
            float(np.max(np.abs(sol.tx_profile(hh) - mu * sol.jam_profile(hh)) / sol.tx_profile(hh))),
            abs(ergodic_capacity(MODEL, sol.tx_profile, sol.jammer_profile, s2) - r) / r,
            abs(mean_power(MODEL, sol.jammer_profile) - jm) / jm,
            abs(mean_power(MODEL, sol.tx_profile) - sol.P_M) / sol.P_M,
        ]
        worst = max(worst, *errs)
    return worst <= 1e-8, f"max relative residual {worst:.2e} over 20 configs"


def ac6():
    curve = required_tx_power_curve(MODEL, R, SIGMA2, np.linspace(0, 50, 50))
    inc = bool(np.all(np.diff(curve.p) > 0))
    d2 = float(np.max(curve.second_differences()))
    return inc and d2 <= 1e-8, f"increasing={inc}, max second difference {d2:.2e}"


def ac7():
    exact = solve_problem1(MODEL, R, SIGMA2, J_BAR).P_M
    errs = [abs(solve_problem1(discretize(MODEL, q), R, SIGMA2, J_BAR).P_M - exact) / exact
            for q in (0.1, 0.05, 0.025)]
    ok = errs[0] > errs[1] > errs[2] and errs[2] <= 0.01
    return ok, "relative errors " + ", ".join(f"{e:.3%}" for e in errs)


def ac8():
    t0 = time.perf_counter()
    eq, tx, jam = fullcsi_equilibrium(wide_curve(), 30.0, J_BAR)
    rep = estimate_payoff(tx, jam, tx.curve, 1_000_000, seed=1, target=eq.payoff)
    dt = time.perf_counter() - t0
    return rep.within(3) and dt <= 10, f"z={rep.z:+.2f}, {dt:.2f} s"


def ac9():
    play = fullcsi_equilibrium(wide_curve(), 30.0, J_BAR)
    reports = deviation_test(play.equilibrium, play.transmitter.curve, 30.0, J_BAR,
                             n=1_000_000, seed=7)
    bad = [f"P{r.player}:{r.label}" for r in reports if not r.passed]
    return not bad, f"{len(reports) - len(bad)}/{len(reports)} deviations respect their bound"


def ac10():
    curve = wide_curve()
    problems = []
    for P in SWEEP:
        lo = maximin_outage(curve, P, J_BAR).p_out
        mid = fullcsi_equilibrium(curve, P, J_BAR).equilibrium.p_out
        hi = minimax_outage(curve, P, J_BAR).p_out
        if not lo <= mid + 1e-12 or not mid <= hi + 1e-12:
            problems.append(f"order at P={P:g}")
        sol = peak_game_solve(MODEL, R, SIGMA2, P, J_BAR)
        peak = peak_outage(sol.capacity, R)
        if peak != (1 if sol.capacity < R else 0):
            problems.append(f"peak transition at P={P:g}")
        if peak == 1:
            others = (lo, mid, hi, nonintelligent_outage(MODEL, R, SIGMA2, P, J_BAR).p_out)
            if max(others) > 1:
                problems.append(f"peak dominance at P={P:g}")
    return not problems, "; ".join(problems) or f"{len(SWEEP)} sweep points ordered"


def ac11():
    mu = mu_prime()
    affine = nocsi_curve(mu, SIGMA2)
    full = wide_curve()
    diff = affine(full.j) - full.p
    gaps = [abs(nocsi_closed_form(P, J_BAR, mu, SIGMA2).p_out
                - fullcsi_equilibrium(full, P, J_BAR).equilibrium.p_out) for P in SWEEP]
    ok = float(diff.min()) >= 0 and max(gaps) < 0.05
    return ok, f"min P'-P {diff.min():.3g}, max p_out gap {max(gaps):.4f}"


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "jamgame.cli", *args],
                          capture_output=True, check=True).stdout


def ac12():
    runs = [("simulate", "--seed", "11", "--samples", "200000"),
            ("outage-sweep", "--set", "P_sweep=5,20,40,60")]
    same = [_cli(*a) == _cli(*a) for a in runs]
    return all(same), f"byte-identical: {dict(zip(('simulate', 'outage-sweep'), same))}"


CRITERIA = {
    1: ("Bell-Cover value", ac1),
    2: ("Hughes-Narayan equivalence", ac2),
    3: ("no-CSI equivalence", ac3),
    4: ("duality round-trip", ac4),
    5: ("frame-solution structure", ac5),
    6: ("concavity and monotonicity", ac6),
    7: ("discrete-continuous convergence", ac7),
    8: ("Monte Carlo agreement", ac8),
    9: ("security levels", ac9),
    10: ("regime ordering", ac10),
    11: ("CSI gap", ac11),
    12: ("determinism", ac12),
}


def run(number: int) -> tuple[bool, str]:
    name, check = CRITERIA[number]
    try:
        ok, detail = check()
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    RESULTS[number] = (ok, detail)
    return ok, detail


def format_line(number: int) -> str:
    ok, detail = RESULTS[number]
    return f"AC{number:<2d} {'PASS' if ok else 'FAIL'}  {CRITERIA[number][0]}: {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"AC{n}")
def test_criterion(number):
    ok, detail = run(number)
    print(format_line(number))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n in sorted(CRITERIA):
        run(n)
        failed += not RESULTS[n][0]
        print(format_line(n), flush=True)
    sys.exit(1 if failed else 0)
