"""End-to-end acceptance battery: twelve criteria, one PASS/FAIL line each.

The lines are printed as each criterion finishes and repeated in the pytest
terminal summary. ``python tests/test_acceptance.py`` runs the battery
without pytest.
"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import random_mixed_state
from loopspam.config import load_config
from loopspam.measurement import observable_from_setting
from loopspam.report import run_scenario, strip_timestamp, to_json
from loopspam.selftest import random_factorizable_grid
from loopspam.simulator import (
    EXACT,
    CheatPolicy,
    paper_cheat_policy,
    paper_plan,
    paper_settings,
    pooled_counts,
    run_trials,
)
from loopspam.spamloop import delta_from_grid, delta_statistics, trial_deltas, verdict
from loopspam.states import (
    WernerParams,
    correlation_matrix,
    fidelity,
    horodecki_report,
    m_from_params,
    maximize_chsh,
    negativity,
    negativity_lower_bound,
    rho_werner,
)
from loopspam.tomography import TomographyInput, estimate_correlations, fit_werner, reconstruct

pytestmark = pytest.mark.acceptance

P_S, P_W = 0.928, 0.628
# brute-force value of max|Delta - I| for the cheated exact grid (see test_spamloop)
CHEAT_DELTA_MAX_DEV = 0.27766029389848035
RESULTS = []


def record(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def exact_grid(state, policy=None):
    return run_trials(state, paper_plan(EXACT, trials=2), policy or CheatPolicy()).grids[0]


def tomography_input(trials):
    alice, bob = paper_settings()
    return TomographyInput(tuple(observable_from_setting(s) for s in alice),
                           tuple(observable_from_setting(s) for s in bob),
                           pooled_counts(trials))


def test_01_honest_consistency_exact():
    d = delta_from_grid(exact_grid(rho_werner(P_S, P_W)))
    err = np.max(np.abs(d - np.eye(3)))
    record(1, err <= 1e-10, f"honest exact max|Delta - I| = {err:.2e} (<= 1e-10)")


def test_02_cheat_detection_exact():
    d = delta_from_grid(exact_grid(rho_werner(P_S, P_W), paper_cheat_policy()))
    dev = np.max(np.abs(d - np.eye(3)))
    ok = dev >= 0.05 and abs(dev - CHEAT_DELTA_MAX_DEV) <= 1e-12
    record(2, ok, f"cheat exact max|Delta - I| = {dev:.12f} (>= 0.05, oracle "
                  f"{CHEAT_DELTA_MAX_DEV:.12f})")


def test_03_factorizable_grids():
    rng = np.random.default_rng(2024)
    worst = max(np.max(np.abs(delta_from_grid(random_factorizable_grid(rng)) - np.eye(3)))
                for _ in range(1000))
    record(3, worst <= 1e-9, f"1000 factorizable grids, worst max|Delta - I| = {worst:.2e}")


def test_04_chsh_closed_forms():
    state = rho_werner(P_S, P_W)
    plan = paper_plan(EXACT, trials=2)
    s_honest = run_trials(state, plan).chsh_values[0]
    s_cheat = run_trials(state, plan, paper_cheat_policy()).chsh_values[0]
    e_honest = np.sqrt(2) * P_W * (1 + P_S)
    e_cheat = 2 * P_W * (1 + P_S)
    ok = abs(s_honest - e_honest) <= 1e-9 and abs(s_cheat - e_cheat) <= 1e-9
    record(4, ok, f"S honest = {s_honest:.9f} (closed form {e_honest:.9f}), "
                  f"cheat = {s_cheat:.9f} (closed form {e_cheat:.9f})")


def test_05_horodecki_identity():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        s = random_mixed_state(rng)
        worst = max(worst, abs(maximize_chsh(s)[0] - horodecki_report(s).s_max))
    record(5, worst <= 1e-4, f"100 random states, worst |S_opt - 2 sqrt(M)| = {worst:.2e}")


def test_06_negativity_and_bound():
    n = negativity(rho_werner(P_S, P_W))
    bound = negativity_lower_bound(1.710)
    ok = abs(n - 0.397) <= 1e-3 and abs(bound - 0.209) <= 5e-4
    record(6, ok, f"N = {n:.6f} (0.397 +- 0.001), S/sqrt2 - 1 at S = 1.710: {bound:.6f}")


def test_07_m_identity_grid():
    worst = 0.0
    for p_s in np.linspace(0, 1, 21):
        for p_w in np.linspace(0, 1, 21):
            params = WernerParams(float(p_s), float(p_w))
            worst = max(worst, abs(m_from_params(params)
                                   - horodecki_report(rho_werner(params)).m_param))
    record(7, worst <= 1e-10, f"21x21 grid, worst |M_closed - M_numeric| = {worst:.2e}")


def test_08_tomography_round_trip():
    worst_f = 1.0
    worst_p = 0.0
    cases = [(P_S, P_W), (0.866, 1.0), (0.5, 0.3), (1.0, 1.0), (0.2, 0.9)]
    for p_s, p_w in cases:
        truth = rho_werner(p_s, p_w)
        rec = reconstruct(tomography_input(run_trials(truth, paper_plan(EXACT, trials=2))))
        worst_f = min(worst_f, fidelity(rec.physical, truth))
        fit = fit_werner(rec.physical)
        worst_p = max(worst_p, abs(fit.params.p_s - p_s), abs(fit.params.p_w - p_w))
    ok = worst_f >= 1 - 1e-9 and worst_p <= 1e-4
    record(8, ok, f"min fidelity = {worst_f:.12f}, worst parameter error = {worst_p:.2e}")


def monte_carlo_runs(policy):
    state = rho_werner(P_S, P_W)
    runs = []
    for seed in range(20):
        ts = run_trials(state, paper_plan(14000, trials=10, seed=seed), policy)
        deltas, skipped = trial_deltas(ts.grids)
        stats = delta_statistics(deltas, skipped)
        runs.append((stats, verdict(stats), np.std(ts.chsh_values, ddof=1)))
    return runs


def test_09_honest_monte_carlo():
    runs = monte_carlo_runs(CheatPolicy())
    good = sum(bool(np.all(st.ratio < 3) and not v.detected) for st, v, _ in runs)
    stds = np.array([sd for _, _, sd in runs])
    ok = good >= 18 and np.all((stds >= 0.008) & (stds <= 0.035))
    record(9, ok, f"honest: {good}/20 clean runs (>= 18), CHSH std in "
                  f"[{stds.min():.4f}, {stds.max():.4f}] (within [0.008, 0.035])")


def test_10_cheat_monte_carlo():
    runs = monte_carlo_runs(paper_cheat_policy())
    hits = sum(bool(v.detected and v.max_ratio > 5) for _, v, _ in runs)
    ratios = [v.max_ratio for _, v, _ in runs]
    record(10, hits >= 19, f"cheat: {hits}/20 detected (>= 19), max ratio range "
                           f"[{min(ratios):.1f}, {max(ratios):.1f}]")


def test_11_estimator_convergence():
    state = rho_werner(P_S, P_W)
    t_true = correlation_matrix(state)
    ns = [10**3, 10**4, 10**5]
    errors = []
    for n in ns:
        errs = []
        for seed in range(40):
            ts = run_trials(state, paper_plan(n, trials=2, seed=seed))
            _, _, t_hat = estimate_correlations(tomography_input(ts))
            errs.append(np.max(np.abs(t_hat - t_true)))
        errors.append(np.mean(errs))
    slope = np.polyfit(np.log10(ns), np.log10(errors), 1)[0]
    record(11, abs(slope + 0.5) <= 0.1,
           f"log-log slope of T error = {slope:.3f} (-0.5 +- 0.1), errors "
           + ", ".join(f"{e:.2e}" for e in errors))


def test_12_determinism():
    texts = []
    for workers in (1, 1, 4, 4):
        cfg = load_config("cheat")
        texts.append(strip_timestamp(to_json(run_scenario(cfg, workers=workers))))
    ok = len(set(texts)) == 1 and json.loads(texts[0])["seed"] == 20180207
    record(12, ok, f"{len(texts)} reports (serial x2, 4 workers x2) identical: {ok}")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
