"""Deterministic exact-mode checks, runnable as ``loopspam selftest``."""

import numpy as np

from .measurement import observable_from_setting
from .simulator import CheatPolicy, paper_cheat_policy, paper_plan, pooled_counts, run_trials
from .spamloop import delta_from_grid
from .states import (
    TwoQubitState,
    WernerParams,
    fidelity,
    horodecki_report,
    m_from_params,
    maximize_chsh,
    negativity,
    negativity_lower_bound,
    rho_werner,
)
from .tomography import TomographyInput, fit_werner, reconstruct

P_S, P_W = 0.928, 0.628


def _exact_grid(state, policy):
    return run_trials(state, paper_plan("exact", trials=2), policy).grids[0]


def _random_state(rng):
    rho = np.zeros((4, 4), dtype=complex)
    for w in rng.dirichlet(np.ones(rng.integers(1, 5))):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        rho += w * np.outer(v, v.conj())
    return TwoQubitState(rho)


def check_honest_delta():
    d = delta_from_grid(_exact_grid(rho_werner(P_S, P_W), CheatPolicy()))
    err = np.max(np.abs(d - np.eye(3)))
    return err <= 1e-10, f"max|Delta - I| = {err:.2e}"


def check_cheat_delta():
    d = delta_from_grid(_exact_grid(rho_werner(P_S, P_W), paper_cheat_policy()))
    dev = np.max(np.abs(d - np.eye(3)))
    return dev >= 0.05, f"max|Delta - I| = {dev:.6f}"


def random_factorizable_grid(rng, max_cond=100.0):
    """Grid ``a_i . T . b_j`` with T and every Bloch triple conditioned below ``max_cond``."""
    while True:
        t = rng.normal(size=(3, 3))
        a = rng.normal(size=(4, 3))
        b = rng.normal(size=(4, 3))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        mats = [t, a[:3], a[1:], b[:3], b[1:]]
        if max(np.linalg.cond(m) for m in mats) <= max_cond:
            return a @ t @ b.T


def check_factorizable(n=1000, seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        grid = random_factorizable_grid(rng)
        worst = max(worst, np.max(np.abs(delta_from_grid(grid) - np.eye(3))))
    return worst <= 1e-9, f"worst max|Delta - I| = {worst:.2e} over {n} grids"


def check_chsh_closed_forms():
    state = rho_werner(P_S, P_W)
    honest = run_trials(state, paper_plan("exact", trials=2), CheatPolicy()).chsh_values[0]
    cheat = run_trials(state, paper_plan("exact", trials=2), paper_cheat_policy()).chsh_values[0]
    e1 = abs(honest - np.sqrt(2) * P_W * (1 + P_S))
    e2 = abs(cheat - 2 * P_W * (1 + P_S))
    return max(e1, e2) <= 1e-9, f"honest S = {honest:.6f}, cheat S = {cheat:.6f}"


def check_horodecki(n=100, seed=2):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        s = _random_state(rng)
        worst = max(worst, abs(maximize_chsh(s)[0] - horodecki_report(s).s_max))
    return worst <= 1e-4, f"worst |S_opt - 2 sqrt(M)| = {worst:.2e}"


def check_negativity():
    n = negativity(rho_werner(P_S, P_W))
    bound = negativity_lower_bound(1.710)
    ok = abs(n - 0.397) <= 1e-3 and abs(bound - 0.209) <= 5e-4
    return ok, f"N = {n:.6f}, S/sqrt2 - 1 at S=1.710 is {bound:.6f}"


def check_m_identity():
    worst = 0.0
    for p_s in np.linspace(0, 1, 21):
        for p_w in np.linspace(0, 1, 21):
            params = WernerParams(p_s, p_w)
            worst = max(worst, abs(horodecki_report(rho_werner(params)).m_param
                                   - m_from_params(params)))
    return worst <= 1e-10, f"worst |M - M(p_s, p_w)| = {worst:.2e}"


def check_tomography():
    state = rho_werner(P_S, P_W)
    plan = paper_plan("exact", trials=2)
    trials = run_trials(state, plan, CheatPolicy())
    data = TomographyInput(
        tuple(observable_from_setting(s) for s in plan.alice),
        tuple(observable_from_setting(s) for s in plan.bob),
        pooled_counts(trials),
    )
    rec = reconstruct(data).physical
    f = fidelity(rec, state)
    fit = fit_werner(rec)
    perr = max(abs(fit.params.p_s - P_S), abs(fit.params.p_w - P_W))
    return f >= 1 - 1e-9 and perr <= 1e-4, f"F = {f:.12f}, parameter error {perr:.1e}"


CHECKS = [
    ("honest Delta = I", check_honest_delta),
    ("cheat Delta != I", check_cheat_delta),
    ("factorizable grids give Delta = I", check_factorizable),
    ("CHSH closed forms", check_chsh_closed_forms),
    ("max CHSH = 2 sqrt(M)", check_horodecki),
    ("negativity and bound", check_negativity),
    ("M(p_s, p_w) identity", check_m_identity),
    ("tomography round trip", check_tomography),
]


def run_selftest(out=print):
    """Run every check, print one line each and return True if all pass."""
    ok = True
    for name, fn in CHECKS:
        passed, detail = fn()
        ok &= bool(passed)
        out(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    return ok
