"""
Faking a Bell violation, and catching it
========================================

The source emits an approximate Werner state that cannot violate CHSH:
its best possible S is 2*sqrt(M) < 2. Bob cheats by peeking at Alice's
setting index and swapping his own wave-plate angles on four of the sixteen
setting pairs. The CHSH value jumps above 2, but the loop consistency check
on the full 4x4 expectation grid flags the dependence.
"""

import numpy as np

from loopspam import (
    CheatPolicy,
    delta_statistics,
    horodecki_report,
    paper_cheat_policy,
    paper_plan,
    rho_werner,
    run_trials,
    trial_deltas,
    verdict,
)

np.set_printoptions(precision=3, suppress=True)

state = rho_werner(0.928, 0.628)
rep = horodecki_report(state)
print(f"Horodecki M = {rep.m_param:.3f}, so no measurement gives more than "
      f"S_max = {rep.s_max:.3f}")

# ten trials of 14000 expected coincidences per setting pair
plan = paper_plan(14000, trials=10, seed=20180207)

for label, policy in [("honest", CheatPolicy()), ("cheating", paper_cheat_policy())]:
    trials = run_trials(state, plan, policy)
    s = np.array(trials.chsh_values)
    deltas, skipped = trial_deltas(trials.grids)
    stats = delta_statistics(deltas, skipped)
    v = verdict(stats, threshold=5)
    print()
    print(f"--- {label} Bob ---")
    print(f"CHSH S = {s.mean():.3f} +/- {s.std(ddof=1):.3f}")
    print("|mean(Delta - I)| / std:")
    print(stats.ratio)
    print("false correlations detected" if v.detected else "data are consistent",
          f"(max ratio {v.max_ratio:.1f})")

# Only the first column of Delta - I can move: the other two columns are
# built from repeated rows and columns of the grid and cancel exactly.
