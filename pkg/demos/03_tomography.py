"""
Reconstructing the state from the same counts
==============================================

The sixteen setting pairs used for the CHSH and loop tests are also an
over-complete tomography set. Pool the coincidence counts, invert linearly,
clip to a physical state and fit the two-parameter Werner family.
"""

import numpy as np

from loopspam import (
    TomographyInput,
    characterize,
    fidelity,
    observable_from_setting,
    paper_plan,
    paper_settings,
    pooled_counts,
    reconstruct,
    rho_werner,
    run_trials,
)

truth = rho_werner(0.928, 0.628)
alice, bob = paper_settings()

for counts in (1_000, 14_000, 1_000_000):
    trials = run_trials(truth, paper_plan(counts, trials=10, seed=1))
    data = TomographyInput(
        alice_obs=tuple(observable_from_setting(s) for s in alice),
        bob_obs=tuple(observable_from_setting(s) for s in bob),
        counts=pooled_counts(trials),
    )
    rec = reconstruct(data)
    c = characterize(rec.physical, chsh_measured=float(np.mean(trials.chsh_values)))
    fit = c.fit.params
    print(f"N = {counts:>9,d}/pair: F(truth) = {fidelity(rec.physical, truth):.5f}, "
          f"clipped {rec.clip_magnitude:.4f}, fit (p_s, p_w) = ({fit.p_s:.3f}, {fit.p_w:.3f}), "
          f"N = {c.negativity:.3f} >= {c.negativity_bound:.3f}")
