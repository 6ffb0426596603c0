"""
When can the source violate CHSH?
=================================

Sweep the source purity p_s and the background weight p_w and tabulate the
Horodecki figure M = p_w^2 (1 + p_s^2). The state violates CHSH for some
settings iff M > 1; it is entangled iff its negativity is positive, which
happens much earlier. The gap between the two is where a cheater has room.
"""

import numpy as np

from loopspam import WernerParams, horodecki_report, m_from_params, rho_werner

ps_values = np.linspace(0, 1, 6)
pw_values = np.linspace(0.3, 1, 8)

print("p_w \\ p_s " + "".join(f"{p:>8.1f}" for p in ps_values))
for p_w in pw_values:
    cells = []
    for p_s in ps_values:
        params = WernerParams(float(p_s), float(p_w))
        m = m_from_params(params)
        n = horodecki_report(rho_werner(params)).negativity
        mark = "B" if m > 1 else ("e" if n > 0 else ".")
        cells.append(f"{m:>7.2f}{mark}")
    print(f"{p_w:>9.2f} " + "".join(cells))

print()
print("B: violates CHSH (M > 1)   e: entangled but local for CHSH   .: separable")

# the laboratory operating point sits in the 'e' region
params = WernerParams(0.928, 0.628)
rep = horodecki_report(rho_werner(params))
print(f"\n(0.928, 0.628): M = {rep.m_param:.3f}, negativity = {rep.negativity:.3f}")
