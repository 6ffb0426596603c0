"""Two-qubit state reconstruction from the loop measurement records.

Linear inversion recovers local Bloch vectors and the correlation matrix by
least squares over the four settings per side; eigenvalue clipping then
projects onto the physical states. The Werner-family fit uses a coarse grid
followed by bounded least squares.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import DegenerateDesign
from .numerics import hermitian_eigensystem, kron
from .simulator import estimate_expectation
from .states import (
    IDENTITY2,
    PAULIS,
    TwoQubitState,
    WernerParams,
    fidelity,
    horodecki_report,
    negativity_lower_bound,
    purity,
    rho_werner,
)

GRID_POINTS = 101


@dataclass(frozen=True)
class TomographyInput:
    alice_obs: tuple
    bob_obs: tuple
    counts: tuple  # 4x4 nested CountRecords


@dataclass(frozen=True)
class ReconstructedState:
    raw: np.ndarray
    physical: TwoQubitState
    clip_magnitude: float


@dataclass(frozen=True)
class WernerFit:
    params: WernerParams
    fidelity: float
    frobenius_residual: float
    degenerate: bool = False

    def as_dict(self):
        return {"p_s": self.params.p_s, "p_w": self.params.p_w,
                "fidelity": self.fidelity,
                "frobenius_residual": self.frobenius_residual,
                "degenerate": self.degenerate}


@dataclass(frozen=True)
class Characterization:
    purity: float
    m_param: float
    s_max: float
    negativity: float
    chsh_capable: bool
    fit: WernerFit
    chsh_measured: float = None
    negativity_bound: float = None

    def as_dict(self):
        out = {
            "purity": self.purity,
            "m_param": self.m_param,
            "s_max": self.s_max,
            "negativity": self.negativity,
            "chsh_capable": self.chsh_capable,
            "werner_fit": self.fit.as_dict(),
        }
        if self.chsh_measured is not None:
            out["chsh_measured"] = self.chsh_measured
            out["negativity_bound"] = self.negativity_bound
        return out


def _bloch_stack(observables):
    stack = np.array([o.bloch for o in observables], dtype=float)
    if np.linalg.matrix_rank(stack, tol=1e-9) < 3:
        raise DegenerateDesign("measurement Bloch vectors do not span 3 dimensions")
    return stack


def estimate_correlations(data):
    """Least-squares local Bloch vectors ``r``, ``s`` and correlation matrix ``T``.

    Every record contributes one expectation value and one marginal for each
    side; the 4x3 Bloch stacks are inverted by pseudoinverse.
    """
    a = _bloch_stack(data.alice_obs)
    b = _bloch_stack(data.bob_obs)
    e = np.empty((4, 4))
    m_alice = np.empty((4, 4))
    m_bob = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            n = data.counts[i][j]
            e[i, j] = estimate_expectation(n)
            m_alice[i, j] = (n.n_pp + n.n_pm - n.n_mp - n.n_mm) / n.total
            m_bob[i, j] = (n.n_pp - n.n_pm + n.n_mp - n.n_mm) / n.total

    r = np.linalg.lstsq(np.repeat(a, 4, axis=0), m_alice.ravel(), rcond=None)[0]
    s = np.linalg.lstsq(np.tile(b, (4, 1)), m_bob.ravel(), rcond=None)[0]
    t = np.linalg.pinv(a) @ e @ np.linalg.pinv(b).T
    return r, s, t


def linear_inversion(data):
    """Density matrix assembled from :func:`estimate_correlations`; may be unphysical."""
    r, s, t = estimate_correlations(data)
    rho = np.eye(4, dtype=complex)
    for k in range(3):
        rho = rho + r[k] * kron(PAULIS[k], IDENTITY2) + s[k] * kron(IDENTITY2, PAULIS[k])
        for l in range(3):
            rho = rho + t[k, l] * kron(PAULIS[k], PAULIS[l])
    return rho / 4


def project_physical(raw):
    """Clip negative eigenvalues and renormalize.

    Returns
    -------
    ReconstructedState
        ``clip_magnitude`` is the total negative eigenvalue mass removed.
    """
    raw = np.asarray(raw, dtype=complex)
    if np.max(np.abs(raw - raw.conj().T)) > 1e-6:
        raise ValueError("reconstruction is not Hermitian within 1e-6")
    herm = 0.5 * (raw + raw.conj().T)
    w, v = hermitian_eigensystem(herm)
    clipped = float(np.sum(-w[w < 0]))
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    rho = (v * w) @ v.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return ReconstructedState(raw, TwoQubitState(rho), clipped)


def reconstruct(data):
    return project_physical(linear_inversion(data))


# rho_werner(p_s, p_w) = x * P + y * Q + I/4 with x = p_w * p_s, y = p_w
_PHI = np.array([1, 0, 0, 1]) / np.sqrt(2)
_P_TERM = np.outer(_PHI, _PHI) - np.diag([0.5, 0, 0, 0.5])
_Q_TERM = np.diag([0.5, 0, 0, 0.5]) - np.eye(4) / 4


def _werner_matrix(p_s, p_w):
    return p_w * p_s * _P_TERM + p_w * _Q_TERM + np.eye(4) / 4


def _residual_grid(rho, ps, pw):
    ps_g, pw_g = np.meshgrid(ps, pw, indexing="ij")
    model = (ps_g * pw_g)[..., None, None] * _P_TERM + pw_g[..., None, None] * _Q_TERM \
        + np.eye(4) / 4
    return np.sqrt(np.sum(np.abs(model - rho) ** 2, axis=(-2, -1)))


def fit_werner(state, grid_points=GRID_POINTS):
    """Closest Werner-family state in Frobenius norm.

    A grid over [0, 1]^2 picks the start point (ties go to the smallest
    p_s, then the smallest p_w) and bounded least squares refines it. With
    p_w at zero p_s has no effect; the fit is then flagged ``degenerate``.
    """
    rho = np.asarray(state.rho)
    axis = np.linspace(0.0, 1.0, grid_points)
    res = _residual_grid(rho, axis, axis)
    k = int(np.argmin(res))
    i, j = divmod(k, grid_points)
    start = np.array([axis[i], axis[j]])

    def residuals(p):
        diff = _werner_matrix(p[0], p[1]) - rho
        return np.concatenate([diff.real.ravel(), diff.imag.ravel()])

    best = start
    best_cost = res[i, j]
    if best_cost > 0:
        sol = least_squares(residuals, start, bounds=([0, 0], [1, 1]), method="dogbox",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        # the solver stops just short of an active bound; try snapping onto it
        snapped = np.where(sol.x < 1e-6, 0.0, np.where(sol.x > 1 - 1e-6, 1.0, sol.x))
        for cand in (sol.x, snapped):
            cost = float(np.linalg.norm(residuals(cand)))
            if cost <= best_cost:
                best, best_cost = cand, cost
    p_s, p_w = (float(np.clip(x, 0.0, 1.0)) for x in best)
    degenerate = p_w < 1e-6
    params = WernerParams(p_s, p_w)
    return WernerFit(
        params=params,
        fidelity=fidelity(rho_werner(params), state),
        frobenius_residual=float(best_cost),
        degenerate=degenerate,
    )


def characterize(state, chsh_measured=None):
    """Purity, Horodecki figures, negativity and the Werner fit of ``state``."""
    rep = horodecki_report(state)
    bound = None if chsh_measured is None else float(negativity_lower_bound(chsh_measured))
    return Characterization(
        purity=purity(state),
        m_param=rep.m_param,
        s_max=rep.s_max,
        negativity=rep.negativity,
        chsh_capable=rep.chsh_capable,
        fit=fit_werner(state),
        chsh_measured=chsh_measured,
        negativity_bound=bound,
    )
