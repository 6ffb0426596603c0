"""Two-qubit polarization states and their entanglement figures.

Basis order is HH, HV, VH, VV and Pauli indices run (x, y, z) everywhere in
the package.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidProbability, InvalidState
from .numerics import eigvalsh, hermitian_eigensystem, kron, partial_transpose_b, psd_sqrt

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
IDENTITY2 = np.eye(2, dtype=complex)

NEGATIVITY_CLIP = 1e-12

PAULI_PAIRS = np.array([[kron(si, sj) for sj in PAULIS] for si in PAULIS])


@dataclass(frozen=True)
class TwoQubitState:
    """A validated 4x4 density matrix.

    Construction checks Hermiticity and unit trace to 1e-10 and requires the
    smallest eigenvalue to be at least -1e-9. The stored array is read-only.
    """

    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise InvalidState(f"density matrix must be 4x4, got {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise InvalidState("density matrix has non-finite entries")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise InvalidState("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-10:
            raise InvalidState(f"trace is {np.trace(rho).real:.12f}, expected 1")
        if eigvalsh(rho)[0] < -1e-9:
            raise InvalidState("density matrix has a negative eigenvalue")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_ket(cls, psi):
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class WernerParams:
    """Source purity ``p_s`` and background weight ``p_w``, both in [0, 1]."""

    p_s: float
    p_w: float

    def __post_init__(self):
        _check_probability("p_s", self.p_s)
        _check_probability("p_w", self.p_w)


@dataclass(frozen=True)
class EntanglementReport:
    purity: float
    m_param: float
    s_max: float
    negativity: float
    chsh_capable: bool

    def as_dict(self):
        return {
            "purity": self.purity,
            "m_param": self.m_param,
            "s_max": self.s_max,
            "negativity": self.negativity,
            "chsh_capable": self.chsh_capable,
        }


def _check_probability(name, p):
    if not (np.isfinite(p) and 0.0 <= p <= 1.0):
        raise InvalidProbability(f"{name} must lie in [0, 1], got {p!r}")


PHI_PLUS_KET = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
_PHI_PLUS_PROJ = np.outer(PHI_PLUS_KET, PHI_PLUS_KET.conj())
_HH_VV_MIX = np.diag([0.5, 0, 0, 0.5]).astype(complex)


def phi_plus():
    """The Bell state (|HH> + |VV>)/sqrt(2)."""
    return TwoQubitState(_PHI_PLUS_PROJ)


def maximally_mixed():
    return TwoQubitState(np.eye(4, dtype=complex) / 4)


def rho_source(p_s):
    """Bell state with probability ``p_s``, otherwise an even HH/VV mixture."""
    _check_probability("p_s", p_s)
    return TwoQubitState(p_s * _PHI_PLUS_PROJ + (1.0 - p_s) * _HH_VV_MIX)


def rho_werner(params, p_w=None):
    """Source state mixed with white noise: ``p_w * rho_s + (1 - p_w) I/4``.

    Accepts either a :class:`WernerParams` or the two floats ``(p_s, p_w)``.
    """
    if p_w is not None:
        params = WernerParams(params, p_w)
    rho_s = params.p_s * _PHI_PLUS_PROJ + (1.0 - params.p_s) * _HH_VV_MIX
    return TwoQubitState(params.p_w * rho_s + (1.0 - params.p_w) / 4 * np.eye(4))


def purity(s):
    rho = s.rho
    return float(np.real(np.trace(rho @ rho)))


def correlation_matrix(s):
    """3x3 real matrix ``T[i, j] = Tr[rho (sigma_i x sigma_j)]``, order (x, y, z)."""
    t = np.real(np.einsum("ab,ijba->ij", s.rho, PAULI_PAIRS))
    return t


def local_bloch_vectors(s):
    """Reduced Bloch vectors of the first and second qubit."""
    r = np.real([np.trace(s.rho @ kron(p, IDENTITY2)) for p in PAULIS])
    q = np.real([np.trace(s.rho @ kron(IDENTITY2, p)) for p in PAULIS])
    return r, q


def horodecki_m(s):
    """Sum of the two largest eigenvalues of T^T T."""
    t = correlation_matrix(s)
    u = eigvalsh(t.T @ t)
    return float(u[1] + u[2])


def negativity(s):
    """Twice the magnitude of the negative partial-transpose spectrum."""
    lam = eigvalsh(partial_transpose_b(s.rho))
    # roundoff negatives of separable states count as zero
    lam = np.where(lam < -NEGATIVITY_CLIP, lam, 0.0)
    return float(2.0 * np.sum(-lam))


def horodecki_report(s):
    m = max(horodecki_m(s), 0.0)
    return EntanglementReport(
        purity=purity(s),
        m_param=m,
        s_max=float(2.0 * np.sqrt(m)),
        negativity=negativity(s),
        chsh_capable=bool(m > 1.0),
    )


def m_from_params(params):
    return params.p_w**2 + params.p_s**2 * params.p_w**2


def fidelity(a, b):
    """Uhlmann fidelity ``(Tr sqrt(sqrt(a) b sqrt(a)))**2``."""
    root_a = psd_sqrt(a.rho)
    inner = root_a @ b.rho @ root_a
    inner = 0.5 * (inner + inner.conj().T)
    w = hermitian_eigensystem(inner).values
    # roundoff-level eigenvalues would otherwise add ~sqrt(eps) each
    w = np.where(w > 1e-14, w, 0.0)
    return float(np.sum(np.sqrt(w)) ** 2)


def negativity_lower_bound(s_value):
    """Smallest negativity compatible with a measured CHSH value ``S``.

    May be negative; clamp at zero for display.
    """
    if s_value < 0:
        raise ValueError("CHSH value must be non-negative")
    return float(s_value / np.sqrt(2.0) - 1.0)


def _unit(v):
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def _random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def chsh_value(t, a, a2, b, b2):
    """CHSH combination ``a.T(b + b') + a'.T(b - b')`` for Bloch vectors."""
    return float(a @ t @ (b + b2) + a2 @ t @ (b - b2))


def maximize_chsh(s, restarts=5, tol=1e-10, max_sweeps=10000, seed=0):
    """Maximize the CHSH value over all four measurement directions.

    Alternates exact partial maximizers: for fixed Bob directions the best
    Alice pair is ``a ~ T(b + b')``, ``a' ~ T(b - b')``, then symmetrically
    for Bob with ``T^T``. The best of several random starts is returned.

    Returns
    -------
    s_opt : float
    settings : tuple of four unit 3-vectors ``(a, a', b, b')``
    """
    t = correlation_matrix(s) if isinstance(s, TwoQubitState) else np.asarray(s, float)
    if np.max(np.abs(t)) == 0.0:
        e = np.array([0.0, 0.0, 1.0])
        return 0.0, (e, e, e, e)
    rng = np.random.default_rng(seed)
    best = (-np.inf, None)
    for _ in range(restarts):
        b, b2 = _random_unit(rng), _random_unit(rng)
        a, a2 = _unit(t @ (b + b2)), _unit(t @ (b - b2))
        value = chsh_value(t, a, a2, b, b2)
        for _ in range(max_sweeps):
            a, a2 = _unit(t @ (b + b2)), _unit(t @ (b - b2))
            b, b2 = _unit(t.T @ (a + a2)), _unit(t.T @ (a - a2))
            new = chsh_value(t, a, a2, b, b2)
            if new - value < tol:
                value = max(value, new)
                break
            value = new
        if value > best[0]:
            best = (value, (a, a2, b, b2))
    return best
