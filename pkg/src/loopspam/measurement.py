"""Wave-plate settings, polarization observables and Born-rule statistics.

Light passes the quarter-wave plate, then the half-wave plate, then a
polarizing beam splitter whose transmitted (H) port is the +1 outcome.
Angles are in radians, measured from the horizontal.
"""

from dataclasses import dataclass, field

import numpy as np

from .numerics import kron
from .states import IDENTITY2, PAULIS, SIGMA_Z, correlation_matrix


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def qwp_jones(theta):
    """Quarter-wave plate with its fast axis at ``theta``; fast-axis eigenvalue 1."""
    return rotation(theta) @ np.diag([1.0, 1j]) @ rotation(-theta)


def hwp_jones(theta):
    """Half-wave plate: ``[[cos 2t, sin 2t], [sin 2t, -cos 2t]]``."""
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


@dataclass(frozen=True)
class WavePlateSetting:
    """Quarter-wave (``q``) and half-wave (``h``) plate angles in radians."""

    q: float
    h: float

    def __post_init__(self):
        if not (np.isfinite(self.q) and np.isfinite(self.h)):
            raise ValueError("wave plate angles must be finite")

    def canonical(self):
        """Both angles folded into (-pi/2, pi/2]."""
        return WavePlateSetting(_fold(self.q), _fold(self.h))


def _fold(angle):
    a = np.mod(angle, np.pi)
    return float(a - np.pi if a > np.pi / 2 else a)


@dataclass(frozen=True)
class PolarizationObservable:
    """Traceless two-outcome qubit observable ``op = bloch . sigma``."""

    op: np.ndarray = field(repr=False)
    bloch: np.ndarray

    @classmethod
    def from_bloch(cls, vector):
        v = np.asarray(vector, dtype=float)
        v = v / np.linalg.norm(v)
        op = sum(c * p for c, p in zip(v, PAULIS))
        return cls(op, v)

    @classmethod
    def from_operator(cls, op):
        op = np.asarray(op, dtype=complex)
        bloch = np.real([0.5 * np.trace(op @ p) for p in PAULIS])
        return cls(op, bloch)

    def projector(self, outcome):
        return 0.5 * (IDENTITY2 + outcome * self.op)


@dataclass(frozen=True)
class OutcomeProbabilities:
    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def as_array(self):
        return np.array([self.p_pp, self.p_pm, self.p_mp, self.p_mm])


def observable_from_setting(setting):
    """Observable measured behind the given plates: ``W^dag sigma_z W``."""
    w = hwp_jones(setting.h) @ qwp_jones(setting.q)
    return PolarizationObservable.from_operator(w.conj().T @ SIGMA_Z @ w)


def born_probabilities(state, a, b):
    """Joint outcome probabilities for observables ``a`` (Alice) and ``b`` (Bob)."""
    probs = []
    for alpha in (1, -1):
        for beta in (1, -1):
            proj = kron(a.projector(alpha), b.projector(beta))
            probs.append(np.real(np.trace(state.rho @ proj)))
    probs = np.array(probs)
    # tolerate roundoff just outside [0, 1]
    probs = np.where((probs < 0) & (probs > -1e-12), 0.0, probs)
    probs = np.where((probs > 1) & (probs < 1 + 1e-12), 1.0, probs)
    return OutcomeProbabilities(*map(float, probs))


def expectation(state, a, b):
    """``Tr[rho (A x B)]``."""
    return float(np.real(np.trace(state.rho @ kron(a.op, b.op))))


def expectation_from_bloch(state, a, b):
    """Same quantity as :func:`expectation` via ``a . T . b``."""
    return float(a.bloch @ correlation_matrix(state) @ b.bloch)
