"""Loop consistency check on an over-complete expectation-value grid.

The 4x4 grid of joint expectations is embedded into a 6x6 matrix whose
rows and columns reuse the middle settings, so every 3x3 corner is built
from three settings per side. For data that factorize as
``E_ij = a_i . T . b_j`` the product ``A^-1 B D^-1 C`` of the corners is the
identity; settings that depend on the other party's choice break this.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientTrials, SingularCorner
from .numerics import invert3

log = logging.getLogger(__name__)

DEFAULT_INDEX_MAP = (0, 1, 2, 1, 2, 3)
DEFAULT_THRESHOLD = 5.0
ROUNDOFF_FLOOR = 1e-12


@dataclass(frozen=True)
class LoopMatrix:
    e6: np.ndarray
    row_index_map: tuple
    col_index_map: tuple


@dataclass(frozen=True)
class CornerSet:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray


@dataclass(frozen=True)
class DeltaStats:
    """Elementwise statistics of ``Delta - I`` across trials.

    ``std`` is the sample standard deviation of the trial population
    (n - 1 denominator), not the standard error of the mean.
    """

    mean: np.ndarray
    std: np.ndarray
    ratio: np.ndarray
    trials_used: int
    trials_excluded: int = 0

    def as_dict(self):
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "ratio": self.ratio.tolist(),
            "trials_used": self.trials_used,
            "trials_excluded": self.trials_excluded,
        }


@dataclass(frozen=True)
class Verdict:
    detected: bool
    max_ratio: float
    threshold: float

    def as_dict(self):
        return {"detected": self.detected, "max_ratio": self.max_ratio,
                "threshold": self.threshold}


def embed_loop(grid, row_index_map=DEFAULT_INDEX_MAP, col_index_map=None):
    grid = np.asarray(grid, dtype=float)
    if col_index_map is None:
        col_index_map = row_index_map
    e6 = grid[np.ix_(row_index_map, col_index_map)]
    return LoopMatrix(e6, tuple(row_index_map), tuple(col_index_map))


def corners(loop):
    e = loop.e6 if isinstance(loop, LoopMatrix) else np.asarray(loop, dtype=float)
    return CornerSet(a=e[:3, :3], b=e[:3, 3:], c=e[3:, :3], d=e[3:, 3:])


def partial_determinant(cs):
    """``A^-1 B D^-1 C`` for the four 3x3 corners."""
    try:
        a_inv = invert3(cs.a)
    except SingularCorner as exc:
        raise SingularCorner(f"corner a: {exc}", corner="a") from None
    try:
        d_inv = invert3(cs.d)
    except SingularCorner as exc:
        raise SingularCorner(f"corner d: {exc}", corner="d") from None
    return a_inv @ cs.b @ d_inv @ cs.c


def delta_from_grid(grid, index_map=DEFAULT_INDEX_MAP):
    return partial_determinant(corners(embed_loop(grid, index_map)))


def trial_deltas(grids, index_map=DEFAULT_INDEX_MAP):
    """Partial determinants for each grid; singular trials are skipped.

    Returns the list of deltas and the number of skipped trials.
    """
    deltas = []
    skipped = 0
    for k, grid in enumerate(grids):
        try:
            deltas.append(delta_from_grid(grid, index_map))
        except SingularCorner as exc:
            log.warning("trial %d dropped: %s", k, exc)
            skipped += 1
    return deltas, skipped


def delta_statistics(deltas, excluded=0):
    """Mean, sample std and |mean|/std of ``Delta - I`` over trials.

    Where std is zero the ratio is 0 if the mean is zero too, else +inf.
    """
    if len(deltas) < 2:
        raise InsufficientTrials(
            f"need at least 2 usable trials, got {len(deltas)} ({excluded} excluded)")
    dev = np.array(deltas, dtype=float) - np.eye(3)
    mean = dev.mean(axis=0)
    std = dev.std(axis=0, ddof=1)
    # entries fixed by the embedding are zero up to roundoff; keep their ratio at 0
    mean = np.where(np.abs(mean) > ROUNDOFF_FLOOR, mean, 0.0)
    std = np.where(std > ROUNDOFF_FLOOR, std, 0.0)
    absmean = np.abs(mean)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(std > 0, absmean / np.where(std > 0, std, 1.0),
                         np.where(absmean > 0, np.inf, 0.0))
    return DeltaStats(mean, std, ratio, len(deltas), excluded)


def verdict(stats, threshold=DEFAULT_THRESHOLD):
    """Flag false correlations when any ratio strictly exceeds ``threshold``."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    max_ratio = float(np.max(stats.ratio))
    return Verdict(bool(max_ratio > threshold), max_ratio, float(threshold))
