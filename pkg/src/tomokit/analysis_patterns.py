"""Counting proxies for strands, blobs and tomogram similarity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import ndimage

from .fock import fidelity
from .tomography import Tomogram1, Tomogram2Section, integrate_1d


@dataclass(frozen=True)
class PatternConfig:
    relative_threshold: float
    smoothing_width: float

    def __post_init__(self):
        if not 0.0 < self.relative_threshold < 1.0:
            raise ValueError("relative_threshold must lie in (0, 1)")
        if self.smoothing_width < 0:
            raise ValueError("smoothing_width must be >= 0")


STRAND_DEFAULTS = PatternConfig(0.05, 0.5)
BLOB_DEFAULTS = PatternConfig(0.5, 0.3)


@dataclass(frozen=True)
class PatternCount:
    count: int
    threshold: float
    sigma: float
    argmax_theta: object

    def as_dict(self, instant=None) -> dict:
        return {
            "instant": instant,
            "count": int(self.count),
            "threshold": self.threshold,
            "sigma": self.sigma,
            "argmax_theta": self.argmax_theta,
        }

    def __int__(self) -> int:
        return int(self.count)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.count == other
        return NotImplemented

    __hash__ = None


def _count_peaks(row: np.ndarray, tau: float) -> int:
    peak = row.max()
    if peak <= 0:
        return 0
    interior = row[1:-1]
    # plateaus count once: strictly above the left neighbour, not below the right
    is_max = (interior > row[:-2]) & (interior >= row[2:])
    return int(np.count_nonzero(is_max & (interior > tau * peak)))


def strand_count(tom: Tomogram1, cfg: PatternConfig = STRAND_DEFAULTS) -> PatternCount:
    """Largest number of separated ridges over the theta rows.

    Each row is Gaussian-smoothed (width in X units) and its local maxima
    above ``relative_threshold`` times the row maximum are counted.
    """
    sigma_px = cfg.smoothing_width / tom.x_grid.spacing
    rows = tom.values
    if sigma_px > 0:
        rows = ndimage.gaussian_filter1d(rows, sigma_px, axis=1, mode="constant", truncate=6.0)
    counts = [_count_peaks(r, cfg.relative_threshold) for r in rows]
    i = int(np.argmax(counts))
    return PatternCount(counts[i], cfg.relative_threshold, cfg.smoothing_width,
                        float(tom.theta_grid.values[i]))


def blob_count(section: Tomogram2Section, cfg: PatternConfig = BLOB_DEFAULTS) -> PatternCount:
    """4-connected components of the smoothed section above the threshold."""
    sx = cfg.smoothing_width / section.x1_grid.spacing
    sy = cfg.smoothing_width / section.x2_grid.spacing
    img = section.values
    if cfg.smoothing_width > 0:
        img = ndimage.gaussian_filter(img, (sx, sy), mode="constant", truncate=6.0)
    mask = img > cfg.relative_threshold * img.max()
    _, n = ndimage.label(mask)
    return PatternCount(int(n), cfg.relative_threshold, cfg.smoothing_width,
                        [section.theta1, section.theta2])


def tomogram_distance(t1: Tomogram1, t2: Tomogram1) -> float:
    """L1 distance averaged over a uniform angle grid covering ``[0, 2 pi)``."""
    if (t1.values.shape != t2.values.shape
            or not np.array_equal(t1.theta_grid.values, t2.theta_grid.values)
            or t1.x_grid != t2.x_grid):
        raise ValueError("tomograms must share identical grids")
    per_row = integrate_1d(np.abs(t1.values - t2.values), t1.x_grid)
    return float(np.sum(per_row) * t1.theta_grid.spacing / (2 * math.pi)) if t1.theta_grid.count > 1 \
        else float(per_row[0])


def revival_scan(initial, dynamics, instants: Iterable) -> list:
    """Fidelity with the initial state at each instant.

    ``initial`` is a :class:`FockState1` evolved with a
    ``SingleModeHamiltonian``, or a ``BecInitialSpec`` evolved with
    ``BecParams``.
    """
    from .dynamics_bec import BecInitialSpec, BecParams, evolve_bec
    from .dynamics_single import SingleModeHamiltonian, evolve_single

    out = []
    if isinstance(dynamics, SingleModeHamiltonian):
        for t in instants:
            out.append(fidelity(initial, evolve_single(initial, dynamics, t)))
    elif isinstance(dynamics, BecParams):
        if not isinstance(initial, BecInitialSpec):
            raise TypeError("BEC revival scans start from a BecInitialSpec")
        psi0 = evolve_bec(initial, dynamics, 0.0)
        for t in instants:
            out.append(fidelity(psi0, evolve_bec(initial, dynamics, float(t))))
    else:
        raise TypeError(f"unsupported dynamics {type(dynamics).__name__}")
    return out
