"""Tomographic entropies and entanglement indicators (natural logarithms)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import FockState2
from .tomography import (
    Tomogram2Section,
    XGrid,
    integrate_1d,
    integrate_2d,
    reduced_tomogram,
    tomogram_two_section,
)

COHERENT_ENTROPY = 0.5 * (1.0 + math.log(math.pi))
ENTROPIC_SQUEEZING_MARGIN = 1e-9
BOUND_TOL = 1e-6
W_FLOOR = 1e-300


def _neg_w_log_w(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    keep = w >= W_FLOOR
    out[keep] = -w[keep] * np.log(w[keep])
    return out


def info_entropy_1d(w, grid: XGrid) -> float:
    """``-int w ln w dX`` for a sampled distribution."""
    norm = integrate_1d(w, grid)
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"distribution integrates to {norm:.12g}, not 1")
    return float(integrate_1d(_neg_w_log_w(w), grid))


def entropic_squeezing_flag(S: float) -> bool:
    return S < COHERENT_ENTROPY - ENTROPIC_SQUEEZING_MARGIN


def joint_entropy(section: Tomogram2Section) -> float:
    return float(integrate_2d(_neg_w_log_w(section.values), section.x1_grid, section.x2_grid))


def mutual_info(state: FockState2, theta1: float, theta2: float, x_grid: XGrid,
                x2_grid: XGrid = None) -> float:
    """``S(theta1) + S(theta2) - S(theta1, theta2)``."""
    x2_grid = x_grid if x2_grid is None else x2_grid
    s1 = info_entropy_1d(reduced_tomogram(state, "A", theta1, x_grid), x_grid)
    s2 = info_entropy_1d(reduced_tomogram(state, "B", theta2, x2_grid), x2_grid)
    s12 = joint_entropy(tomogram_two_section(state, theta1, theta2, x_grid, x2_grid))
    return s1 + s2 - s12


def entanglement_angles(angle_count: int = 5) -> np.ndarray:
    """Left-closed uniform partition of ``[0, pi)``."""
    if angle_count < 2:
        raise ValueError("angle_count must be >= 2")
    return math.pi * np.arange(angle_count) / angle_count


def tomographic_entanglement(state: FockState2, angle_count: int = 5,
                             x_grid: XGrid = None) -> float:
    """Mutual information averaged over the ``angle_count**2`` angle pairs."""
    thetas = entanglement_angles(angle_count)
    if x_grid is None:
        x_grid = XGrid.for_amplitude(math.sqrt(state.mean_total_number()) + 1.0, 401)
    sa = [info_entropy_1d(reduced_tomogram(state, "A", t, x_grid), x_grid) for t in thetas]
    sb = [info_entropy_1d(reduced_tomogram(state, "B", t, x_grid), x_grid) for t in thetas]
    total = 0.0
    for i, t1 in enumerate(thetas):
        for j, t2 in enumerate(thetas):
            s12 = joint_entropy(tomogram_two_section(state, t1, t2, x_grid))
            total += sa[i] + sb[j] - s12
    return total / angle_count**2


def schmidt_coefficients(state: FockState2) -> np.ndarray:
    return np.linalg.svd(np.asarray(state.coeffs), compute_uv=False)


def svne_sle(state: FockState2) -> tuple:
    """Subsystem von Neumann entropy (nats) and linear entropy."""
    p = schmidt_coefficients(state) ** 2
    p = p[p > 0]
    svne = float(-np.sum(p * np.log(p)))
    sle = float(1.0 - np.sum(p**2))
    return max(svne, 0.0), max(sle, 0.0)


@dataclass(frozen=True)
class BoundCheck:
    upper_ok: bool
    upper_gap: float

    def __bool__(self):
        return self.upper_ok


def entropy_bound_check(S: float, variance: float, tol: float = BOUND_TOL) -> BoundCheck:
    """``S <= (1 + ln pi + ln(2 var)) / 2``; the gap is bound minus ``S``."""
    bound = 0.5 * (1.0 + math.log(math.pi) + math.log(2.0 * variance))
    return BoundCheck(S <= bound + tol, bound - S)


def pairwise_entropy_sum_ok(S_theta: float, S_theta_perp: float, tol: float = BOUND_TOL) -> bool:
    """``S(theta) + S(theta + pi/2) >= 1 + ln pi``."""
    return S_theta + S_theta_perp >= 1.0 + math.log(math.pi) - tol


@dataclass
class EntropyReport:
    angle_count: int
    x_grid: XGrid
    t_over_trev: list = field(default_factory=list)
    S0_A: list = field(default_factory=list)
    S0_B: list = field(default_factory=list)
    S_AB_avg: list = field(default_factory=list)
    SVNE: list = field(default_factory=list)
    SLE: list = field(default_factory=list)

    COLUMNS = ("t_over_Trev", "S0_A", "S0_B", "S_AB_avg", "SVNE", "SLE")

    def add_state(self, t_over_trev: float, state: FockState2, entanglement: bool = True) -> None:
        g = self.x_grid
        self.t_over_trev.append(float(t_over_trev))
        self.S0_A.append(info_entropy_1d(reduced_tomogram(state, "A", 0.0, g), g))
        self.S0_B.append(info_entropy_1d(reduced_tomogram(state, "B", 0.0, g), g))
        sab = tomographic_entanglement(state, self.angle_count, g) if entanglement else float("nan")
        self.S_AB_avg.append(sab)
        svne, sle = svne_sle(state)
        self.SVNE.append(svne)
        self.SLE.append(sle)

    def rows(self):
        return list(zip(self.t_over_trev, self.S0_A, self.S0_B, self.S_AB_avg, self.SVNE, self.SLE))
