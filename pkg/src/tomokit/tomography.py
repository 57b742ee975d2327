"""Optical tomograms of pure one- and two-mode states on explicit grids.

The single-mode tomogram is

    w(X, theta) = | sum_n c_n exp(-i n theta) h_n(X) |^2

with ``h_n`` the normalized Hermite functions, which absorb the Gaussian
and factorial factors of the raw Hermite-polynomial form. The two-mode
section is the analogous double sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fock import FockState1, FockState2, hermite_functions

ROW_FLAG_TOL = 1e-6


class NormalizationDriftError(RuntimeError):
    """A distribution no longer integrates to one within tolerance."""


@dataclass(frozen=True)
class XGrid:
    """Symmetric quadrature grid ``[-x_max, x_max]`` with an odd number of points."""

    x_max: float
    count: int

    def __post_init__(self):
        if self.count < 3 or self.count % 2 == 0:
            raise ValueError(f"x grid needs an odd count >= 3, got {self.count}")
        if self.x_max <= 0:
            raise ValueError("x_max must be positive")

    @property
    def x_min(self) -> float:
        return -self.x_max

    @property
    def values(self) -> np.ndarray:
        return np.linspace(-self.x_max, self.x_max, self.count)

    @property
    def spacing(self) -> float:
        return 2.0 * self.x_max / (self.count - 1)

    @classmethod
    def for_amplitude(cls, alpha_abs: float, count: int = 1001) -> "XGrid":
        return cls(math.sqrt(2.0) * (alpha_abs + 3.0) + 6.0, count)


@dataclass(frozen=True)
class ThetaGrid:
    """Uniform, strictly increasing angle grid."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("theta grid cannot be empty")
        if v.size > 1:
            d = np.diff(v)
            if np.any(d <= 0) or np.ptp(d) > 1e-12 * max(1.0, abs(d[0])):
                raise ValueError("theta grid must be strictly increasing and uniform")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, count: int = 181, stop: float = 2 * math.pi) -> "ThetaGrid":
        return cls(stop * np.arange(count) / count)

    @property
    def count(self) -> int:
        return self.values.size

    @property
    def spacing(self) -> float:
        return float(self.values[1] - self.values[0]) if self.count > 1 else 0.0


def simpson_weights(count: int, spacing: float) -> np.ndarray:
    if count < 3 or count % 2 == 0:
        raise ValueError(f"Simpson rule needs an odd count >= 3, got {count}")
    w = np.ones(count)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * spacing / 3.0


def integrate_1d(values, grid: XGrid | float, weight=None) -> float:
    """Composite Simpson integral of ``values`` (times ``weight``) on ``grid``.

    ``grid`` may be an :class:`XGrid` or a bare spacing.
    """
    values = np.asarray(values)
    spacing = grid.spacing if isinstance(grid, XGrid) else float(grid)
    if weight is not None:
        values = values * (weight(grid.values) if callable(weight) else np.asarray(weight))
    return values @ simpson_weights(values.shape[-1], spacing)


def integrate_2d(values: np.ndarray, g1: XGrid, g2: XGrid):
    w1 = simpson_weights(g1.count, g1.spacing)
    w2 = simpson_weights(g2.count, g2.spacing)
    return w1 @ values @ w2


@dataclass(frozen=True)
class Tomogram1:
    """``values[i, j] = w(X_j, theta_i)``."""

    theta_grid: ThetaGrid
    x_grid: XGrid
    values: np.ndarray
    label: str = ""
    row_norms: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.row_norms is None:
            object.__setattr__(self, "row_norms", integrate_1d(self.values, self.x_grid))

    @property
    def flagged_rows(self) -> np.ndarray:
        return np.flatnonzero(np.abs(self.row_norms - 1.0) > ROW_FLAG_TOL)

    def check(self, tol: float = ROW_FLAG_TOL) -> None:
        bad = np.flatnonzero(np.abs(self.row_norms - 1.0) > tol)
        if bad.size:
            i = int(bad[np.argmax(np.abs(self.row_norms[bad] - 1.0))])
            raise NormalizationDriftError(
                f"tomogram {self.label!r}: row theta={self.theta_grid.values[i]:.6g} "
                f"integrates to {self.row_norms[i]:.12g}"
            )

    def row(self, theta: float, atol: float = 1e-12) -> np.ndarray:
        """Row at angle ``theta`` (must be on the grid)."""
        idx = np.flatnonzero(np.abs(self.theta_grid.values - theta) <= atol)
        if idx.size == 0:
            raise KeyError(f"theta={theta!r} is not on the tomogram grid")
        return self.values[idx[0]]


@dataclass(frozen=True)
class Tomogram2Section:
    """``values[i, j] = w(X1_i, theta1; X2_j, theta2)``."""

    theta1: float
    theta2: float
    x1_grid: XGrid
    x2_grid: XGrid
    values: np.ndarray
    label: str = ""

    @property
    def norm(self) -> float:
        return float(integrate_2d(self.values, self.x1_grid, self.x2_grid))

    def check(self, tol: float = ROW_FLAG_TOL) -> None:
        if abs(self.norm - 1.0) > tol:
            raise NormalizationDriftError(
                f"section {self.label!r} at ({self.theta1:.6g}, {self.theta2:.6g}) "
                f"integrates to {self.norm:.12g}"
            )


def _rotated(coeffs: np.ndarray, theta: float, axis: int = 0) -> np.ndarray:
    n = np.arange(coeffs.shape[axis])
    ph = np.exp(-1j * n * theta)
    shape = [1] * coeffs.ndim
    shape[axis] = -1
    return coeffs * ph.reshape(shape)


def single_amplitudes(state: FockState1, thetas, x_grid: XGrid) -> np.ndarray:
    """``<X, theta|psi>`` for every angle and grid point."""
    h = hermite_functions(x_grid.values, state.n_max)
    n = np.arange(state.n_max + 1)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    rot = np.exp(-1j * np.outer(thetas, n)) * state.coeffs[None, :]
    return rot @ h


def tomogram_single(state: FockState1, theta_grid: ThetaGrid, x_grid: XGrid) -> Tomogram1:
    amp = single_amplitudes(state, theta_grid.values, x_grid)
    return Tomogram1(theta_grid, x_grid, np.abs(amp) ** 2, label=state.label)


def section_amplitudes(state: FockState2, theta1: float, theta2: float,
                       x1_grid: XGrid, x2_grid: XGrid) -> np.ndarray:
    h1 = hermite_functions(x1_grid.values, state.n_max_a)
    h2 = hermite_functions(x2_grid.values, state.n_max_b)
    c = _rotated(_rotated(np.asarray(state.coeffs), theta1, 0), theta2, 1)
    return h1.T @ c @ h2


def tomogram_two_section(state: FockState2, theta1: float, theta2: float,
                         x1_grid: XGrid, x2_grid: Optional[XGrid] = None) -> Tomogram2Section:
    x2_grid = x1_grid if x2_grid is None else x2_grid
    amp = section_amplitudes(state, theta1, theta2, x1_grid, x2_grid)
    return Tomogram2Section(float(theta1), float(theta2), x1_grid, x2_grid,
                            np.abs(amp) ** 2, label=state.label)


def reduced_tomogram(state: FockState2, subsystem: str, theta: float,
                     x_grid: XGrid) -> np.ndarray:
    """Marginal tomogram of subsystem ``"A"`` or ``"B"`` at angle ``theta``.

    Integrating out the other quadrature exactly (orthonormality of the
    Hermite functions) leaves
    ``w_A(X) = sum_n | sum_m c_mn exp(-i m theta) h_m(X) |^2``.
    """
    c = np.asarray(state.coeffs)
    sub = subsystem.upper()
    if sub == "B":
        c = c.T
    elif sub != "A":
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    h = hermite_functions(x_grid.values, c.shape[0] - 1)
    amp = _rotated(c, theta, 0).T @ h
    return np.sum(np.abs(amp) ** 2, axis=0)


def coherent_tomogram_oracle(alpha: complex, thetas, x) -> np.ndarray:
    """Closed-form coherent-state tomogram, one row per angle."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    x = np.asarray(x, dtype=float)
    centers = math.sqrt(2.0) * np.real(alpha * np.exp(-1j * thetas))
    return np.exp(-((x[None, :] - centers[:, None]) ** 2)) / math.sqrt(math.pi)
