"""Squeezing quantifiers computed from tomograms, with state-based oracles.

Normally ordered moments are recovered from tomogram rows with the inversion

    <a+^k a^l> = C_kl sum_m exp(-i (k-l) th_m) int w(X, th_m) H_{k+l}(X) dX,
    th_m = m pi / (k+l+1),  C_kl = k! l! / ((k+l+1)! sqrt(2^(k+l)))

and its two-mode product analogue. Rows and sections are cached by the
exact angle fraction so a whole family of moments reuses them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import comb, gammaln

from .fock import FockState1, FockState2, hermite_polynomial
from .tomography import (
    Tomogram2Section,
    XGrid,
    integrate_1d,
    section_amplitudes,
    simpson_weights,
    single_amplitudes,
)

# cancellation beyond this many orders of magnitude makes an inverted moment suspect
ILL_CONDITIONING_RATIO = 1e10
F_TOL = 1e-12


class IllConditionedWarning(RuntimeWarning):
    """Positive and negative parts of a Hermite-weighted integral nearly cancel."""


def double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def coherent_central_moment(order: int, modes: int = 1) -> float:
    """Coherent-state reference for the ``order``-th central moment.

    ``modes=1`` is the quadrature ``X`` (variance 1/2), ``modes=2`` the
    two-mode ``eta`` (variance 1/4).
    """
    if order % 2:
        return 0.0
    q = order // 2
    return double_factorial(2 * q - 1) / (2 if modes == 1 else 4) ** q


# ---------------------------------------------------------------- distributions


def central_moment_from_slice(w, grid: Union[XGrid, float], order: int,
                              x=None) -> float:
    """``<(X - <X>)^order>`` of a sampled distribution by Simpson integration.

    ``grid`` is an :class:`XGrid` or a bare spacing, in which case the sample
    points ``x`` must be given.
    """
    w = np.asarray(w, dtype=float)
    if x is None:
        if not isinstance(grid, XGrid):
            raise ValueError("sample points are needed when only a spacing is given")
        x = grid.values
    norm = integrate_1d(w, grid)
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"distribution integrates to {norm:.12g}, not 1")
    mean = integrate_1d(w * x, grid) / norm
    return float(integrate_1d(w * (x - mean) ** order, grid) / norm)


@dataclass(frozen=True)
class EtaDistribution:
    """Distribution of ``eta = (X1 + X2) / 2`` on a grid of spacing ``h / 2``."""

    values: np.ndarray
    x: np.ndarray
    spacing: float

    def central_moment(self, order: int) -> float:
        return central_moment_from_slice(self.values, self.spacing, order, x=self.x)

    @property
    def norm(self) -> float:
        return float(integrate_1d(self.values, self.spacing))


def eta_distribution(section: Tomogram2Section) -> EtaDistribution:
    """Push the ``theta1 = theta2 = 0`` section forward onto ``eta``.

    On a common grid ``X1_i + X2_j`` only depends on ``i + j``, so summing the
    anti-diagonals gives the line integrals of the section across lines of
    constant ``eta`` exactly sampled on the grid ``(x_i + x_j) / 2``.
    """
    if section.theta1 != 0.0 or section.theta2 != 0.0:
        raise ValueError("eta moments need the theta1 = theta2 = 0 section")
    if section.x1_grid != section.x2_grid:
        raise ValueError("eta pushforward needs identical grids on both modes")
    g = section.x1_grid
    h = g.spacing
    w = section.values
    n = g.count
    flipped = w[:, ::-1]
    # anti-diagonal k = i + j ends up on the diagonal offset n - 1 - k of the flip
    sums = np.array([np.trace(flipped, offset=n - 1 - k) for k in range(2 * n - 1)])
    # p(eta) = 2 int w(X1, 2 eta - X1) dX1, the X1 integral taken as a Riemann
    # sum of the anti-diagonal samples
    p = 2.0 * h * sums
    eta = 0.5 * (2 * g.x_min + h * np.arange(2 * n - 1))
    return EtaDistribution(p, eta, h / 2)


# ---------------------------------------------------------------- state oracles


def _lower(c: np.ndarray, p: int, axis: int = 0) -> np.ndarray:
    """Apply ``a^p`` along ``axis`` (shrinks that axis by ``p``, floored at 1)."""
    c = np.moveaxis(np.asarray(c, dtype=complex), axis, 0)
    n = c.shape[0]
    if p == 0:
        out = c
    elif p >= n:
        out = np.zeros((1,) + c.shape[1:], dtype=complex)
    else:
        idx = np.arange(p, n)
        f = np.exp(0.5 * (gammaln(idx + 1) - gammaln(idx - p + 1)))
        out = c[p:] * f.reshape((-1,) + (1,) * (c.ndim - 1))
    return np.moveaxis(out, 0, axis)


def _pad_to(a: np.ndarray, shape) -> np.ndarray:
    out = np.zeros(shape, dtype=complex)
    out[tuple(slice(0, s) for s in a.shape)] = a
    return out


def _braket(u: np.ndarray, v: np.ndarray) -> complex:
    shape = tuple(max(x, y) for x, y in zip(u.shape, v.shape))
    return complex(np.vdot(_pad_to(u, shape), _pad_to(v, shape)))


def moment_direct(state, key: Sequence[int]) -> complex:
    """``<a+^k a^l>`` or ``<a+^k a^l b+^m b^n>`` from the Fock amplitudes."""
    key = tuple(int(x) for x in key)
    if any(x < 0 for x in key):
        raise ValueError("moment orders must be >= 0")
    if isinstance(state, FockState1):
        if len(key) != 2:
            raise ValueError("single-mode moment keys are (k, l)")
        k, l = key
        c = state.coeffs
        return _braket(_lower(c, k), _lower(c, l))
    if isinstance(state, FockState2):
        if len(key) != 4:
            raise ValueError("two-mode moment keys are (k, l, m, n)")
        k, l, m, n = key
        c = state.coeffs
        return _braket(_lower(_lower(c, k, 0), m, 1), _lower(_lower(c, l, 0), n, 1))
    raise TypeError(f"unsupported state type {type(state).__name__}")


def _quadrature_matrix(dim: int, theta: float = 0.0) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    return (a * np.exp(-1j * theta) + a.T * np.exp(1j * theta)) / math.sqrt(2.0)


def quadrature_central_moment_direct(state: FockState1, order: int,
                                     theta: float = 0.0) -> float:
    """``<(X_theta - <X_theta>)^order>`` from the state.

    The state is padded by ``order`` levels so the truncated quadrature acts
    exactly on it.
    """
    dim = state.n_max + 1 + order
    X = _quadrature_matrix(dim, theta)
    v = state.padded(dim - 1)
    mean = float(np.vdot(v, X @ v).real)
    Y = X - mean * np.eye(dim)
    half, rem = divmod(order, 2)
    u = v
    for _ in range(half):
        u = Y @ u
    if rem:
        return float(np.vdot(u, Y @ u).real)
    return float(np.vdot(u, u).real)


def eta_central_moment_direct(state: FockState2, order: int) -> float:
    """``<(eta - <eta>)^order>`` with ``eta = (X1 + X2) / 2`` from the state."""
    da = state.n_max_a + 1 + order
    db = state.n_max_b + 1 + order
    Xa = _quadrature_matrix(da)
    Xb = _quadrature_matrix(db)
    v = state.padded(da - 1, db - 1)

    def eta(c):
        return 0.5 * (Xa @ c + c @ Xb.T)

    mean = float(np.vdot(v, eta(v)).real)
    half, rem = divmod(order, 2)
    u = v
    for _ in range(half):
        u = eta(u) - mean * u
    if rem:
        return float(np.vdot(u, eta(u) - mean * u).real)
    return float(np.vdot(u, u).real)


# ---------------------------------------------------------------- tomographic inversion


def wunsche_coefficient(k: int, l: int) -> float:
    return math.exp(gammaln(k + 1) + gammaln(l + 1) - gammaln(k + l + 2)) / 2 ** ((k + l) / 2)


def _angle(frac: Fraction) -> float:
    return math.pi * frac.numerator / frac.denominator


def _check_cancellation(total: complex, absolute: float, what: str) -> None:
    if absolute > ILL_CONDITIONING_RATIO * max(abs(total), 1.0):
        warnings.warn(
            f"{what}: Hermite-weighted integrals cancel by more than "
            f"{math.log10(ILL_CONDITIONING_RATIO):.0f} digits",
            IllConditionedWarning,
            stacklevel=3,
        )


class TomogramMoments:
    """Single-mode moment provider backed by tomogram rows of ``state``.

    Rows ``w(X, m pi / (k+l+1))`` are generated on demand and cached by the
    exact angle fraction.
    """

    def __init__(self, state: FockState1, x_grid: XGrid = None, row_source: Callable = None):
        self.state = state
        if x_grid is None:
            x_grid = XGrid.for_amplitude(math.sqrt(max(state.mean_number(), 0.0)) + 1.0)
        self.x_grid = x_grid
        self._row_source = row_source
        self._rows = {}
        self._weights = simpson_weights(x_grid.count, x_grid.spacing)
        self._hermite = {}

    def row(self, frac: Fraction) -> np.ndarray:
        frac = Fraction(frac) % 2
        if frac not in self._rows:
            if self._row_source is not None:
                self._rows[frac] = np.asarray(self._row_source(_angle(frac)), dtype=float)
            else:
                amp = single_amplitudes(self.state, [_angle(frac)], self.x_grid)[0]
                self._rows[frac] = np.abs(amp) ** 2
        return self._rows[frac]

    def _weighted_hermite(self, n: int) -> np.ndarray:
        if n not in self._hermite:
            self._hermite[n] = hermite_polynomial(n, self.x_grid.values) * self._weights
        return self._hermite[n]

    def moment(self, k: int, l: int) -> complex:
        K = k + l
        if K == 0:
            return complex(self._weights @ self.row(Fraction(0)))
        hw = self._weighted_hermite(K)
        total = 0j
        absolute = 0.0
        for m in range(K + 1):
            frac = Fraction(m, K + 1)
            w = self.row(frac)
            terms = w * hw
            integral = math.fsum(terms)
            absolute += math.fsum(np.abs(terms))
            total += np.exp(-1j * (k - l) * _angle(frac)) * integral
        _check_cancellation(total, absolute, f"moment ({k}, {l})")
        return complex(wunsche_coefficient(k, l) * total)

    __call__ = moment


def wunsche_moment_single(state: FockState1, k: int, l: int, x_grid: XGrid = None) -> complex:
    """``<a+^k a^l>`` recovered from ``k+l+1`` tomogram rows."""
    if k < 0 or l < 0:
        raise ValueError("moment orders must be >= 0")
    return TomogramMoments(state, x_grid).moment(k, l)


class SectionMoments:
    """Two-mode moment provider backed by tomogram sections of ``state``."""

    def __init__(self, state: FockState2, x_grid: XGrid = None):
        self.state = state
        if x_grid is None:
            x_grid = XGrid.for_amplitude(math.sqrt(max(state.mean_total_number(), 0.0)) + 1.0)
        self.x_grid = x_grid
        self._sections = {}
        self._weights = simpson_weights(x_grid.count, x_grid.spacing)
        self._hermite = {}
        self.sections_used = set()

    def section(self, f1: Fraction, f2: Fraction) -> np.ndarray:
        key = (Fraction(f1) % 2, Fraction(f2) % 2)
        if key not in self._sections:
            g = self.x_grid
            amp = section_amplitudes(self.state, _angle(key[0]), _angle(key[1]), g, g)
            self._sections[key] = np.abs(amp) ** 2
        return self._sections[key]

    def _weighted_hermite(self, n: int) -> np.ndarray:
        if n not in self._hermite:
            self._hermite[n] = hermite_polynomial(n, self.x_grid.values) * self._weights
        return self._hermite[n]

    def moment(self, k: int, l: int, m: int, n: int) -> complex:
        K1, K2 = k + l, m + n
        u = self._weighted_hermite(K1)
        v = self._weighted_hermite(K2)
        au, av = np.abs(u), np.abs(v)
        total = 0j
        absolute = 0.0
        for p in range(K1 + 1):
            f1 = Fraction(p, K1 + 1)
            for q in range(K2 + 1):
                f2 = Fraction(q, K2 + 1)
                w = self.section(f1, f2)
                self.sections_used.add((f1, f2))
                integral = float(u @ w @ v)
                absolute += float(au @ w @ av)
                total += np.exp(-1j * ((k - l) * _angle(f1) + (m - n) * _angle(f2))) * integral
        if K1 + K2 > 0:
            _check_cancellation(total, absolute, f"moment ({k}, {l}, {m}, {n})")
        c = wunsche_coefficient(k, l) * wunsche_coefficient(m, n)
        return complex(c * total)

    __call__ = moment


def wunsche_moment_two(state: FockState2, k: int, l: int, m: int, n: int,
                       x_grid: XGrid = None) -> complex:
    """``<a+^k a^l b+^m b^n>`` from ``(k+l+1)(m+n+1)`` tomogram sections."""
    if min(k, l, m, n) < 0:
        raise ValueError("moment orders must be >= 0")
    return SectionMoments(state, x_grid).moment(k, l, m, n)


class StateMoments:
    """Moment provider evaluating ladder-operator expectations on the state."""

    def __init__(self, state):
        self.state = state

    def __call__(self, *key) -> complex:
        return moment_direct(self.state, key)


# ---------------------------------------------------------------- Hillery squeezing


@lru_cache(maxsize=None)
def commutator_coefficients(q: int) -> tuple:
    """Coefficients ``f_j`` with ``F_q(n) = sum_j f_j n!/(n-j)!``.

    ``F_q(n) = (n+q)!/n! - n!/(n-q)!``; the coefficients solve the exact
    lower-triangular system on ``n = 0 .. q``.
    """
    if q < 1:
        raise ValueError("q must be >= 1")

    def falling(n, j):
        return math.prod(range(n - j + 1, n + 1)) if j <= n else 0

    def F(n):
        return falling(n + q, q) - falling(n, q)

    f = []
    for n in range(q + 1):
        rest = sum(Fraction(f[j]) * falling(n, j) for j in range(n))
        f.append((Fraction(F(n)) - rest) / falling(n, n))
    return tuple(f)


def mean_commutator(moments: Callable, q: int) -> float:
    """``<F_q(N)>`` from normally ordered moments ``<a+^j a^j>``."""
    total = 0.0
    for j, f in enumerate(commutator_coefficients(q)):
        if f:
            total += float(f) * (moments(j, j).real if j else 1.0)
    return total


def hillery_Dq(source, q: int, quadrature: str = "Z1", *, as_printed: bool = False,
               x_grid: XGrid = None) -> float:
    """Hillery ``q``-th power squeezing quantifier ``D_q``.

    ``source`` is a state (moments taken directly from it) or a moment
    provider ``moments(k, l)``, e.g. :class:`TomogramMoments` or the result of
    :func:`two_mode_hillery_mode`. ``D_q`` is measured against the bound
    ``<(Delta Z)^2> >= |<F_q(N)>| / 2`` so coherent states sit at 0.
    ``as_printed=True`` drops the factor 1/2.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    quadrature = quadrature.upper()
    if quadrature not in ("Z1", "Z2"):
        raise ValueError(f"quadrature must be 'Z1' or 'Z2', got {quadrature!r}")
    if isinstance(source, FockState1):
        moments = StateMoments(source)
    elif isinstance(source, FockState2):
        raise TypeError("use two_mode_hillery_mode to reduce a two-mode state first")
    else:
        moments = source
    F = mean_commutator(moments, q)
    if abs(F) < F_TOL:
        raise ValueError("<F_q(N)> vanishes, D_q is undefined")
    a2q = moments(0, 2 * q)
    aq = moments(0, q)
    nq = moments(q, q).real
    sign = 1.0 if quadrature == "Z1" else -1.0
    mean_sq = (2.0 * sign * a2q.real + 2.0 * nq + F) / 2.0
    mean = aq.real if quadrature == "Z1" else aq.imag
    variance = mean_sq - 2.0 * mean**2
    bound = abs(F) if as_printed else 0.5 * abs(F)
    return float((variance - bound) / bound)


class SymmetricModeMoments:
    """Moments of ``xi = (a + b) / sqrt(2)`` built from two-mode moments."""

    def __init__(self, two_mode: Callable):
        self.two_mode = two_mode
        self._cache = {}

    def __call__(self, k: int, l: int) -> complex:
        if (k, l) not in self._cache:
            total = 0j
            for i in range(k + 1):
                for j in range(l + 1):
                    w = comb(k, i, exact=True) * comb(l, j, exact=True)
                    total += w * self.two_mode(i, j, k - i, l - j)
            self._cache[(k, l)] = total / 2 ** ((k + l) / 2)
        return self._cache[(k, l)]


def two_mode_hillery_mode(state: FockState2, source: str = "STATE",
                          x_grid: XGrid = None) -> SymmetricModeMoments:
    """Single-mode moment provider for ``xi = (a + b) / sqrt(2)``.

    ``source`` selects ``"STATE"`` (ladder-operator oracle) or
    ``"TOMOGRAM"`` (two-mode inversion from sections).
    """
    source = source.upper()
    if source == "STATE":
        return SymmetricModeMoments(StateMoments(state))
    if source == "TOMOGRAM":
        return SymmetricModeMoments(SectionMoments(state, x_grid))
    raise ValueError(f"source must be 'STATE' or 'TOMOGRAM', got {source!r}")


# ---------------------------------------------------------------- reports


@dataclass
class SqueezingReport:
    """Time series of one squeezing quantity from both sources."""

    kind: str
    q: int
    t_over_trev: list = field(default_factory=list)
    tomogram_value: list = field(default_factory=list)
    state_value: list = field(default_factory=list)
    reference: list = field(default_factory=list)

    COLUMNS = ("t_over_Trev", "tomogram_value", "state_value", "reference")

    def add(self, t_over_trev, tomogram_value, state_value, reference) -> None:
        self.t_over_trev.append(float(t_over_trev))
        self.tomogram_value.append(float(tomogram_value))
        self.state_value.append(float(state_value))
        self.reference.append(float(reference))

    def rows(self):
        return list(zip(self.t_over_trev, self.tomogram_value, self.state_value, self.reference))

    @property
    def filename(self) -> str:
        return f"{self.kind.lower()}_q{self.q}.csv"
