"""Fock-space states, special functions and overlaps.

States are pure and carried as truncated amplitude arrays in the number
basis. Every constructor renormalizes on the truncated space so that all
downstream distributions are exactly normalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.special import gammainc, gammaln

NORM_TOL = 1e-12
_RESCALE = 1e150


@dataclass(frozen=True)
class FockState1:
    """Single-mode pure state, ``coeffs[n]`` is the amplitude of ``|n>``."""

    coeffs: np.ndarray
    label: str = ""

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise ValueError("FockState1 needs at least one coefficient")
        norm = float(np.vdot(c, c).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |c|^2 sums to {norm!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max(self) -> int:
        return self.coeffs.size - 1

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def mean_number(self) -> float:
        return float(np.dot(np.arange(self.coeffs.size), self.populations))

    def padded(self, n_max: int) -> np.ndarray:
        out = np.zeros(n_max + 1, dtype=complex)
        out[: self.coeffs.size] = self.coeffs
        return out


@dataclass(frozen=True)
class FockState2:
    """Two-mode pure state, ``coeffs[m, n]`` is the amplitude of ``|m; n>``.

    ``provenance`` records how the state was produced (used to reject
    mismatched inputs downstream); it takes no part in equality.
    """

    coeffs: np.ndarray
    label: str = ""
    provenance: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.size == 0:
            raise ValueError("FockState2 needs a non-empty coefficient matrix")
        norm = float(np.vdot(c, c).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |c|^2 sums to {norm!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max_a(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def n_max_b(self) -> int:
        return self.coeffs.shape[1] - 1

    def mean_total_number(self) -> float:
        m = np.arange(self.coeffs.shape[0])[:, None]
        n = np.arange(self.coeffs.shape[1])[None, :]
        return float(np.sum((m + n) * np.abs(self.coeffs) ** 2))

    def padded(self, n_max_a: int, n_max_b: int) -> np.ndarray:
        out = np.zeros((n_max_a + 1, n_max_b + 1), dtype=complex)
        out[: self.coeffs.shape[0], : self.coeffs.shape[1]] = self.coeffs
        return out


@dataclass(frozen=True)
class StateSpec:
    """Recipe for a single-mode initial state.

    ``kind`` is one of ``"CS"``, ``"PACS"``, ``"TCS"``, ``"FOCK"``.
    """

    kind: str
    alpha: complex = 0j
    m: int = 0
    n: int = 0
    n_max: int = 0

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in ("CS", "PACS", "TCS", "FOCK"):
            raise ValueError(f"unknown state kind {self.kind!r}")
        if self.m < 0 or self.n < 0 or self.n_max < 0:
            raise ValueError("photon numbers and truncations must be >= 0")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "alpha", complex(self.alpha))

    def build(self, eps: float = None) -> FockState1:
        eps = DEFAULT_EPS if eps is None else eps
        if self.kind == "CS":
            return make_cs(self.alpha, eps)
        if self.kind == "PACS":
            return make_pacs(self.alpha, self.m, eps)
        if self.kind == "TCS":
            return make_tcs(self.alpha, self.n_max)
        return make_fock(self.n)


DEFAULT_EPS = 1e-24


def _normalize(c: np.ndarray) -> np.ndarray:
    return c / math.sqrt(float(np.vdot(c, c).real))


def truncation_for(nu: float, eps: float, extra: int = 0) -> int:
    """Smallest admissible cutoff for a Poisson(nu) weight with tail mass < eps.

    Starts from ``max(20, ceil(nu + 10 sqrt(nu + 1)) + extra)`` and grows
    until the discarded mass drops below ``eps``.
    """
    if not 0.0 < eps <= 1e-6:
        raise ValueError(f"tail tolerance must lie in (0, 1e-6], got {eps!r}")
    n_max = max(20, math.ceil(nu + 10.0 * math.sqrt(nu + 1.0)) + extra)
    if nu == 0.0:
        return n_max
    # P(N > n_max) = regularized lower incomplete gamma P(n_max + 1, nu)
    while gammainc(n_max + 1, nu) >= eps:
        n_max += 5
    return n_max


def _cs_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    nu = abs(alpha) ** 2
    log_mag = -0.5 * nu - 0.5 * gammaln(n + 1)
    if alpha == 0:
        c = np.zeros(n_max + 1, dtype=complex)
        c[0] = 1.0
        return c
    log_mag = log_mag + n * math.log(abs(alpha))
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def make_cs(alpha: complex, eps: float = DEFAULT_EPS) -> FockState1:
    """Coherent state ``|alpha>`` truncated so the Poisson tail is below ``eps``."""
    alpha = complex(alpha)
    if not 0.0 < eps <= 1e-6:
        raise ValueError(f"tail tolerance must lie in (0, 1e-6], got {eps!r}")
    if alpha == 0:
        return FockState1(np.array([1.0 + 0j]), label="CS(0)")
    n_max = truncation_for(abs(alpha) ** 2, eps)
    return FockState1(_normalize(_cs_amplitudes(alpha, n_max)), label=f"CS({alpha})")


def make_fock(n: int) -> FockState1:
    c = np.zeros(n + 1, dtype=complex)
    c[n] = 1.0
    return FockState1(c, label=f"FOCK({n})")


def raise_power(c: np.ndarray, m: int) -> np.ndarray:
    """Apply ``(a^dagger)^m`` to an amplitude vector, growing it by ``m``."""
    out = np.array(c, dtype=complex)
    for _ in range(m):
        grown = np.zeros(out.size + 1, dtype=complex)
        grown[1:] = out * np.sqrt(np.arange(1, out.size + 1))
        out = grown
    return out


def laguerre(m: int, x: float) -> float:
    """Laguerre polynomial ``L_m(x)`` by the three-term recurrence."""
    if m < 0:
        raise ValueError("Laguerre degree must be >= 0")
    prev, cur = 1.0, 1.0 - x
    if m == 0:
        return prev
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def pacs_norm(alpha: complex, m: int) -> float:
    """Norm of ``a^dagger^m |alpha>``, i.e. ``sqrt(m! L_m(-|alpha|^2))``."""
    return math.sqrt(math.factorial(m) * laguerre(m, -abs(alpha) ** 2))


def make_pacs(alpha: complex, m: int, eps: float = DEFAULT_EPS) -> FockState1:
    """Photon-added coherent state ``a^dagger^m |alpha>`` normalized."""
    if m < 0:
        raise ValueError("number of added photons must be >= 0")
    alpha = complex(alpha)
    if m == 0:
        return make_cs(alpha, eps)
    if not 0.0 < eps <= 1e-6:
        raise ValueError(f"tail tolerance must lie in (0, 1e-6], got {eps!r}")
    n_max = 0 if alpha == 0 else truncation_for(abs(alpha) ** 2, eps)
    base = _cs_amplitudes(alpha, n_max)
    c = raise_power(base, m) / pacs_norm(alpha, m)
    return FockState1(_normalize(c), label=f"PACS({alpha},{m})")


def make_tcs(alpha: complex, n_max: int) -> FockState1:
    """Coherent expansion cut at ``n_max`` and renormalized to unit norm."""
    if n_max < 0:
        raise ValueError("N_max must be >= 0")
    alpha = complex(alpha)
    n = np.arange(n_max + 1)
    if alpha == 0:
        c = np.zeros(n_max + 1, dtype=complex)
        c[0] = 1.0
    else:
        c = np.exp(n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)) * np.exp(
            1j * n * np.angle(alpha)
        )
    return FockState1(_normalize(c), label=f"TCS({alpha},{n_max})")


def _hermite_parts(x: np.ndarray, n_max: int):
    """Mantissas ``g[n]`` and per-point log scales with
    ``h_n(x) = g[n] * exp(logscale[n] - x**2 / 2)``.

    The Gaussian factor is kept out of the recurrence and large mantissas are
    rescaled, so nothing overflows or underflows prematurely.
    """
    x = np.asarray(x, dtype=float)
    g = np.empty((n_max + 1,) + x.shape)
    logs = np.empty((n_max + 1,) + x.shape)
    scale = np.zeros(x.shape)
    prev = np.zeros(x.shape)
    cur = np.full(x.shape, np.pi ** -0.25)
    g[0] = cur
    logs[0] = scale
    for n in range(n_max):
        nxt = x * math.sqrt(2.0 / (n + 1)) * cur - math.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            cur = np.where(big, cur / _RESCALE, cur)
            prev = np.where(big, prev / _RESCALE, prev)
            scale = scale + np.where(big, math.log(_RESCALE), 0.0)
        g[n + 1] = cur
        logs[n + 1] = scale
    return g, logs


def hermite_functions(x, n_max: int) -> np.ndarray:
    """Normalized Hermite functions ``h_0 .. h_{n_max}`` at ``x``.

    ``h_n(x) = H_n(x) exp(-x^2/2) / (pi^(1/4) sqrt(2^n n!))``. The result has
    shape ``(n_max + 1,) + shape(x)``.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    x = np.asarray(x, dtype=float)
    g, logs = _hermite_parts(x, n_max)
    with np.errstate(under="ignore"):
        return g * np.exp(logs - 0.5 * x**2)


def hermite_polynomial(n: int, x) -> np.ndarray:
    """Physicists' ``H_n(x)`` rebuilt from the normalized recurrence."""
    x = np.asarray(x, dtype=float)
    g, logs = _hermite_parts(x, n)
    log_norm = 0.25 * math.log(math.pi) + 0.5 * (n * math.log(2.0) + gammaln(n + 1))
    return g[n] * np.exp(logs[n] + log_norm)


def product_state(a: FockState1, b: FockState1) -> FockState2:
    return FockState2(
        np.outer(a.coeffs, b.coeffs),
        label=f"{a.label}x{b.label}" if a.label or b.label else "",
    )


State = Union[FockState1, FockState2]


def overlap(s1: State, s2: State) -> complex:
    """``<s1|s2>`` with the shorter state zero-padded."""
    if isinstance(s1, FockState1) and isinstance(s2, FockState1):
        n = max(s1.n_max, s2.n_max)
        return complex(np.vdot(s1.padded(n), s2.padded(n)))
    if isinstance(s1, FockState2) and isinstance(s2, FockState2):
        na = max(s1.n_max_a, s2.n_max_a)
        nb = max(s1.n_max_b, s2.n_max_b)
        return complex(np.vdot(s1.padded(na, nb), s2.padded(na, nb)))
    raise TypeError("fidelity needs two states with the same number of modes")


def fidelity(s1: State, s2: State) -> float:
    """``|<s1|s2>|^2`` clipped to ``[0, 1]``."""
    return float(min(1.0, abs(overlap(s1, s2)) ** 2))
