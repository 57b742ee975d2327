"""Single-mode evolution under ``chi1 a+^2 a^2 + chi2 a+^3 a^3``.

Times can be plain floats or :class:`PiMultiple` values. The latter keep
``t / pi`` as an exact fraction so that revival instants with rational
couplings produce phases reduced exactly modulo ``2 pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .fock import FockState1

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class PiMultiple:
    """The time ``coefficient * pi``."""

    coefficient: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))

    def __float__(self) -> float:
        return float(self.coefficient) * math.pi

    def __truediv__(self, other: int) -> "PiMultiple":
        return PiMultiple(self.coefficient / other)

    def __mul__(self, other) -> "PiMultiple":
        return PiMultiple(self.coefficient * Fraction(other))

    __rmul__ = __mul__

    def __add__(self, other: "PiMultiple") -> "PiMultiple":
        return PiMultiple(self.coefficient + other.coefficient)


Time = Union[float, PiMultiple]


def as_coupling(value) -> Number:
    """Coerce a coupling to an exact ``Fraction`` when that is possible.

    Integers, fractions and strings such as ``"4/3"`` become fractions;
    floats stay floats and are treated as generic reals.
    """
    if isinstance(value, bool):
        raise TypeError("coupling cannot be a bool")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    return float(value)


@dataclass(frozen=True)
class SingleModeHamiltonian:
    """``H = chi1 a+^2 a^2 + chi2 a+^3 a^3`` with hbar = 1."""

    chi1: Number
    chi2: Number = 0

    def __post_init__(self):
        object.__setattr__(self, "chi1", as_coupling(self.chi1))
        object.__setattr__(self, "chi2", as_coupling(self.chi2))
        if self.chi1 == 0 and self.chi2 == 0:
            raise ValueError("chi1 and chi2 cannot both vanish")

    @property
    def rational_flag(self) -> bool:
        return isinstance(self.chi1, Fraction) and isinstance(self.chi2, Fraction)

    def energies(self, n_max: int) -> np.ndarray:
        n = np.arange(n_max + 1, dtype=float)
        return float(self.chi1) * n * (n - 1) + float(self.chi2) * n * (n - 1) * (n - 2)

    def exact_energies(self, n_max: int):
        return [self.chi1 * n * (n - 1) + self.chi2 * n * (n - 1) * (n - 2) for n in range(n_max + 1)]


def kerr(chi: Number = 1) -> SingleModeHamiltonian:
    return SingleModeHamiltonian(chi, 0)


def cubic(chi: Number = 1) -> SingleModeHamiltonian:
    return SingleModeHamiltonian(0, chi)


@dataclass(frozen=True)
class RevivalSchedule:
    """Revival period, ``None`` when revivals are absent.

    ``period`` is a :class:`PiMultiple` for rational couplings and a float
    otherwise.
    """

    period: Optional[Time]
    fractional_instants: tuple = ()

    @property
    def absent(self) -> bool:
        return self.period is None

    def instant(self, fraction) -> Time:
        """``fraction * T_rev``; exact when the period is exact."""
        if self.period is None:
            raise ValueError("revivals are absent for this Hamiltonian")
        if isinstance(self.period, PiMultiple):
            return self.period * Fraction(fraction)
        return float(self.period) * float(Fraction(fraction))

    def with_fractions(self, ls: Sequence[int]) -> "RevivalSchedule":
        return RevivalSchedule(self.period, tuple(self.instant(Fraction(1, l)) for l in ls))


def _fraction_lcm(a: Fraction, b: Fraction) -> Fraction:
    num = math.lcm(a.numerator, b.numerator)
    den = math.gcd(a.denominator, b.denominator)
    return Fraction(num, den)


def revival_time(H: SingleModeHamiltonian, ls: Sequence[int] = ()) -> RevivalSchedule:
    """``T_rev = pi * LCM(1/chi1, 1/chi2)`` over the nonzero couplings.

    Returns an absent schedule when a nonzero pair of couplings is not
    exactly rational.
    """
    nonzero = [c for c in (H.chi1, H.chi2) if c != 0]
    if len(nonzero) == 1:
        (c,) = nonzero
        if isinstance(c, Fraction):
            period = PiMultiple(1 / abs(c))
        else:
            period = math.pi / abs(c)
        return RevivalSchedule(period).with_fractions(ls)
    if not H.rational_flag:
        return RevivalSchedule(None)
    inv = [1 / abs(c) for c in nonzero]
    return RevivalSchedule(PiMultiple(_fraction_lcm(*inv))).with_fractions(ls)


def phases(H: SingleModeHamiltonian, n_max: int, t: Time) -> np.ndarray:
    """``exp(-i t E_n)`` for ``n = 0 .. n_max``."""
    if isinstance(t, PiMultiple) and H.rational_flag:
        # reduce t E_n / pi modulo 2 exactly before going to floating point
        reduced = [float((t.coefficient * e) % 2) for e in H.exact_energies(n_max)]
        return np.exp(-1j * math.pi * np.array(reduced))
    t = float(t)
    if t < 0:
        raise ValueError("time must be >= 0")
    return np.exp(-1j * t * H.energies(n_max))


def evolve_single(state: FockState1, H: SingleModeHamiltonian, t: Time) -> FockState1:
    """Phase-only evolution ``c_n -> c_n exp(-i t E_n)``."""
    if float(t) < 0:
        raise ValueError("time must be >= 0")
    c = np.asarray(state.coeffs) * phases(H, state.n_max, t)
    return FockState1(c, label=state.label)


@dataclass(frozen=True)
class SubpacketDecomposition:
    """Kerr propagator at ``T_rev / p`` as a sum of ``p`` number-rotations.

    ``U(T_rev/p) = sum_m f[m] exp(-i pi (2 m + offset) N / p)``; the offset is
    0 for odd ``p`` and 1 for even ``p`` (the phase sequence is then only
    anti-periodic with period ``p``).
    """

    p: int
    f: np.ndarray
    offset: int

    def rotation_angles(self) -> np.ndarray:
        return np.pi * (2 * np.arange(self.p) + self.offset) / self.p

    def reconstruct(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n)
        return np.exp(-1j * np.outer(n, self.rotation_angles())) @ self.f


def kerr_phase_sequence(p: int, n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    # n(n-1)/p modulo 2 computed exactly in integers
    num = (n * (n - 1)) % (2 * p)
    return np.exp(-1j * np.pi * num / p)


def subpacket_decomposition(p: int) -> SubpacketDecomposition:
    """Fourier coefficients of the Kerr propagator (``chi1 = 1``) at ``pi / p``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    offset = 1 if p % 2 == 0 else 0
    n = np.arange(p)
    h = kerr_phase_sequence(p, n) * np.exp(1j * np.pi * offset * n / p)
    f = np.exp(2j * np.pi * np.outer(np.arange(p), n) / p) @ h / p
    dec = SubpacketDecomposition(p, f, offset)
    check = np.arange(4 * p)
    err = np.max(np.abs(dec.reconstruct(check) - kerr_phase_sequence(p, check)))
    if err > 1e-12:
        raise ArithmeticError(f"subpacket reconstruction failed, error {err:.3g}")
    return dec
