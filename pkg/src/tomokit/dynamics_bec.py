"""Double-well condensate dynamics.

    H = w0 N + w1 (a+a - b+b) + U N^2 - lam (a+b + ab+),   N = a+a + b+b

For a product of coherent states the evolved state is known in closed
form; photon-added initial states follow from the operator
``M(t) = exp(-iHt) a+^m1 b+^m2 exp(iHt) / kappa`` acting on that solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import comb, gammaln

from .fock import DEFAULT_EPS, FockState2, _cs_amplitudes, pacs_norm, truncation_for

REVIVAL_TOL = 1e-9


@dataclass(frozen=True)
class BecParams:
    omega0: float
    omega1: float
    lam: float
    U_ab: float

    def __post_init__(self):
        for name in ("omega0", "omega1", "lam", "U_ab"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.lambda1 <= 0:
            raise ValueError("omega1 and lambda cannot both vanish")

    @property
    def lambda1(self) -> float:
        return math.hypot(self.omega1, self.lam)

    @property
    def gamma(self) -> float:
        return math.acos(max(-1.0, min(1.0, self.omega1 / self.lambda1)))

    @property
    def revival_period(self) -> float:
        if self.U_ab == 0:
            raise ValueError("no revival period without nonlinearity")
        return math.pi / abs(self.U_ab)


STANDARD_PARAMS = BecParams(omega0=10, omega1=3, lam=4, U_ab=1)


@dataclass(frozen=True)
class BecInitialSpec:
    """``|alpha_a, m1> x |alpha_b, m2>`` (photon-added coherent states)."""

    alpha_a: complex
    alpha_b: complex
    m1: int = 0
    m2: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha_a", complex(self.alpha_a))
        object.__setattr__(self, "alpha_b", complex(self.alpha_b))
        if self.m1 < 0 or self.m2 < 0:
            raise ValueError("m1 and m2 must be >= 0")

    @property
    def total_mean(self) -> float:
        return abs(self.alpha_a) ** 2 + abs(self.alpha_b) ** 2

    @property
    def kappa(self) -> float:
        return pacs_norm(self.alpha_a, self.m1) * pacs_norm(self.alpha_b, self.m2)

    def truncation(self, eps: float = DEFAULT_EPS) -> int:
        """Per-mode cutoff valid for every t (``|alpha(t)|^2 <= total_mean``)."""
        nu = self.total_mean
        base = 0 if nu == 0 else truncation_for(nu, eps)
        return base + self.m1 + self.m2


def mode_amplitudes(spec: BecInitialSpec, params: BecParams, t: float):
    """Coherent amplitudes ``(alpha(t), beta(t))`` of the linear mode rotation."""
    l1 = params.lambda1
    c, s = math.cos(l1 * t), math.sin(l1 * t)
    aa, ab = spec.alpha_a, spec.alpha_b
    alpha = aa * c + 1j * s / l1 * (params.lam * ab - params.omega1 * aa)
    beta = ab * c + 1j * s / l1 * (params.lam * aa + params.omega1 * ab)
    return alpha, beta


def _total_number(shape) -> np.ndarray:
    return np.arange(shape[0])[:, None] + np.arange(shape[1])[None, :]


def _normalized(c: np.ndarray) -> np.ndarray:
    return c / math.sqrt(float(np.vdot(c, c).real))


def evolve_psi00(spec: BecInitialSpec, params: BecParams, t: float,
                 eps: float = DEFAULT_EPS, n_max: Optional[int] = None) -> FockState2:
    """Evolved coherent product; ``spec.m1`` and ``spec.m2`` are ignored."""
    if not 0.0 < eps <= 1e-6:
        raise ValueError(f"tail tolerance must lie in (0, 1e-6], got {eps!r}")
    t = float(t)
    if n_max is None:
        n_max = BecInitialSpec(spec.alpha_a, spec.alpha_b).truncation(eps)
    alpha, beta = mode_amplitudes(spec, params, t)
    ca = _cs_amplitudes(alpha, n_max)
    cb = _cs_amplitudes(beta, n_max)
    K = _total_number((n_max + 1, n_max + 1))
    phase = np.exp(-1j * t * (params.omega0 * K + params.U_ab * K.astype(float) ** 2))
    c = _normalized(np.outer(ca, cb) * phase)
    return FockState2(c, label=f"psi00(t={t:.6g})",
                      provenance=("psi00", t, params, spec.alpha_a, spec.alpha_b))


def create(c: np.ndarray, pa: int, pb: int, shape=None) -> np.ndarray:
    """Apply ``a+^pa b+^pb`` to a coefficient matrix."""
    na, nb = c.shape
    shape = (na + pa, nb + pb) if shape is None else shape
    out = np.zeros(shape, dtype=complex)
    i = np.arange(na)
    j = np.arange(nb)
    fa = np.exp(0.5 * (gammaln(i + pa + 1) - gammaln(i + 1)))
    fb = np.exp(0.5 * (gammaln(j + pb + 1) - gammaln(j + 1)))
    out[pa:pa + na, pb:pb + nb] = c * fa[:, None] * fb[None, :]
    return out


def m_operator_terms(m1: int, m2: int, params: BecParams, t: float) -> dict:
    """Coefficients of the creation monomials in ``kappa * M(t)``.

    Returns ``{(A, B): coeff}`` with ``A + B = m1 + m2``; the number-dependent
    phase that stands to the right of the monomials is not included.
    """
    l1 = params.lambda1
    cg, sg = math.cos(params.gamma / 2), math.sin(params.gamma / 2)
    total = m1 + m2
    terms: dict = {}
    for k in range(m1 + 1):
        for l in range(m2 + 1):
            p_max = k + m2 - l
            q_max = l + m1 - k
            rot = np.exp(-1j * l1 * t * (2 * (k - l) + m2 - m1))
            for p in range(p_max + 1):
                for q in range(q_max + 1):
                    e = k + l + p + q
                    val = ((-1) ** (k - p) * comb(m1, k, exact=True) * comb(m2, l, exact=True)
                           * comb(p_max, p, exact=True) * comb(q_max, q, exact=True)
                           * rot * cg ** e * sg ** (2 * total - e))
                    key = (p + q_max - q, q + p_max - p)
                    terms[key] = terms.get(key, 0.0) + val
    return terms


def apply_m_operator(c: np.ndarray, m1: int, m2: int, params: BecParams, t: float) -> np.ndarray:
    """``kappa * M(t)`` applied to an arbitrary coefficient matrix."""
    total = m1 + m2
    t = float(t)
    K = _total_number(c.shape)
    right = np.exp(-1j * params.U_ab * t * total * (2.0 * K + total))
    right = right * np.exp(-1j * params.omega0 * t * total)
    cr = np.asarray(c) * right
    shape = (c.shape[0] + total, c.shape[1] + total)
    out = np.zeros(shape, dtype=complex)
    for (A, B), coeff in sorted(m_operator_terms(m1, m2, params, t).items()):
        out += coeff * create(cr, A, B, shape)
    return out


def apply_M(m1: int, m2: int, params: BecParams, t: float, psi00_t: FockState2) -> FockState2:
    """``|psi_{m1 m2}(t)> = M(t) |psi_00(t)>``, normalized."""
    prov = psi00_t.provenance
    if prov is None or prov[0] != "psi00":
        raise ValueError("apply_M needs a state produced by evolve_psi00")
    _, t0, p0, alpha_a, alpha_b = prov
    if p0 != params or abs(t0 - float(t)) > 1e-15 * max(1.0, abs(t0)):
        raise ValueError(f"psi00 was evolved with t={t0!r}, {p0!r}, not t={t!r}, {params!r}")
    if m1 == 0 and m2 == 0:
        return psi00_t
    kappa = BecInitialSpec(alpha_a, alpha_b, m1, m2).kappa
    c = apply_m_operator(np.asarray(psi00_t.coeffs), m1, m2, params, t) / kappa
    return FockState2(_normalized(c), label=f"psi{m1}{m2}(t={float(t):.6g})",
                      provenance=(f"psi{m1}{m2}", float(t), params, alpha_a, alpha_b))


def evolve_bec(spec: BecInitialSpec, params: BecParams, t: float,
               eps: float = DEFAULT_EPS) -> FockState2:
    """Evolve any photon-added product through ``apply_M``."""
    n_max = BecInitialSpec(spec.alpha_a, spec.alpha_b).truncation(eps)
    psi = evolve_psi00(spec, params, t, eps, n_max=n_max)
    return apply_M(spec.m1, spec.m2, params, t, psi)


def evolve_psi10(spec: BecInitialSpec, params: BecParams, t: float,
                 eps: float = DEFAULT_EPS) -> FockState2:
    """Closed form for ``|alpha_a, 1> x |alpha_b>``."""
    t = float(t)
    psi = evolve_psi00(spec, params, t, eps)
    c = np.asarray(psi.coeffs)
    K = _total_number(c.shape)
    c = c * np.exp(-1j * params.U_ab * (2 * K + 1) * t)
    l1 = params.lambda1
    s, co = math.sin(l1 * t), math.cos(l1 * t)
    shape = (c.shape[0] + 1, c.shape[1] + 1)
    out = (l1 * co - 1j * params.omega1 * s) * create(c, 1, 0, shape)
    out = out + 1j * params.lam * s * create(c, 0, 1, shape)
    d10 = l1 * np.exp(1j * params.omega0 * t) * math.sqrt(1 + abs(spec.alpha_a) ** 2)
    return FockState2(_normalized(out / d10), label=f"psi10(t={t:.6g})")


def evolve_psi11(spec: BecInitialSpec, params: BecParams, t: float,
                 eps: float = DEFAULT_EPS) -> FockState2:
    """Closed form for ``|alpha_a, 1> x |alpha_b, 1>``."""
    t = float(t)
    psi = evolve_psi00(spec, params, t, eps)
    c = np.asarray(psi.coeffs)
    K = _total_number(c.shape)
    c = c * np.exp(-4j * params.U_ab * (K + 1) * t)
    w1, lam, l1 = params.omega1, params.lam, params.lambda1
    c2, s2 = math.cos(2 * l1 * t), math.sin(2 * l1 * t)
    shape = (c.shape[0] + 2, c.shape[1] + 2)
    ab = create(c, 1, 1, shape)
    aa = create(c, 2, 0, shape)
    bb = create(c, 0, 2, shape)
    out = (2 * w1**2 + c2 * 2 * lam**2) * ab
    out = out + (w1 * lam - c2 * w1 * lam) * (aa - bb)
    out = out + 1j * s2 * lam * l1 * (aa + bb)
    d11 = (2 * l1**2 * np.exp(2j * params.omega0 * t)
           * math.sqrt(1 + abs(spec.alpha_a) ** 2) * math.sqrt(1 + abs(spec.alpha_b) ** 2))
    return FockState2(_normalized(out / d11), label=f"psi11(t={t:.6g})")


@dataclass(frozen=True)
class RevivalCheck:
    is_revival_system: bool
    m: Optional[int]
    m_prime: Optional[int]
    T_rev: Optional[float]


def _as_integer(x: float) -> Optional[int]:
    r = round(x)
    return int(r) if abs(x - r) <= REVIVAL_TOL else None


def bec_revival_check(params: BecParams) -> RevivalCheck:
    """Full and fractional revivals need ``w0 = m U``, ``lambda1 = m' U``, ``m + m'`` odd."""
    if params.U_ab == 0:
        raise ValueError("U_ab must be nonzero")
    m = _as_integer(params.omega0 / params.U_ab)
    mp = _as_integer(params.lambda1 / params.U_ab)
    ok = m is not None and mp is not None and (m + mp) % 2 == 1
    return RevivalCheck(ok, m, mp, params.revival_period if ok else None)


@dataclass(frozen=True)
class FractionalRevivalDecomposition:
    """``|psi00(pi / (s U))> = sum_j coeff_j |alpha_j> x |beta_j>``."""

    s: int
    terms: tuple

    def assemble(self, n_max: int) -> FockState2:
        c = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        for coeff, a, b in self.terms:
            c += coeff * np.outer(_cs_amplitudes(a, n_max), _cs_amplitudes(b, n_max))
        return FockState2(_normalized(c), label=f"fractional revival s={self.s}")


def fractional_revival_components(params: BecParams, s: int, alpha_a: complex,
                                  alpha_b: complex) -> FractionalRevivalDecomposition:
    """Coherent-product expansion of ``psi00`` at ``T_rev / s``.

    The number phase ``exp(-i pi (m K + K^2) / s)`` is, after removing a
    linear ramp with offset ``r = m`` (even ``s``) or ``m + 1`` (odd ``s``),
    periodic in ``K`` with period ``s``; its discrete Fourier coefficients
    weight coherent pairs rotated by ``exp(-i pi (r + 2 j) / s)``.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    check = bec_revival_check(params)
    if not check.is_revival_system:
        raise ValueError(f"not a revival system: {check}")
    r = check.m if s % 2 == 0 else check.m + 1
    t = math.pi / (s * params.U_ab)

    def number_phase(K):
        K = np.asarray(K, dtype=np.int64)
        # (m K + K^2) / s modulo 2, exactly in integers
        return np.exp(-1j * np.pi * ((check.m * K + K * K) % (2 * s)) / s)

    K = np.arange(s)
    h = number_phase(K) * np.exp(1j * np.pi * r * K / s)
    d = np.exp(2j * np.pi * np.outer(np.arange(s), K) / s) @ h / s
    rot = np.exp(-1j * np.pi * (r + 2 * np.arange(s)) / s)
    Kc = np.arange(4 * s)
    err = np.max(np.abs(np.exp(-1j * np.outer(Kc, np.pi * (r + 2 * np.arange(s)) / s)) @ d
                        - number_phase(Kc)))
    if err > 1e-12:
        raise ArithmeticError(f"fractional revival reconstruction failed, error {err:.3g}")
    alpha, beta = mode_amplitudes(BecInitialSpec(alpha_a, alpha_b), params, t)
    terms = tuple((complex(d[j]), complex(alpha * rot[j]), complex(beta * rot[j])) for j in range(s))
    return FractionalRevivalDecomposition(s, terms)
