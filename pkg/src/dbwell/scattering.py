"""Stationary scattering for piecewise-constant potentials.

The 2x2 transfer matrix relates plane-wave coefficient pairs (A, B), with
psi = A e^{ikx} + B e^{-ikx} in the outer medium on each side:

    (C, D)_right = M (A, B)_left

so that, with unit incidence from the left (A=1, D=0),

    r = -m21 / m22        t = det(M) / m22 = 1 / m22.

Internally each segment is crossed in the (psi, psi') basis with
cos(q d) and sin(q d)/q entries.  Those are even functions of q, so the
matrix is analytic in k (no branch cuts from evanescent segments), and
exponent scaling keeps entries finite up to |Im q|*d of several hundred.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericsError
from .potential import PotentialProfile
from .units import HBAR2_OVER_2ME, wavenumber_from_energy

#: log-scale beyond which TransferMatrix entries are left unfolded
_FOLD_LIMIT = 650.0


@dataclass(frozen=True)
class TransferMatrix:
    """Scaled transfer matrix: the true matrix is e^{log_scale} * [m_ij].

    log_scale is 0 whenever the entries are representable directly (all
    physically reasonable structures); it only stays nonzero for extremely
    opaque barriers.
    """

    m11: complex
    m12: complex
    m21: complex
    m22: complex
    log_scale: float = 0.0

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def det(self) -> complex:
        """Determinant of the true (unscaled) matrix."""
        return (self.m11 * self.m22 - self.m12 * self.m21) * math.exp(2.0 * self.log_scale)

    def transmission_amplitude(self) -> complex:
        if self.m22 == 0:
            raise NumericsError("transfer matrix is singular (on a pole)")
        return cmath.exp(-self.log_scale) / self.m22

    def reflection_amplitude(self) -> complex:
        if self.m22 == 0:
            raise NumericsError("transfer matrix is singular (on a pole)")
        return -self.m21 / self.m22


def _segment_step(q2: complex, d: float):
    """(psi, psi') propagation across one uniform segment, scaled.

    Returns (c, s, a) with true matrix e^a * [[c, s], [-q2 s, c]] where
    c = e^{-a} cos(q d) and s = e^{-a} sin(q d)/q; a = |Im(q d)|.
    """
    q = cmath.sqrt(q2)  # branch irrelevant: entries are even in q
    w = q * d
    u, v = w.real, w.imag
    a = abs(v)
    ep = cmath.exp(complex(-v - a, u))   # e^{ iw} e^{-a}
    em = cmath.exp(complex(v - a, -u))   # e^{-iw} e^{-a}
    c = 0.5 * (ep + em)
    if abs(w) < 1e-4:
        s = d * (1.0 - w * w / 6.0 + w**4 / 120.0)
    else:
        s = (ep - em) / (2j * q)
    return c, s, a


def _propagate_scaled(profile: PotentialProfile, k: complex):
    """Product of segment matrices in the (psi, psi') basis, scaled.

    Returns (2x2 ndarray, log_scale).
    """
    kk = k * k
    scale = HBAR2_OVER_2ME / profile.mass_ratio
    W = np.eye(2, dtype=complex)
    log_scale = 0.0
    for d, height in profile.segments:
        q2 = kk - height / scale
        c, s, a = _segment_step(q2, d)
        W = np.array([[c, s], [-q2 * s, c]]) @ W
        log_scale += a
        # keep intermediate entries O(1) for very opaque stacks
        peak = np.max(np.abs(W))
        if peak > 1e100:
            W /= peak
            log_scale += math.log(peak)
    return W, log_scale


def transfer_matrix(profile: PotentialProfile, k: complex) -> TransferMatrix:
    """Full-structure transfer matrix in the external plane-wave basis.

    k may be complex (analytic continuation for pole searches); k = 0 is
    singular because the external basis degenerates.
    """
    k = complex(k)
    if k == 0:
        raise DomainError("k = 0 is singular for the plane-wave basis")
    if not cmath.isfinite(k):
        raise DomainError(f"k must be finite, got {k!r}")
    W, log_scale = _propagate_scaled(profile, k)
    L = profile.length
    lam = np.array([[1.0, 1.0], [1j * k, -1j * k]])
    lam_inv = np.array([[0.5, -0.5j / k], [0.5, 0.5j / k]])
    phase = np.array([[cmath.exp(-1j * k * L), 0.0], [0.0, cmath.exp(1j * k * L)]])
    M = phase @ lam_inv @ W @ lam
    if log_scale <= _FOLD_LIMIT:
        M = M * math.exp(log_scale)
        log_scale = 0.0
    return TransferMatrix(M[0, 0], M[0, 1], M[1, 0], M[1, 1], log_scale)


def pole_function(profile: PotentialProfile, k: complex) -> complex:
    """m22(k) including the scale factor; zeros are the S-matrix poles."""
    tm = transfer_matrix(profile, k)
    return tm.m22 * math.exp(tm.log_scale)


def transmission(profile: PotentialProfile, energy: float) -> float:
    """Transmission coefficient T(E) = |t|^2 for real E > 0."""
    if not energy > 0:
        raise DomainError(f"transmission needs E > 0, got {energy!r}")
    k = wavenumber_from_energy(energy, profile.mass_ratio)
    tm = transfer_matrix(profile, k)
    # evaluated in log space so opaque stacks underflow to 0, never NaN
    return float(np.exp(-2.0 * (tm.log_scale + np.log(abs(tm.m22)))))


class PiecewiseSolution:
    """A solution of the stationary equation on [0, L], evaluable anywhere.

    Holds (psi, psi') at every interface plus each segment's q^2; interior
    values come from the cos/sinc closed form of the segment it falls in.
    Outside [0, L] the solution continues with the stored outer-medium
    plane-wave coefficients.
    """

    def __init__(self, profile: PotentialProfile, k: complex, psi0: complex, dpsi0: complex):
        self.k = complex(k)
        self.edges = np.array(profile.boundaries)
        self.q2 = np.array(
            [k * k - h / (HBAR2_OVER_2ME / profile.mass_ratio) for _, h in profile.segments],
            dtype=complex,
        )
        f = [complex(psi0)]
        g = [complex(dpsi0)]
        for j, (d, _) in enumerate(profile.segments):
            c, s, a = _segment_step(self.q2[j], d)
            e = math.exp(a)
            f.append((c * f[j] + s * g[j]) * e)
            g.append((-self.q2[j] * s * f[j] + c * g[j]) * e)
        self.f = np.array(f)
        self.g = np.array(g)

    def value_and_derivative(self, x, side: str = "right"):
        """(psi(x), psi'(x)); side picks the segment at interface points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if side not in ("left", "right"):
            raise DomainError(f"side must be 'left' or 'right', got {side!r}")
        j = np.searchsorted(self.edges, x, side=side) - 1
        j = np.clip(j, 0, len(self.q2) - 1)
        xi = x - self.edges[j]
        q = np.sqrt(self.q2[j])
        w = q * xi
        c = np.cos(w)
        small = np.abs(w) < 1e-8
        s = np.where(small, xi, np.sin(w) / np.where(q == 0, 1.0, q))
        val = self.f[j] * c + self.g[j] * s
        dval = -self.f[j] * self.q2[j] * s + self.g[j] * c
        return val, dval

    def __call__(self, x):
        return self.value_and_derivative(x)[0]


@dataclass(frozen=True)
class ScatteringSolution:
    """Stationary phi(x, k) with unit incident amplitude from the left."""

    k: complex
    t_amp: complex
    r_amp: complex
    grid: np.ndarray
    phi: np.ndarray
    solution: PiecewiseSolution

    def __iter__(self):  # (grid, phi) convenience unpacking
        return iter((self.grid, self.phi))


def stationary_wavefunction(profile: PotentialProfile, energy: float, grid) -> ScatteringSolution:
    """phi(x) sampled on `grid` (sorted, within [0, L]) at real energy E."""
    if not energy > 0:
        raise DomainError(f"stationary solution needs E > 0, got {energy!r}")
    grid = np.asarray(grid, dtype=float)
    if grid.size and (np.any(np.diff(grid) < 0) or grid[0] < 0 or grid[-1] > profile.length + 1e-12):
        raise DomainError("grid must be sorted and within [0, L]")
    k = wavenumber_from_energy(energy, profile.mass_ratio)
    tm = transfer_matrix(profile, k)
    r = tm.reflection_amplitude()
    t = tm.transmission_amplitude()
    sol = PiecewiseSolution(profile, k, 1.0 + r, 1j * k * (1.0 - r))
    return ScatteringSolution(k=k, t_amp=t, r_amp=r, grid=grid, phi=sol(grid), solution=sol)


def solve_energy_for_gamma(
    profile: PotentialProfile,
    resonance,
    gamma: float,
    side: str = "below",
    lineshape: str = "breit_wigner",
    tol_ev: float = 1e-7,
) -> float:
    """Incidence energy where T(E)/T(eps_1) equals gamma, on one flank.

    `lineshape` selects what "T" means:

    * ``"breit_wigner"`` (default): the isolated-resonance lineshape
      implied by the resonance parameters, so the answer is exactly
      eps_1 -/+ omega*Gamma_1 with omega = sqrt(1/gamma - 1)/2.  This is
      the ratio definition under which buildup curves of different
      structures collapse onto one another.
    * ``"transmission"``: the computed transmission curve itself.  Real
      lineshapes sag below the Lorentzian on the low-energy flank (the
      width shrinks with energy), so the result differs from the
      Breit-Wigner answer by a few tenths of Gamma at gamma ~ 0.01.

    Bisection runs on the chosen curve, bracketed within 10 Gamma_1.
    """
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma must be in (0, 1], got {gamma!r}")
    if side not in ("below", "above"):
        raise DomainError(f"side must be 'below' or 'above', got {side!r}")
    eps1 = resonance.eps
    gamma1 = resonance.gamma
    if gamma == 1.0:
        return eps1

    if lineshape == "breit_wigner":
        def curve(e):
            return 1.0 / (1.0 + 4.0 * ((e - eps1) / gamma1) ** 2)
    elif lineshape == "transmission":
        t_peak = transmission(profile, eps1)

        def curve(e):
            return transmission(profile, e) / t_peak
    else:
        raise DomainError(f"unknown lineshape {lineshape!r}")

    lo, hi = (eps1 - 10.0 * gamma1, eps1) if side == "below" else (eps1, eps1 + 10.0 * gamma1)
    f_lo, f_hi = curve(lo) - gamma, curve(hi) - gamma
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0:
        raise NumericsError(
            f"no sign change on the {side} flank within 10 Gamma: gamma={gamma} is "
            "outside the isolated-resonance window"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = curve(mid) - gamma
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo < tol_ev:
            break
    return 0.5 * (lo + hi)
