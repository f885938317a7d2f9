"""Closed-form dynamics of the amplitude means under repeated Grover iterations.

The two block means obey a coupled first-order linear recursion.  It
decouples into two phasors ``f± = l̄ ± i·sqrt(r/(N-r))·k̄`` that rotate by
``e^{±iω}`` per iteration, where ``cos ω = 1 - 2r/N``.  Every per-state
amplitude is then the block mean plus a conserved deviation (alternating in
sign for unmarked states), and the marked-state probability is a pure
sinusoid in ``t`` whose offset and swing depend only on the first two
moments of the initial distribution.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import DiffusionKernel, InitialMoments, SearchInstance
from .errors import DegenerateEllipse, IndexOutOfRange

# regime thresholds: relative, absolute, and on |Im φ|
EPS_CIRC = 1e-9
EPS_DEAD = 1e-12
EPS_LIN = 1e-9


class Regime(str, Enum):
    GENERIC = "Generic"
    LINEAR_REAL = "LinearReal"
    CIRCULAR_PLUS = "CircularPlus"
    CIRCULAR_MINUS = "CircularMinus"
    DEAD = "Dead"

    @property
    def oscillates(self) -> bool:
        return self in (Regime.GENERIC, Regime.LINEAR_REAL)


@dataclass(frozen=True)
class SpectralParams:
    omega: float
    f_plus0: complex
    f_minus0: complex
    alpha: complex
    phi: complex | None
    regime: Regime
    k_bar0: complex
    l_bar0: complex


@dataclass(frozen=True)
class ProbabilityProfile:
    p_av: float
    delta_p: float
    p_max: float
    p_min: float
    period: float


@dataclass(frozen=True)
class EllipseGeometry:
    eta: float
    a: float
    b: float
    k_scale: float
    k_eta: float

    def residual(self, points, block: str = "unmarked") -> float:
        """Largest deviation of ``points`` from the reported locus.

        For a proper ellipse this is ``|u²/a² + v²/b² - 1|`` in the frame of
        the major axis; for a segment (``b == 0``) it is the largest
        perpendicular offset or overshoot past the end points, relative to ``a``.
        """
        scale = self.k_scale if block == "marked" else 1.0
        angle = self.k_eta if block == "marked" else self.eta
        z = np.asarray(points, dtype=complex) * np.exp(-1j * angle) / scale
        u, v = z.real, z.imag
        if self.b == 0.0:
            over = np.maximum(np.abs(u) - self.a, 0.0)
            return float(np.max(np.maximum(np.abs(v), over)) / self.a)
        return float(np.max(np.abs((u / self.a) ** 2 + (v / self.b) ** 2 - 1.0)))


def omega_of(instance: SearchInstance) -> float:
    """Rotation angle per iteration; equals ``arccos(1 - 2r/N)``."""
    # half-angle form keeps full relative precision when r/N is small
    return 2.0 * math.asin(math.sqrt(instance.r / instance.n))


def phasors(k_bar, l_bar, instance: SearchInstance):
    """``(f₊, f₋)`` for given block means; works elementwise on arrays."""
    s = math.sqrt(instance.r / (instance.n - instance.r))
    return l_bar + 1j * s * k_bar, l_bar - 1j * s * k_bar


def compute_spectral(instance: SearchInstance, moments: InitialMoments) -> SpectralParams:
    omega = omega_of(instance)
    k0, l0 = moments.k_bar0, moments.l_bar0
    f_plus, f_minus = phasors(k0, l0, instance)
    ap, am = abs(f_plus), abs(f_minus)

    phi = None
    if ap < EPS_DEAD and am < EPS_DEAD:
        regime = Regime.DEAD
    elif am <= EPS_CIRC * (ap + am):
        regime = Regime.CIRCULAR_MINUS
    elif ap <= EPS_CIRC * (ap + am):
        regime = Regime.CIRCULAR_PLUS
    else:
        # principal log puts Re φ in (-π/2, π/2]
        phi = cmath.log(f_plus / f_minus) / 2j
        regime = Regime.LINEAR_REAL if abs(phi.imag) <= EPS_LIN else Regime.GENERIC

    if phi is None:
        alpha = cmath.sqrt(f_plus * f_minus)
    else:
        alpha = f_plus * cmath.exp(-1j * phi)
    return SpectralParams(omega, f_plus, f_minus, alpha, phi, regime, k0, l0)


def mean_trajectory(spectral: SpectralParams, instance: SearchInstance, t):
    """Vectorised ``(k̄(t), l̄(t))`` for an integer array of times."""
    t = np.asarray(t, dtype=float)
    n, r = instance.n, instance.r
    if spectral.regime.oscillates:
        arg = spectral.omega * t + spectral.phi
        k = math.sqrt((n - r) / r) * spectral.alpha * np.sin(arg)
        l = spectral.alpha * np.cos(arg)
    else:
        fp = np.exp(1j * spectral.omega * t) * spectral.f_plus0
        fm = np.exp(-1j * spectral.omega * t) * spectral.f_minus0
        k = -1j * math.sqrt((n - r) / (4 * r)) * (fp - fm)
        l = (fp + fm) / 2
    return k, l


def mean_amplitudes(spectral: SpectralParams, instance: SearchInstance,
                    t: int) -> tuple[complex, complex]:
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return spectral.k_bar0, spectral.l_bar0
    k, l = mean_trajectory(spectral, instance, t)
    return complex(k), complex(l)


def recursion_step_exact(k_bar: complex, l_bar: complex, instance: SearchInstance):
    """Advance the block means by one iteration using the explicit recursion."""
    kernel = DiffusionKernel.from_means(k_bar, l_bar, instance)
    return kernel.c_t + k_bar, kernel.c_t - l_bar, kernel


def reconstruct_amplitude(moments: InitialMoments, instance: SearchInstance,
                          k_bar_t: complex, l_bar_t: complex, t: int, index: int) -> complex:
    if not 0 <= index < instance.n:
        raise IndexOutOfRange(f"index {index} outside [0, {instance.n})")
    if instance.mask[index]:
        pos = int(np.searchsorted(instance.marked_index, index))
        return k_bar_t + complex(moments.delta_k[pos])
    pos = int(np.searchsorted(instance.unmarked_index, index))
    sign = -1.0 if t % 2 else 1.0
    return l_bar_t + sign * complex(moments.delta_l[pos])


def reconstruct_vector(moments: InitialMoments, instance: SearchInstance,
                       k_bar_t: complex, l_bar_t: complex, t: int) -> np.ndarray:
    """All ``N`` amplitudes after ``t`` iterations, from the means at ``t``."""
    out = np.empty(instance.n, dtype=np.complex128)
    out[instance.marked_index] = k_bar_t + moments.delta_k
    sign = -1.0 if t % 2 else 1.0
    out[instance.unmarked_index] = l_bar_t + sign * moments.delta_l
    return out


def probability_profile(instance: SearchInstance, moments: InitialMoments,
                        spectral: SpectralParams) -> ProbabilityProfile:
    n, r = instance.n, instance.r
    k0, l0 = moments.k_bar0, moments.l_bar0
    period = math.pi / spectral.omega
    if not spectral.regime.oscillates:
        p0 = r * moments.sigma_k_sq + r * abs(k0) ** 2
        return ProbabilityProfile(p0, 0.0, p0, p0, period)
    # r·σ_k² + ½[...] is the normalization-free form of 1 - (N-r)σ_l² - ½[...]
    p_av = r * moments.sigma_k_sq + 0.5 * ((n - r) * abs(l0) ** 2 + r * abs(k0) ** 2)
    delta_p = 0.5 * abs((n - r) * l0 ** 2 + r * k0 ** 2)
    return ProbabilityProfile(p_av, delta_p, p_av + delta_p, p_av - delta_p, period)


def probability_trajectory(instance: SearchInstance, moments: InitialMoments,
                           spectral: SpectralParams, t, profile: ProbabilityProfile | None = None):
    """Vectorised success probability for an array of (possibly real) times."""
    profile = profile or probability_profile(instance, moments, spectral)
    t = np.asarray(t, dtype=float)
    if not spectral.regime.oscillates:
        return np.full(t.shape, profile.p_av)
    return profile.p_av - profile.delta_p * np.cos(2 * (spectral.omega * t + spectral.phi.real))


def success_probability(instance: SearchInstance, moments: InitialMoments,
                        spectral: SpectralParams, t: int) -> float:
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return instance.r * (moments.sigma_k_sq + abs(moments.k_bar0) ** 2)
    return float(probability_trajectory(instance, moments, spectral, t))


def ellipse_geometry(spectral: SpectralParams, instance: SearchInstance) -> EllipseGeometry:
    """Shape of the loci traced by ``l̄(t)`` and ``k̄(t)`` in the complex plane.

    Both loci share the major-axis direction ``arg α``: writing
    ``sin(x + iy) = sin x cosh y + i cos x sinh y`` shows the ``k̄`` ellipse is
    the ``l̄`` ellipse scaled by ``sqrt((N-r)/r)`` and traversed a quarter
    period out of phase, not rotated.
    """
    if not spectral.regime.oscillates:
        raise DegenerateEllipse(f"no ellipse in regime {spectral.regime.value}")
    mod = abs(spectral.alpha)
    eta = cmath.phase(spectral.alpha)
    im = spectral.phi.imag
    b = 0.0 if spectral.regime is Regime.LINEAR_REAL else mod * abs(math.sinh(im))
    return EllipseGeometry(
        eta=eta,
        a=mod * math.cosh(im),
        b=b,
        k_scale=math.sqrt((instance.n - instance.r) / instance.r),
        k_eta=eta,
    )
