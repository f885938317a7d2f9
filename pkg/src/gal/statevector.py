"""Brute-force state-vector execution of the search iteration.

One iteration negates the marked amplitudes and then reflects every
amplitude about the global mean.  The reflection has two interchangeable
implementations: a direct O(N) pass, and the Hadamard / phase-on-|0> /
Hadamard circuit realised with an in-place fast Walsh-Hadamard transform.
The circuit form equals the negated direct reflection, so the two agree up
to a global phase of -1 per iteration.

All kernels here mutate a caller-owned buffer and allocate nothing per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .core import DEFAULT_TOLERANCES, SearchInstance, StateVector
from .errors import LengthMismatch, NotPowerOfTwo, ValidationError

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class DiffusionMethod(str, Enum):
    DIRECT = "direct"
    WALSH_HADAMARD = "wht"


@dataclass(frozen=True)
class SimConfig:
    diffusion_method: DiffusionMethod = DiffusionMethod.DIRECT
    norm_check_every: int = 64

    def __post_init__(self):
        object.__setattr__(self, "diffusion_method", DiffusionMethod(self.diffusion_method))
        if self.norm_check_every < 1:
            raise ValidationError("norm_check_every must be positive")

    def check(self, n: int) -> None:
        if self.diffusion_method is DiffusionMethod.WALSH_HADAMARD and n & (n - 1):
            raise NotPowerOfTwo(f"Walsh-Hadamard diffusion needs N = 2^n, got N={n}")


# in-place kernels ----------------------------------------------------------

def flip_inplace(buf: np.ndarray, mask: np.ndarray) -> None:
    np.negative(buf, out=buf, where=mask)


def reflect_inplace(buf: np.ndarray) -> None:
    """``a_i <- 2·mean(a) - a_i``."""
    mean = buf.mean()
    np.subtract(2.0 * mean, buf, out=buf)


def scratch_size(n: int) -> int:
    return 3 * (n // 2)


def fwht_inplace(buf: np.ndarray, scratch: np.ndarray) -> None:
    """Orthonormal Walsh-Hadamard transform of ``buf`` in place.

    ``scratch`` must hold ``scratch_size(len(buf))`` complex values.  Each
    butterfly stage is scaled by 1/sqrt(2), so the transform is its own inverse.
    """
    n = buf.size
    half = n // 2
    a, b, d = scratch[:half], scratch[half:2 * half], scratch[2 * half:3 * half]
    h = 1
    while h < n:
        pairs = buf.reshape(-1, 2, h)
        top, bottom = pairs[:, 0, :], pairs[:, 1, :]
        # arithmetic stays on contiguous scratch; strided ufunc outputs would buffer
        np.copyto(a.reshape(-1, h), top)
        np.copyto(b.reshape(-1, h), bottom)
        np.subtract(a, b, out=d)
        np.add(a, b, out=a)
        np.multiply(a, _INV_SQRT2, out=a)
        np.multiply(d, _INV_SQRT2, out=d)
        np.copyto(top, a.reshape(-1, h))
        np.copyto(bottom, d.reshape(-1, h))
        h *= 2


def diffusion_wht_inplace(buf: np.ndarray, scratch: np.ndarray) -> None:
    fwht_inplace(buf, scratch)
    buf[0] = -buf[0]
    fwht_inplace(buf, scratch)


# value-level operations ----------------------------------------------------

def _as_array(vector) -> np.ndarray:
    if isinstance(vector, StateVector):
        return vector.amplitudes
    return np.asarray(vector, dtype=np.complex128)


def _like(vector, amps: np.ndarray):
    if isinstance(vector, StateVector):
        return StateVector(amps, norm_tol=np.inf)
    return amps


def oracle_flip(vector, instance: SearchInstance):
    """Negate the marked amplitudes, returning a new vector of the input's kind."""
    amps = _as_array(vector).copy()
    if amps.size != instance.n:
        raise LengthMismatch(f"vector has length {amps.size}, instance has N={instance.n}")
    flip_inplace(amps, instance.mask)
    return _like(vector, amps)


def invert_about_average(vector):
    amps = _as_array(vector).copy()
    reflect_inplace(amps)
    return _like(vector, amps)


def diffusion_wht(vector):
    """Hadamard, phase pi on |0>, Hadamard.  Equals ``-invert_about_average``."""
    amps = _as_array(vector).copy()
    n = amps.size
    if n & (n - 1):
        raise NotPowerOfTwo(f"Walsh-Hadamard transform needs N = 2^n, got N={n}")
    diffusion_wht_inplace(amps, np.empty(scratch_size(n), dtype=np.complex128))
    return _like(vector, amps)


def marked_probability(vector, instance: SearchInstance) -> float:
    amps = _as_array(vector)
    k = amps[instance.marked_index]
    return float(np.sum(k.real ** 2 + k.imag ** 2))


def global_phase(a, b) -> float:
    """Least-squares phase ``θ`` aligning ``e^{iθ}·b`` to ``a``."""
    return float(np.angle(np.vdot(_as_array(b), _as_array(a))))


def phase_aligned_distance(a, b) -> float:
    """``max_i |a_i - e^{iθ} b_i|`` at the best global phase ``θ``."""
    a, b = _as_array(a), _as_array(b)
    return float(np.max(np.abs(a - np.exp(1j * global_phase(a, b)) * b)))


# runner ----------------------------------------------------------------------

class Simulator:
    """Owns one state buffer and advances it one iteration at a time.

    Parameters
    ----------
    instance : SearchInstance
    init : StateVector or array_like
        Copied into a private buffer; the caller's array is never touched.
    config : SimConfig
        Diffusion implementation and norm-audit cadence.

    The norm is audited every ``config.norm_check_every`` steps and the worst
    drift seen is kept in ``max_norm_drift``.  The state is never renormalized.
    """

    def __init__(self, instance: SearchInstance, init, config: SimConfig = SimConfig()):
        config.check(instance.n)
        self.instance = instance
        self.config = config
        self.buf = np.array(_as_array(init), dtype=np.complex128, copy=True)
        if self.buf.size != instance.n:
            raise LengthMismatch(f"vector has length {self.buf.size}, instance has N={instance.n}")
        self._mask = instance.mask
        self._wht = config.diffusion_method is DiffusionMethod.WALSH_HADAMARD
        self._scratch = np.empty(scratch_size(instance.n), dtype=np.complex128) if self._wht else None
        self.t = 0
        self.max_norm_drift = self.norm_drift()

    def norm_drift(self) -> float:
        return abs(float(np.vdot(self.buf, self.buf).real) - 1.0)

    def step(self) -> None:
        flip_inplace(self.buf, self._mask)
        if self._wht:
            diffusion_wht_inplace(self.buf, self._scratch)
        else:
            reflect_inplace(self.buf)
        self.t += 1
        if self.t % self.config.norm_check_every == 0:
            self.max_norm_drift = max(self.max_norm_drift, self.norm_drift())

    def run(self, steps: int, on_step: Callable[[int, np.ndarray], None] | None = None) -> None:
        for _ in range(steps):
            self.step()
            if on_step is not None:
                on_step(self.t, self.buf)

    def means(self) -> tuple[complex, complex]:
        return (complex(self.buf[self.instance.marked_index].mean()),
                complex(self.buf[self.instance.unmarked_index].mean()))

    def marked_probability(self) -> float:
        return marked_probability(self.buf, self.instance)

    def state(self, norm_tol: float = DEFAULT_TOLERANCES.norm) -> StateVector:
        return StateVector(self.buf, norm_tol=norm_tol)


def grover_run(instance: SearchInstance, init, t: int, config: SimConfig = SimConfig(),
               on_step: Callable[[int, np.ndarray], None] | None = None) -> StateVector:
    """Apply ``t`` iterations to ``init``.

    ``on_step(t, buffer)`` is called once for ``t = 0`` and after every
    iteration; the buffer is live and must be copied if kept.  The returned
    state is norm-checked, so excess drift raises :class:`~gal.errors.NormError`.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    sim = Simulator(instance, init, config)
    if on_step is not None:
        on_step(0, sim.buf)
    sim.run(t, on_step)
    return sim.state()
