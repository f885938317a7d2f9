"""Shared domain types: search instances, state vectors and amplitude moments."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .errors import (
    DuplicateIndex,
    IndexOutOfRange,
    LengthMismatch,
    NormError,
    RMarkedOutOfRange,
    ValidationError,
)


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances used for validation and cross-checks.

    ``norm`` bounds the deviation of a state's squared norm from one,
    ``identity`` bounds algebraic identities between derived quantities and
    ``compare`` is the default analytic-vs-simulation agreement threshold.
    """

    norm: float = 1e-9
    identity: float = 1e-12
    compare: float = 1e-10

    def updated(self, overrides: dict | None) -> "Tolerances":
        if not overrides:
            return self
        unknown = set(overrides) - {"norm", "identity", "compare"}
        if unknown:
            raise ValidationError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT_TOLERANCES = Tolerances()


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SearchInstance:
    """``n`` basis states of which the indices in ``marked`` are solutions."""

    n: int
    marked: tuple[int, ...]
    mask: np.ndarray = field(init=False, repr=False, compare=False)
    marked_index: np.ndarray = field(init=False, repr=False, compare=False)
    unmarked_index: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.marked)] = True
        object.__setattr__(self, "mask", _frozen(mask))
        object.__setattr__(self, "marked_index", _frozen(np.flatnonzero(mask)))
        object.__setattr__(self, "unmarked_index", _frozen(np.flatnonzero(~mask)))

    @property
    def r(self) -> int:
        return len(self.marked)

    @property
    def is_power_of_two(self) -> bool:
        return self.n & (self.n - 1) == 0


def validate_instance(n: int, marked: Iterable[int]) -> SearchInstance:
    """Build a :class:`SearchInstance`, enforcing ``N >= 2`` and ``1 <= r <= N/2``."""
    n = int(n)
    if n < 2:
        raise ValidationError(f"N must be at least 2, got {n}")
    indices = [int(i) for i in marked]
    if len(set(indices)) != len(indices):
        dupes = sorted({i for i in indices if indices.count(i) > 1})
        raise DuplicateIndex(f"duplicate marked indices: {dupes}")
    bad = [i for i in indices if not 0 <= i < n]
    if bad:
        raise IndexOutOfRange(f"marked indices out of range [0, {n}): {bad}")
    r = len(indices)
    if r < 1 or 2 * r > n:
        raise RMarkedOutOfRange(f"need 1 <= r <= N/2, got r={r}, N={n}")
    return SearchInstance(n, tuple(sorted(indices)))


def instance_with_last(n: int, r: int) -> SearchInstance:
    """Instance whose marked states are the last ``r`` indices."""
    return validate_instance(n, range(n - r, n))


@dataclass(frozen=True)
class StateVector:
    """Read-only complex amplitude vector with unit norm."""

    amplitudes: np.ndarray

    def __init__(self, amplitudes, norm_tol: float = DEFAULT_TOLERANCES.norm):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        drift = abs(np.vdot(amps, amps).real - 1.0)
        if not drift <= norm_tol:
            raise NormError(f"state norm deviates from 1 by {drift:.3e}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    def __len__(self):
        return self.amplitudes.size

    @property
    def norm_drift(self) -> float:
        return abs(np.vdot(self.amplitudes, self.amplitudes).real - 1.0)


@dataclass(frozen=True)
class InitialMoments:
    k_bar0: complex
    l_bar0: complex
    sigma_k_sq: float
    sigma_l_sq: float
    delta_k: np.ndarray
    delta_l: np.ndarray

    def normalization(self) -> float:
        """``r(σ_k² + |k̄|²) + (N-r)(σ_l² + |l̄|²)``, which equals the squared norm."""
        r, rest = self.delta_k.size, self.delta_l.size
        return (r * (self.sigma_k_sq + abs(self.k_bar0) ** 2)
                + rest * (self.sigma_l_sq + abs(self.l_bar0) ** 2))


def moments_of(vector: StateVector | np.ndarray, instance: SearchInstance,
               tol: Tolerances = DEFAULT_TOLERANCES) -> InitialMoments:
    """Block means, variances and per-state deviations of a state vector.

    Parameters
    ----------
    vector : StateVector or ndarray
        Amplitudes at the time the moments are taken.
    instance : SearchInstance
        Determines which indices form the marked block.
    tol : Tolerances
        ``identity`` bounds the zero-mean checks of the deviations and
        ``norm`` bounds the normalization decomposition.
    """
    amps = vector.amplitudes if isinstance(vector, StateVector) else np.asarray(vector)
    if amps.size != instance.n:
        raise LengthMismatch(f"vector has length {amps.size}, instance has N={instance.n}")

    k = amps[instance.marked_index]
    l = amps[instance.unmarked_index]
    k_bar, l_bar = complex(k.mean()), complex(l.mean())
    delta_k, delta_l = k - k_bar, l - l_bar
    moments = InitialMoments(
        k_bar0=k_bar,
        l_bar0=l_bar,
        sigma_k_sq=float(np.mean(delta_k.real ** 2 + delta_k.imag ** 2)),
        sigma_l_sq=float(np.mean(delta_l.real ** 2 + delta_l.imag ** 2)),
        delta_k=_frozen(delta_k),
        delta_l=_frozen(delta_l),
    )
    if abs(delta_k.mean()) > tol.identity or abs(delta_l.mean()) > tol.identity:
        raise ValidationError("deviation arrays do not average to zero")
    if isinstance(vector, StateVector) and abs(moments.normalization() - 1.0) > tol.norm:
        raise NormError("moments violate the normalization decomposition")
    return moments


@dataclass(frozen=True)
class DiffusionKernel:
    """``c_t`` is the shift applied by one iteration; ``x_t`` the post-flip global mean."""

    c_t: complex
    x_t: complex

    @classmethod
    def from_means(cls, k_bar: complex, l_bar: complex, instance: SearchInstance):
        n, r = instance.n, instance.r
        x = ((n - r) * l_bar - r * k_bar) / n
        return cls(c_t=2 * x, x_t=x)
