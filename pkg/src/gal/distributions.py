"""Seeded initial-state families.

Randomness comes from NumPy's ``PCG64`` bit generator seeded with the
64-bit seed of a :class:`DistributionSpec`; the generator name is exported
as :data:`GENERATOR_NAME` so run records can say how a vector was produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .core import SearchInstance, StateVector
from .errors import UnknownKind, ValidationError, WorstCaseImpossible

GENERATOR_NAME = "numpy.PCG64"


class Kind(str, Enum):
    UNIFORM = "uniform"
    NOISY_UNIFORM = "noisy_uniform"
    RANDOM_COMPLEX = "random_complex"
    WORST_CASE = "worst_case"
    CIRCULAR = "circular"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class DistributionSpec:
    kind: Kind
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", Kind(self.kind))
        except ValueError:
            raise UnknownKind(f"unknown distribution kind {self.kind!r}") from None
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError("seed must be an unsigned 64-bit integer")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def _normalized(amps: np.ndarray) -> np.ndarray:
    return amps / math.sqrt(float(np.vdot(amps, amps).real))


def _standard_complex(rng: np.random.Generator, size: int) -> np.ndarray:
    z = rng.standard_normal((size, 2))
    return (z[:, 0] + 1j * z[:, 1]) / math.sqrt(2.0)


def generate(spec: DistributionSpec, instance: SearchInstance) -> StateVector:
    n, r = instance.n, instance.r
    kind = spec.kind

    if kind is Kind.UNIFORM:
        amps = np.full(n, 1.0 / math.sqrt(n), dtype=np.complex128)

    elif kind is Kind.NOISY_UNIFORM:
        sigma = float(spec.params.get("noise_sigma", 0.0))
        if sigma < 0:
            raise ValidationError("noise_sigma must be nonnegative")
        amps = np.full(n, 1.0 / math.sqrt(n), dtype=np.complex128)
        if sigma > 0:
            # per-component std sigma/sqrt(2N), i.e. complex std sigma/sqrt(N)
            amps += sigma / math.sqrt(n) * _standard_complex(_rng(spec.seed), n)
            amps = _normalized(amps)

    elif kind is Kind.RANDOM_COMPLEX:
        amps = _normalized(_standard_complex(_rng(spec.seed), n))

    elif kind is Kind.WORST_CASE:
        if n - r < 2:
            raise WorstCaseImpossible(f"worst case needs N - r >= 2, got {n - r}")
        count = (n - r) // 2 * 2
        c = 1.0 / math.sqrt(count)
        amps = np.zeros(n, dtype=np.complex128)
        signs = np.where(np.arange(count) % 2 == 0, c, -c)
        amps[instance.unmarked_index[:count]] = signs

    elif kind is Kind.CIRCULAR:
        branch = spec.params.get("branch", "minus")
        if branch not in ("plus", "minus"):
            raise ValidationError(f"circular branch must be 'plus' or 'minus', got {branch!r}")
        # "minus" zeroes f₋ (l̄ = +i·s·k̄), "plus" zeroes f₊
        s = math.sqrt(r / (n - r))
        k = 1.0 / math.sqrt(2 * r)
        l = (1j if branch == "minus" else -1j) * s * k
        amps = np.empty(n, dtype=np.complex128)
        amps[instance.marked_index] = k
        amps[instance.unmarked_index] = l

    elif kind is Kind.EXPLICIT:
        raw = spec.params.get("amplitudes")
        if raw is None:
            raise ValidationError("explicit distribution needs 'amplitudes'")
        amps = np.asarray(raw, dtype=np.complex128).reshape(-1)
        if amps.size != n:
            raise ValidationError(f"explicit amplitudes have length {amps.size}, N={n}")
        amps = _normalized(amps)

    else:  # pragma: no cover - Kind is exhaustive
        raise UnknownKind(kind)

    return StateVector(amps, norm_tol=1e-12)
