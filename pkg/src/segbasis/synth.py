"""Deterministic synthetic function sets and Gaussian noise injection.

The generator is a stand-in for spectra-like data: a mean curve made of
Gaussian bumps of widely varying width, per-function amplitude jitter, and an
exact affine rescale of the pooled values onto a target range.

Randomness is pinned down to the bit: splitmix64 streams produce 53-bit
uniforms, and normals come from the Box-Muller transform on consecutive
uniform pairs.  Each function draws from its own stream, seeded from one
master stream, so generation is reproducible and order-independent across
functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FunctionalDataset, new_dataset

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 generator: 64-bit state, one mix per output."""

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_uint64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_uint64() >> 11) * (2.0**-53)

    def normal_pair(self) -> tuple[float, float]:
        """Two independent standard normals via Box-Muller.

        Uses log1p(-u1) so the argument to log never hits zero.
        """
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log1p(-u1))
        theta = 2.0 * math.pi * u2
        return r * math.cos(theta), r * math.sin(theta)


class _NormalStream:
    """Caches the second Box-Muller draw so normals come out one at a time."""

    def __init__(self, seed: int) -> None:
        self._rng = SplitMix64(seed)
        self._spare: float | None = None

    def next(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        z0, z1 = self._rng.normal_pair()
        self._spare = z1
        return z0

    def take(self, count: int) -> np.ndarray:
        return np.array([self.next() for _ in range(count)])


def _function_seeds(seed: int, n: int) -> list[int]:
    """One derived seed per function, mixed from the master seed."""
    master = SplitMix64(seed)
    return [master.next_uint64() for _ in range(n)]


Bump = tuple[float, float, float]  # (center in [0,1], width > 0, amplitude)

# Widths span 0.0025 to 0.08: broad rolling features, compact peaks, and one
# near-point spike (centered on a grid point of the default 256-point grid).
DEFAULT_BUMPS: tuple[Bump, ...] = (
    (0.10, 0.015, 1.0),
    (0.30, 0.018, -0.8),
    (112 / 255, 0.0025, 0.4),
    (0.50, 0.08, 0.6),
    (0.68, 0.012, 0.9),
    (0.85, 0.015, -0.6),
)


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the synthetic generator.

    The default shape mimics a spectrum whose smoothness varies along the
    range: broad rolling features next to narrow peaks, 124 curves on 256
    points, rescaled onto [-0.265, 0.581].
    """

    n: int = 124
    m: int = 256
    bumps: tuple[Bump, ...] = DEFAULT_BUMPS
    jitter: float = 0.2
    lo: float = -0.265
    hi: float = 0.581

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.m < 2:
            raise ValueError("m must be at least 2")
        if any(w <= 0 for _, w, _ in self.bumps):
            raise ValueError("bump widths must be positive")
        if not self.lo < self.hi:
            raise ValueError("value range is empty: lo must be below hi")


def generate(spec: SynthSpec, seed: int) -> FunctionalDataset:
    """Deterministic dataset for (spec, seed).

    Functions are the bump mixture with per-function, per-bump amplitude
    jitter (scale ``spec.jitter``), on an equispaced grid over [0, 1], then
    rescaled affinely so the pooled minimum and maximum hit ``spec.lo`` and
    ``spec.hi`` exactly.  Raises "flat range" when the raw values are all
    equal and no such rescale exists.
    """
    spec.validate()
    grid = np.linspace(0.0, 1.0, spec.m)
    if spec.bumps:
        shapes = np.stack(
            [np.exp(-0.5 * ((grid - c) / w) ** 2) for c, w, _ in spec.bumps]
        )
        base_amps = np.array([a for _, _, a in spec.bumps])
    else:
        shapes = np.zeros((0, spec.m))
        base_amps = np.zeros(0)
    raw = np.empty((spec.n, spec.m), dtype=np.float64)
    for i, sub_seed in enumerate(_function_seeds(seed, spec.n)):
        normals = _NormalStream(sub_seed)
        amps = base_amps * (1.0 + spec.jitter * normals.take(base_amps.size))
        raw[i] = amps @ shapes
    mn = raw.min()
    mx = raw.max()
    if mx == mn:
        raise ValueError("flat range: generated values are constant, cannot rescale")
    scaled = spec.lo + (raw - mn) / (mx - mn) * (spec.hi - spec.lo)
    np.clip(scaled, spec.lo, spec.hi, out=scaled)
    scaled[raw == mn] = spec.lo
    scaled[raw == mx] = spec.hi
    return new_dataset(grid, scaled)


def add_noise(dataset: FunctionalDataset, sigma: float, seed: int) -> FunctionalDataset:
    """Add i.i.d. N(0, sigma^2) noise to every entry.

    Each function gets its own derived noise stream, applied left to right.
    sigma = 0 returns the dataset unchanged.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return dataset
    noisy = dataset.values.copy()
    for i, sub_seed in enumerate(_function_seeds(seed, dataset.n)):
        noisy[i] += sigma * _NormalStream(sub_seed).take(dataset.m)
    return new_dataset(dataset.grid, noisy)
