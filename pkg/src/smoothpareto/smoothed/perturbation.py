"""phi-perturbed numbers: densities bounded by phi, sampled by inverse CDF."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation

UNIT = (0.0, 1.0)
SYMMETRIC = (-1.0, 1.0)

# spawn-key offset for the adversary stream, far from any trial index
_ADVERSARY_KEY = 2**63 + 0x616476


def trial_seed(master_seed: int, trial: int) -> int:
    """64-bit seed of one trial; depends only on ``(master_seed, trial)``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(trial),))
    return int(ss.generate_state(1, np.uint64)[0])


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(trial_seed(master_seed, trial))


def adversary_rng(seed: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(_ADVERSARY_KEY,))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class UniformDensity:
    """Uniform on ``[start, start + 1/phi]``."""

    start: float
    phi: float

    @property
    def support(self) -> tuple[float, float]:
        return (self.start, self.start + 1.0 / self.phi)

    @property
    def peak(self) -> float:
        return self.phi

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        return np.where((x >= lo) & (x <= hi), self.phi, 0.0)

    def ppf(self, u):
        return self.start + np.asarray(u, dtype=float) / self.phi


@dataclass(frozen=True)
class TriangularDensity:
    """Symmetric triangle of base ``2/phi`` around ``center``; its peak is phi."""

    center: float
    phi: float

    @property
    def half_width(self) -> float:
        return 1.0 / self.phi

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.half_width, self.center + self.half_width)

    @property
    def peak(self) -> float:
        return self.phi

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        h = self.half_width
        return np.clip(self.phi * (1.0 - np.abs(x - self.center) / h), 0.0, None)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        h = self.half_width
        left = self.center - h + h * np.sqrt(2.0 * u)
        right = self.center + h - h * np.sqrt(2.0 * (1.0 - u))
        return np.where(u < 0.5, left, right)


class PerturbationKind(enum.Enum):
    UNIFORM_INTERVAL = "uniform_interval"
    BOUNDED_DENSITY = "bounded_density"


SHAPES = ("uniform", "triangular")


@dataclass(frozen=True)
class PerturbationModel:
    """How the perturbed coefficients of an instance are drawn.

    ``UNIFORM_INTERVAL`` draws coordinate i uniformly from an interval of
    length 1/phi starting at ``starts[i]``.  ``BOUNDED_DENSITY`` uses
    ``densities[i]`` (any object with ``support``, ``peak``, ``pdf``, ``ppf``)
    or, when none are given, a built-in ``shape``.  Without explicit
    placements the adversary stream picks them, once per experiment.
    """

    kind: PerturbationKind = PerturbationKind.UNIFORM_INTERVAL
    phi: float = 1.0
    value_range: tuple = UNIT
    starts: tuple | None = None
    densities: tuple | None = None
    shape: str = "uniform"

    def __post_init__(self):
        phi = self.phi
        if isinstance(phi, bool) or not isinstance(phi, (int, float)) or not math.isfinite(phi):
            raise ContractViolation(f"phi must be a finite number, got {phi!r}")
        if phi < 1:
            raise ContractViolation(f"phi must be >= 1, got {phi}")
        object.__setattr__(self, "phi", float(phi))
        lo, hi = (float(v) for v in self.value_range)
        if (lo, hi) not in (UNIT, SYMMETRIC):
            raise ContractViolation(f"value_range must be [0,1] or [-1,1], got {self.value_range}")
        object.__setattr__(self, "value_range", (lo, hi))
        if self.shape not in SHAPES:
            raise ContractViolation(f"unknown density shape {self.shape!r}")
        triangle = self.kind is PerturbationKind.BOUNDED_DENSITY and self.shape == "triangular"
        if triangle and 2.0 / self.phi > hi - lo:
            raise ContractViolation(
                f"a triangle of base 2/phi={2.0 / self.phi} does not fit in [{lo}, {hi}]"
            )
        if self.starts is not None:
            if self.kind is not PerturbationKind.UNIFORM_INTERVAL:
                raise ContractViolation("starts only apply to UNIFORM_INTERVAL")
            object.__setattr__(self, "starts", tuple(float(a) for a in self.starts))
            for a in self.starts:
                self._check_support((a, a + 1.0 / self.phi))
        if self.densities is not None:
            if self.kind is not PerturbationKind.BOUNDED_DENSITY:
                raise ContractViolation("densities only apply to BOUNDED_DENSITY")
            object.__setattr__(self, "densities", tuple(self.densities))
            for f in self.densities:
                self._check_support(f.support)
                if f.peak > self.phi * (1 + 1e-12):
                    raise ContractViolation(f"density peak {f.peak} exceeds phi={self.phi}")

    def _check_support(self, support) -> None:
        lo, hi = self.value_range
        a, b = support
        tol = 1e-12
        if a < lo - tol or b > hi + tol:
            raise ContractViolation(f"support [{a}, {b}] escapes [{lo}, {hi}]")

    def densities_for(self, n: int, adversary: np.random.Generator) -> list:
        """Per-coordinate densities; placements not fixed by the model come from ``adversary``."""
        if self.densities is not None:
            if len(self.densities) != n:
                raise ContractViolation(
                    f"model has {len(self.densities)} densities, instance needs {n}"
                )
            return list(self.densities)
        if self.starts is not None:
            if len(self.starts) != n:
                raise ContractViolation(f"model has {len(self.starts)} starts, instance needs {n}")
            return [UniformDensity(a, self.phi) for a in self.starts]
        lo, hi = self.value_range
        width = 1.0 / self.phi
        if self.kind is PerturbationKind.UNIFORM_INTERVAL or self.shape == "uniform":
            starts = lo + adversary.random(n) * (hi - lo - width)
            return [UniformDensity(float(a), self.phi) for a in starts]
        centers = lo + width + adversary.random(n) * (hi - lo - 2 * width)
        return [TriangularDensity(float(c), self.phi) for c in centers]

    def sample(self, densities: list, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(len(densities))
        out = np.empty(len(densities))
        for i, (f, ui) in enumerate(zip(densities, u)):
            out[i] = float(f.ppf(ui))
        lo, hi = self.value_range
        return np.clip(out, lo, hi)
