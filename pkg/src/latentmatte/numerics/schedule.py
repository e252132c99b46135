"""Deterministic noise schedule for the sampler.

A schedule holds T noise levels sigma_0 > sigma_1 > ... > sigma_{T-1}, all in
(0, 1], with alpha_t = sqrt(1 - sigma_t^2). Step index T denotes the implied
clean endpoint (sigma = 0, alpha = 1), which is where the sampler lands after
its final update.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError, StepOutOfRange
from .rng import SeededRng


@dataclass(frozen=True)
class NoiseSchedule:
    sigmas: np.ndarray  # strictly decreasing, in (0, 1], length T
    alphas: np.ndarray = field(init=False)

    def __post_init__(self):
        sig = np.asarray(self.sigmas, dtype=np.float64)
        if sig.ndim != 1 or sig.size == 0:
            raise ShapeError("sigmas must be a nonempty 1-D sequence")
        if np.any(sig <= 0.0) or np.any(sig > 1.0):
            raise ShapeError("sigmas must lie in (0, 1]")
        if np.any(np.diff(sig) >= 0.0):
            raise ShapeError("sigmas must be strictly decreasing")
        object.__setattr__(self, "sigmas", sig)
        object.__setattr__(self, "alphas", np.sqrt(1.0 - sig * sig))

    @property
    def T(self) -> int:
        return int(self.sigmas.size)

    @classmethod
    def linear(cls, T: int = 30) -> "NoiseSchedule":
        """sigma_t = (T - t) / (T + 1); starts near 1, ends at 1/(T+1)."""
        t = np.arange(T, dtype=np.float64)
        return cls(sigmas=(T - t) / (T + 1.0))

    def sigma(self, t: int) -> float:
        """sigma_t for 0 <= t <= T; t == T is the clean endpoint (0.0)."""
        if not 0 <= t <= self.T:
            raise StepOutOfRange(f"step {t} outside [0, {self.T}]")
        return 0.0 if t == self.T else float(self.sigmas[t])

    def alpha(self, t: int) -> float:
        if not 0 <= t <= self.T:
            raise StepOutOfRange(f"step {t} outside [0, {self.T}]")
        return 1.0 if t == self.T else float(self.alphas[t])


def add_noise(
    x: np.ndarray, t: int, sched: NoiseSchedule, rng: SeededRng
) -> tuple[np.ndarray, np.ndarray]:
    """Noise x to level t: returns (alpha_t*x + sigma_t*eps, eps).

    eps is returned so callers can re-inject the exact same noise later.
    t == sched.T is allowed and returns x unchanged (clean endpoint).
    """
    if not 0 <= t <= sched.T:
        raise StepOutOfRange(f"step {t} outside [0, {sched.T}]")
    x = np.asarray(x, dtype=np.float32)
    eps = rng.normal(x.shape)
    if t == sched.T:
        return x.copy(), eps
    alpha = np.float32(sched.alpha(t))
    sigma = np.float32(sched.sigma(t))
    return alpha * x + sigma * eps, eps
