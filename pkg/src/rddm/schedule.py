"""Diffusion mathematics: variance schedule and forward/reverse-step algebra.

Tables are precomputed in float64 and immutable after construction. Sampling
helpers take noise explicitly so every stochastic operation is reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

PAPER_BETA_MIN = 0.0001
PAPER_BETA_MAX = 0.2
PAPER_T = 10


@dataclass(frozen=True)
class NoiseSchedule:
    """Per-step beta/alpha/alpha_bar/sigma tables for a T-step diffusion.

    Index convention: position t-1 holds the value for timestep t in [1, T].
    sigma_t^2 = beta_t (fixed reverse variance).
    """

    beta: np.ndarray
    alpha: np.ndarray = field(init=False)
    alpha_bar: np.ndarray = field(init=False)
    sigma: np.ndarray = field(init=False)

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "alpha", 1.0 - beta)
        object.__setattr__(self, "alpha_bar", np.cumprod(1.0 - beta))
        object.__setattr__(self, "sigma", np.sqrt(beta))

    @property
    def T(self) -> int:
        return self.beta.size

    def validate(self) -> "NoiseSchedule":
        b = self.beta
        if b.size < 1:
            raise InvalidInputError("schedule must have T >= 1 steps")
        if not (b[0] > 0 and b[-1] < 1 and np.all(np.diff(b) >= 0)):
            raise InvalidInputError("beta must be non-decreasing within (0, 1)")
        return self


def linear_schedule(
    T: int = PAPER_T, beta_min: float = PAPER_BETA_MIN, beta_max: float = PAPER_BETA_MAX
) -> NoiseSchedule:
    """Fixed linear variance schedule: beta_t interpolates beta_min..beta_max.

    beta_t = beta_min + (t-1) * (beta_max - beta_min) / (T-1); for T == 1 the
    single step uses beta_min.
    """
    if T < 1:
        raise InvalidInputError(f"T must be >= 1, got {T}")
    if not (0 < beta_min <= beta_max < 1):
        raise InvalidInputError(
            f"betas must satisfy 0 < beta_min <= beta_max < 1, got ({beta_min}, {beta_max})"
        )
    if T == 1:
        beta = np.array([beta_min], dtype=np.float64)
    else:
        beta = beta_min + (beta_max - beta_min) * np.arange(T, dtype=np.float64) / (T - 1)
    return NoiseSchedule(beta).validate()


def _check_step(t: int, sched: NoiseSchedule) -> None:
    if not 1 <= t <= sched.T:
        raise InvalidInputError(f"timestep {t} outside [1, {sched.T}]")


def forward_sample(x0: np.ndarray, t: int, eps: np.ndarray, sched: NoiseSchedule) -> np.ndarray:
    """Closed-form forward sample: x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps."""
    _check_step(t, sched)
    x0 = np.asarray(x0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if x0.shape != eps.shape:
        raise InvalidInputError(f"x0 shape {x0.shape} != eps shape {eps.shape}")
    abar = sched.alpha_bar[t - 1]
    return np.sqrt(abar) * x0 + np.sqrt(1.0 - abar) * eps


def roi_forward_sample(
    x0: np.ndarray, t: int, eps: np.ndarray, mask: np.ndarray, sched: NoiseSchedule
) -> np.ndarray:
    """ROI-guided forward sample: noise is injected only where the mask is 1.

    x_t^[m] = sqrt(abar_t) x0 + sqrt(1 - abar_t) (mask * eps). Masked-out
    coordinates equal sqrt(abar_t) x0 exactly (bitwise, same expression as
    forward_sample with zero noise).
    """
    mask = np.asarray(mask, dtype=np.float64)
    if mask.shape != np.shape(x0):
        raise InvalidInputError(f"mask shape {mask.shape} != x0 shape {np.shape(x0)}")
    return forward_sample(x0, t, mask * np.asarray(eps, dtype=np.float64), sched)


def reverse_step_coeffs(t: int, sched: NoiseSchedule) -> tuple[float, float, float]:
    """Scalars (c1, c2, sigma) of one ancestral reverse step at timestep t.

    x_{t-1} = c1 * (x_t - c2 * predicted_noise) + sigma * z with
    c1 = 1/sqrt(alpha_t), c2 = (1 - alpha_t)/sqrt(1 - abar_t), sigma = sqrt(beta_t).
    A hypothetical beta_t = 0 step degenerates to the identity (c2 = 0).
    """
    _check_step(t, sched)
    alpha = sched.alpha[t - 1]
    abar = sched.alpha_bar[t - 1]
    c1 = 1.0 / np.sqrt(alpha)
    c2 = 0.0 if alpha == 1.0 else (1.0 - alpha) / np.sqrt(1.0 - abar)
    return float(c1), float(c2), float(sched.sigma[t - 1])
