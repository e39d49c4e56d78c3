"""Disentangled diffusion training objective and samplers, plus the DDPM baseline.

Training draws one timestep and one noise vector per window, noises the whole
signal for the region denoiser and only the ROI for the ROI denoiser, and
optimizes

    loss = lambda1 * ||mask*eps - eps_theta(x_t^m, ppg, t)||^2
         + lambda2 * ||x_t^m    - rho_phi(x_t, ppg, t)||^2

with mean reduction over batch and coordinates. The two terms are separable:
the first never touches rho_phi's parameters and the second never touches
eps_theta's. Sampling follows the two-network reverse loop (the region
denoiser output feeds the ROI denoiser), or the standard one-network
ancestral loop for the baseline.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import torch
import torch.nn.functional as F

from .dsp import PairedWindow, Signal, SignalKind
from .errors import InvalidInputError, NumericError
from .net import Denoiser
from .qrs import build_roi_mask, detect_rpeaks
from .schedule import NoiseSchedule, reverse_step_coeffs

PAPER_LAMBDAS = (100.0, 1.0)
PAPER_GAMMA = 32


@dataclass
class RddmModel:
    """The two conditioned denoisers plus their diffusion schedule and ROI width."""

    eps_theta: Denoiser
    rho_phi: Denoiser
    sched: NoiseSchedule
    gamma: int = PAPER_GAMMA

    def __post_init__(self):
        if isinstance(self.eps_theta, Denoiser) and isinstance(self.rho_phi, Denoiser):
            if self.eps_theta.config != self.rho_phi.config:
                raise InvalidInputError("eps_theta and rho_phi must share a config")

    def parameters(self):
        yield from self.eps_theta.parameters()
        yield from self.rho_phi.parameters()

    def named_parameters(self):
        for name, p in self.eps_theta.named_parameters():
            yield f"eps_theta.{name}", p
        for name, p in self.rho_phi.named_parameters():
            yield f"rho_phi.{name}", p

    @property
    def eval_count(self) -> int:
        return self.eps_theta.eval_count + self.rho_phi.eval_count


@dataclass(frozen=True)
class TrainStepReport:
    """Losses of one optimization step; loss_roi/loss_region are the raw
    (un-weighted) mean-squared residuals of the two objective terms."""

    loss_total: float
    loss_roi: float
    loss_region: float
    grad_norm: float


@dataclass(frozen=True)
class Batch:
    """Training tensors: condition, target, and per-window ROI masks."""

    ppg: torch.Tensor
    ecg: torch.Tensor
    mask: torch.Tensor

    def __len__(self) -> int:
        return self.ecg.size(0)

    def __getitem__(self, sel) -> "Batch":
        return Batch(self.ppg[sel], self.ecg[sel], self.mask[sel])


def window_mask(win: PairedWindow, gamma: int) -> np.ndarray:
    """ROI mask of a training window, from peaks detected on its clean ECG."""
    peaks = detect_rpeaks(Signal(win.ecg, win.rate_hz, SignalKind.ECG))
    return build_roi_mask(peaks, len(win.ecg), gamma).bits


def make_batch(
    windows: Sequence[PairedWindow], gamma: int, dtype: torch.dtype = torch.float32
) -> Batch:
    """Stack windows into tensors, detecting ROI masks from the clean ECGs."""
    ppg = torch.tensor(np.stack([w.ppg for w in windows]), dtype=dtype)
    ecg = torch.tensor(np.stack([w.ecg for w in windows]), dtype=dtype)
    masks = np.stack([window_mask(w, gamma) for w in windows])
    return Batch(ppg, ecg, torch.tensor(masks, dtype=dtype))


def _sched_column(values: np.ndarray, t_idx: torch.Tensor, dtype: torch.dtype) -> torch.Tensor:
    col = torch.from_numpy(values).to(dtype)[t_idx - 1]
    return col.unsqueeze(1)


def _draw(batch: Batch, sched: NoiseSchedule, rng: torch.Generator):
    """Sample per-window timesteps and noise, returning all Algorithm-1 tensors."""
    B, L = batch.ecg.shape
    dtype = batch.ecg.dtype
    t_idx = torch.randint(1, sched.T + 1, (B,), generator=rng)
    eps = torch.randn(B, L, generator=rng, dtype=dtype)
    abar = _sched_column(sched.alpha_bar, t_idx, dtype)
    sqrt_ab, sqrt_1mab = abar.sqrt(), (1.0 - abar).sqrt()
    x_t = sqrt_ab * batch.ecg + sqrt_1mab * eps
    eps_m = batch.mask * eps
    x_tm = sqrt_ab * batch.ecg + sqrt_1mab * eps_m
    return t_idx, eps, eps_m, x_t, x_tm


def rddm_objective(
    model: RddmModel, batch: Batch, t_idx: torch.Tensor, eps: torch.Tensor
) -> tuple[torch.Tensor, torch.Tensor]:
    """Raw per-term losses for fixed (t, eps) draws; used for gradient checks."""
    dtype = batch.ecg.dtype
    abar = _sched_column(model.sched.alpha_bar, t_idx, dtype)
    sqrt_ab, sqrt_1mab = abar.sqrt(), (1.0 - abar).sqrt()
    x_t = sqrt_ab * batch.ecg + sqrt_1mab * eps
    eps_m = batch.mask * eps
    x_tm = sqrt_ab * batch.ecg + sqrt_1mab * eps_m
    loss_roi = F.mse_loss(model.eps_theta(x_tm, batch.ppg, t_idx), eps_m)
    loss_region = F.mse_loss(model.rho_phi(x_t, batch.ppg, t_idx), x_tm)
    return loss_roi, loss_region


def _finish_step(loss, parameters_of, optimizer) -> float:
    if not torch.isfinite(loss):
        raise NumericError(f"non-finite training loss: {loss.item()}")
    grad_norm = 0.0
    if optimizer is not None:
        optimizer.zero_grad(set_to_none=True)
        loss.backward()
        sq = 0.0
        for p in parameters_of():
            if p.grad is not None:
                sq += float(p.grad.detach().square().sum())
        grad_norm = sq**0.5
        optimizer.step()
    return grad_norm


def rddm_train_step(
    model: RddmModel,
    batch: Batch,
    rng: torch.Generator,
    lambdas: tuple[float, float] = PAPER_LAMBDAS,
    optimizer: torch.optim.Optimizer | None = None,
) -> TrainStepReport:
    """One disentangled training step; applies ``optimizer`` if given."""
    if len(batch) == 0:
        raise InvalidInputError("batch must be non-empty")
    l1, l2 = lambdas
    t_idx, eps, eps_m, x_t, x_tm = _draw(batch, model.sched, rng)
    x_tp = model.rho_phi(x_t, batch.ppg, t_idx)
    pred = model.eps_theta(x_tm, batch.ppg, t_idx)
    loss_roi = F.mse_loss(pred, eps_m)
    loss_region = F.mse_loss(x_tp, x_tm)
    loss = l1 * loss_roi + l2 * loss_region
    grad_norm = _finish_step(loss, lambda: model.parameters(), optimizer)
    roi, region = float(loss_roi.detach()), float(loss_region.detach())
    return TrainStepReport(l1 * roi + l2 * region, roi, region, grad_norm)


def ddpm_train_step(
    denoiser: Denoiser,
    batch: Batch,
    rng: torch.Generator,
    sched: NoiseSchedule,
    optimizer: torch.optim.Optimizer | None = None,
) -> TrainStepReport:
    """One conditional DDPM step: predict the full noise from x_t."""
    if len(batch) == 0:
        raise InvalidInputError("batch must be non-empty")
    t_idx, eps, _, x_t, _ = _draw(batch, sched, rng)
    loss = F.mse_loss(denoiser(x_t, batch.ppg, t_idx), eps)
    grad_norm = _finish_step(loss, lambda: denoiser.parameters(), optimizer)
    value = float(loss.detach())
    return TrainStepReport(value, value, 0.0, grad_norm)


def _as_cond(cond, dtype) -> tuple[torch.Tensor, bool]:
    if isinstance(cond, np.ndarray):
        cond = torch.from_numpy(np.ascontiguousarray(cond))
    cond = cond.to(dtype)
    squeeze = cond.dim() == 1
    return torch.atleast_2d(cond), squeeze


def _check_finite(x: torch.Tensor, t: int) -> None:
    if not torch.isfinite(x).all():
        raise NumericError(f"non-finite sample at reverse step t={t}", step=t)


@torch.no_grad()
def rddm_sample(
    model: RddmModel,
    cond,
    rng: torch.Generator,
    sched: NoiseSchedule | None = None,
) -> torch.Tensor:
    """Generate ECG windows from PPG conditions with the two-network reverse loop.

    Each step evaluates the region denoiser on x_t and the ROI denoiser on its
    output, so one step costs exactly two network evaluations per window.
    """
    sched = model.sched if sched is None else sched
    cond, squeeze = _as_cond(cond, model.eps_theta.dtype)
    x = torch.randn(cond.shape, generator=rng, dtype=cond.dtype)
    for t in range(sched.T, 0, -1):
        z = torch.randn(cond.shape, generator=rng, dtype=cond.dtype) if t > 1 else 0.0
        c1, c2, sigma = reverse_step_coeffs(t, sched)
        x_p = model.rho_phi(x, cond, t)
        _check_finite(x_p, t)
        x = c1 * (x_p - c2 * model.eps_theta(x_p, cond, t)) + sigma * z
        _check_finite(x, t)
    return x[0] if squeeze else x


@torch.no_grad()
def ddpm_sample(
    denoiser: Denoiser,
    cond,
    rng: torch.Generator,
    sched: NoiseSchedule,
) -> torch.Tensor:
    """Standard conditional ancestral sampling with the given schedule."""
    cond, squeeze = _as_cond(cond, denoiser.dtype)
    x = torch.randn(cond.shape, generator=rng, dtype=cond.dtype)
    for t in range(sched.T, 0, -1):
        z = torch.randn(cond.shape, generator=rng, dtype=cond.dtype) if t > 1 else 0.0
        c1, c2, sigma = reverse_step_coeffs(t, sched)
        x = c1 * (x - c2 * denoiser(x, cond, t)) + sigma * z
        _check_finite(x, t)
    return x[0] if squeeze else x
