"""Training loop: AdamW with cosine learning-rate decay, seeded end to end.

Every source of randomness (parameter init, per-step noise/timesteps, epoch
shuffling) derives from one root seed, so two runs with the same settings and
data produce bit-identical parameters. Checkpoints carry optimizer moments
and generator states; a resumed run continues the exact step sequence of an
uninterrupted one.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import torch

from .diffusion import (
    Batch,
    RddmModel,
    TrainStepReport,
    ddpm_train_step,
    make_batch,
    rddm_train_step,
)
from .dsp import PairedWindow
from .errors import CheckpointError, InvalidInputError
from .net import Denoiser, NetConfig
from .schedule import NoiseSchedule


@dataclass(frozen=True)
class TrainSettings:
    epochs: int = 200
    batch_size: int = 64
    lr: float = 1e-4
    lr_min: float = 1e-6
    weight_decay: float = 0.01
    seed: int = 0
    gamma: int = 32
    lambdas: tuple[float, float] = (100.0, 1.0)


@dataclass
class TrainRun:
    """Everything a caller needs to evaluate, checkpoint, or resume a run."""

    kind: str
    model: RddmModel | Denoiser
    optimizer: torch.optim.Optimizer
    noise_rng: torch.Generator
    shuffle_rng: torch.Generator
    epochs_done: int
    total_epochs: int
    reports: list[TrainStepReport] = field(default_factory=list)

    @property
    def nets(self) -> dict[str, Denoiser]:
        if self.kind == "rddm":
            return {"eps_theta": self.model.eps_theta, "rho_phi": self.model.rho_phi}
        return {"net": self.model}

    def train_state(self) -> dict:
        return {
            "epochs_done": self.epochs_done,
            "total_epochs": self.total_epochs,
            "rng_noise": bytes(self.noise_rng.get_state().numpy().tobytes()),
            "rng_shuffle": bytes(self.shuffle_rng.get_state().numpy().tobytes()),
        }


def cosine_lr(step: int, total_steps: int, lr: float, lr_min: float) -> float:
    """Cosine decay from ``lr`` to ``lr_min`` over ``total_steps``."""
    if total_steps <= 1:
        return lr
    frac = min(step, total_steps - 1) / (total_steps - 1)
    return lr_min + 0.5 * (lr - lr_min) * (1.0 + math.cos(math.pi * frac))


def _derive_seeds(seed: int, n: int) -> list[int]:
    root = torch.Generator().manual_seed(seed)
    return [int(torch.randint(0, 2**62, (1,), generator=root).item()) for _ in range(n)]


def _set_state(gen: torch.Generator, raw: bytes) -> None:
    gen.set_state(torch.from_numpy(np.frombuffer(raw, dtype=np.uint8).copy()))


def _restore_optimizer(
    optimizer: torch.optim.Optimizer, params: Sequence[torch.Tensor], moments
) -> None:
    avg, sq, step = moments
    cursor = 0
    for p in params:
        n = p.numel()
        optimizer.state[p] = {
            "step": torch.tensor(float(step)),
            "exp_avg": torch.from_numpy(avg[cursor : cursor + n].copy()).reshape(p.shape),
            "exp_avg_sq": torch.from_numpy(sq[cursor : cursor + n].copy()).reshape(p.shape),
        }
        cursor += n
    if cursor != len(avg):
        raise CheckpointError("optimizer moment blob does not match parameter count")


def train_model(
    kind: str,
    windows: Sequence[PairedWindow] | Batch,
    net_config: NetConfig,
    sched: NoiseSchedule,
    settings: TrainSettings,
    log: Callable[[dict], None] | None = None,
    resume: dict | None = None,
    on_epoch: Callable[[int, "TrainRun"], None] | None = None,
) -> TrainRun:
    """Train an RDDM pair or a DDPM baseline (``kind`` in {"rddm", "ddpm"}).

    ``resume`` takes the dict returned by ``io.load_checkpoint``; training
    continues from its recorded epoch with restored optimizer moments and
    generator states. ``log`` receives one dict per optimization step.
    """
    if kind not in ("rddm", "ddpm"):
        raise InvalidInputError(f"unknown model kind {kind!r}")
    data = windows if isinstance(windows, Batch) else make_batch(windows, settings.gamma)
    if len(data) == 0:
        raise InvalidInputError("training needs at least one window")

    seeds = _derive_seeds(settings.seed, 4)
    if kind == "rddm":
        model: RddmModel | Denoiser = RddmModel(
            Denoiser.create(net_config, seeds[0]),
            Denoiser.create(net_config, seeds[1]),
            sched,
            settings.gamma,
        )
        params = list(model.parameters())
    else:
        model = Denoiser.create(net_config, seeds[0])
        params = list(model.parameters())
    noise_rng = torch.Generator().manual_seed(seeds[2])
    shuffle_rng = torch.Generator().manual_seed(seeds[3])
    optimizer = torch.optim.AdamW(
        params, lr=settings.lr, betas=(0.9, 0.999), weight_decay=settings.weight_decay
    )

    start_epoch = 0
    if resume is not None:
        if resume["kind"] != kind:
            raise CheckpointError(f"checkpoint is {resume['kind']!r}, requested {kind!r}")
        if resume["config"] != net_config:
            raise CheckpointError("checkpoint net config differs from requested config")
        loaded = resume["nets"]
        if kind == "rddm":
            model = RddmModel(loaded["eps_theta"], loaded["rho_phi"], sched, settings.gamma)
        else:
            model = loaded["net"]
        params = list(model.parameters())
        optimizer = torch.optim.AdamW(
            params, lr=settings.lr, betas=(0.9, 0.999), weight_decay=settings.weight_decay
        )
        if resume["opt_moments"] is not None:
            _restore_optimizer(optimizer, params, resume["opt_moments"])
        state = resume["train_state"]
        start_epoch = int(state["epochs_done"])
        _set_state(noise_rng, state["rng_noise"])
        _set_state(shuffle_rng, state["rng_shuffle"])

    n = len(data)
    steps_per_epoch = math.ceil(n / settings.batch_size)
    total_steps = settings.epochs * steps_per_epoch
    run = TrainRun(kind, model, optimizer, noise_rng, shuffle_rng, start_epoch, settings.epochs)

    step = start_epoch * steps_per_epoch
    for epoch in range(start_epoch, settings.epochs):
        perm = torch.randperm(n, generator=shuffle_rng)
        for b in range(steps_per_epoch):
            batch = data[perm[b * settings.batch_size : (b + 1) * settings.batch_size]]
            lr = cosine_lr(step, total_steps, settings.lr, settings.lr_min)
            for group in optimizer.param_groups:
                group["lr"] = lr
            t0 = time.perf_counter()
            if kind == "rddm":
                report = rddm_train_step(model, batch, noise_rng, settings.lambdas, optimizer)
            else:
                report = ddpm_train_step(model, batch, noise_rng, sched, optimizer)
            run.reports.append(report)
            step += 1
            if log is not None:
                log(
                    {
                        "step": step,
                        "loss_total": report.loss_total,
                        "loss_roi": report.loss_roi,
                        "loss_region": report.loss_region,
                        "lr": lr,
                        "wall_ms": (time.perf_counter() - t0) * 1000.0,
                    }
                )
        run.epochs_done = epoch + 1
        if on_epoch is not None:
            on_epoch(epoch + 1, run)
    return run
