"""Conditioned 1D UNet denoiser.

One architecture serves both denoising roles: a stride-2 convolutional
encoder over the noisy ECG, a mirrored nearest-upsample + conv decoder with
concatenation skips, and a full-resolution stem skip into the output block.
The PPG condition runs through a parallel convolutional encoder mirroring the
down-path resolutions; at the configured stages the decoder queries it via
cross-attention (queries from the ECG path, keys/values from the PPG encoder
at matching resolution, fixed sinusoidal position codes on queries and keys).
Timesteps enter every block through a sinusoidal embedding + MLP. The output
convolution is zero-initialized so an untrained net predicts exactly zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import torch
import torch.nn.functional as F
from torch import nn

from .errors import InvalidInputError, NumericError

_GROUPS = 8


@dataclass(frozen=True)
class NetConfig:
    """Architecture hyper-parameters; parameter count is a pure function of these."""

    depth: int = 3
    base_channels: int = 32
    channel_multipliers: tuple[int, ...] = (1, 2, 4)
    attention_stages: tuple[int, ...] = (1, 2)
    embed_dim: int = 64

    def __post_init__(self):
        object.__setattr__(self, "channel_multipliers", tuple(self.channel_multipliers))
        object.__setattr__(self, "attention_stages", tuple(sorted(set(self.attention_stages))))
        if self.depth < 1:
            raise InvalidInputError(f"depth must be >= 1, got {self.depth}")
        if len(self.channel_multipliers) != self.depth:
            raise InvalidInputError(
                f"need {self.depth} channel multipliers, got {len(self.channel_multipliers)}"
            )
        if self.base_channels % _GROUPS != 0 or self.base_channels < _GROUPS:
            raise InvalidInputError(
                f"base_channels must be a positive multiple of {_GROUPS}, got {self.base_channels}"
            )
        if any(not 0 <= s < self.depth for s in self.attention_stages):
            raise InvalidInputError(f"attention stages {self.attention_stages} outside [0, depth)")
        if self.embed_dim < 2 or self.embed_dim % 2 != 0:
            raise InvalidInputError(f"embed_dim must be a positive even int, got {self.embed_dim}")

    @property
    def channels(self) -> tuple[int, ...]:
        return tuple(self.base_channels * m for m in self.channel_multipliers)

    @property
    def time_dim(self) -> int:
        return 4 * self.embed_dim

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "base_channels": self.base_channels,
            "channel_multipliers": list(self.channel_multipliers),
            "attention_stages": list(self.attention_stages),
            "embed_dim": self.embed_dim,
        }

    @staticmethod
    def from_dict(d: dict) -> "NetConfig":
        return NetConfig(
            depth=int(d["depth"]),
            base_channels=int(d["base_channels"]),
            channel_multipliers=tuple(d["channel_multipliers"]),
            attention_stages=tuple(d["attention_stages"]),
            embed_dim=int(d["embed_dim"]),
        )


def desk_config() -> NetConfig:
    """Small default used everywhere in tests and desk-scale training."""
    return NetConfig()


def paper_scale_config() -> NetConfig:
    """Full-size variant: 6 stages, 64 doubling to a 1024-channel cap."""
    return NetConfig(
        depth=6,
        base_channels=64,
        channel_multipliers=(1, 2, 4, 8, 16, 16),
        attention_stages=(4, 5),
        embed_dim=256,
    )


def sinusoidal_embed(t: int | torch.Tensor, dim: int, dtype: torch.dtype = torch.float32) -> torch.Tensor:
    """Interleaved sin/cos timestep embedding.

    emb[2k] = sin(t / 10000^(2k/dim)), emb[2k+1] = cos(t / 10000^(2k/dim)).
    Scalar t gives a vector[dim]; a tensor of steps gains a trailing dim axis.
    """
    if dim < 2 or dim % 2 != 0:
        raise InvalidInputError(f"embedding dim must be a positive even int, got {dim}")
    scalar = not isinstance(t, torch.Tensor)
    t_vec = torch.as_tensor(t, dtype=dtype).reshape(-1)
    if torch.any(t_vec < 0):
        raise InvalidInputError("timesteps must be >= 0")
    k = torch.arange(dim // 2, dtype=dtype)
    inv_freq = torch.exp(-math.log(10000.0) * (2.0 * k / dim))
    angles = t_vec[:, None] * inv_freq[None, :]
    emb = torch.empty(t_vec.size(0), dim, dtype=dtype)
    emb[:, 0::2] = torch.sin(angles)
    emb[:, 1::2] = torch.cos(angles)
    return emb[0] if scalar else emb


@lru_cache(maxsize=64)
def _position_codes(length: int, dim: int, dtype: torch.dtype) -> torch.Tensor:
    """Fixed per-position codes, shape (1, dim, length)."""
    pe = sinusoidal_embed(torch.arange(length), dim, dtype=dtype)
    return pe.T.unsqueeze(0)


def _norm(channels: int) -> nn.GroupNorm:
    return nn.GroupNorm(min(_GROUPS, channels), channels)


class ResBlock(nn.Module):
    """Residual GN -> SiLU -> conv -> +time -> GN -> SiLU -> conv block."""

    def __init__(self, channels: int, time_dim: int):
        super().__init__()
        self.norm1 = _norm(channels)
        self.conv1 = nn.Conv1d(channels, channels, 3, padding=1)
        self.time_proj = nn.Linear(time_dim, channels)
        self.norm2 = _norm(channels)
        self.conv2 = nn.Conv1d(channels, channels, 3, padding=1)

    def forward(self, x: torch.Tensor, temb: torch.Tensor) -> torch.Tensor:
        h = self.conv1(F.silu(self.norm1(x)))
        h = h + self.time_proj(F.silu(temb))[:, :, None]
        h = self.conv2(F.silu(self.norm2(h)))
        return h + x


class MergeBlock(nn.Module):
    """Decoder block fusing concatenated skip features: GN -> SiLU -> conv -> +time."""

    def __init__(self, c_in: int, c_out: int, time_dim: int):
        super().__init__()
        self.norm = _norm(c_in)
        self.conv = nn.Conv1d(c_in, c_out, 3, padding=1)
        self.time_proj = nn.Linear(time_dim, c_out)

    def forward(self, x: torch.Tensor, temb: torch.Tensor) -> torch.Tensor:
        h = self.conv(F.silu(self.norm(x)))
        return h + self.time_proj(F.silu(temb))[:, :, None]


class CrossAttention(nn.Module):
    """Single-head cross-attention from the signal path into condition features."""

    def __init__(self, channels: int):
        super().__init__()
        self.channels = channels
        self.norm_q = _norm(channels)
        self.norm_kv = _norm(channels)
        self.to_q = nn.Conv1d(channels, channels, 1)
        self.to_k = nn.Conv1d(channels, channels, 1)
        self.to_v = nn.Conv1d(channels, channels, 1)
        self.to_out = nn.Conv1d(channels, channels, 1)

    def forward(self, h: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        pe = _position_codes(h.size(-1), self.channels, h.dtype)
        q = self.to_q(self.norm_q(h) + pe)
        kv = self.norm_kv(cond)
        k = self.to_k(kv + pe)
        v = self.to_v(kv)
        out = F.scaled_dot_product_attention(
            q.transpose(1, 2)[:, None], k.transpose(1, 2)[:, None], v.transpose(1, 2)[:, None]
        )[:, 0].transpose(1, 2)
        return h + self.to_out(out)


class Downsample(nn.Module):
    """Stride-2 convolution; also carries the stage's channel change."""

    def __init__(self, c_in: int, c_out: int):
        super().__init__()
        self.conv = nn.Conv1d(c_in, c_out, 3, stride=2, padding=1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.conv(x)


class Upsample(nn.Module):
    """Nearest-neighbor x2 followed by a convolution."""

    def __init__(self, c_in: int, c_out: int):
        super().__init__()
        self.conv = nn.Conv1d(c_in, c_out, 3, padding=1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.conv(F.interpolate(x, scale_factor=2, mode="nearest"))


class CondEncoder(nn.Module):
    """Convolutional encoder of the condition, one feature map per stage resolution."""

    def __init__(self, channels: tuple[int, ...]):
        super().__init__()
        self.stem = nn.Conv1d(1, channels[0], 3, stride=2, padding=1)
        self.downs = nn.ModuleList(
            nn.Conv1d(channels[s - 1], channels[s - 1], 3, stride=2, padding=1)
            for s in range(1, len(channels))
        )
        self.convs = nn.ModuleList(
            nn.Conv1d(channels[s - 1] if s else channels[0], channels[s], 3, padding=1)
            for s in range(len(channels))
        )

    def forward(self, cond: torch.Tensor) -> list[torch.Tensor]:
        h = self.stem(cond)
        feats = []
        for s, conv in enumerate(self.convs):
            if s:
                h = self.downs[s - 1](F.silu(h))
            h = conv(F.silu(h))
            feats.append(h)
        return feats


class _DownStage(nn.Module):
    def __init__(self, c_in: int, c_out: int, time_dim: int):
        super().__init__()
        self.down = Downsample(c_in, c_out)
        self.res = ResBlock(c_out, time_dim)


class _UpStage(nn.Module):
    def __init__(self, c: int, c_next: int, time_dim: int, attend: bool):
        super().__init__()
        self.merge = MergeBlock(2 * c, c, time_dim)
        self.attn = CrossAttention(c) if attend else None
        self.up = Upsample(c, c_next)


class Denoiser(nn.Module):
    """The conditioned UNet; serves as both the ROI and the region denoiser.

    ``eval_count`` tracks per-window forward evaluations (incremented by the
    batch size of every call), used by the inference benchmarks.
    """

    def __init__(self, config: NetConfig):
        super().__init__()
        self.config = config
        ch = config.channels
        td = config.time_dim
        attn = set(config.attention_stages)

        self.time_mlp = nn.Sequential(
            nn.Linear(config.embed_dim, td), nn.SiLU(), nn.Linear(td, td)
        )
        self.stem = nn.Conv1d(1, ch[0], 3, padding=1)
        self.cond_encoder = CondEncoder(ch)
        self.down_stages = nn.ModuleList(
            _DownStage(ch[s - 1] if s else ch[0], ch[s], td) for s in range(config.depth)
        )
        self.mid = ResBlock(ch[-1], td)
        self.up_stages = nn.ModuleList(
            _UpStage(ch[s], ch[s - 1] if s else ch[0], td, s in attn)
            for s in reversed(range(config.depth))
        )
        self.final = MergeBlock(2 * ch[0], ch[0], td)
        self.out_norm = _norm(ch[0])
        self.out_conv = nn.Conv1d(ch[0], 1, 3, padding=1)
        self.eval_count = 0

    @classmethod
    def create(cls, config: NetConfig, seed: int = 0, dtype: torch.dtype = torch.float32) -> "Denoiser":
        """Build and deterministically initialize a denoiser."""
        net = cls(config).to(dtype)
        net.init_parameters(torch.Generator().manual_seed(seed))
        return net

    def init_parameters(self, generator: torch.Generator) -> None:
        """Kaiming-uniform-style fan-in init; the output conv is zeroed."""
        for module in self.modules():
            if isinstance(module, (nn.Conv1d, nn.Linear)):
                fan_in = module.weight[0].numel()
                bound = 1.0 / math.sqrt(fan_in)
                with torch.no_grad():
                    module.weight.uniform_(-bound, bound, generator=generator)
                    if module.bias is not None:
                        module.bias.uniform_(-bound, bound, generator=generator)
            elif isinstance(module, nn.GroupNorm):
                with torch.no_grad():
                    module.weight.fill_(1.0)
                    module.bias.fill_(0.0)
        with torch.no_grad():
            self.out_conv.weight.zero_()
            self.out_conv.bias.zero_()

    @property
    def dtype(self) -> torch.dtype:
        return self.out_conv.weight.dtype

    def forward(self, x: torch.Tensor, cond: torch.Tensor, t: int | torch.Tensor) -> torch.Tensor:
        """Denoise ``x`` given condition ``cond`` at timestep(s) ``t``.

        ``x`` and ``cond`` are (L,) or (B, L); length must be divisible by
        2^depth. ``t`` is a single step or one step per batch row.
        """
        squeeze = x.dim() == 1
        x = torch.atleast_2d(x).to(self.dtype)
        cond = torch.atleast_2d(cond).to(self.dtype)
        if x.shape != cond.shape:
            raise InvalidInputError(f"x shape {tuple(x.shape)} != cond shape {tuple(cond.shape)}")
        if x.size(-1) % (1 << self.config.depth) != 0:
            raise InvalidInputError(
                f"length {x.size(-1)} not divisible by 2^depth = {1 << self.config.depth}"
            )
        if not (torch.isfinite(x).all() and torch.isfinite(cond).all()):
            raise NumericError("non-finite values in denoiser input")

        t_vec = torch.as_tensor(t).reshape(-1)
        if t_vec.numel() == 1:
            t_vec = t_vec.expand(x.size(0))
        temb = self.time_mlp(sinusoidal_embed(t_vec, self.config.embed_dim, dtype=self.dtype))

        h = self.stem(x[:, None, :])
        stem_skip = h
        cond_feats = self.cond_encoder(cond[:, None, :])
        skips = []
        for stage in self.down_stages:
            h = stage.res(stage.down(h), temb)
            skips.append(h)
        h = self.mid(h, temb)
        for s, stage in zip(reversed(range(self.config.depth)), self.up_stages):
            h = stage.merge(torch.cat([h, skips[s]], dim=1), temb)
            if stage.attn is not None:
                h = stage.attn(h, cond_feats[s])
            h = stage.up(h)
        h = self.final(torch.cat([h, stem_skip], dim=1), temb)
        y = self.out_conv(F.silu(self.out_norm(h)))[:, 0, :]

        self.eval_count += x.size(0)
        return y[0] if squeeze else y

    def flat_parameters(self) -> torch.Tensor:
        return torch.cat([p.detach().reshape(-1) for p in self.parameters()])

    def parameter_segments(self) -> list[tuple[str, int, tuple[int, ...]]]:
        """(name, flat offset, shape) for every parameter, in order."""
        segments, offset = [], 0
        for name, p in self.named_parameters():
            segments.append((name, offset, tuple(p.shape)))
            offset += p.numel()
        return segments

    def set_flat_parameters(self, flat: torch.Tensor) -> None:
        offset = 0
        with torch.no_grad():
            for p in self.parameters():
                n = p.numel()
                p.copy_(flat[offset : offset + n].reshape(p.shape))
                offset += n
        if offset != flat.numel():
            raise InvalidInputError(f"flat vector has {flat.numel()} values, expected {offset}")


def parameter_count(config: NetConfig) -> int:
    """Closed-form parameter count of a Denoiser built from ``config``."""
    ch = config.channels
    td = config.time_dim

    def conv(c_in: int, c_out: int, k: int = 3) -> int:
        return k * c_in * c_out + c_out

    def res(c: int) -> int:
        return 2 * c + conv(c, c) + (td * c + c) + 2 * c + conv(c, c)

    def merge(c_in: int, c_out: int) -> int:
        return 2 * c_in + conv(c_in, c_out) + (td * c_out + c_out)

    def attn(c: int) -> int:
        return 4 * c + 4 * conv(c, c, k=1)

    total = config.embed_dim * td + td + td * td + td  # time MLP
    total += conv(1, ch[0])  # stem
    total += conv(1, ch[0]) + conv(ch[0], ch[0])  # condition stem + stage 0
    for s in range(1, config.depth):  # condition stages
        total += conv(ch[s - 1], ch[s - 1]) + conv(ch[s - 1], ch[s])
    for s in range(config.depth):  # encoder
        total += conv(ch[s - 1] if s else ch[0], ch[s]) + res(ch[s])
    total += res(ch[-1])  # mid
    for s in reversed(range(config.depth)):  # decoder
        total += merge(2 * ch[s], ch[s]) + conv(ch[s], ch[s - 1] if s else ch[0])
        if s in config.attention_stages:
            total += attn(ch[s])
    total += merge(2 * ch[0], ch[0])  # full-resolution fusion of the stem skip
    total += 2 * ch[0] + conv(ch[0], 1)  # output head
    return total


def loss_gradient(
    net: Denoiser,
    batch,
    loss_fn: Callable[[Denoiser, object], torch.Tensor],
) -> torch.Tensor:
    """Flat gradient of ``loss_fn(net, batch)`` with respect to net parameters.

    Parameters the loss does not touch contribute zeros.
    """
    loss = loss_fn(net, batch)
    if not torch.isfinite(loss):
        raise NumericError(f"non-finite loss: {loss.item()}")
    params = list(net.parameters())
    if not loss.requires_grad:
        return torch.zeros(sum(p.numel() for p in params), dtype=net.dtype)
    grads = torch.autograd.grad(loss, params, allow_unused=True)
    return torch.cat(
        [
            (g if g is not None else torch.zeros_like(p)).reshape(-1)
            for g, p in zip(grads, params)
        ]
    )
