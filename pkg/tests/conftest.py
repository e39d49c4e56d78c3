import numpy as np
import pytest
import torch

from rddm.dsp import Signal, SignalKind
from rddm.net import NetConfig


@pytest.fixture(scope="session", autouse=True)
def _torch_single_thread():
    # The suite compares bitwise outputs; pin threads for stable kernels.
    torch.set_num_threads(1)


def make_sine(freq_hz: float, duration_s: float, rate_hz: float, kind=SignalKind.ECG) -> Signal:
    t = np.arange(int(round(duration_s * rate_hz))) / rate_hz
    return Signal(np.sin(2 * np.pi * freq_hz * t), rate_hz, kind)


def tiny_net_config() -> NetConfig:
    return NetConfig(
        depth=2,
        base_channels=8,
        channel_multipliers=(1, 2),
        attention_stages=(1,),
        embed_dim=16,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
