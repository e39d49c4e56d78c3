"""Region-disentangled diffusion for PPG-to-ECG translation.

Modules:
    dsp        signal preprocessing (resample, filter, normalize, window)
    qrs        R-peak detection, ROI masks, heart-rate estimation
    schedule   diffusion variance schedule and forward/reverse algebra
    net        conditioned 1D UNet denoiser
    diffusion  disentangled training objective and samplers (+ DDPM baseline)
    train      seeded training loop with resumable checkpoints
    synth      synthetic paired PPG/ECG generator with exact ground truth
    metrics    RMSE, discrete Frechet distance, HR MAE, inference timing
    io         file formats (recordings, window containers, checkpoints)
    cli        command-line interface
"""

__version__ = "0.1.0"
