"""Multi-channel frame classification workbench.

Thin wrapper over the C++ core: spectra, SNR schedules, synthetic mixtures,
room simulation, model inference and the batch commands (gen_data, simulate,
train, evaluate, plot).
"""

from ._core import (  # noqa: F401
    Model,
    WorkbenchError,
    __version__,
    default_config,
    evaluate,
    gen_data,
    image_sources,
    make_example,
    plot,
    rir,
    sample_scene,
    simulate,
    snr_schedule,
    stft_mag,
    train,
)

__all__ = [
    "Model",
    "WorkbenchError",
    "default_config",
    "evaluate",
    "gen_data",
    "image_sources",
    "make_example",
    "plot",
    "rir",
    "sample_scene",
    "simulate",
    "snr_schedule",
    "stft_mag",
    "train",
]
