"""fastsvc: CPU inference engine and DSP toolkit for a FiLM-conditioned
singing-voice-conversion vocoder."""

from .bench import BenchReport, run_bench
from .bundle import (
    WeightBundle,
    load_bundle,
    random_bundle,
    save_bundle,
    validate_bundle,
)
from .discriminator import (
    DiscriminatorConfig,
    DiscriminatorOutput,
    discriminator_forward,
)
from .dsp import (
    AudioBuffer,
    F0Contour,
    LoudnessContour,
    a_weighting_db,
    compute_loudness,
    generate_excitation,
    normalize_loudness,
    shift_f0_semitones,
    upsample_linear,
)
from .errors import FastSVCError
from .fileio import LinguisticFeatures, read_f0, read_ling, read_wav, write_f0, write_ling, write_wav
from .generator import (
    FiLMOutput,
    GeneratorConfig,
    feature_affine,
    film_forward,
    generator_forward,
    param_count,
    validate_config,
)
from .losses import (
    LossConfig,
    adv_loss,
    disc_loss,
    generator_loss,
    multiscale_stft_loss,
    stft_magnitude,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "BenchReport",
    "DiscriminatorConfig",
    "DiscriminatorOutput",
    "F0Contour",
    "FastSVCError",
    "FiLMOutput",
    "GeneratorConfig",
    "LinguisticFeatures",
    "LossConfig",
    "LoudnessContour",
    "WeightBundle",
    "a_weighting_db",
    "adv_loss",
    "compute_loudness",
    "disc_loss",
    "discriminator_forward",
    "feature_affine",
    "film_forward",
    "generate_excitation",
    "generator_forward",
    "generator_loss",
    "load_bundle",
    "multiscale_stft_loss",
    "normalize_loudness",
    "param_count",
    "random_bundle",
    "read_f0",
    "read_ling",
    "read_wav",
    "run_bench",
    "save_bundle",
    "shift_f0_semitones",
    "stft_magnitude",
    "upsample_linear",
    "validate_bundle",
    "validate_config",
    "write_f0",
    "write_ling",
    "write_wav",
]
