"""Multi-scale waveform discriminator (inference pass only).

Three identical sub-discriminators score the raw waveform and two
successively 2x-average-pooled copies. Each is a grouped strided conv
stack; the layer table lives in the bundle config so toy-sized stacks can
be exercised with the same code.
"""

from dataclasses import dataclass, asdict

import numpy as np

from .errors import ConfigError, InvalidInputError
from .kernels import ConvSpec, avg_pool, conv1d, leaky_relu

MIN_INPUT_SAMPLES = 1024

# (out_channels, kernel, stride, groups) per conv layer
_DEFAULT_LAYERS = (
    (16, 15, 1, 1),
    (64, 41, 4, 4),
    (256, 41, 4, 4),
    (1024, 41, 4, 4),
    (1024, 41, 4, 4),
    (1024, 5, 1, 1),
    (1, 3, 1, 1),
)


@dataclass(frozen=True)
class DiscriminatorConfig:
    scales: int = 3
    layers: tuple = _DEFAULT_LAYERS
    leaky_slope: float = 0.2
    pool_factor: int = 2

    def __post_init__(self):
        object.__setattr__(
            self, "layers", tuple(tuple(layer) for layer in self.layers)
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["layers"] = [list(layer) for layer in self.layers]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DiscriminatorConfig":
        return cls(**d)


def validate_disc_config(config: DiscriminatorConfig) -> None:
    if config.scales < 1:
        raise ConfigError("must be >= 1", field="scales")
    if config.pool_factor < 1:
        raise ConfigError("must be >= 1", field="pool_factor")
    if not config.layers:
        raise ConfigError("layer table is empty", field="layers")
    cin = 1
    for i, (cout, kernel, stride, groups) in enumerate(config.layers):
        if kernel % 2 == 0 or stride < 1 or groups < 1:
            raise ConfigError(f"layer {i} malformed", field="layers")
        if cin % groups or cout % groups:
            raise ConfigError(
                f"layer {i}: groups {groups} must divide {cin} and {cout}",
                field="layers",
            )
        cin = cout
    if config.layers[-1][0] != 1:
        raise ConfigError("final layer must emit one channel", field="layers")


def disc_expected_shapes(config: DiscriminatorConfig) -> dict:
    validate_disc_config(config)
    shapes: dict[str, tuple] = {}
    for k in range(config.scales):
        cin = 1
        for j, (cout, kernel, _stride, groups) in enumerate(config.layers):
            shapes[f"disc.{k}.conv{j}.w"] = (cout, cin // groups, kernel)
            shapes[f"disc.{k}.conv{j}.b"] = (cout,)
            cin = cout
    return shapes


@dataclass
class DiscriminatorOutput:
    score_maps: list  # one [1, time_k] map per scale


def discriminator_forward(x, tensors: dict, config: DiscriminatorConfig,
                          *, executor=None, precise: bool = True
                          ) -> DiscriminatorOutput:
    """Score a waveform at every scale; LeakyReLU after all but the head."""
    samples = np.asarray(getattr(x, "samples", x), dtype=np.float32)
    if samples.ndim != 1:
        raise InvalidInputError("discriminator input must be 1-D audio")
    if len(samples) < MIN_INPUT_SAMPLES:
        raise InvalidInputError(
            f"input length {len(samples)} below minimum receptive field "
            f"{MIN_INPUT_SAMPLES}"
        )
    validate_disc_config(config)

    maps = []
    scale_input = samples[None, :]
    for k in range(config.scales):
        h = scale_input
        for j, (_cout, _kernel, stride, groups) in enumerate(config.layers):
            spec = ConvSpec(
                weights=tensors[f"disc.{k}.conv{j}.w"],
                bias=tensors[f"disc.{k}.conv{j}.b"],
                stride=stride,
                groups=groups,
            )
            h = conv1d(h, spec, "same", executor=executor, precise=precise)
            if j < len(config.layers) - 1:
                h = leaky_relu(h, config.leaky_slope)
        maps.append(h)
        if k < config.scales - 1:
            scale_input = avg_pool(scale_input, config.pool_factor)
    return DiscriminatorOutput(score_maps=maps)
