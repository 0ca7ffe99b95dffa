"""FiLM-fused dual-branch waveform generator.

Up path: linguistic features (hop 320) through a conv stem and four
up-sample blocks (factors 4/4/4/5, channels 192/96/48/24, dilations
1/3/9/27) to audio rate, then a k=7 head conv and tanh. Two conditioning
branches (sine excitation, audio-rate loudness) run down-sample blocks
(dilations 1/2/4) whose multi-resolution maps drive one FiLM module per
branch per scale; each up block applies (g_sine + g_loud) * U + x_sine +
x_loud after every dilated conv. In multi-voice mode each modulated map is
instance-normalized and a projected speaker embedding is added.
"""

from dataclasses import dataclass, asdict

import numpy as np

from .dsp import AudioBuffer
from .errors import (
    BundleValidationError,
    ConfigError,
    LengthMismatchError,
    ShapeError,
    UnknownIdError,
)
from .fileio import LinguisticFeatures
from .kernels import (
    ConvSpec,
    conv1d,
    embedding_lookup,
    instance_norm,
    leaky_relu,
    linear,
    upsample_nearest,
    avg_pool,
)

SINE_BRANCH = "sine"
LOUD_BRANCH = "loud"


@dataclass(frozen=True)
class GeneratorConfig:
    linguistic_dim: int = 144
    linguistic_hop: int = 320
    up_factors: tuple = (4, 4, 4, 5)
    up_channels: tuple = (192, 96, 48, 24)
    up_dilations: tuple = (1, 3, 9, 27)
    down_dilations: tuple = (1, 2, 4)
    leaky_slope: float = 0.2
    speaker_count: int = 0
    speaker_embed_dim: int = 64
    sample_rate: int = 16000
    speaker_names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "up_factors", tuple(self.up_factors))
        object.__setattr__(self, "up_channels", tuple(self.up_channels))
        object.__setattr__(self, "up_dilations", tuple(self.up_dilations))
        object.__setattr__(self, "down_dilations", tuple(self.down_dilations))
        object.__setattr__(self, "speaker_names", tuple(self.speaker_names))

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("up_factors", "up_channels", "up_dilations",
                    "down_dilations", "speaker_names"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorConfig":
        return cls(**d)


def validate_config(config: GeneratorConfig) -> None:
    """Raise ConfigError naming the offending field."""
    if config.linguistic_dim <= 0:
        raise ConfigError("must be positive", field="linguistic_dim")
    if config.linguistic_hop <= 0:
        raise ConfigError("must be positive", field="linguistic_hop")
    if config.sample_rate <= 0:
        raise ConfigError("must be positive", field="sample_rate")
    if any(f < 1 for f in config.up_factors):
        raise ConfigError("factors must be >= 1", field="up_factors")
    prod = 1
    for f in config.up_factors:
        prod *= f
    if prod != config.linguistic_hop:
        raise ConfigError(
            f"product of factors is {prod}, must equal linguistic_hop "
            f"{config.linguistic_hop}",
            field="up_factors",
        )
    if len(config.up_channels) != len(config.up_factors):
        raise ConfigError(
            f"length {len(config.up_channels)} must match up_factors "
            f"length {len(config.up_factors)}",
            field="up_channels",
        )
    if any(c < 1 for c in config.up_channels):
        raise ConfigError("channels must be >= 1", field="up_channels")
    if len(config.up_dilations) == 0 or any(d < 1 for d in config.up_dilations):
        raise ConfigError("need a non-empty list of dilations >= 1",
                          field="up_dilations")
    if len(config.down_dilations) == 0 or any(d < 1 for d in config.down_dilations):
        raise ConfigError("need a non-empty list of dilations >= 1",
                          field="down_dilations")
    if config.speaker_count < 0:
        raise ConfigError("must be >= 0", field="speaker_count")
    if config.speaker_count > 0 and config.speaker_embed_dim <= 0:
        raise ConfigError("must be positive in multi-voice mode",
                          field="speaker_embed_dim")
    if config.speaker_names and len(config.speaker_names) != config.speaker_count:
        raise ConfigError(
            f"{len(config.speaker_names)} names for {config.speaker_count} "
            "speakers",
            field="speaker_names",
        )


def _block_in_channels(config: GeneratorConfig, index: int) -> int:
    return config.up_channels[max(index - 1, 0)]


def _down_channels(config: GeneratorConfig) -> list:
    """Channels of the down-branch maps, hop-ascending (audio rate first)."""
    return [config.up_channels[-1 - i] for i in range(len(config.up_channels))]


def expected_tensor_shapes(config: GeneratorConfig) -> dict:
    """Complete name -> shape map for the generator (and speaker) tensors."""
    validate_config(config)
    shapes: dict[str, tuple] = {}
    n = len(config.up_factors)
    if n > 0:
        shapes["gen.stem.w"] = (config.up_channels[0], config.linguistic_dim, 3)
        shapes["gen.stem.b"] = (config.up_channels[0],)
        for i in range(n):
            cin = _block_in_channels(config, i)
            cout = config.up_channels[i]
            for j in range(len(config.up_dilations)):
                cj = cin if j == 0 else cout
                shapes[f"gen.up.{i}.conv{j}.w"] = (cout, cj, 3)
                shapes[f"gen.up.{i}.conv{j}.b"] = (cout,)
            shapes[f"gen.up.{i}.res.w"] = (cout, cin, 1)
            shapes[f"gen.up.{i}.res.b"] = (cout,)
        shapes["gen.head.w"] = (1, config.up_channels[-1], 7)
        shapes["gen.head.b"] = (1,)

        down_ch = _down_channels(config)
        for branch in (SINE_BRANCH, LOUD_BRANCH):
            shapes[f"gen.{branch}.stem.w"] = (down_ch[0], 1, 3)
            shapes[f"gen.{branch}.stem.b"] = (down_ch[0],)
            for i in range(n - 1):
                cin, cout = down_ch[i], down_ch[i + 1]
                for j in range(len(config.down_dilations)):
                    cj = cin if j == 0 else cout
                    shapes[f"gen.{branch}.down.{i}.conv{j}.w"] = (cout, cj, 3)
                    shapes[f"gen.{branch}.down.{i}.conv{j}.b"] = (cout,)
                shapes[f"gen.{branch}.down.{i}.res.w"] = (cout, cin, 1)
                shapes[f"gen.{branch}.down.{i}.res.b"] = (cout,)
            for i in range(n):
                c = config.up_channels[i]
                shapes[f"gen.{branch}.film.{i}.w"] = (2 * c, c, 3)
                shapes[f"gen.{branch}.film.{i}.b"] = (2 * c,)
    if config.speaker_count > 0:
        shapes["spk.table"] = (config.speaker_count, config.speaker_embed_dim)
        for i in range(n):
            shapes[f"spk.proj.{i}.w"] = (config.up_channels[i],
                                         config.speaker_embed_dim)
            shapes[f"spk.proj.{i}.b"] = (config.up_channels[i],)
    return shapes


def param_count(config: GeneratorConfig) -> int:
    """Total trainable element count of the inference path."""
    total = 0
    for shape in expected_tensor_shapes(config).values():
        n = 1
        for dim in shape:
            n *= dim
        total += n
    return total


@dataclass
class FiLMOutput:
    gamma: np.ndarray
    xi: np.ndarray


def _conv_spec(tensors: dict, name: str, dilation: int = 1) -> ConvSpec:
    try:
        w = tensors[f"{name}.w"]
        b = tensors[f"{name}.b"]
    except KeyError as exc:
        raise BundleValidationError(f"missing tensor {exc.args[0]}") from exc
    return ConvSpec(weights=w, bias=b, dilation=dilation)


def film_forward(cond, weights: ConvSpec, *, executor=None,
                 precise: bool = True) -> FiLMOutput:
    """One conv produces 2C channels, split into scale and shift."""
    if weights.out_channels % 2 != 0:
        raise ShapeError("FiLM conv must have an even channel count")
    out = conv1d(cond, weights, "same", executor=executor, precise=precise)
    half = weights.out_channels // 2
    return FiLMOutput(gamma=out[:half], xi=out[half:])


def feature_affine(u, sine: FiLMOutput, loud: FiLMOutput) -> np.ndarray:
    """(g_sine + g_loud) * U + x_sine + x_loud, elementwise."""
    shapes = {sine.gamma.shape, sine.xi.shape, loud.gamma.shape,
              loud.xi.shape, np.shape(u)}
    if len(shapes) != 1:
        raise ShapeError(f"feature_affine shape mismatch: {sorted(shapes)}")
    u64 = np.asarray(u, dtype=np.float64)
    out = (sine.gamma.astype(np.float64) + loud.gamma.astype(np.float64)) * u64
    out += sine.xi.astype(np.float64)
    out += loud.xi.astype(np.float64)
    return out.astype(np.float32)


def ublock_forward(x, sine_film: FiLMOutput, loud_film: FiLMOutput,
                   speaker_vec, tensors: dict, config: GeneratorConfig,
                   index: int, *, executor=None, precise: bool = True
                   ) -> np.ndarray:
    """One up-sample block: dilated conv main path with FiLM affines after
    every conv, plus an upsampled 1x1 residual path."""
    cin = _block_in_channels(config, index)
    if x.shape[0] != cin:
        raise ShapeError(f"up block {index} expects {cin} channels, "
                         f"got {x.shape[0]}")
    multi = config.speaker_count > 0
    if speaker_vec is not None and not multi:
        raise ConfigError("speaker vector given in single-voice mode")
    if multi and speaker_vec is None:
        raise ConfigError("multi-voice mode requires a speaker vector")
    spk = None
    if multi:
        spk = linear(speaker_vec, tensors[f"spk.proj.{index}.w"],
                     tensors[f"spk.proj.{index}.b"])[:, None]

    factor = config.up_factors[index]
    prefix = f"gen.up.{index}"

    def affine(h):
        h = feature_affine(h, sine_film, loud_film)
        if multi:
            h = instance_norm(h) + spk
        return h

    a = leaky_relu(x, config.leaky_slope)
    a = upsample_nearest(a, factor)
    for j, dilation in enumerate(config.up_dilations):
        if j > 0:
            a = leaky_relu(a, config.leaky_slope)
        a = conv1d(a, _conv_spec(tensors, f"{prefix}.conv{j}", dilation),
                   "same", executor=executor, precise=precise)
        a = affine(a)

    r = upsample_nearest(x, factor)
    r = conv1d(r, _conv_spec(tensors, f"{prefix}.res"), "same",
               executor=executor, precise=precise)
    return a + r


def dblock_forward(x, tensors: dict, config: GeneratorConfig, branch: str,
                   index: int, factor: int, *, executor=None,
                   precise: bool = True) -> np.ndarray:
    """One down-sample block: pooled dilated conv path plus pooled 1x1
    residual."""
    prefix = f"gen.{branch}.down.{index}"
    a = avg_pool(x, factor)
    pooled = a
    for j, dilation in enumerate(config.down_dilations):
        a = leaky_relu(a, config.leaky_slope)
        a = conv1d(a, _conv_spec(tensors, f"{prefix}.conv{j}", dilation),
                   "same", executor=executor, precise=precise)
    r = conv1d(pooled, _conv_spec(tensors, f"{prefix}.res"), "same",
               executor=executor, precise=precise)
    return a + r


def _down_branch(signal, tensors: dict, config: GeneratorConfig, branch: str,
                 *, executor=None, precise: bool = True) -> list:
    """Run one conditioning branch; returns maps hop-ascending
    (audio rate first)."""
    x = np.asarray(signal, dtype=np.float32)[None, :]
    maps = [conv1d(x, _conv_spec(tensors, f"gen.{branch}.stem"), "same",
                   executor=executor, precise=precise)]
    n = len(config.up_factors)
    for i in range(n - 1):
        factor = config.up_factors[n - 1 - i]
        maps.append(dblock_forward(maps[-1], tensors, config, branch, i,
                                   factor, executor=executor, precise=precise))
    return maps


def _resolve_speaker(config: GeneratorConfig, speaker_id) -> int:
    if isinstance(speaker_id, str):
        names = list(config.speaker_names) or [
            f"spk{i}" for i in range(config.speaker_count)
        ]
        if speaker_id in names:
            return names.index(speaker_id)
        try:
            speaker_id = int(speaker_id)
        except ValueError:
            raise UnknownIdError(f"unknown speaker {speaker_id!r}") from None
    idx = int(speaker_id)
    if not 0 <= idx < config.speaker_count:
        raise UnknownIdError(
            f"speaker index {idx} out of range [0, {config.speaker_count})"
        )
    return idx


def generator_forward(ling: LinguisticFeatures, excitation, loudness,
                      speaker_id, bundle, *, threads: int = 1,
                      mode: str = "strict") -> AudioBuffer:
    """Full synthesis pass; output length is exactly frames * hop."""
    from .runtime import engine_context

    config: GeneratorConfig = bundle.config
    tensors: dict = bundle.tensors
    validate_config(config)
    n = len(config.up_factors)
    if n == 0:
        raise ConfigError("cannot synthesize with zero up-sample blocks",
                          field="up_factors")
    if ling.dim != config.linguistic_dim:
        raise ShapeError(f"linguistic dim {ling.dim} != configured "
                         f"{config.linguistic_dim}")
    if ling.hop != config.linguistic_hop:
        raise ConfigError(
            f"linguistic hop {ling.hop} != configured {config.linguistic_hop}",
            field="linguistic_hop",
        )
    target = ling.frames * config.linguistic_hop
    excitation = np.asarray(excitation, dtype=np.float32)
    loudness = np.asarray(loudness, dtype=np.float32)
    if len(excitation) != target:
        raise LengthMismatchError(
            f"excitation length {len(excitation)}, expected {target}"
        )
    if len(loudness) != target:
        raise LengthMismatchError(
            f"loudness length {len(loudness)}, expected {target}"
        )

    speaker_vec = None
    if config.speaker_count == 0:
        if speaker_id is not None:
            raise ConfigError("speaker given for a single-voice bundle")
    else:
        if speaker_id is None:
            raise UnknownIdError("multi-voice bundle requires a speaker")
        idx = _resolve_speaker(config, speaker_id)
        speaker_vec = embedding_lookup(tensors["spk.table"], idx)

    missing = set(expected_tensor_shapes(config)) - set(tensors)
    if missing:
        raise BundleValidationError(
            f"bundle is missing generator tensors: {sorted(missing)[:5]}"
        )

    with engine_context(threads=threads, mode=mode) as (executor, precise):
        sine_maps = _down_branch(excitation, tensors, config, SINE_BRANCH,
                                 executor=executor, precise=precise)
        loud_maps = _down_branch(loudness, tensors, config, LOUD_BRANCH,
                                 executor=executor, precise=precise)

        h = conv1d(ling.data.T.astype(np.float32),
                   _conv_spec(tensors, "gen.stem"), "same",
                   executor=executor, precise=precise)
        for i in range(n):
            cond_idx = n - 1 - i
            films = {}
            for branch, maps in ((SINE_BRANCH, sine_maps),
                                 (LOUD_BRANCH, loud_maps)):
                films[branch] = film_forward(
                    maps[cond_idx],
                    _conv_spec(tensors, f"gen.{branch}.film.{i}"),
                    executor=executor, precise=precise,
                )
            h = ublock_forward(h, films[SINE_BRANCH], films[LOUD_BRANCH],
                               speaker_vec, tensors, config, i,
                               executor=executor, precise=precise)
        y = conv1d(h, _conv_spec(tensors, "gen.head"), "same",
                   executor=executor, precise=precise)
        samples = np.tanh(y[0].astype(np.float64)).astype(np.float32)
    return AudioBuffer(samples=samples, sample_rate=config.sample_rate)
