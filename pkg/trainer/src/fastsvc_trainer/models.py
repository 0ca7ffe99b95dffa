"""Torch models mirroring the engine architecture one-to-one, so exported
tensors drop into the `.fsvc` name/shape schema the engine expects."""

from dataclasses import dataclass, field, asdict

import torch
import torch.nn as nn
import torch.nn.functional as F
from torch.nn.utils.parametrizations import weight_norm

INIT_STD = 0.02


@dataclass(frozen=True)
class GenArch:
    """Architecture hyperparameters; field names match the engine config."""

    linguistic_dim: int = 32
    linguistic_hop: int = 320
    up_factors: tuple = (4, 4, 4, 5)
    up_channels: tuple = (32, 24, 16, 8)
    up_dilations: tuple = (1, 3, 9, 27)
    down_dilations: tuple = (1, 2, 4)
    leaky_slope: float = 0.2
    speaker_count: int = 0
    speaker_embed_dim: int = 64
    sample_rate: int = 16000
    speaker_names: tuple = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("up_factors", "up_channels", "up_dilations",
                    "down_dilations", "speaker_names"):
            d[key] = list(d[key])
        return d


# (out_channels, kernel, stride, groups) rows; engine default table
@dataclass(frozen=True)
class DiscArch:
    scales: int = 3
    layers: tuple = (
        (16, 15, 1, 1),
        (64, 41, 4, 4),
        (256, 41, 4, 4),
        (1024, 41, 4, 4),
        (1024, 41, 4, 4),
        (1024, 5, 1, 1),
        (1, 3, 1, 1),
    )
    leaky_slope: float = 0.2
    pool_factor: int = 2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["layers"] = [list(layer) for layer in self.layers]
        return d


TOY_DISC = DiscArch(layers=(
    (8, 15, 1, 1),
    (16, 41, 4, 4),
    (32, 41, 4, 4),
    (32, 5, 1, 1),
    (1, 3, 1, 1),
))


def _conv(cin, cout, kernel, dilation=1):
    conv = nn.Conv1d(cin, cout, kernel, dilation=dilation,
                     padding=dilation * (kernel - 1) // 2)
    nn.init.normal_(conv.weight, 0.0, INIT_STD)
    nn.init.zeros_(conv.bias)
    return weight_norm(conv)


class FiLMModule(nn.Module):
    def __init__(self, channels):
        super().__init__()
        self.conv = _conv(channels, 2 * channels, 3)

    def forward(self, cond):
        out = self.conv(cond)
        half = out.shape[1] // 2
        return out[:, :half], out[:, half:]


class UBlock(nn.Module):
    def __init__(self, cin, cout, factor, dilations, slope, multi_voice,
                 embed_dim):
        super().__init__()
        self.factor = factor
        self.slope = slope
        self.multi_voice = multi_voice
        self.convs = nn.ModuleList(
            [_conv(cin if j == 0 else cout, cout, 3, d)
             for j, d in enumerate(dilations)]
        )
        self.res = _conv(cin, cout, 1)
        if multi_voice:
            self.proj = nn.Linear(embed_dim, cout)
            nn.init.normal_(self.proj.weight, 0.0, INIT_STD)
            nn.init.zeros_(self.proj.bias)

    def forward(self, x, sine_film, loud_film, speaker_emb):
        gs, xs = sine_film
        gl, xl = loud_film
        spk = None
        if self.multi_voice:
            spk = self.proj(speaker_emb).unsqueeze(-1)

        def affine(h):
            h = (gs + gl) * h + xs + xl
            if self.multi_voice:
                h = F.instance_norm(h, eps=1e-5) + spk
            return h

        a = F.leaky_relu(x, self.slope)
        a = a.repeat_interleave(self.factor, dim=-1)
        for j, conv in enumerate(self.convs):
            if j > 0:
                a = F.leaky_relu(a, self.slope)
            a = affine(conv(a))
        r = self.res(x.repeat_interleave(self.factor, dim=-1))
        return a + r


class DBlock(nn.Module):
    def __init__(self, cin, cout, factor, dilations, slope):
        super().__init__()
        self.factor = factor
        self.slope = slope
        self.convs = nn.ModuleList(
            [_conv(cin if j == 0 else cout, cout, 3, d)
             for j, d in enumerate(dilations)]
        )
        self.res = _conv(cin, cout, 1)

    def forward(self, x):
        pooled = F.avg_pool1d(x, self.factor) if self.factor > 1 else x
        a = pooled
        for conv in self.convs:
            a = conv(F.leaky_relu(a, self.slope))
        return a + self.res(pooled)


class DownBranch(nn.Module):
    def __init__(self, arch: GenArch):
        super().__init__()
        n = len(arch.up_factors)
        down_ch = [arch.up_channels[-1 - i] for i in range(n)]
        self.stem = _conv(1, down_ch[0], 3)
        self.blocks = nn.ModuleList(
            [DBlock(down_ch[i], down_ch[i + 1], arch.up_factors[n - 1 - i],
                    arch.down_dilations, arch.leaky_slope)
             for i in range(n - 1)]
        )
        self.films = nn.ModuleList(
            [FiLMModule(arch.up_channels[i]) for i in range(n)]
        )

    def forward(self, signal):
        maps = [self.stem(signal)]
        for block in self.blocks:
            maps.append(block(maps[-1]))
        n = len(self.films)
        return [self.films[i](maps[n - 1 - i]) for i in range(n)]


class Generator(nn.Module):
    """Dual-branch FiLM generator; forward takes [B, frames, dim] features,
    [B, T] excitation and loudness, and optional speaker indices."""

    def __init__(self, arch: GenArch):
        super().__init__()
        self.arch = arch
        n = len(arch.up_factors)
        self.stem = _conv(arch.linguistic_dim, arch.up_channels[0], 3)
        multi = arch.speaker_count > 0
        self.ublocks = nn.ModuleList(
            [UBlock(arch.up_channels[max(i - 1, 0)], arch.up_channels[i],
                    arch.up_factors[i], arch.up_dilations, arch.leaky_slope,
                    multi, arch.speaker_embed_dim)
             for i in range(n)]
        )
        self.head = _conv(arch.up_channels[-1], 1, 7)
        self.sine_branch = DownBranch(arch)
        self.loud_branch = DownBranch(arch)
        if multi:
            self.speaker_table = nn.Embedding(arch.speaker_count,
                                              arch.speaker_embed_dim)
            nn.init.normal_(self.speaker_table.weight, 0.0, INIT_STD)

    def forward(self, linguistic, excitation, loudness, speaker_ids=None):
        sine_films = self.sine_branch(excitation.unsqueeze(1))
        loud_films = self.loud_branch(loudness.unsqueeze(1))
        emb = None
        if self.arch.speaker_count > 0:
            emb = self.speaker_table(speaker_ids)
        h = self.stem(linguistic.transpose(1, 2))
        for i, block in enumerate(self.ublocks):
            h = block(h, sine_films[i], loud_films[i], emb)
        return torch.tanh(self.head(h)).squeeze(1)


class ScaleDiscriminator(nn.Module):
    def __init__(self, arch: DiscArch):
        super().__init__()
        self.slope = arch.leaky_slope
        self.meta = arch.layers
        convs = []
        cin = 1
        for cout, kernel, stride, groups in arch.layers:
            conv = nn.Conv1d(cin, cout, kernel, stride=stride, groups=groups)
            nn.init.normal_(conv.weight, 0.0, INIT_STD)
            nn.init.zeros_(conv.bias)
            convs.append(weight_norm(conv))
            cin = cout
        self.convs = nn.ModuleList(convs)

    def forward(self, x):
        h = x
        for j, conv in enumerate(self.convs):
            _cout, kernel, stride, _groups = self.meta[j]
            # engine-style asymmetric same padding
            t = h.shape[-1]
            out_t = -(-t // stride)
            pad = max((out_t - 1) * stride + kernel - t, 0)
            h = conv(F.pad(h, (pad // 2, pad - pad // 2)))
            if j < len(self.convs) - 1:
                h = F.leaky_relu(h, self.slope)
        return h


class MultiScaleDiscriminator(nn.Module):
    def __init__(self, arch: DiscArch = TOY_DISC):
        super().__init__()
        self.arch = arch
        self.subs = nn.ModuleList(
            [ScaleDiscriminator(arch) for _ in range(arch.scales)]
        )

    def forward(self, x):
        maps = []
        h = x.unsqueeze(1)
        for k, sub in enumerate(self.subs):
            maps.append(sub(h))
            if k < len(self.subs) - 1:
                h = F.avg_pool1d(h, self.arch.pool_factor,
                                 ceil_mode=True, count_include_pad=False)
        return maps
