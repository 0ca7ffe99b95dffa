"""Numeric kernels for the CPU engine.

Feature maps are float32 arrays of shape [channels, time]. The optimized
conv1d accumulates in double precision through BLAS matmuls over fixed
time blocks, so results are bit-identical for any worker count; every
kernel has an independent naive oracle used by the tests.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ShapeError, UnknownIdError

# fixed time-block width; partitioning must not depend on thread count
_CONV_BLOCK = 16384


@dataclass
class ConvSpec:
    """1-D convolution parameters. weights: [out, in/groups, kernel]."""

    weights: np.ndarray
    bias: np.ndarray
    dilation: int = 1
    stride: int = 1
    groups: int = 1

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float32)
        self.bias = np.asarray(self.bias, dtype=np.float32)
        if self.weights.ndim != 3:
            raise ShapeError("conv weights must be [out, in/groups, kernel]")
        if self.bias.shape != (self.weights.shape[0],):
            raise ShapeError("conv bias must be [out_channels]")
        if self.dilation < 1 or self.stride < 1 or self.groups < 1:
            raise InvalidInputError("dilation, stride and groups must be >= 1")
        if self.weights.shape[0] % self.groups != 0:
            raise ShapeError("out_channels must divide by groups")

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1] * self.groups

    @property
    def kernel(self) -> int:
        return self.weights.shape[2]


def _conv_geometry(time: int, spec: ConvSpec, padding: str):
    eff_k = (spec.kernel - 1) * spec.dilation + 1
    if padding == "same":
        if spec.kernel % 2 == 0:
            raise InvalidInputError("same-padding requires an odd kernel")
        out_t = -(-time // spec.stride)
        pad_total = max((out_t - 1) * spec.stride + eff_k - time, 0)
        pad_l = pad_total // 2
        return out_t, pad_l, pad_total - pad_l
    if padding == "valid":
        if time < eff_k:
            raise InvalidInputError(
                f"input time {time} shorter than kernel span {eff_k}"
            )
        return (time - eff_k) // spec.stride + 1, 0, 0
    raise InvalidInputError(f"unknown padding mode {padding!r}")


def conv1d(x, spec: ConvSpec, padding: str = "same", *, executor=None,
           precise: bool = True) -> np.ndarray:
    """Dilated/strided/grouped 1-D convolution via blocked matmuls.

    ``precise`` accumulates in float64 (strict mode); float32 otherwise.
    ``executor`` optionally parallelizes over the fixed time blocks.
    """
    x = np.asarray(x)
    if x.ndim != 2:
        raise ShapeError("input must be [channels, time]")
    if x.shape[0] != spec.in_channels:
        raise ShapeError(
            f"channel mismatch: input has {x.shape[0]}, conv expects "
            f"{spec.in_channels}"
        )
    out_t, pad_l, pad_r = _conv_geometry(x.shape[1], spec, padding)

    acc_dtype = np.float64 if precise else np.float32
    xpad = np.pad(x.astype(acc_dtype), ((0, 0), (pad_l, pad_r)))
    # im2col layout: one GEMM per group over (kernel x in) rows
    w = spec.weights.astype(acc_dtype).transpose(0, 2, 1).reshape(
        spec.out_channels, -1)
    bias = spec.bias.astype(acc_dtype)[:, None]

    out = np.empty((spec.out_channels, out_t), dtype=np.float32)
    in_per = spec.in_channels // spec.groups
    out_per = spec.out_channels // spec.groups
    s, d, k = spec.stride, spec.dilation, spec.kernel

    def run_block(t0: int, t1: int):
        width = t1 - t0
        for g in range(spec.groups):
            xg = xpad[g * in_per:(g + 1) * in_per]
            col = np.empty((k * in_per, width), dtype=acc_dtype)
            for kk in range(k):
                start = kk * d + t0 * s
                col[kk * in_per:(kk + 1) * in_per] = \
                    xg[:, start:start + (width - 1) * s + 1:s]
            rows = slice(g * out_per, (g + 1) * out_per)
            out[:, t0:t1][rows] = w[rows] @ col + bias[rows]

    blocks = [(t0, min(t0 + _CONV_BLOCK, out_t))
              for t0 in range(0, out_t, _CONV_BLOCK)]
    if executor is None or len(blocks) == 1:
        for t0, t1 in blocks:
            run_block(t0, t1)
    else:
        list(executor.map(lambda b: run_block(*b), blocks))
    return out


def conv1d_naive(x, spec: ConvSpec, padding: str = "same") -> np.ndarray:
    """Reference convolution: plain scalar loops, no shared machinery."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError("input must be [channels, time]")
    if x.shape[0] != spec.in_channels:
        raise ShapeError(
            f"channel mismatch: input has {x.shape[0]}, conv expects "
            f"{spec.in_channels}"
        )
    k, d, s, g = spec.kernel, spec.dilation, spec.stride, spec.groups
    eff_k = (k - 1) * d + 1
    time = x.shape[1]
    if padding == "same":
        if k % 2 == 0:
            raise InvalidInputError("same-padding requires an odd kernel")
        out_t = (time + s - 1) // s
        pad_total = max((out_t - 1) * s + eff_k - time, 0)
        pad_l = pad_total // 2
    elif padding == "valid":
        if time < eff_k:
            raise InvalidInputError(
                f"input time {time} shorter than kernel span {eff_k}"
            )
        out_t = (time - eff_k) // s + 1
        pad_l = 0
    else:
        raise InvalidInputError(f"unknown padding mode {padding!r}")

    w = spec.weights.astype(np.float64)
    bias = spec.bias.astype(np.float64)
    in_per = spec.in_channels // g
    out_per = spec.out_channels // g
    out = np.empty((spec.out_channels, out_t), dtype=np.float32)
    for oc in range(spec.out_channels):
        gi = oc // out_per
        for t in range(out_t):
            acc = bias[oc]
            for ic in range(in_per):
                for kk in range(k):
                    src = t * s + kk * d - pad_l
                    if 0 <= src < time:
                        acc += w[oc, ic, kk] * x[gi * in_per + ic, src]
            out[oc, t] = acc
    return out


def upsample_nearest(x, factor: int) -> np.ndarray:
    """Repeat each frame ``factor`` times along time."""
    x = np.asarray(x)
    if x.ndim != 2:
        raise ShapeError("input must be [channels, time]")
    if factor < 1:
        raise InvalidInputError("upsample factor must be >= 1")
    if factor == 1:
        return x.astype(np.float32, copy=True)
    return np.repeat(x, factor, axis=1)


def avg_pool(x, factor: int) -> np.ndarray:
    """Non-overlapping mean over ``factor`` frames; edge-padded if needed."""
    x = np.asarray(x)
    if x.ndim != 2:
        raise ShapeError("input must be [channels, time]")
    if factor < 1:
        raise InvalidInputError("pool factor must be >= 1")
    if factor == 1:
        return x.astype(np.float32, copy=True)
    c, t = x.shape
    rem = t % factor
    if rem:
        x = np.concatenate([x, np.repeat(x[:, -1:], factor - rem, axis=1)], axis=1)
    pooled = x.reshape(c, -1, factor).mean(axis=2, dtype=np.float64)
    return pooled.astype(np.float32)


def leaky_relu(x, slope: float = 0.2) -> np.ndarray:
    x = np.asarray(x, dtype=np.float32)
    return np.where(x >= 0, x, np.float32(slope) * x)


def instance_norm(x, eps: float = 1e-5) -> np.ndarray:
    """Per-channel standardization over time; no learned affine."""
    x = np.asarray(x)
    if x.ndim != 2:
        raise ShapeError("input must be [channels, time]")
    if x.shape[1] < 2:
        raise InvalidInputError("instance_norm needs time >= 2")
    x64 = x.astype(np.float64)
    mean = x64.mean(axis=1, keepdims=True)
    var = x64.var(axis=1, keepdims=True)
    return ((x64 - mean) / np.sqrt(var + eps)).astype(np.float32)


def embedding_lookup(table, idx: int) -> np.ndarray:
    table = np.asarray(table, dtype=np.float32)
    if table.ndim != 2:
        raise ShapeError("embedding table must be [rows, dim]")
    if not 0 <= idx < table.shape[0]:
        raise UnknownIdError(
            f"embedding id {idx} out of range [0, {table.shape[0]})"
        )
    return table[idx].copy()


def linear(x, weight, bias) -> np.ndarray:
    """weight @ x + bias, accumulated in float64."""
    x = np.asarray(x, dtype=np.float64)
    weight = np.asarray(weight, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64)
    if x.ndim != 1 or weight.ndim != 2 or weight.shape[1] != x.shape[0]:
        raise ShapeError(
            f"linear shape mismatch: W {weight.shape} vs x {x.shape}"
        )
    if bias.shape != (weight.shape[0],):
        raise ShapeError("linear bias must be [out]")
    return (weight @ x + bias).astype(np.float32)
