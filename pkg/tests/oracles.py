"""Independent reference implementations used as test oracles.

Everything here is written as directly as possible (scalar loops, matrix
DFTs) and shares no code with the optimized engine paths; conv1d_naive from
the package is itself an oracle and is composed here into block- and
model-level references.
"""

import numpy as np

from fastsvc.kernels import ConvSpec, conv1d_naive


# ---------------------------------------------------------------------------
# dsp oracles
# ---------------------------------------------------------------------------

def interp_pointwise(series, hop, target_len):
    """Per-sample linear interpolation with hold-last tail."""
    series = [float(v) for v in series]
    out = []
    for t in range(target_len):
        i = t // hop
        if i + 1 < len(series):
            frac = (t - i * hop) / hop
            out.append(series[i] * (1.0 - frac) + series[i + 1] * frac)
        else:
            out.append(series[-1])
    return np.array(out, dtype=np.float64)


def cumulative_phase_excitation(f0, fs, phase=0.0):
    """Sample-by-sample evaluation of the voiced excitation formula."""
    out = np.empty(len(f0), dtype=np.float64)
    acc = 0.0
    for t, f in enumerate(f0):
        acc += 2.0 * np.pi * float(f) / fs
        out[t] = 0.1 * np.sin(acc + phase) if f > 0 else 0.0
    return out


# ---------------------------------------------------------------------------
# spectral oracles
# ---------------------------------------------------------------------------

def dft_magnitude(frame):
    """O(N^2) DFT magnitudes (positive bins) from the definition."""
    n = len(frame)
    k = np.arange(n // 2 + 1)[:, None]
    t = np.arange(n)[None, :]
    basis = np.exp(-2j * np.pi * k * t / n)
    return np.abs(basis @ np.asarray(frame, dtype=np.float64))


def stft_magnitude_naive(x, fft_size, hop):
    """Centered Hann STFT magnitudes via the matrix DFT."""
    x = np.asarray(x, dtype=np.float64)
    half = fft_size // 2
    padded = np.concatenate([np.zeros(half), x, np.zeros(half + hop)])
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(fft_size) / fft_size)
    n_frames = 1 + len(x) // hop
    cols = []
    for i in range(n_frames):
        frame = padded[i * hop:i * hop + fft_size] * window
        cols.append(dft_magnitude(frame))
    return np.stack(cols, axis=1)


def multiscale_stft_naive(x, x_hat, fft_sizes, overlap=0.75, log_floor=1e-7):
    total = 0.0
    for m in fft_sizes:
        hop = int(round(m * (1 - overlap)))
        s = stft_magnitude_naive(x, m, hop)
        s_hat = stft_magnitude_naive(x_hat, m, hop)
        sc = np.sqrt(np.sum((s - s_hat) ** 2)) / max(np.sqrt(np.sum(s**2)), 1e-12)
        log_mag = np.mean(np.abs(np.log(np.maximum(s, log_floor))
                                 - np.log(np.maximum(s_hat, log_floor))))
        total += sc + log_mag
    return total / len(fft_sizes)


# ---------------------------------------------------------------------------
# kernel-level naive references (loops only)
# ---------------------------------------------------------------------------

def upsample_nearest_naive(x, factor):
    c, t = x.shape
    out = np.empty((c, t * factor), dtype=np.float64)
    for ch in range(c):
        for i in range(t):
            for r in range(factor):
                out[ch, i * factor + r] = x[ch, i]
    return out


def avg_pool_naive(x, factor):
    x = np.asarray(x, dtype=np.float64)
    c, t = x.shape
    n = -(-t // factor)
    out = np.empty((c, n), dtype=np.float64)
    for ch in range(c):
        for i in range(n):
            acc = 0.0
            for r in range(factor):
                src = i * factor + r
                acc += x[ch, src] if src < t else x[ch, t - 1]
            out[ch, i] = acc / factor
    return out


def leaky_relu_naive(x, slope=0.2):
    out = np.array(x, dtype=np.float64)
    flat = out.reshape(-1)
    for i in range(flat.size):
        if flat[i] < 0:
            flat[i] *= slope
    return out


def instance_norm_naive(x, eps=1e-5):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for ch in range(x.shape[0]):
        row = x[ch]
        mean = sum(row) / len(row)
        var = sum((v - mean) ** 2 for v in row) / len(row)
        out[ch] = (row - mean) / np.sqrt(var + eps)
    return out


def linear_naive(x, w, b):
    out = np.empty(w.shape[0], dtype=np.float64)
    for i in range(w.shape[0]):
        acc = float(b[i])
        for j in range(w.shape[1]):
            acc += float(w[i, j]) * float(x[j])
        out[i] = acc
    return out


def feature_affine_naive(u, g_sine, x_sine, g_loud, x_loud):
    u = np.asarray(u, dtype=np.float64)
    out = np.empty_like(u)
    for c in range(u.shape[0]):
        for t in range(u.shape[1]):
            out[c, t] = (
                (float(g_sine[c, t]) + float(g_loud[c, t])) * u[c, t]
                + float(x_sine[c, t]) + float(x_loud[c, t])
            )
    return out


def film_naive(cond, weights, bias):
    spec = ConvSpec(weights=weights, bias=bias)
    out = conv1d_naive(cond, spec, "same")
    half = out.shape[0] // 2
    return out[:half], out[half:]


# ---------------------------------------------------------------------------
# block/model compositions of the naive kernels
# ---------------------------------------------------------------------------

def _spec(tensors, name, dilation=1):
    return ConvSpec(weights=tensors[f"{name}.w"], bias=tensors[f"{name}.b"],
                    dilation=dilation)


def ublock_naive(x, films, speaker_vec, tensors, config, index):
    cin_idx = max(index - 1, 0)
    del cin_idx
    factor = config.up_factors[index]
    multi = config.speaker_count > 0
    prefix = f"gen.up.{index}"
    (gs, xs), (gl, xl) = films

    spk = None
    if multi:
        spk = linear_naive(speaker_vec, tensors[f"spk.proj.{index}.w"],
                           tensors[f"spk.proj.{index}.b"])

    def affine(h):
        h = feature_affine_naive(h, gs, xs, gl, xl).astype(np.float32)
        if multi:
            h = instance_norm_naive(h).astype(np.float32)
            h = (h + np.asarray(spk, dtype=np.float32)[:, None]).astype(np.float32)
        return h

    a = leaky_relu_naive(x, config.leaky_slope).astype(np.float32)
    a = upsample_nearest_naive(a, factor).astype(np.float32)
    for j, dil in enumerate(config.up_dilations):
        if j > 0:
            a = leaky_relu_naive(a, config.leaky_slope).astype(np.float32)
        a = conv1d_naive(a, _spec(tensors, f"{prefix}.conv{j}", dil), "same")
        a = affine(a)
    r = upsample_nearest_naive(np.asarray(x, dtype=np.float32), factor)
    r = conv1d_naive(r.astype(np.float32), _spec(tensors, f"{prefix}.res"),
                     "same")
    return (a.astype(np.float64) + r.astype(np.float64)).astype(np.float32)


def dblock_naive(x, tensors, config, branch, index, factor):
    prefix = f"gen.{branch}.down.{index}"
    a = avg_pool_naive(x, factor).astype(np.float32)
    pooled = a
    for j, dil in enumerate(config.down_dilations):
        a = leaky_relu_naive(a, config.leaky_slope).astype(np.float32)
        a = conv1d_naive(a, _spec(tensors, f"{prefix}.conv{j}", dil), "same")
    r = conv1d_naive(pooled, _spec(tensors, f"{prefix}.res"), "same")
    return (a.astype(np.float64) + r.astype(np.float64)).astype(np.float32)


def down_branch_naive(signal, tensors, config, branch):
    x = np.asarray(signal, dtype=np.float32)[None, :]
    maps = [conv1d_naive(x, _spec(tensors, f"gen.{branch}.stem"), "same")]
    n = len(config.up_factors)
    for i in range(n - 1):
        factor = config.up_factors[n - 1 - i]
        maps.append(dblock_naive(maps[-1], tensors, config, branch, i, factor))
    return maps


def generator_forward_naive(ling, excitation, loudness, speaker_id, bundle):
    config = bundle.config
    tensors = bundle.tensors
    n = len(config.up_factors)
    sine_maps = down_branch_naive(excitation, tensors, config, "sine")
    loud_maps = down_branch_naive(loudness, tensors, config, "loud")
    speaker_vec = None
    if config.speaker_count > 0:
        speaker_vec = np.asarray(tensors["spk.table"][speaker_id],
                                 dtype=np.float64)

    h = conv1d_naive(ling.data.T.astype(np.float32),
                     _spec(tensors, "gen.stem"), "same")
    for i in range(n):
        films = []
        for branch, maps in (("sine", sine_maps), ("loud", loud_maps)):
            films.append(film_naive(maps[n - 1 - i],
                                    tensors[f"gen.{branch}.film.{i}.w"],
                                    tensors[f"gen.{branch}.film.{i}.b"]))
        h = ublock_naive(h, films, speaker_vec, tensors, config, i)
    y = conv1d_naive(h, _spec(tensors, "gen.head"), "same")
    return np.tanh(y[0].astype(np.float64)).astype(np.float32)


# ---------------------------------------------------------------------------
# randomized kernel batteries (shared by unit tests and the acceptance suite)
# ---------------------------------------------------------------------------

def battery_conv1d(cases, seed=0):
    """Random conv cases vs conv1d_naive; returns max abs error."""
    from fastsvc.kernels import conv1d

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        cin = int(rng.integers(1, 9))
        cout = int(rng.integers(1, 9))
        kernel = int(rng.choice([1, 3, 5, 7, 9]))
        dilation = int(rng.choice([1, 2, 3, 4, 9, 27]))
        stride = int(rng.choice([1, 1, 1, 2, 4]))
        time = int(rng.integers(1, 48))
        padding = "same"
        if rng.random() < 0.25 and time >= (kernel - 1) * dilation + 1:
            padding = "valid"
        spec = ConvSpec(
            weights=rng.normal(0, 1, (cout, cin, kernel)).astype(np.float32),
            bias=rng.normal(0, 1, cout).astype(np.float32),
            dilation=dilation,
            stride=stride,
        )
        x = rng.normal(0, 1, (cin, time)).astype(np.float32)
        got = conv1d(x, spec, padding)
        want = conv1d_naive(x, spec, padding)
        assert got.shape == want.shape
        worst = max(worst, float(np.max(np.abs(got - want), initial=0.0)))
    return worst


def battery_pool_upsample(cases, seed=1):
    from fastsvc.kernels import avg_pool, upsample_nearest

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        c = int(rng.integers(1, 9))
        t = int(rng.integers(1, 40))
        factor = int(rng.integers(1, 7))
        x = rng.normal(0, 1, (c, t)).astype(np.float32)
        up = upsample_nearest(x, factor)
        worst = max(worst, float(np.max(np.abs(
            up - upsample_nearest_naive(x, factor)))))
        pooled = avg_pool(x, factor)
        worst = max(worst, float(np.max(np.abs(
            pooled - avg_pool_naive(x, factor)))))
    return worst


def battery_instance_norm(cases, seed=2):
    from fastsvc.kernels import instance_norm

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        c = int(rng.integers(1, 9))
        t = int(rng.integers(2, 40))
        x = (rng.normal(0, 1, (c, t)) * rng.uniform(0.1, 10)).astype(np.float32)
        got = instance_norm(x)
        want = instance_norm_naive(x)
        worst = max(worst, float(np.max(np.abs(got - want))))
    return worst


def battery_film(cases, seed=3):
    from fastsvc.generator import film_forward
    from fastsvc.kernels import ConvSpec as CS

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        c = int(rng.integers(1, 7))
        t = int(rng.integers(1, 30))
        w = rng.normal(0, 1, (2 * c, c, 3)).astype(np.float32)
        b = rng.normal(0, 1, 2 * c).astype(np.float32)
        cond = rng.normal(0, 1, (c, t)).astype(np.float32)
        out = film_forward(cond, CS(weights=w, bias=b))
        gamma, xi = film_naive(cond, w, b)
        worst = max(worst, float(np.max(np.abs(out.gamma - gamma))))
        worst = max(worst, float(np.max(np.abs(out.xi - xi))))
    return worst


def battery_feature_affine(cases, seed=4):
    from fastsvc.generator import FiLMOutput, feature_affine

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        c = int(rng.integers(1, 9))
        t = int(rng.integers(1, 30))
        tensors = [rng.normal(0, 1, (c, t)).astype(np.float32)
                   for _ in range(5)]
        u, gs, xs, gl, xl = tensors
        got = feature_affine(u, FiLMOutput(gs, xs), FiLMOutput(gl, xl))
        want = feature_affine_naive(u, gs, xs, gl, xl).astype(np.float32)
        worst = max(worst, float(np.max(np.abs(got - want))))
    return worst


def battery_linear(cases, seed=5):
    from fastsvc.kernels import linear

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        n_in = int(rng.integers(1, 20))
        n_out = int(rng.integers(1, 20))
        w = rng.normal(0, 1, (n_out, n_in)).astype(np.float32)
        b = rng.normal(0, 1, n_out).astype(np.float32)
        x = rng.normal(0, 1, n_in).astype(np.float32)
        worst = max(worst, float(np.max(np.abs(
            linear(x, w, b) - linear_naive(x, w, b)))))
    return worst


def discriminator_forward_naive(samples, tensors, config):
    maps = []
    scale_input = np.asarray(samples, dtype=np.float32)[None, :]
    for k in range(config.scales):
        h = scale_input
        for j, (_cout, _kernel, stride, groups) in enumerate(config.layers):
            spec = ConvSpec(weights=tensors[f"disc.{k}.conv{j}.w"],
                            bias=tensors[f"disc.{k}.conv{j}.b"],
                            stride=stride, groups=groups)
            h = conv1d_naive(h, spec, "same")
            if j < len(config.layers) - 1:
                h = leaky_relu_naive(h, config.leaky_slope).astype(np.float32)
        maps.append(h)
        if k < config.scales - 1:
            scale_input = avg_pool_naive(scale_input,
                                         config.pool_factor).astype(np.float32)
    return maps
