"""Command-line surface: convert / extract / eval / bench / info.

All failures exit nonzero with a single machine-parsable line
``error.kind=<kind> detail=<message>`` on stderr. ``FASTSVC_LOG`` selects
the log level (error|warn|info|debug).
"""

import argparse
import logging
import os
import sys

import numpy as np

from . import dsp, fileio
from .bench import run_bench
from .bundle import load_bundle, validate_bundle
from .errors import FastSVCError, LengthMismatchError
from .generator import generator_forward, param_count

log = logging.getLogger("fastsvc")

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

CONVERT_NOISE_SEED = 0


def _configure_logging():
    level = os.environ.get("FASTSVC_LOG", "warn").lower()
    logging.basicConfig(level=_LOG_LEVELS.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _conditioning_from_audio(samples: np.ndarray, sample_rate: int,
                             target: int) -> np.ndarray:
    """Audio -> normalized audio-rate loudness conditioning."""
    if len(samples) < target:
        raise LengthMismatchError(
            f"audio has {len(samples)} samples, need at least {target}"
        )
    if len(samples) > target:
        log.info("audio longer than features; truncating %d -> %d samples",
                 len(samples), target)
        samples = samples[:target]
    contour = dsp.compute_loudness(dsp.AudioBuffer(samples, sample_rate))
    norm = dsp.normalize_loudness(contour)
    return dsp.upsample_linear(norm, contour.hop, target)


def _excitation_from_f0(contour: dsp.F0Contour, semitones: float,
                        target: int, sample_rate: int,
                        test_mode: bool = False) -> np.ndarray:
    shifted = dsp.shift_f0_semitones(contour, semitones)
    f0_audio = dsp.upsample_linear(shifted.values, shifted.hop, target)
    return dsp.generate_excitation(f0_audio, sample_rate,
                                   noise_seed=CONVERT_NOISE_SEED,
                                   test_mode=test_mode)


def cmd_convert(args) -> int:
    bundle = load_bundle(args.bundle)
    config = bundle.config
    ling = fileio.read_ling(args.ling)
    f0 = fileio.read_f0(args.f0)
    samples, rate = fileio.read_wav(args.audio)
    target = ling.frames * config.linguistic_hop

    excitation = _excitation_from_f0(f0, args.semitone_shift, target, rate)
    loudness = _conditioning_from_audio(samples, rate, target)
    out = generator_forward(ling, excitation, loudness, args.speaker, bundle,
                            threads=args.threads, mode=args.mode)
    fileio.write_wav(args.out, out.samples, out.sample_rate)
    log.info("wrote %d samples to %s", len(out.samples), args.out)
    print(f"convert.samples={len(out.samples)}")
    print(f"convert.out={args.out}")
    return 0


def cmd_extract(args) -> int:
    samples, rate = fileio.read_wav(args.audio)
    f0 = fileio.read_f0(args.f0)
    target = len(samples)
    excitation = _excitation_from_f0(f0, 0.0, target, rate)
    fileio.write_wav(args.out_excitation, excitation, rate)
    contour = dsp.compute_loudness(dsp.AudioBuffer(samples, rate))
    with open(args.out_loudness, "w") as f:
        f.write(f"# loudness dB, hop={contour.hop}\n")
        for v in contour.values:
            f.write(f"{v:.6f}\n")
    print(f"extract.excitation={args.out_excitation}")
    print(f"extract.loudness={args.out_loudness}")
    print(f"extract.frames={len(contour.values)}")
    return 0


def cmd_eval(args) -> int:
    from .losses import LossConfig, stft_loss_breakdown

    ref, _ = fileio.read_wav(args.ref)
    test, _ = fileio.read_wav(args.test)
    config = LossConfig()
    terms = stft_loss_breakdown(ref, test, config)
    for m, sc, log_mag in terms:
        print(f"loss.sc.{m}={sc:.6f}")
        print(f"loss.mag.{m}={log_mag:.6f}")
        print(f"loss.stft.{m}={sc + log_mag:.6f}")
    total = float(np.mean([sc + log_mag for _m, sc, log_mag in terms]))
    print(f"loss.stft.total={total:.6f}")
    return 0


def cmd_bench(args) -> int:
    bundle = load_bundle(args.bundle)
    report = run_bench(bundle, seconds=args.seconds, threads=args.threads,
                       mode=args.mode, seed=args.seed)
    for line in report.lines():
        print(line)
    return 0


def cmd_info(args) -> int:
    bundle = load_bundle(args.bundle)
    report = validate_bundle(bundle)
    print(f"info.format_version={bundle.format_version}")
    print(f"info.param_count={report.param_counts['generator']}")
    print(f"info.param_count.configured={param_count(bundle.config)}")
    print(f"info.param_count.discriminator={report.param_counts['discriminator']}")
    for name, ok in report.capabilities.items():
        print(f"info.capability.{name}={'true' if ok else 'false'}")
    print("info.speakers=" + ",".join(report.speaker_names))
    print(f"info.sample_rate={bundle.config.sample_rate}")
    print(f"info.linguistic_hop={bundle.config.linguistic_hop}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fastsvc",
        description="CPU singing-voice-conversion vocoder engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="synthesize a converted waveform")
    p.add_argument("--audio", required=True, help="source WAV (loudness)")
    p.add_argument("--f0", required=True, help=".f0 pitch file")
    p.add_argument("--ling", required=True, help=".ling feature file")
    p.add_argument("--bundle", required=True, help=".fsvc weights")
    p.add_argument("--speaker", default=None, help="speaker name or index")
    p.add_argument("--semitone-shift", type=float, default=0.0)
    p.add_argument("--out", required=True, help="output WAV")
    p.add_argument("--mode", choices=("strict", "fast"), default="strict")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("extract", help="write excitation/loudness features")
    p.add_argument("--audio", required=True)
    p.add_argument("--f0", required=True)
    p.add_argument("--out-excitation", required=True)
    p.add_argument("--out-loudness", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("eval", help="multi-scale STFT loss between two WAVs")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="real-time-factor benchmark")
    p.add_argument("--bundle", required=True)
    p.add_argument("--seconds", type=float, default=10.0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--mode", choices=("strict", "fast"), default="strict")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("info", help="inspect a weight bundle")
    p.add_argument("--bundle", required=True)
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FastSVCError as exc:
        print(f"error.kind={exc.kind} detail={exc.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error.kind=io detail={exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
