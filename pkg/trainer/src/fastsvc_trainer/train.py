"""Alternating GAN training loop at desk scale: multi-resolution STFT loss
from step one, discriminator joining after a warm-up, Adam with stepwise lr
halving, loss curves to CSV."""

import csv
from dataclasses import dataclass, field

import numpy as np
import torch

from .data import ToyDataset, make_toy_dataset
from .losses import adv_loss, disc_loss, generator_loss, multiscale_stft_loss
from .models import TOY_DISC, GenArch, Generator, MultiScaleDiscriminator

TOY_CHANNELS = (32, 24, 16, 8)


@dataclass
class TrainConfig:
    batch_size: int = 4            # full-scale reference: 32
    segment_seconds: float = 1.0
    lr: float = 1e-3
    lr_decay: float = 0.5
    decay_interval: int = 500      # full-scale reference: 100k
    disc_start_step: int = 200     # full-scale reference: 100k
    total_steps: int = 2000        # full-scale reference: >= 600k
    alpha: float = 2.5
    seed: int = 0
    n_clips: int = 6
    linguistic_dim: int = 32
    speaker_count: int = 0
    up_channels: tuple = TOY_CHANNELS
    deterministic: bool = True

    def __post_init__(self):
        if not 0 <= self.disc_start_step < self.total_steps:
            raise ValueError("disc_start_step must be < total_steps")
        if self.lr <= 0:
            raise ValueError("lr must be positive")

    def lr_at(self, step: int) -> float:
        """Learning rate used at 1-based ``step``; halves every interval."""
        return self.lr * self.lr_decay ** ((step - 1) // self.decay_interval)


@dataclass
class TrainResult:
    generator: Generator
    discriminator: MultiScaleDiscriminator
    curves: list
    initial_eval: float
    final_eval: float
    steps_run: int
    eval_history: list = field(default_factory=list)


def toy_arch(config: TrainConfig) -> GenArch:
    return GenArch(linguistic_dim=config.linguistic_dim,
                   up_channels=tuple(config.up_channels),
                   speaker_count=config.speaker_count)


def _seed_everything(config: TrainConfig):
    torch.manual_seed(config.seed)
    if config.deterministic:
        torch.set_num_threads(1)
        torch.use_deterministic_algorithms(True)


def _batch_tensors(dataset: ToyDataset, indices):
    clips = [dataset.clips[i] for i in indices]
    ling = torch.from_numpy(np.stack([c.linguistic for c in clips]))
    exc = torch.from_numpy(np.stack([c.excitation for c in clips]))
    loud = torch.from_numpy(np.stack([c.loudness for c in clips]))
    audio = torch.from_numpy(np.stack([c.audio for c in clips]))
    speakers = torch.tensor([c.speaker_id for c in clips], dtype=torch.long)
    return ling, exc, loud, audio, speakers


def _check_finite(value: torch.Tensor, label: str, step: int):
    if not torch.isfinite(value):
        raise RuntimeError(
            f"non-finite {label} ({value.item()}) at step {step}; aborting"
        )


def train_step_g(batch, generator, discriminator, opt_g, alpha: float,
                 adversarial: bool, step: int = 0) -> dict:
    """One generator update; returns the loss terms actually used."""
    ling, exc, loud, audio, speakers = batch
    ids = speakers if generator.arch.speaker_count > 0 else None
    fake = generator(ling, exc, loud, ids)
    l_stft = multiscale_stft_loss(audio, fake)
    if adversarial:
        l_adv = adv_loss(discriminator(fake))
    else:
        l_adv = fake.new_zeros(())
    l_g = generator_loss(l_stft, l_adv, alpha)
    _check_finite(l_g, "generator loss", step)
    opt_g.zero_grad(set_to_none=True)
    l_g.backward()
    opt_g.step()
    return {"l_stft": float(l_stft.detach()), "l_adv": float(l_adv.detach()),
            "l_g": float(l_g.detach())}


def train_step_d(batch, generator, discriminator, opt_d,
                 step: int = 0) -> float:
    """One discriminator update; generator parameters are untouched."""
    ling, exc, loud, audio, speakers = batch
    ids = speakers if generator.arch.speaker_count > 0 else None
    with torch.no_grad():
        fake = generator(ling, exc, loud, ids)
    l_d = disc_loss(discriminator(audio), discriminator(fake))
    _check_finite(l_d, "discriminator loss", step)
    opt_d.zero_grad(set_to_none=True)
    l_d.backward()
    opt_d.step()
    return float(l_d.detach())


def evaluate_stft(generator: Generator, clip) -> float:
    """Held-in reconstruction loss on one clip."""
    generator.eval()
    with torch.no_grad():
        ling = torch.from_numpy(clip.linguistic).unsqueeze(0)
        exc = torch.from_numpy(clip.excitation).unsqueeze(0)
        loud = torch.from_numpy(clip.loudness).unsqueeze(0)
        ids = (torch.tensor([clip.speaker_id])
               if generator.arch.speaker_count > 0 else None)
        fake = generator(ling, exc, loud, ids)
        loss = multiscale_stft_loss(torch.from_numpy(clip.audio).unsqueeze(0),
                                    fake)
    generator.train()
    return float(loss)


def _set_lr(optimizer, lr):
    for group in optimizer.param_groups:
        group["lr"] = lr


def train(config: TrainConfig, dataset: ToyDataset | None = None,
          curves_path=None, stop_ratio: float | None = None,
          eval_every: int = 25) -> TrainResult:
    """Run the schedule; optionally stop early once the held-in STFT loss
    drops below ``stop_ratio`` of its initial value."""
    _seed_everything(config)
    if dataset is None:
        dataset = make_toy_dataset(
            n_clips=config.n_clips,
            segment_seconds=config.segment_seconds,
            linguistic_dim=config.linguistic_dim,
            speaker_count=config.speaker_count,
            seed=config.seed,
        )
    generator = Generator(toy_arch(config))
    discriminator = MultiScaleDiscriminator(TOY_DISC)
    opt_g = torch.optim.Adam(generator.parameters(), lr=config.lr,
                             betas=(0.9, 0.999))
    opt_d = torch.optim.Adam(discriminator.parameters(), lr=config.lr,
                             betas=(0.9, 0.999))

    eval_clip = dataset.clips[0]
    initial_eval = evaluate_stft(generator, eval_clip)
    eval_history = [(0, initial_eval)]
    rng = np.random.default_rng(config.seed)
    curves = []
    final_eval = initial_eval
    steps_run = 0

    for step in range(1, config.total_steps + 1):
        lr = config.lr_at(step)
        _set_lr(opt_g, lr)
        _set_lr(opt_d, lr)
        adversarial = (step - 1) >= config.disc_start_step

        indices = rng.integers(0, len(dataset), size=config.batch_size)
        batch = _batch_tensors(dataset, indices)
        g_losses = train_step_g(batch, generator, discriminator, opt_g,
                                config.alpha, adversarial, step)
        l_d = (train_step_d(batch, generator, discriminator, opt_d, step)
               if adversarial else 0.0)
        curves.append({"step": step, "l_stft": g_losses["l_stft"],
                       "l_adv": g_losses["l_adv"], "l_g": g_losses["l_g"],
                       "l_d": l_d, "lr": lr})
        steps_run = step

        if step % eval_every == 0 or step == config.total_steps:
            final_eval = evaluate_stft(generator, eval_clip)
            eval_history.append((step, final_eval))
            if stop_ratio is not None and final_eval < stop_ratio * initial_eval:
                break

    if curves_path is not None:
        with open(curves_path, "w", newline="") as f:
            writer = csv.DictWriter(
                f, fieldnames=["step", "l_stft", "l_adv", "l_g", "l_d", "lr"])
            writer.writeheader()
            writer.writerows(curves)

    return TrainResult(generator=generator, discriminator=discriminator,
                       curves=curves, initial_eval=initial_eval,
                       final_eval=final_eval, steps_run=steps_run,
                       eval_history=eval_history)


def main(argv=None) -> int:
    import argparse

    parser = argparse.ArgumentParser(
        prog="fastsvc-train",
        description="toy-scale trainer for the fastsvc engine")
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--disc-start", type=int, default=200,
                        help="step after which the discriminator joins "
                             "(clamped below --steps)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--clips", type=int, default=6)
    parser.add_argument("--curves", default="curves.csv")
    parser.add_argument("--out-bundle", default=None,
                        help="export .fsvc after training")
    parser.add_argument("--with-discriminator", action="store_true",
                        help="include discriminator tensors in the export")
    parser.add_argument("--stop-ratio", type=float, default=None)
    args = parser.parse_args(argv)

    config = TrainConfig(total_steps=args.steps,
                         disc_start_step=min(args.disc_start, args.steps - 1),
                         seed=args.seed, n_clips=args.clips)
    result = train(config, curves_path=args.curves,
                   stop_ratio=args.stop_ratio)
    print(f"train.steps={result.steps_run}")
    print(f"train.initial_stft={result.initial_eval:.4f}")
    print(f"train.final_stft={result.final_eval:.4f}")
    if args.out_bundle:
        from .export import export_bundle

        export_bundle(result.generator, args.out_bundle,
                      result.discriminator if args.with_discriminator else None)
        print(f"train.bundle={args.out_bundle}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
