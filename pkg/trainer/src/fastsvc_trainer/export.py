"""Export trained models into the engine's `.fsvc` schema: the weight-norm
reparameterization folds away by reading each conv's effective ``weight``
(the parametrization's computed product), named the way the engine expects."""

import numpy as np
import torch

from .fsvc_format import write_fsvc
from .models import Generator, MultiScaleDiscriminator


def _np(t: torch.Tensor) -> np.ndarray:
    with torch.no_grad():
        return t.detach().cpu().numpy().astype(np.float32)


def generator_tensors(model: Generator) -> dict:
    arch = model.arch
    out = {
        "gen.stem.w": _np(model.stem.weight),
        "gen.stem.b": _np(model.stem.bias),
        "gen.head.w": _np(model.head.weight),
        "gen.head.b": _np(model.head.bias),
    }
    for i, block in enumerate(model.ublocks):
        for j, conv in enumerate(block.convs):
            out[f"gen.up.{i}.conv{j}.w"] = _np(conv.weight)
            out[f"gen.up.{i}.conv{j}.b"] = _np(conv.bias)
        out[f"gen.up.{i}.res.w"] = _np(block.res.weight)
        out[f"gen.up.{i}.res.b"] = _np(block.res.bias)
        if block.multi_voice:
            out[f"spk.proj.{i}.w"] = _np(block.proj.weight)
            out[f"spk.proj.{i}.b"] = _np(block.proj.bias)
    for name, branch in (("sine", model.sine_branch),
                         ("loud", model.loud_branch)):
        out[f"gen.{name}.stem.w"] = _np(branch.stem.weight)
        out[f"gen.{name}.stem.b"] = _np(branch.stem.bias)
        for i, block in enumerate(branch.blocks):
            for j, conv in enumerate(block.convs):
                out[f"gen.{name}.down.{i}.conv{j}.w"] = _np(conv.weight)
                out[f"gen.{name}.down.{i}.conv{j}.b"] = _np(conv.bias)
            out[f"gen.{name}.down.{i}.res.w"] = _np(block.res.weight)
            out[f"gen.{name}.down.{i}.res.b"] = _np(block.res.bias)
        for s, film in enumerate(branch.films):
            out[f"gen.{name}.film.{s}.w"] = _np(film.conv.weight)
            out[f"gen.{name}.film.{s}.b"] = _np(film.conv.bias)
    if arch.speaker_count > 0:
        out["spk.table"] = _np(model.speaker_table.weight)
    return out


def discriminator_tensors(model: MultiScaleDiscriminator) -> dict:
    out = {}
    for k, sub in enumerate(model.subs):
        for j, conv in enumerate(sub.convs):
            out[f"disc.{k}.conv{j}.w"] = _np(conv.weight)
            out[f"disc.{k}.conv{j}.b"] = _np(conv.bias)
    return out


def export_bundle(generator: Generator, path,
                  discriminator: MultiScaleDiscriminator | None = None) -> None:
    tensors = generator_tensors(generator)
    disc_config = None
    if discriminator is not None:
        tensors.update(discriminator_tensors(discriminator))
        disc_config = discriminator.arch.to_dict()
    write_fsvc(path, tensors, generator.arch.to_dict(), disc_config)
