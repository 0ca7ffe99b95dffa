"""Model shape/structure contracts."""

import torch

from fastsvc_trainer.export import generator_tensors
from fastsvc_trainer.models import (
    TOY_DISC,
    GenArch,
    Generator,
    MultiScaleDiscriminator,
)


def _tiny_arch(**kw):
    base = dict(linguistic_dim=12, up_channels=(8, 8, 6, 4))
    base.update(kw)
    return GenArch(**base)


class TestGenerator:
    def test_output_length_law(self):
        torch.manual_seed(0)
        g = Generator(_tiny_arch())
        for frames in (1, 3, 10):
            t = frames * 320
            out = g(torch.randn(2, frames, 12), torch.randn(2, t),
                    torch.randn(2, t))
            assert out.shape == (2, t)

    def test_output_bounded(self):
        torch.manual_seed(1)
        g = Generator(_tiny_arch())
        out = g(torch.randn(1, 5, 12), torch.randn(1, 1600),
                torch.randn(1, 1600))
        assert out.abs().max() <= 1.0

    def test_multi_voice_speaker_changes_output(self):
        torch.manual_seed(2)
        g = Generator(_tiny_arch(speaker_count=3))
        ling = torch.randn(1, 4, 12)
        exc, loud = torch.randn(1, 1280), torch.randn(1, 1280)
        a = g(ling, exc, loud, torch.tensor([0]))
        b = g(ling, exc, loud, torch.tensor([1]))
        assert (a - b).abs().max() > 0

    def test_tensor_name_schema(self):
        torch.manual_seed(3)
        arch = _tiny_arch(speaker_count=2)
        tensors = generator_tensors(Generator(arch))
        names = set(tensors)
        assert "gen.stem.w" in names and "gen.head.b" in names
        assert "spk.table" in names and "spk.proj.3.w" in names
        for branch in ("sine", "loud"):
            for i in range(4):
                assert f"gen.{branch}.film.{i}.w" in names
            for i in range(3):
                assert f"gen.{branch}.down.{i}.res.b" in names
        assert tensors["gen.stem.w"].shape == (8, 12, 3)
        assert tensors["gen.head.w"].shape == (1, 4, 7)
        assert tensors["gen.sine.film.3.w"].shape == (8, 4, 3)
        assert tensors["spk.table"].shape == (2, 64)


class TestDiscriminator:
    def test_three_scale_maps(self):
        torch.manual_seed(4)
        d = MultiScaleDiscriminator(TOY_DISC)
        maps = d(torch.randn(2, 8000))
        assert len(maps) == 3
        t0, t1, t2 = (m.shape[-1] for m in maps)
        assert abs(t1 * 2 - t0) <= 1
        assert abs(t2 * 2 - t1) <= 1

    def test_map_channel_is_one(self):
        torch.manual_seed(5)
        d = MultiScaleDiscriminator(TOY_DISC)
        for m in d(torch.randn(1, 4096)):
            assert m.shape[1] == 1
