import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fastsvc import DiscriminatorConfig, GeneratorConfig, random_bundle

DATA_DIR = Path(__file__).parent / "data"

# full-depth architecture at toy width; real factor/dilation schedule
SMALL_CONFIG = GeneratorConfig(
    linguistic_dim=8,
    linguistic_hop=320,
    up_factors=(4, 4, 4, 5),
    up_channels=(16, 12, 8, 8),
)

# minimal everything, for exhaustive/naive-oracle tests
TINY_CONFIG = GeneratorConfig(
    linguistic_dim=6,
    linguistic_hop=12,
    up_factors=(2, 3, 2),
    up_channels=(10, 6, 4),
    up_dilations=(1, 2),
    down_dilations=(1, 2),
)

TINY_MULTI_CONFIG = GeneratorConfig(
    linguistic_dim=6,
    linguistic_hop=12,
    up_factors=(2, 3, 2),
    up_channels=(10, 6, 4),
    up_dilations=(1, 2),
    down_dilations=(1, 2),
    speaker_count=3,
    speaker_embed_dim=5,
    speaker_names=("alto", "tenor", "bass"),
)

TINY_DISC_CONFIG = DiscriminatorConfig(
    layers=((4, 15, 1, 1), (8, 41, 4, 4), (8, 5, 1, 1), (1, 3, 1, 1)),
)


@pytest.fixture(scope="session")
def small_bundle():
    return random_bundle(SMALL_CONFIG, seed=11)


@pytest.fixture(scope="session")
def tiny_bundle():
    return random_bundle(TINY_CONFIG, seed=7)


@pytest.fixture(scope="session")
def tiny_multi_bundle():
    return random_bundle(TINY_MULTI_CONFIG, seed=7)


@pytest.fixture(scope="session")
def tiny_disc_bundle():
    return random_bundle(TINY_CONFIG, seed=9, disc_config=TINY_DISC_CONFIG)


def make_inputs(config, frames, seed=0):
    """Seeded (ling, excitation, loudness) inputs for a forward pass."""
    from fastsvc import LinguisticFeatures
    from fastsvc.dsp import generate_excitation, upsample_linear

    rng = np.random.default_rng(seed)
    target = frames * config.linguistic_hop
    ling = LinguisticFeatures(
        data=rng.standard_normal((frames, config.linguistic_dim)).astype(np.float32),
        hop=config.linguistic_hop,
    )
    f0 = np.full(target, 220.0)
    excitation = generate_excitation(f0, config.sample_rate, noise_seed=seed)
    n_loud = -(-target // 64)
    loudness = upsample_linear(rng.uniform(-1, 1, n_loud), 64, target)
    return ling, excitation, loudness
