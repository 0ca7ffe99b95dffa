import subprocess
import sys

import pytest

from fastsvc_trainer.train import TrainConfig

# short segments and narrow channels keep unit tests fast; the acceptance
# module runs the real toy scale
FAST_KW = dict(segment_seconds=0.2, n_clips=3, batch_size=2,
               linguistic_dim=12, up_channels=(8, 8, 6, 4),
               total_steps=10, disc_start_step=5, decay_interval=4)


def fast_config(**overrides) -> TrainConfig:
    kw = dict(FAST_KW)
    kw.update(overrides)
    return TrainConfig(**kw)


def engine_cli(args, check=True):
    """Run the installed fastsvc engine CLI; the only engine access path."""
    proc = subprocess.run([sys.executable, "-m", "fastsvc", *args],
                          capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"engine CLI failed: {proc.stderr}")
    return proc


def engine_kv(proc) -> dict:
    out = {}
    for line in proc.stdout.strip().splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            out[key] = value
    return out


@pytest.fixture(scope="session")
def trained_briefly():
    """A 3-step training run shared by export/parity tests."""
    from fastsvc_trainer.train import train

    config = fast_config(total_steps=3, disc_start_step=2)
    return train(config)
