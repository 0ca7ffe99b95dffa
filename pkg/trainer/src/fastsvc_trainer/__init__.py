"""fastsvc-trainer: toy-scale training and weight export for the fastsvc
inference engine."""

from .data import ToyClip, ToyDataset, dataset_digest, make_toy_dataset
from .export import export_bundle, generator_tensors
from .models import GenArch, Generator, MultiScaleDiscriminator
from .parity import parity_check
from .train import TrainConfig, TrainResult, train, train_step_d, train_step_g

__version__ = "0.1.0"
