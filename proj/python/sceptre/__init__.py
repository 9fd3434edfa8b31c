"""Substitute and complement product graphs from text, categories and links."""

import json

from ._sceptre import (
    Checkpoint,
    SceptreError,
    Session,
    default_config,
    run_cli,
    synthesize,
)
from ._sceptre import train as _train

__all__ = [
    "Checkpoint",
    "SceptreError",
    "Session",
    "default_config",
    "run_cli",
    "synthesize",
    "train",
]


def train(data, model, **config):
    """Train on the corpus in `data` and write the model directory `model`.

    Keyword arguments override config keys, e.g. ``train(d, m, outer_rounds=5, seed=3)``.
    """
    return _train(str(data), str(model), json.dumps(config))
