"""Adaptive frame selection for medical image sequences.

Thin wrapper over the compiled ``_afse`` extension. Directory-level calls
return the same JSON documents the ``afse`` command line writes.
"""

import json

from ._afse import (
    InvalidArgument,
    IoError,
    NotFound,
    SchemaError,
    brightness,
    composite_score,
    contrast,
    dice,
    edge_map,
    features,
    hu_moments,
    iou,
    kmeans,
    load_image,
    load_mask,
    run_cli,
    select_representatives,
    split_ids,
    to_grayscale,
)
from . import _afse

__all__ = [
    "InvalidArgument",
    "IoError",
    "NotFound",
    "SchemaError",
    "brightness",
    "composite_score",
    "contrast",
    "derive_prompts",
    "dice",
    "edge_map",
    "features",
    "hu_moments",
    "iou",
    "kmeans",
    "load_image",
    "load_mask",
    "run_cli",
    "score_frames",
    "select_frames",
    "select_representatives",
    "split_ids",
    "to_grayscale",
]


def score_frames(input_dir, reference=None, jobs=1):
    """Score every frame in a directory; returns the score manifest."""
    return json.loads(_afse._score_dir(str(input_dir), reference, jobs))


def select_frames(input_dir, k=5, seed=2024, strategy="afse", reference=None,
                  weights=(0.2, 0.2, 0.2, 0.2, 0.2), normalize_features=False,
                  cluster_features=False, jobs=1):
    """Select k representative frames; returns the selection manifest."""
    return json.loads(_afse._select_dir(str(input_dir), k, seed, strategy, reference,
                                        list(weights), normalize_features,
                                        cluster_features, jobs))


def derive_prompts(mask, strategy="bbox", seed=2024, frame_id=""):
    """Derive a point or box prompt from a binary mask array."""
    return json.loads(_afse._derive_prompts(mask, strategy, seed, frame_id))
