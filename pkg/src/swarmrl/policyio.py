"""Save/load trained policies as JSON with exact decimal round-tripping.

Weights are stored row-major as decimal strings with 17 significant digits,
which reproduces every float64 bit-exactly on load; saving a loaded file
again yields byte-identical output.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .nets import Mlp
from .ppo import PolicyArtifact

__all__ = ["FORMAT_VERSION", "save_policy", "load_policy"]

FORMAT_VERSION = 1


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _net_to_doc(net: Mlp) -> dict:
    return {
        "layer_dims": list(net.layer_dims),
        "output_activation": net.output_activation,
        "weights": [[_fmt(v) for v in w.ravel()] for w in net.weights],
        "biases": [[_fmt(v) for v in b] for b in net.biases],
    }


def _net_from_doc(doc: dict) -> Mlp:
    dims = [int(d) for d in doc["layer_dims"]]
    weights = [
        np.array([float(s) for s in flat]).reshape(dims[l + 1], dims[l])
        for l, flat in enumerate(doc["weights"])
    ]
    biases = [np.array([float(s) for s in flat]) for flat in doc["biases"]]
    return Mlp(layer_dims=dims, weights=weights, biases=biases,
               output_activation=doc["output_activation"])


def save_policy(artifact: PolicyArtifact, path) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "actor": _net_to_doc(artifact.actor),
        "critic": _net_to_doc(artifact.critic),
        "metadata": artifact.metadata,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_policy(path) -> PolicyArtifact:
    doc = json.loads(Path(path).read_text())
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported policy file version {version!r} (expected {FORMAT_VERSION})")
    return PolicyArtifact(
        actor=_net_from_doc(doc["actor"]),
        critic=_net_from_doc(doc["critic"]),
        metadata=doc["metadata"],
    )
