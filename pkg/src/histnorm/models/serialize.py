"""Model files.

Layout: the magic string ``HTNORM1\\n``, one UTF-8 JSON header line
(format version, model config, vocabulary as an ordered character list,
and a parameter manifest with name/shape/byte offset), then the raw
parameter blocks as little-endian float64 in manifest order.
"""

from __future__ import annotations

import json

import numpy as np

from histnorm.models.config import ModelConfig
from histnorm.models.training import build_model
from histnorm.models.vocab import CharVocab

MAGIC = b"HTNORM1\n"
FORMAT_VERSION = 1


class ModelFormatError(Exception):
    pass


class NotAModelFileError(ModelFormatError):
    pass


class ModelVersionError(ModelFormatError):
    pass


class TruncatedModelError(ModelFormatError):
    pass


def save_model(model, path) -> None:
    params = model.parameters()
    manifest = []
    offset = 0
    for p in params:
        manifest.append({"name": p.name, "shape": list(p.data.shape), "offset": offset})
        offset += p.data.size * 8
    header = {
        "version": FORMAT_VERSION,
        "kind": model.kind,
        "config": model.config.to_dict(),
        "vocab": model.vocab.chars,
        "params": manifest,
    }
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(json.dumps(header, ensure_ascii=False, sort_keys=True).encode("utf-8"))
        f.write(b"\n")
        for p in params:
            f.write(np.ascontiguousarray(p.data, dtype="<f8").tobytes())


def load_model(path):
    with open(path, "rb") as f:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise NotAModelFileError(f"{path}: not a model file (bad magic)")
        header_line = f.readline()
        if not header_line.endswith(b"\n"):
            raise TruncatedModelError(f"{path}: header line incomplete")
        try:
            header = json.loads(header_line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ModelFormatError(f"{path}: unreadable header: {e}") from e
        version = header.get("version")
        if version != FORMAT_VERSION:
            raise ModelVersionError(
                f"{path}: format version {version!r} not supported (expected {FORMAT_VERSION})"
            )
        try:
            config = ModelConfig.from_dict(header["config"])
            vocab = CharVocab(header["vocab"])
            manifest = header["params"]
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError(f"{path}: malformed header: {e}") from e
        model = build_model(config, vocab, np.random.default_rng(config.seed))

        expected = {p.name: p for p in model.parameters()}
        if sorted(expected) != sorted(entry["name"] for entry in manifest):
            raise ModelFormatError(f"{path}: parameter manifest does not match the architecture")
        offset = 0
        for entry in manifest:
            p = expected[entry["name"]]
            shape = tuple(entry["shape"])
            if shape != p.data.shape:
                raise ModelFormatError(
                    f"{path}: parameter {entry['name']!r} has shape {shape}, expected {p.data.shape}"
                )
            if entry["offset"] != offset:
                raise ModelFormatError(f"{path}: bad offset for parameter {entry['name']!r}")
            nbytes = p.data.size * 8
            blob = f.read(nbytes)
            if len(blob) < nbytes:
                raise TruncatedModelError(
                    f"{path}: truncated while reading parameter {entry['name']!r}"
                )
            p.data[...] = np.frombuffer(blob, dtype="<f8").reshape(p.data.shape)
            offset += nbytes
        if f.read(1):
            raise ModelFormatError(f"{path}: trailing data after parameters")
    return model
