"""Portable checkpoint files.

Layout (all integers little-endian)::

    offset 0   8 bytes   magic b"EKGECKPT"
    offset 8   uint32    format version (1)
    offset 12  uint32    header length H in bytes
    offset 16  H bytes   UTF-8 JSON header
    offset 16+H          table payload: each table as raw float64 '<f8', C order,
                         concatenated in header order; the header gives each
                         table's name, shape and byte offset into the payload.

Header keys: ``kind``, ``episodic``, ``rank``, ``rank_t``, ``vocab_sha256``,
``tables`` (list of ``{name, role, shape, offset}``) and free-form ``meta``.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .models import ModelParams, Rank

MAGIC = b"EKGECKPT"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save(params: ModelParams, path, meta: dict | None = None) -> None:
    tables, offset = [], 0
    for name, arr in params.tables.items():
        tables.append({"name": name, "role": params.roles.get(name), "shape": list(arr.shape),
                       "offset": offset})
        offset += arr.size * 8
    header = {
        "kind": params.kind,
        "episodic": params.episodic,
        "rank": params.rank.entity,
        "rank_t": params.rank.time,
        "vocab_sha256": params.vocab_sha256,
        "tables": tables,
        "meta": meta or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        for arr in params.tables.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load(path) -> tuple[ModelParams, dict]:
    """Returns the parameters and the header's ``meta`` dictionary."""
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file")
    version, hlen = struct.unpack("<II", data[8:16])
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    header = json.loads(data[16:16 + hlen].decode("utf-8"))
    payload = memoryview(data)[16 + hlen:]
    tables, roles = {}, {}
    for t in header["tables"]:
        n = int(np.prod(t["shape"], dtype=np.int64))
        start = t["offset"]
        if start + 8 * n > len(payload):
            raise CheckpointError(f"{path}: truncated table {t['name']}")
        arr = np.frombuffer(payload[start:start + 8 * n], dtype="<f8").astype(np.float64)
        tables[t["name"]] = arr.reshape(t["shape"])
        roles[t["name"]] = t["role"]
    params = ModelParams(header["kind"], header["episodic"], Rank(header["rank"], header["rank_t"]),
                         tables, roles, header["vocab_sha256"])
    return params, header.get("meta", {})
