import json
import struct

import numpy as np
import pytest

from conftest import ALL_VARIANTS, VARIANT_IDS, random_params, small_vocab
from ekge import checkpoint, models


@pytest.mark.parametrize("kind,episodic", ALL_VARIANTS, ids=VARIANT_IDS)
def test_round_trip_is_bitwise(kind, episodic, tmp_path):
    p = random_params(kind, episodic, small_vocab(), rank=3, seed=1)
    checkpoint.save(p, tmp_path / "m.ckpt", meta={"note": "x"})
    q, meta = checkpoint.load(tmp_path / "m.ckpt")
    assert meta == {"note": "x"}
    assert (q.kind, q.episodic, q.rank, q.vocab_sha256, q.roles) == (p.kind, p.episodic, p.rank,
                                                                       p.vocab_sha256, p.roles)
    for k in p.tables:
        assert q.tables[k].tobytes() == p.tables[k].tobytes()


def test_end_tables_survive(tmp_path):
    p = random_params("complex", True, small_vocab(), end_time=True)
    checkpoint.save(p, tmp_path / "m.ckpt")
    q, _ = checkpoint.load(tmp_path / "m.ckpt")
    assert q.has_end_time


def test_layout_is_documented_header_then_payload(tmp_path):
    p = random_params("distmult", False, small_vocab(), rank=2)
    checkpoint.save(p, tmp_path / "m.ckpt")
    raw = (tmp_path / "m.ckpt").read_bytes()
    assert raw[:8] == b"EKGECKPT"
    version, hlen = struct.unpack("<II", raw[8:16])
    header = json.loads(raw[16:16 + hlen])
    assert version == 1 and header["kind"] == "distmult" and header["episodic"] is False
    first = header["tables"][0]
    n = int(np.prod(first["shape"]))
    arr = np.frombuffer(raw[16 + hlen + first["offset"]:16 + hlen + first["offset"] + 8 * n], "<f8")
    np.testing.assert_array_equal(arr.reshape(first["shape"]), p.tables[first["name"]])
    assert len(raw) == 16 + hlen + 8 * p.n_params()


def test_corrupt_files_are_rejected(tmp_path):
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b"NOTACKPT" + b"\0" * 16)
    with pytest.raises(checkpoint.CheckpointError):
        checkpoint.load(bad)
    p = random_params("cont", True, small_vocab())
    checkpoint.save(p, tmp_path / "m.ckpt")
    data = (tmp_path / "m.ckpt").read_bytes()
    (tmp_path / "t.ckpt").write_bytes(data[:-8])
    with pytest.raises(checkpoint.CheckpointError, match="truncated"):
        checkpoint.load(tmp_path / "t.ckpt")
    (tmp_path / "v.ckpt").write_bytes(data[:8] + struct.pack("<I", 99) + data[12:])
    with pytest.raises(checkpoint.CheckpointError, match="version"):
        checkpoint.load(tmp_path / "v.ckpt")
