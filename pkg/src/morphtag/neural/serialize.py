"""Versioned binary container for named tensors plus a JSON metadata header.

Layout (all integers little-endian)::

    offset  size  content
    0       8     magic b"MTAGMODL"
    8       4     uint32 format version (currently 1)
    12      8     uint64 header length N in bytes
    20      N     UTF-8 JSON header, keys sorted, no whitespace
    20+N    ...   tensor payload: each tensor's raw values, C order,
                  IEEE-754 little-endian (<f8 or <f4), back to back in the
                  order listed by header["tensors"]

``header["tensors"]`` is a list of ``{"name", "dtype", "shape", "offset"}``
records, offsets counted from the start of the payload.  ``header["meta"]``
holds the caller's metadata (configuration, inventories, vocabulary).
Nothing time- or host-dependent is written, so identical models give
identical files.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import ModelFormatError

MAGIC = b"MTAGMODL"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<8sIQ")
_DTYPES = {"<f8": np.dtype("<f8"), "<f4": np.dtype("<f4")}


def dumps(meta: dict, tensors: dict[str, np.ndarray]) -> bytes:
    records = []
    chunks = []
    offset = 0
    for name in sorted(tensors):
        arr = np.asarray(tensors[name])
        dt = arr.dtype.newbyteorder("<")
        if dt.str not in _DTYPES:
            raise ModelFormatError(f"unsupported tensor dtype {arr.dtype} for {name}")
        raw = np.ascontiguousarray(arr, dtype=dt).tobytes()
        records.append({"name": name, "dtype": dt.str, "shape": list(arr.shape), "offset": offset})
        chunks.append(raw)
        offset += len(raw)
    header = json.dumps({"meta": meta, "tensors": records}, sort_keys=True,
                        separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    return _PREFIX.pack(MAGIC, FORMAT_VERSION, len(header)) + header + b"".join(chunks)


def loads(blob: bytes) -> tuple[dict, dict[str, np.ndarray]]:
    if len(blob) < _PREFIX.size:
        raise ModelFormatError("model file truncated")
    magic, version, hlen = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise ModelFormatError("not a morphtag model file (bad magic)")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {version} (this build reads version {FORMAT_VERSION})")
    start = _PREFIX.size
    try:
        header = json.loads(blob[start:start + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"corrupt model header: {exc}") from None
    payload = memoryview(blob)[start + hlen:]
    tensors = {}
    for rec in header["tensors"]:
        dt = _DTYPES.get(rec["dtype"])
        if dt is None:
            raise ModelFormatError(f"unsupported tensor dtype {rec['dtype']}")
        count = int(np.prod(rec["shape"], dtype=np.int64))
        end = rec["offset"] + count * dt.itemsize
        if end > len(payload):
            raise ModelFormatError(f"model file truncated inside tensor {rec['name']}")
        arr = np.frombuffer(payload[rec["offset"]:end], dtype=dt).reshape(rec["shape"])
        tensors[rec["name"]] = arr.astype(dt.newbyteorder("="), copy=True)
    return header["meta"], tensors


def save(path: str | Path, meta: dict, tensors: dict[str, np.ndarray]) -> None:
    Path(path).write_bytes(dumps(meta, tensors))


def load(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    return loads(Path(path).read_bytes())
