"""Header + raw little-endian float container used for checkpoints and dataset caches.

Layout (all integers little-endian)::

    offset 0   4 bytes   magic  b"QLFC"
    offset 4   uint32    format version (currently 1)
    offset 8   uint64    header length H in bytes
    offset 16  H bytes   UTF-8 JSON header, keys sorted, no whitespace
    offset 16+H          zero padding up to the next multiple of 8
    data section         arrays back to back, each starting on an 8-byte boundary

The header is ``{"arrays": [...], "format_version": 1, "meta": {...}}``; each
array entry carries ``name``, ``shape``, ``dtype`` (``"<f8"`` or ``"<f4"``),
``offset`` (bytes from the start of the data section) and ``nbytes``.
Arrays are stored row-major (C order). ``docs/container_format.md`` has a
worked example.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"QLFC"
FORMAT_VERSION = 1
_DTYPES = {"<f8": np.dtype("<f8"), "<f4": np.dtype("<f4")}


def _pad(n: int) -> int:
    return (-n) % 8


def encode(arrays: dict, meta: dict | None = None) -> bytes:
    """Serialize ``arrays`` (name -> float array) in insertion order."""
    entries, blobs, offset = [], [], 0
    for name, arr in arrays.items():
        arr = np.asarray(arr)
        dtype = "<f4" if arr.dtype == np.float32 else "<f8"
        raw = np.ascontiguousarray(arr, dtype=_DTYPES[dtype]).tobytes()
        entries.append({"name": name, "shape": list(arr.shape), "dtype": dtype, "offset": offset, "nbytes": len(raw)})
        blobs.append(raw + b"\0" * _pad(len(raw)))
        offset += len(raw) + _pad(len(raw))
    header = json.dumps(
        {"arrays": entries, "format_version": FORMAT_VERSION, "meta": meta or {}},
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    prefix = MAGIC + struct.pack("<IQ", FORMAT_VERSION, len(header)) + header
    return prefix + b"\0" * _pad(len(prefix)) + b"".join(blobs)


def decode(buf: bytes) -> tuple[dict, dict]:
    if buf[:4] != MAGIC:
        raise ValueError("not a container file (bad magic)")
    if len(buf) < 16:
        raise ValueError("container truncated inside the fixed header")
    version, hlen = struct.unpack_from("<IQ", buf, 4)
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported container version {version}")
    header = json.loads(buf[16 : 16 + hlen].decode("utf-8"))
    start = 16 + hlen
    start += _pad(start)
    arrays = {}
    for e in header["arrays"]:
        lo = start + e["offset"]
        if lo + e["nbytes"] > len(buf):
            raise ValueError(f"container truncated inside array {e['name']!r}")
        data = np.frombuffer(buf[lo : lo + e["nbytes"]], dtype=_DTYPES[e["dtype"]])
        arrays[e["name"]] = data.reshape(e["shape"]).copy()
    return arrays, header["meta"]


def save(path, arrays: dict, meta: dict | None = None) -> None:
    Path(path).write_bytes(encode(arrays, meta))


def load(path) -> tuple[dict, dict]:
    return decode(Path(path).read_bytes())
