"""Binary/JSON container, atomic file writes and CSV output.

Container layout::

    b"LC2D"  version byte  uint64-le header length  JSON header (utf-8)  payload

The header lists the payload arrays in order as ``{"name", "dtype", "shape"}``
entries under ``"arrays"``; the payload is their raw little-endian bytes.
"""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"LC2D"
VERSION = 1


def atomic_write_bytes(path, data: bytes) -> None:
    """Write ``data`` to ``path`` via a temporary file in the same directory and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def params_hash(obj) -> str:
    """Short stable hash of a JSON-serialisable parameter record."""
    blob = json.dumps(obj, sort_keys=True, default=_json_default).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def encode_blob(header: dict, arrays: dict[str, np.ndarray]) -> bytes:
    header = dict(header)
    specs = []
    payload = []
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(arr)
        arr = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
        specs.append({"name": name, "dtype": arr.dtype.str, "shape": list(arr.shape)})
        payload.append(arr.tobytes())
    header["arrays"] = specs
    head = json.dumps(header, sort_keys=True, default=_json_default).encode("utf-8")
    return MAGIC + bytes([VERSION]) + struct.pack("<Q", len(head)) + head + b"".join(payload)


def decode_blob(data: bytes):
    if data[:4] != MAGIC:
        raise ValueError("not an LC2D container")
    if data[4] != VERSION:
        raise ValueError(f"unsupported container version {data[4]}")
    (n,) = struct.unpack("<Q", data[5:13])
    header = json.loads(data[13:13 + n].decode("utf-8"))
    offset = 13 + n
    arrays = {}
    for spec in header["arrays"]:
        dtype = np.dtype(spec["dtype"])
        count = int(np.prod(spec["shape"], dtype=np.int64))
        nbytes = count * dtype.itemsize
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
        arrays[spec["name"]] = arr.reshape(spec["shape"]).copy()
        offset += nbytes
    if offset != len(data):
        raise ValueError("trailing bytes in LC2D container")
    return header, arrays


def write_blob(path, header: dict, arrays: dict[str, np.ndarray]) -> None:
    atomic_write_bytes(path, encode_blob(header, arrays))


def read_blob(path):
    return decode_blob(Path(path).read_bytes())


def csv_text(columns: list[str], rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_csv(path, columns: list[str], rows) -> None:
    atomic_write_text(path, csv_text(columns, rows))
