import glob
import logging
import os
import re
import struct
import threading
from typing import Optional

import numpy as np

from src.partitions import CoefficientTable
from src.series import EXACT, PARITY, Backend, Series

logger = logging.getLogger(__name__)

MAGIC = b"PENDLAB\0"
FORMAT_VERSION = 1
BACKEND_CODES = {"exact": 0, "parity": 1, "residue": 2}
BACKEND_KINDS = {code: kind for kind, code in BACKEND_CODES.items()}


class CacheError(ValueError):
    pass


def encode_table(table: CoefficientTable) -> bytes:
    series = table.series
    backend = series.backend
    kind = table.kind.encode("ascii")
    header = MAGIC + struct.pack("<HB", FORMAT_VERSION, len(kind)) + kind
    header += struct.pack("<BQQ", BACKEND_CODES[backend.kind], backend.modulus or 0, series.order)
    if backend.kind == "parity":
        return header + series.bitmask.to_bytes((series.order + 7) // 8, "little")
    if backend.kind == "residue":
        return header + np.asarray(series.to_numpy(), dtype="<u8").tobytes()
    chunks = [header]
    for value in series.coefficients():
        magnitude = abs(value).to_bytes((abs(value).bit_length() + 7) // 8, "little")
        chunks.append(struct.pack("<BI", 1 if value < 0 else 0, len(magnitude)) + magnitude)
    return b"".join(chunks)


def decode_table(blob: bytes) -> CoefficientTable:
    if not blob.startswith(MAGIC):
        raise CacheError("bad magic")
    pos = len(MAGIC)
    try:
        version, kind_len = struct.unpack_from("<HB", blob, pos)
        if version != FORMAT_VERSION:
            raise CacheError(f"unsupported cache format version {version}")
        pos += 3
        kind = blob[pos:pos + kind_len].decode("ascii")
        pos += kind_len
        code, modulus, order = struct.unpack_from("<BQQ", blob, pos)
        pos += 17
    except struct.error as e:
        raise CacheError(f"truncated header: {e}") from e
    if code not in BACKEND_KINDS:
        raise CacheError(f"unknown backend code {code}")
    if order < 1:
        raise CacheError("cached table has no coefficients")
    backend_kind = BACKEND_KINDS[code]
    payload = blob[pos:]
    if backend_kind == "parity":
        if len(payload) != (order + 7) // 8:
            raise CacheError("parity payload has the wrong length")
        series = Series(int.from_bytes(payload, "little") & ((1 << order) - 1), order, PARITY)
    elif backend_kind == "residue":
        if len(payload) != 8 * order:
            raise CacheError("residue payload has the wrong length")
        values = np.frombuffer(payload, dtype="<u8").astype(np.int64)
        series = Series.from_coefficients(values, Backend.residue(modulus), order)
    else:
        values = []
        offset = 0
        try:
            for _ in range(order):
                sign, length = struct.unpack_from("<BI", payload, offset)
                offset += 5
                if offset + length > len(payload):
                    raise CacheError("exact payload is truncated")
                magnitude = int.from_bytes(payload[offset:offset + length], "little")
                offset += length
                values.append(-magnitude if sign else magnitude)
        except struct.error as e:
            raise CacheError("exact payload is truncated") from e
        if offset != len(payload):
            raise CacheError("trailing bytes after exact payload")
        series = Series.from_coefficients(values, EXACT, order)
    return CoefficientTable(kind, series)


class TableCache:
    """Directory of coefficient tables, one file per (kind, backend, order)."""

    def __init__(self, cache_dir: str):
        self.cache_dir = cache_dir
        self.lock = threading.Lock()
        os.makedirs(self.cache_dir, exist_ok=True)

    def _stem(self, kind: str, backend: Backend) -> str:
        tag = backend.kind if backend.kind != "residue" else f"residue{backend.modulus}"
        return f"{kind}_{tag}"

    def path_for(self, kind: str, order: int, backend: Backend) -> str:
        return os.path.join(self.cache_dir, f"{self._stem(kind, backend)}_N{order}.bin")

    def _candidates(self, kind: str, order: int, backend: Backend):
        stem = self._stem(kind, backend)
        pattern = re.compile(re.escape(stem) + r"_N(\d+)\.bin$")
        found = []
        for path in glob.glob(os.path.join(self.cache_dir, f"{stem}_N*.bin")):
            match = pattern.search(os.path.basename(path))
            if match and int(match.group(1)) >= order:
                found.append((int(match.group(1)), path))
        return [path for _, path in sorted(found)]

    def load(self, kind: str, order: int, backend: Backend) -> Optional[CoefficientTable]:
        """Smallest cached table covering ``order``, truncated to it; None on a miss."""
        for path in self._candidates(kind, order, backend):
            with self.lock:
                with open(path, "rb") as f:
                    blob = f.read()
            table = decode_table(blob)
            if table.kind != kind or table.backend != backend:
                raise CacheError(f"{path} holds {table.kind} ({table.backend.tag})")
            logger.debug(f"Cache hit: {path}")
            return table.truncate(order)
        return None

    def store(self, table: CoefficientTable) -> str:
        path = self.path_for(table.kind, table.order, table.backend)
        blob = encode_table(table)
        with self.lock:
            tmp = path + ".tmp"
            with open(tmp, "wb") as f:
                f.write(blob)
            os.replace(tmp, path)
        logger.info(f"Cached {table.kind} table ({table.backend.tag}, N={table.order}) at {path}")
        return path
