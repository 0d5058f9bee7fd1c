"""On-disk cache of eigendecompositions.

Record layout (little-endian)::

    b"KCEIG\\0"                 magic
    uint32                     header length in bytes
    header                     UTF-8 JSON: format_version, N, source, seed, cluster_tol
    float64[N]                 eigenphases
    float64[N*N]               eigenvectors, column-major (column n = state n)
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import struct
from pathlib import Path

import numpy as np

from .spectral import EigenDecomposition

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAGIC = b"KCEIG\0"
CACHE_ENV = "KICKED_CHAOS_CACHE"


def cache_dir_from_env() -> Path | None:
    value = os.environ.get(CACHE_ENV)
    return Path(value) if value else None


def cache_key(source: dict, seed: int | None, cluster_tol: float) -> str:
    payload = {"source": source, "seed": seed, "cluster_tol": cluster_tol, "format_version": FORMAT_VERSION}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:32]


def write_decomposition(path: Path, decomp: EigenDecomposition, header: dict):
    header = {"format_version": FORMAT_VERSION, "N": decomp.N, **header}
    blob = json.dumps(header, sort_keys=True).encode()
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.asarray(decomp.phases, dtype="<f8").tobytes())
        fh.write(np.asarray(decomp.vectors, dtype="<f8").tobytes(order="F"))
    os.replace(tmp, path)


def read_decomposition(path: Path) -> tuple[EigenDecomposition, dict]:
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise ValueError(f"{path} is not an eigendecomposition record")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode())
        N = int(header["N"])
        phases = np.frombuffer(fh.read(8 * N), dtype="<f8").astype(float)
        raw = fh.read(8 * N * N)
        if len(raw) != 8 * N * N:
            raise ValueError(f"{path} is truncated")
        vectors = np.frombuffer(raw, dtype="<f8").reshape((N, N), order="F").astype(float, order="C")
    return EigenDecomposition(phases, vectors), header


class DecompositionCache:
    def __init__(self, directory: Path | None):
        self.directory = Path(directory) if directory else None

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.eig"

    def load(self, key: str, expect: dict) -> EigenDecomposition | None:
        if self.directory is None:
            return None
        path = self._path(key)
        if not path.exists():
            return None
        try:
            decomp, header = read_decomposition(path)
        except (OSError, ValueError, KeyError) as exc:
            log.warning("ignoring unreadable cache record %s: %s", path, exc)
            return None
        if header.get("format_version") != FORMAT_VERSION or any(header.get(k) != v for k, v in expect.items()):
            log.warning("cache record %s does not match this run; recomputing", path)
            return None
        return decomp

    def store(self, key: str, decomp: EigenDecomposition, header: dict):
        if self.directory is not None:
            write_decomposition(self._path(key), decomp, header)
