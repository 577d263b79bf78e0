"""On-disk cache of enumerated value scales.

File layout (little endian)::

    magic      8s   b"MTVSCALE"
    version    u32
    kind       8s   measure kind, NUL padded
    p          f64  RBP persistence, NaN when absent
    log_base   u32  0 when absent
    n          u32
    rb         u32  0 for an unbounded recall base
    count      u64
    quantum    f64
    values     count x f64
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
import threading
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .exceptions import ContractError
from .measures import MeasureSpec
from .run_space import QUANTUM, ValueScale, enumerate_scale, quantize

MAGIC = b"MTVSCALE"
VERSION = 1
_HEADER = struct.Struct("<8sI8sdIIIQd")


def encode_scale(scale: ValueScale) -> bytes:
    spec = scale.spec
    header = _HEADER.pack(
        MAGIC, VERSION, spec.kind.encode("ascii"),
        math.nan if spec.p is None else float(spec.p),
        spec.log_base or 0, scale.n, scale.rb or 0, len(scale), scale.quantum)
    return header + np.asarray(scale.values, dtype="<f8").tobytes()


def decode_scale(data: bytes) -> ValueScale:
    if len(data) < _HEADER.size:
        raise ContractError("truncated scale file")
    magic, version, kind, p, base, n, rb, count, quantum = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ContractError("not a scale file (bad magic)")
    if version != VERSION:
        raise ContractError(f"unsupported scale file version {version}")
    values = np.frombuffer(data, dtype="<f8", count=count, offset=_HEADER.size)
    spec = MeasureSpec(kind.rstrip(b"\0").decode("ascii"), n,
                       None if math.isnan(p) else p, base or None)
    if quantum != QUANTUM:
        raise ContractError(f"scale file quantum {quantum} differs from {QUANTUM}")
    return ValueScale(spec, n, rb or None, quantize(values), None, quantum)


def cache_key(spec: MeasureSpec, n: int, rb: Optional[int]) -> Tuple:
    return (spec.kind, spec.p, spec.log_base, n, rb)


class ScaleCache:
    """Memoises scales in memory and, when given a directory, on disk.

    Reads may happen concurrently; writes are serialised and atomic.
    """

    def __init__(self, directory: Optional[os.PathLike] = None,
                 caps: Optional[Dict[str, int]] = None):
        self.directory = Path(directory) if directory is not None else None
        self.caps = caps
        self._memory: Dict[Tuple, ValueScale] = {}
        self._lock = threading.Lock()
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key) -> Path:
        kind, p, base, n, rb = key
        params = f"p{p!r}" if p is not None else (f"b{base}" if base else "")
        return self.directory / f"{kind}{params}_n{n}_rb{rb or 'inf'}.mtvs"

    def get(self, spec: MeasureSpec, n: int, rb: Optional[int] = None,
            need_counts: bool = False,
            build: Optional[Callable[[], ValueScale]] = None) -> ValueScale:
        key = cache_key(spec, n, rb)
        scale = self._memory.get(key)
        if scale is not None and (scale.counts is not None or not need_counts):
            return scale
        if not need_counts and self.directory is not None:
            path = self._path(key)
            if path.exists():
                scale = decode_scale(path.read_bytes())
                self._memory.setdefault(key, scale)
                return scale
        if build is None:
            scale = enumerate_scale(spec.with_cutoff(n), n, rb, caps=self.caps)
        else:
            scale = build()
        with self._lock:
            self._memory[key] = scale
            if self.directory is not None:
                self._write(self._path(key), encode_scale(scale))
        return scale

    def _write(self, path: Path, data: bytes) -> None:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
