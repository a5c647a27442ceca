"""Normalized compression distance matrices from raw files.

    NCD(x, y) = (C(xy) - min(C(x), C(y))) / max(C(x), C(y))

where ``C`` is the compressed length in bytes and ``xy`` the concatenation.
Matrix entries take the larger of the two concatenation orders so the
result is exactly symmetric.
"""

from __future__ import annotations

import bz2
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .costs import DistanceMatrix
from .errors import InputError


@dataclass(frozen=True)
class Compressor:
    """A named, deterministic ``bytes -> compressed length`` function."""

    name: str
    compress: Callable[[bytes], bytes]
    params: dict = field(default_factory=dict)

    def compressed_size(self, data: bytes) -> int:
        return len(self.compress(data))


def _zlib(level: int) -> Compressor:
    return Compressor("zlib", lambda b: zlib.compress(b, level), {"level": level, "window_bits": 15})


def _bz2(level: int) -> Compressor:
    # bzip2 blocks are level * 100 kB; inputs (or concatenations) longer than
    # one block are compressed blockwise and lose cross-block redundancy
    return Compressor("bz2", lambda b: bz2.compress(b, level), {"level": level, "block_size": level * 100_000})


COMPRESSORS: dict[str, Callable[[], Compressor]] = {
    "zlib": lambda: _zlib(9),
    "bz2": lambda: _bz2(9),
}
COMPRESSORS["deflate"] = COMPRESSORS["zlib"]
COMPRESSORS["bzip2"] = COMPRESSORS["bz2"]


def get_compressor(name: str) -> Compressor:
    try:
        return COMPRESSORS[name]()
    except KeyError:
        raise InputError(f"unknown compressor {name!r}; choose from {sorted(COMPRESSORS)}") from None


@dataclass
class Corpus:
    """Ordered ``(label, contents)`` pairs."""

    items: list[tuple[str, bytes]]

    def __post_init__(self):
        labels = [lab for lab, _ in self.items]
        if len(set(labels)) != len(labels):
            raise InputError("corpus labels must be unique")
        for lab, data in self.items:
            if not data:
                raise InputError(f"object {lab!r} is empty")

    @property
    def labels(self) -> list[str]:
        return [lab for lab, _ in self.items]

    def __len__(self) -> int:
        return len(self.items)

    @classmethod
    def from_directory(cls, path) -> "Corpus":
        """Every regular file in ``path`` (sorted by name); label = filename."""
        path = Path(path)
        if not path.is_dir():
            raise InputError(f"{path} is not a directory")
        files = sorted(p for p in path.iterdir() if p.is_file())
        return cls([(p.name, _read(p)) for p in files])

    @classmethod
    def from_manifest(cls, path) -> "Corpus":
        """Lines of ``label path``; relative paths resolve against the manifest."""
        path = Path(path)
        items = []
        for lineno, line in enumerate(_read(path).decode().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'label path'")
            label, target = parts
            target = Path(target)
            if not target.is_absolute():
                target = path.parent / target
            items.append((label, _read(target)))
        return cls(items)

    @classmethod
    def load(cls, path) -> "Corpus":
        return cls.from_directory(path) if Path(path).is_dir() else cls.from_manifest(path)

    def write(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for label, data in self.items:
            (directory / label).write_bytes(data)


def _read(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def ncd_pair(x: bytes, y: bytes, c: Compressor, cx: int | None = None, cy: int | None = None) -> float:
    """NCD with ``x`` first in the concatenation. ``cx``/``cy`` may pass
    precomputed singleton sizes."""
    if not x or not y:
        raise InputError("NCD is undefined for empty inputs")
    cx = c.compressed_size(x) if cx is None else cx
    cy = c.compressed_size(y) if cy is None else cy
    cxy = c.compressed_size(x + y)
    return (cxy - min(cx, cy)) / max(cx, cy)


def ncd_matrix(corpus: Corpus, c: Compressor, workers: int = 1) -> DistanceMatrix:
    """Pairwise NCD over a corpus; entry ``(i, j)`` is the max over both
    concatenation orders. The diagonal holds ``NCD(x, x)``."""
    n = len(corpus)
    if n < 4:
        raise InputError(f"need at least 4 objects, got {n}")
    data = [d for _, d in corpus.items]
    labels = corpus.labels

    def size(i: int) -> int:
        return c.compressed_size(data[i])

    def pair(ij: tuple[int, int]) -> float:
        i, j = ij
        try:
            if i == j:
                return ncd_pair(data[i], data[i], c, sizes[i], sizes[i])
            return max(
                ncd_pair(data[i], data[j], c, sizes[i], sizes[j]),
                ncd_pair(data[j], data[i], c, sizes[j], sizes[i]),
            )
        except Exception as exc:
            raise InputError(f"NCD failed for ({labels[i]}, {labels[j]}): {exc}") from exc

    jobs = [(i, j) for i in range(n) for j in range(i, n)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            sizes = list(pool.map(size, range(n)))
            values = list(pool.map(pair, jobs))
    else:
        sizes = [size(i) for i in range(n)]
        values = [pair(ij) for ij in jobs]
    d = np.zeros((n, n))
    for (i, j), v in zip(jobs, values):
        d[i, j] = d[j, i] = v
    return DistanceMatrix(labels, d)


def order_asymmetry(corpus: Corpus, c: Compressor) -> float:
    """Largest ``|NCD(x, y) - NCD(y, x)|`` over all pairs of the corpus."""
    data = [d for _, d in corpus.items]
    sizes = [c.compressed_size(d) for d in data]
    worst = 0.0
    for i in range(len(data)):
        for j in range(i + 1, len(data)):
            a = ncd_pair(data[i], data[j], c, sizes[i], sizes[j])
            b = ncd_pair(data[j], data[i], c, sizes[j], sizes[i])
            worst = max(worst, abs(a - b))
    return worst
