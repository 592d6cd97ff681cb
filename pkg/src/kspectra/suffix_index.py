"""Suffix array + LCP index over the valid blocks of a genome.

Each valid block is followed by its own separator code, all separators
being distinct and smaller than every symbol.  Separator suffixes are
dropped after construction, so ``sa`` lists exactly the unmasked genome
positions, and no common prefix ever extends across a block end.
"""

from __future__ import annotations

import hashlib
import logging
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from ._sais import kasai_lcp, sa_is
from .seqcore import Genome

__all__ = [
    "KmerInterval",
    "SuffixIndex",
    "build_index",
    "genome_digest",
    "kmer_intervals",
    "load_index",
    "max_repeat_length",
    "min_hapax_length",
    "save_index",
]

logger = logging.getLogger(__name__)

_MAGIC = b"KSPI"
_VERSION = 1


class KmerInterval(NamedTuple):
    kmer: str
    multiplicity: int
    positions: np.ndarray  # sorted, 0-based


def _block_text(g: Genome) -> tuple[np.ndarray, np.ndarray, int]:
    """Concatenated block text, text->genome position map, and number of blocks."""
    blocks = g.blocks
    nb = len(blocks)
    parts = []
    pos_parts = []
    codes = g.codes.astype(np.int64)
    for j, (s, e) in enumerate(blocks):
        parts.append(codes[s:e] + nb)
        parts.append(np.array([j], dtype=np.int64))
        pos_parts.append(np.arange(s, e, dtype=np.int64))
        pos_parts.append(np.array([-1], dtype=np.int64))
    return np.concatenate(parts), np.concatenate(pos_parts), nb


@dataclass(frozen=True, eq=False)
class SuffixIndex:
    """Suffix array over unmasked positions with adjacent LCP values.

    ``sa[i]`` is a 0-based genome position; ``lcp[i]`` is the common prefix
    length of the suffixes at ``sa[i-1]`` and ``sa[i]`` (``lcp[0] == 0``),
    never crossing a block end; ``avail[i]`` is the number of symbols from
    ``sa[i]`` to the end of its block.
    """

    genome: Genome
    sa: np.ndarray
    lcp: np.ndarray

    def __len__(self) -> int:
        return int(self.sa.size)

    @cached_property
    def remaining(self) -> np.ndarray:
        """Per genome position: symbols left until the block end (0 when masked)."""
        rem = np.zeros(self.genome.length, dtype=np.int64)
        for s, e in self.genome.blocks:
            rem[s:e] = np.arange(e - s, 0, -1)
        return rem

    @cached_property
    def avail(self) -> np.ndarray:
        return self.remaining[self.sa]

    @cached_property
    def isa(self) -> np.ndarray:
        """Inverse suffix array over genome positions (-1 at masked positions)."""
        isa = np.full(self.genome.length, -1, dtype=np.int64)
        isa[self.sa] = np.arange(self.sa.size, dtype=np.int64)
        return isa

    def groups(self, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Partition suffixes by their k-prefix.

        Returns ``(ok, first, gid)``: ``ok`` marks suffixes with at least k
        symbols left in their block, ``first`` marks the first suffix of each
        distinct k-prefix, and ``gid`` numbers the k-prefix groups in
        lexicographic order (meaningful only where ``ok``).
        """
        ok = self.avail >= k
        first = ok & (self.lcp < k)
        gid = np.cumsum(first) - 1
        return ok, first, gid


def build_index(g: Genome, cache: str | Path | None = None) -> SuffixIndex:
    """Build (or load from ``cache``) the suffix index of ``g``."""
    if cache is not None:
        cached = load_index(cache, g)
        if cached is not None:
            return cached
    if g.unmasked_length == 0:
        raise ValueError(f"genome {g.name!r} is fully masked")
    text, pos_map, nb = _block_text(g)
    upper = nb + g.alphabet.size - 1
    sa_text = sa_is(text, upper)
    lcp_text = kasai_lcp(text, sa_text)
    # separator suffixes sort first
    sa = pos_map[sa_text[nb:]]
    lcp = lcp_text[nb:].copy()
    lcp[0] = 0
    sa.setflags(write=False)
    lcp.setflags(write=False)
    idx = SuffixIndex(g, sa, lcp)
    if cache is not None:
        save_index(idx, cache)
    return idx


def max_repeat_length(idx: SuffixIndex) -> int:
    """Length of the longest substring occurring at least twice (mrl)."""
    return int(idx.lcp.max()) if idx.lcp.size else 0


def min_hapax_length(idx: SuffixIndex) -> int:
    """Length of the shortest substring occurring exactly once (mhl)."""
    lcp = idx.lcp
    nxt = np.append(lcp[1:], 0)
    unique_len = np.maximum(lcp, nxt) + 1
    fits = unique_len <= idx.avail
    if not fits.any():
        raise ValueError(f"genome {idx.genome.name!r} has no hapax of any length")
    return int(unique_len[fits].min())


def kmer_intervals(idx: SuffixIndex, k: int) -> Iterator[KmerInterval]:
    """Yield every distinct k-mer once, in lexicographic order, with its positions."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ok, first, _ = idx.groups(k)
    rows = np.flatnonzero(ok)
    if rows.size == 0:
        return
    starts = np.flatnonzero(first[rows])
    bounds = np.append(starts, rows.size)
    text = idx.genome.text
    sa = idx.sa
    for a, b in zip(bounds[:-1], bounds[1:]):
        pos = np.sort(sa[rows[a:b]])
        p = int(pos[0])
        yield KmerInterval(text[p:p + k], int(b - a), pos)


def genome_digest(g: Genome) -> bytes:
    h = hashlib.sha256()
    h.update(str(g.alphabet).encode("ascii"))
    h.update(struct.pack("<Q", g.length))
    h.update(g.codes.tobytes())
    for s, e in g.mask:
        h.update(struct.pack("<QQ", s, e))
    return h.digest()


def save_index(idx: SuffixIndex, path: str | Path) -> None:
    """Write the binary index cache (little-endian, fixed-width)."""
    g = idx.genome
    alpha = str(g.alphabet).encode("ascii")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IB", _VERSION, len(alpha)))
        fh.write(alpha)
        fh.write(struct.pack("<Q", g.length))
        fh.write(genome_digest(g))
        fh.write(struct.pack("<Q", idx.sa.size))
        fh.write(idx.sa.astype("<i8").tobytes())
        fh.write(idx.lcp.astype("<i8").tobytes())


def load_index(path: str | Path, g: Genome) -> SuffixIndex | None:
    """Load a cached index for ``g``; None if missing, unreadable or stale."""
    path = Path(path)
    if not path.exists():
        return None
    data = path.read_bytes()
    try:
        if data[:4] != _MAGIC:
            raise ValueError("bad magic")
        version, alen = struct.unpack_from("<IB", data, 4)
        if version != _VERSION:
            raise ValueError(f"unsupported version {version}")
        off = 9
        alpha = data[off:off + alen].decode("ascii")
        off += alen
        (length,) = struct.unpack_from("<Q", data, off)
        off += 8
        digest = data[off:off + 32]
        off += 32
        (n,) = struct.unpack_from("<Q", data, off)
        off += 8
        if len(data) != off + 16 * n:
            raise ValueError("truncated")
    except (struct.error, ValueError, UnicodeDecodeError) as exc:
        logger.warning("ignoring unreadable index cache %s: %s", path, exc)
        return None
    if alpha != str(g.alphabet) or length != g.length or digest != genome_digest(g):
        logger.info("index cache %s does not match genome %s; rebuilding", path, g.name)
        return None
    sa = np.frombuffer(data, dtype="<i8", count=n, offset=off).astype(np.int64)
    lcp = np.frombuffer(data, dtype="<i8", count=n, offset=off + 8 * n).astype(np.int64)
    sa.setflags(write=False)
    lcp.setflags(write=False)
    return SuffixIndex(g, sa, lcp)
