"""Spectral segments and k-segmentations.

Two routes are provided:

* :func:`procedure1` works on a bare spectrum: it repeatedly takes a k-mer
  out of a working multiset and elongates it right and left as long as the
  elongation is univocal, consuming one k-mer copy per step.
* :func:`procedure2` works on the genome: it marks the start positions of
  univocally elongated k-mers and reads each maximal run of marks off the
  genome as a segment.  This is the route used for chromosome-scale sweeps.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from .seqcore import Genome
from .spectrum import EmptySpectrumError, KSpectrum, compute_spectrum
from .suffix_index import SuffixIndex, build_index

__all__ = [
    "SpectralSegment",
    "WorkingSet",
    "Segmentation",
    "SegmentationRow",
    "compare_procedures",
    "is_spectral_segment",
    "k_concat",
    "lexicographic_start",
    "procedure1",
    "procedure2",
    "sweep",
    "univocal_successors",
    "univocal_positions",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralSegment:
    word: str
    multiplicity: int = 1
    # 0-based half-open genome interval the word was read from (Procedure 2 only)
    origin: Optional[tuple[int, int]] = None


@dataclass
class Segmentation:
    k: int
    segments: list[SpectralSegment] = field(default_factory=list)
    consumed: int = 0

    def multiset(self) -> Counter:
        """Segment words with their multiplicities."""
        out: Counter = Counter()
        for seg in self.segments:
            out[seg.word] += 1 if seg.origin is not None else seg.multiplicity
        return out

    @property
    def count(self) -> int:
        return sum(self.multiset().values())


@dataclass(frozen=True)
class SegmentationRow:
    k: int
    dict_size: int
    univocal_size: int
    ratio: float
    coverage: float
    maximals: int
    avg_len: float
    max_len: int

    COLUMNS = ("k", "Dk", "Uk", "Uk_over_Dk", "coverage", "maximals", "avg_len", "max_len")

    def as_tsv(self) -> str:
        return "\t".join([
            str(self.k), str(self.dict_size), str(self.univocal_size),
            _fmt(self.ratio), _fmt(self.coverage), str(self.maximals),
            _fmt(self.avg_len), str(self.max_len),
        ])


def _fmt(x: float) -> str:
    return format(x, ".9g")


def k_concat(a: str, b: str, k: int) -> str:
    """Overlap-concatenate ``a`` with the k-mer ``b`` on a (k-1)-long overlap."""
    if len(b) != k or len(a) < k:
        raise ValueError(f"k_concat needs len(a) >= {k} and len(b) == {k}")
    if a[len(a) - k + 1:] != b[:k - 1]:
        raise ValueError(f"cannot {k}-concatenate {a!r} and {b!r}: overlap mismatch")
    return a + b[-1]


def univocal_successors(alpha: str, dictionary) -> set[str]:
    """All k-mers of ``dictionary`` whose (k-1)-prefix is the (k-1)-suffix of ``alpha``."""
    tail = alpha[1:]
    return {beta for beta in dictionary if beta[:-1] == tail}


def is_spectral_segment(word: str, spec: KSpectrum) -> bool:
    """True if ``word`` is an iterated k-concatenation of k-mers of ``spec``
    using each no more often than its multiplicity."""
    k = spec.k
    if len(word) < k:
        return False
    used = Counter(word[i:i + k] for i in range(len(word) - k + 1))
    return all(spec.get(w, 0) >= m for w, m in used.items())


# --- Procedure 2 -----------------------------------------------------------

def univocal_positions(idx: SuffixIndex, k: int) -> tuple[np.ndarray, int, int]:
    """Marks of univocally elongated k-mer starts over genome positions.

    Returns ``(marks, dict_size, univocal_size)``.
    """
    g = idx.genome
    okk, firstk, _ = idx.groups(k)
    dict_size = int(firstk.sum())
    marks = np.zeros(g.length, dtype=bool)
    if dict_size == 0:
        return marks, 0, 0
    if k == 1:
        # every 1-mer is followed by the whole dictionary
        univ = np.full(idx.sa.size, dict_size == 1)
    else:
        ok1, first1, gid1 = idx.groups(k - 1)
        n1 = int(first1.sum())
        # distinct one-symbol extensions of each (k-1)-mer
        ext = np.bincount(gid1[okk & firstk], minlength=n1)
        univ = np.zeros(idx.sa.size, dtype=bool)
        rows = np.flatnonzero(okk)
        succ_rank = idx.isa[idx.sa[rows] + 1]
        univ[rows] = ext[gid1[succ_rank]] == 1
    univ &= okk
    marks[idx.sa[univ]] = True
    return marks, dict_size, int((univ & firstk).sum())


def _runs(marks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    padded = np.concatenate(([0], marks.astype(np.int8), [0]))
    edges = np.flatnonzero(np.diff(padded))
    return edges[0::2], edges[1::2] - 1  # 0-based inclusive run bounds


def procedure2(g: Genome, k: int, index: SuffixIndex | None = None,
               with_segments: bool = True) -> tuple[Segmentation, SegmentationRow]:
    """k-segmentation of ``g`` from the runs of univocally elongated k-mers."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    idx = index if index is not None else build_index(g)
    marks, dict_size, univocal_size = univocal_positions(idx, k)
    if dict_size == 0:
        raise EmptySpectrumError(f"genome {g.name!r} has no valid {k}-window")
    starts, stops = _runs(marks)
    block_end = np.arange(g.length, dtype=np.int64) + idx.remaining
    ends = np.minimum(stops + k + 1, block_end[stops])  # exclusive word end
    lengths = ends - starts

    # union of the k-mer spans [i, j + k - 1] of all runs; runs are ordered
    span_end = stops + k - 1
    prev_end = np.concatenate(([-1], span_end[:-1]))
    covered = int(np.maximum(0, span_end - np.maximum(starts, prev_end + 1) + 1).sum())

    n_runs = int(starts.size)
    row = SegmentationRow(
        k=k,
        dict_size=dict_size,
        univocal_size=univocal_size,
        ratio=univocal_size / dict_size,
        coverage=covered / g.unmasked_length,
        maximals=n_runs,
        avg_len=float(lengths.mean()) if n_runs else 0.0,
        max_len=int(lengths.max()) if n_runs else 0,
    )
    seg = Segmentation(k=k, consumed=int((lengths - k + 1).sum()))
    if with_segments and n_runs:
        text = g.text
        words = [text[s:e] for s, e in zip(starts.tolist(), ends.tolist())]
        mult = Counter(words)
        seg.segments = [
            SpectralSegment(w, mult[w], (s, e))
            for w, s, e in zip(words, starts.tolist(), ends.tolist())
        ]
    return seg, row


def _sweep_rows(g: Genome, k_min: int, k_max: int, index: SuffixIndex | None = None,
                threads: int = 1) -> Iterator[tuple[int, SegmentationRow | None, str]]:
    if not 1 <= k_min <= k_max:
        raise ValueError(f"need 1 <= k_min <= k_max, got [{k_min}, {k_max}]")
    idx = index if index is not None else build_index(g)

    def one(k):
        try:
            return k, procedure2(g, k, idx, with_segments=False)[1], ""
        except EmptySpectrumError as exc:
            return k, None, str(exc)

    ks = range(k_min, k_max + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            yield from pool.map(one, ks)
    else:
        yield from map(one, ks)


def sweep(g: Genome, k_min: int, k_max: int, index: SuffixIndex | None = None,
          threads: int = 1) -> list[SegmentationRow]:
    """One Procedure 2 row per k in ``[k_min, k_max]``; failing k values are skipped."""
    rows = []
    for k, row, reason in _sweep_rows(g, k_min, k_max, index, threads):
        if row is None:
            logger.warning("k=%d skipped: %s", k, reason)
        else:
            rows.append(row)
    return rows


# --- Procedure 1 -----------------------------------------------------------

StartPolicy = Callable[["WorkingSet"], str]


class WorkingSet:
    """Remaining k-mer copies, indexed by (k-1)-prefix and (k-1)-suffix."""

    def __init__(self, spec: KSpectrum):
        self.k = spec.k
        self.counts = dict(spec.entries)
        self.by_prefix: dict[str, set[str]] = defaultdict(set)
        self.by_suffix: dict[str, set[str]] = defaultdict(set)
        for w in self.counts:
            self.by_prefix[w[:-1]].add(w)
            self.by_suffix[w[1:]].add(w)
        alpha = spec.alphabet
        self.order = alpha.sorted_words(self.counts) if alpha else sorted(self.counts)
        self._cursor = 0
        self.remaining = spec.total

    def take(self, w: str) -> None:
        c = self.counts[w] - 1
        self.remaining -= 1
        if c:
            self.counts[w] = c
        else:
            del self.counts[w]
            self.by_prefix[w[:-1]].discard(w)
            self.by_suffix[w[1:]].discard(w)

    def first_available(self) -> str:
        while self.order[self._cursor] not in self.counts:
            self._cursor += 1
        return self.order[self._cursor]


def lexicographic_start(ws: WorkingSet) -> str:
    return ws.first_available()


def procedure1(spec: KSpectrum, policy: StartPolicy = lexicographic_start) -> Segmentation:
    """k-segmentation of a spectrum by greedy univocal elongation.

    Each segment starts from the k-mer chosen by ``policy`` and is extended
    to the right while exactly one distinct k-mer with copies left overlaps
    its end, then to the left likewise, repeating until both ends block.
    """
    k = spec.k
    ws = WorkingSet(spec)
    words: Counter = Counter()
    emitted: list[str] = []
    while ws.remaining:
        start = policy(ws)
        ws.take(start)
        word = deque(start)
        # appending leaves the head alone, prepending leaves the tail alone
        head, tail = start[:-1], start[1:]
        progressed = True
        while progressed:
            progressed = False
            while len(cand := ws.by_prefix.get(tail, ())) == 1:
                beta = next(iter(cand))
                ws.take(beta)
                word.append(beta[-1])
                tail = beta[1:]
                progressed = True
            while len(cand := ws.by_suffix.get(head, ())) == 1:
                beta = next(iter(cand))
                ws.take(beta)
                word.appendleft(beta[0])
                head = beta[:-1]
                progressed = True
        w = "".join(word)
        if w not in words:
            emitted.append(w)
        words[w] += 1
    seg = Segmentation(k=k, consumed=spec.total)
    seg.segments = [SpectralSegment(w, words[w]) for w in emitted]
    return seg


def compare_procedures(g: Genome, k: int) -> dict:
    """Compare the segment multisets of both procedures on ``g``.

    Returns a report dict; discrepancies are logged, never raised.
    """
    spec = compute_spectrum(g, k)
    m1 = procedure1(spec).multiset()
    m2 = procedure2(g, k)[0].multiset()
    only1 = m1 - m2
    only2 = m2 - m1
    report = {
        "genome": g.name,
        "k": k,
        "equal": not only1 and not only2,
        "procedure1": dict(m1),
        "procedure2": dict(m2),
        "only_procedure1": dict(only1),
        "only_procedure2": dict(only2),
    }
    if not report["equal"]:
        logger.info("procedures differ on %s k=%d: P1-only %s, P2-only %s",
                    g.name, k, dict(only1), dict(only2))
    return report
