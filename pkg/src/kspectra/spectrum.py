"""k-spectra, their multiset algebra, and informational indexes.

A k-mer is represented as a ``str`` of alphabet symbols.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from types import MappingProxyType
from typing import IO, Iterable, Iterator, Mapping, NamedTuple

from .seqcore import Alphabet, Genome, log_base, valid_positions

__all__ = [
    "KSpectrum",
    "EmptySpectrumError",
    "SpectrumIndexes",
    "Classification",
    "classify",
    "completeness_indexes",
    "compute_spectrum",
    "dictionary",
    "entropy",
    "hapaxes",
    "informational_indexes",
    "lexical_index",
    "multiset_diff",
    "multiset_sum",
    "read_spectrum",
    "repeats",
    "write_spectrum",
]


class EmptySpectrumError(ValueError):
    pass


class KSpectrum(Mapping[str, int]):
    """Immutable multiset of k-mers; zero multiplicities are never stored."""

    __slots__ = ("k", "_entries", "_total", "alphabet")

    def __init__(self, k: int, entries: Mapping[str, int] | Iterable[tuple[str, int]] = (),
                 alphabet: Alphabet | None = None):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        items = entries.items() if isinstance(entries, Mapping) else entries
        store: dict[str, int] = {}
        for word, mult in items:
            if len(word) != k:
                raise ValueError(f"k-mer {word!r} does not have length {k}")
            mult = int(mult)
            if mult < 0:
                raise ValueError(f"negative multiplicity for {word!r}")
            if mult:
                store[word] = mult
        self.k = k
        self.alphabet = alphabet
        self._entries = store
        self._total = sum(store.values())

    def __getitem__(self, word: str) -> int:
        return self._entries[word]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, word, default=0):
        return self._entries.get(word, default)

    @property
    def total(self) -> int:
        return self._total

    @property
    def entries(self) -> Mapping[str, int]:
        return MappingProxyType(self._entries)

    def sorted_items(self) -> list[tuple[str, int]]:
        alpha = self.alphabet
        words = alpha.sorted_words(self._entries) if alpha else sorted(self._entries)
        return [(w, self._entries[w]) for w in words]

    def __eq__(self, other):
        if isinstance(other, KSpectrum):
            return self.k == other.k and self._entries == other._entries
        return NotImplemented

    def __hash__(self):
        return hash((self.k, frozenset(self._entries.items())))

    def __add__(self, other: "KSpectrum") -> "KSpectrum":
        return multiset_sum(self, other)

    def __sub__(self, other: "KSpectrum") -> "KSpectrum":
        return multiset_diff(self, other)

    def __repr__(self) -> str:
        body = ", ".join(f"({w},{m})" for w, m in self.sorted_items()[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"KSpectrum(k={self.k}, {{{body}{more}}}, total={self.total})"


def _check_k(a: KSpectrum, b: KSpectrum) -> None:
    if a.k != b.k:
        raise ValueError(f"spectra have different k ({a.k} vs {b.k})")


def multiset_sum(a: KSpectrum, b: KSpectrum) -> KSpectrum:
    _check_k(a, b)
    return KSpectrum(a.k, Counter(a.entries) + Counter(b.entries), a.alphabet or b.alphabet)


def multiset_diff(a: KSpectrum, b: KSpectrum) -> KSpectrum:
    """Keywise difference with negative values clamped to zero."""
    _check_k(a, b)
    return KSpectrum(a.k, Counter(a.entries) - Counter(b.entries), a.alphabet or b.alphabet)


def _windows(g: Genome, k: int) -> Iterator[str]:
    for block in g.block_texts():
        for i in range(len(block) - k + 1):
            yield block[i:i + k]


def compute_spectrum(g: Genome, k: int) -> KSpectrum:
    """k-spectrum of ``g`` over the k-windows inside valid blocks."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    counts = Counter(_windows(g, k))
    if not counts:
        raise EmptySpectrumError(f"genome {g.name!r} has no valid {k}-window")
    return KSpectrum(k, counts, g.alphabet)


def dictionary(spec: KSpectrum) -> frozenset[str]:
    return frozenset(spec)


def hapaxes(spec: KSpectrum) -> frozenset[str]:
    return frozenset(w for w, m in spec.items() if m == 1)


def repeats(spec: KSpectrum) -> frozenset[str]:
    return frozenset(w for w, m in spec.items() if m > 1)


def _spectrum_arg(g: Genome | KSpectrum, k: int | None) -> KSpectrum:
    if isinstance(g, KSpectrum):
        return g
    return compute_spectrum(g, k)


def lexical_index(g: Genome | KSpectrum, k: int | None = None) -> float:
    """Average k-mer multiplicity, LX_k = total / |D_k|."""
    spec = _spectrum_arg(g, k)
    if not spec:
        raise EmptySpectrumError("lexical index of an empty dictionary")
    return spec.total / len(spec)


def entropy(g: Genome | KSpectrum, k: int | None = None) -> float:
    """Shannon entropy (bits) of the k-mer frequency distribution.

    Frequencies are normalized by the number of valid k-windows, which is
    ``L - k + 1`` for an unmasked genome.
    """
    spec = _spectrum_arg(g, k)
    if not spec:
        raise EmptySpectrumError("entropy of an empty dictionary")
    n = spec.total
    h = -sum(m / n * math.log2(m / n) for m in spec.values())
    return max(h, 0.0)


def _distinct_count(g: Genome, k: int) -> int:
    return len(set(_windows(g, k)))


def completeness_indexes(g: Genome) -> tuple[int, int]:
    """(mcl, mfl): largest k with every k-word present, and mcl + 1."""
    s = g.alphabet.size
    n = g.length
    cap = math.ceil(log_base(n, s)) if n > 1 else 0
    mcl = 0
    for k in range(1, cap + 1):
        if s ** k > valid_positions(g, k) or _distinct_count(g, k) != s ** k:
            break
        mcl = k
    return mcl, mcl + 1


class Classification(NamedTuple):
    is_k_hapax: bool
    is_k_complete: bool


def classify(g: Genome | KSpectrum, k: int | None = None) -> Classification:
    spec = _spectrum_arg(g, k)
    alpha = spec.alphabet if isinstance(g, KSpectrum) else g.alphabet
    if alpha is None:
        raise ValueError("completeness needs an alphabet")
    hapax = all(m == 1 for m in spec.values())
    complete = len(spec) == alpha.size ** spec.k
    return Classification(hapax, complete)


@dataclass(frozen=True)
class SpectrumIndexes:
    mrl: int
    mhl: int
    mcl: int
    mfl: int
    lg_length: float


def informational_indexes(g: Genome, index=None) -> SpectrumIndexes:
    """mrl, mhl (from the suffix index), mcl, mfl and LG = log_s(L)."""
    from .suffix_index import build_index, max_repeat_length, min_hapax_length

    idx = index if index is not None else build_index(g)
    mcl, mfl = completeness_indexes(g)
    return SpectrumIndexes(
        mrl=max_repeat_length(idx),
        mhl=min_hapax_length(idx),
        mcl=mcl,
        mfl=mfl,
        lg_length=log_base(g.length, g.alphabet.size),
    )


def write_spectrum(spec: KSpectrum, fh: IO[str]) -> None:
    fh.write(f"#k={spec.k}\t#total={spec.total}\n")
    for word, mult in spec.sorted_items():
        fh.write(f"{word}\t{mult}\n")


def read_spectrum(fh: IO[str] | Iterable[str], alphabet: Alphabet | None = None) -> KSpectrum:
    """Parse a spectrum TSV.  Extra ``#`` comment lines are ignored."""
    k = total = None
    entries: dict[str, int] = {}
    for lineno, line in enumerate(fh, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            if line.startswith("#k="):
                fields = dict(f.lstrip("#").split("=", 1) for f in line.split("\t"))
                try:
                    k, total = int(fields["k"]), int(fields["total"])
                except (KeyError, ValueError):
                    raise ValueError(f"line {lineno}: malformed spectrum header {line!r}") from None
            continue
        if k is None:
            raise ValueError(f"line {lineno}: data before '#k=' header")
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<kmer>\\t<count>'")
        word, count = parts
        try:
            mult = int(count)
        except ValueError:
            raise ValueError(f"line {lineno}: count {count!r} is not an integer") from None
        if mult <= 0:
            raise ValueError(f"line {lineno}: nonpositive count for {word!r}")
        if len(word) != k:
            raise ValueError(f"line {lineno}: k-mer {word!r} does not have length {k}")
        if word in entries:
            raise ValueError(f"line {lineno}: duplicate k-mer {word!r}")
        if alphabet is not None and any(c not in alphabet.symbols for c in word):
            raise ValueError(f"line {lineno}: k-mer {word!r} has symbols outside {alphabet}")
        entries[word] = mult
    if k is None:
        raise ValueError("missing '#k=' header")
    spec = KSpectrum(k, entries, alphabet)
    if spec.total != total:
        raise ValueError(f"header total {total} does not match sum of counts {spec.total}")
    return spec
