"""Alphabets, genomes and FASTA ingestion.

A :class:`Genome` stores one symbol code per position plus a list of masked
intervals.  Masked positions (``N`` and any other character outside the
alphabet) never contribute k-mers; the unmasked stretches between them are
called *valid blocks*.

Positions are 1-based in the public mask representation and in every
message shown to a user, and 0-based for array indexing.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import BinaryIO, Iterable, Iterator, Sequence, Union

import numpy as np

__all__ = [
    "Alphabet",
    "DNA",
    "Genome",
    "parse_fasta",
    "read_fasta",
    "reverse",
    "valid_positions",
    "write_fasta",
]

_UNMAPPED = 255


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of single-character symbols.

    The order of ``symbols`` defines lexicographic comparison of k-mers.
    """

    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not 2 <= len(symbols) <= 16:
            raise ValueError(f"alphabet size must be in [2, 16], got {len(symbols)}")
        for sym in symbols:
            if len(sym) != 1 or not sym.isascii() or sym.isspace():
                raise ValueError(f"alphabet symbols must be single ASCII characters, got {sym!r}")
        if len({s.lower() for s in symbols}) != len(symbols):
            raise ValueError(f"alphabet symbols must be distinct (case-insensitive): {symbols}")

    @classmethod
    def from_string(cls, symbols: str) -> "Alphabet":
        return cls(tuple(symbols))

    @classmethod
    def infer(cls, text: Union[str, bytes]) -> "Alphabet":
        """Alphabet of the distinct (lowercased) letters in ``text``, sorted.

        ``n`` is excluded so that it keeps its masking meaning.
        """
        if isinstance(text, bytes):
            text = text.decode("ascii", errors="replace")
        letters = sorted({c.lower() for c in text if c.isalpha() and c.isascii()} - {"n"})
        return cls(tuple(letters))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return "".join(self.symbols)

    @cached_property
    def _rank(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.symbols)}

    def index(self, symbol: str) -> int:
        return self._rank[symbol]

    def sort_key(self, word: str) -> tuple[int, ...]:
        """Key sorting words by this alphabet's order."""
        rank = self._rank
        return tuple(rank[c] for c in word)

    @cached_property
    def is_natural_order(self) -> bool:
        """True when alphabet order coincides with Python string order."""
        return list(self.symbols) == sorted(self.symbols)

    def sorted_words(self, words: Iterable[str]) -> list[str]:
        if self.is_natural_order:
            return sorted(words)
        return sorted(words, key=self.sort_key)

    def lookup_table(self, soft_mask: bool = False) -> np.ndarray:
        """Byte -> code table; unmapped bytes get 255.

        Matching is case-insensitive unless ``soft_mask`` is set, in which
        case lowercase input letters are masked.
        """
        lut = np.full(256, _UNMAPPED, dtype=np.uint8)
        for code, sym in enumerate(self.symbols):
            lut[ord(sym.upper())] = code
            if not soft_mask:
                lut[ord(sym.lower())] = code
        return lut


DNA = Alphabet(("A", "C", "G", "T"))


def _intervals_of(flags: np.ndarray) -> list[tuple[int, int]]:
    """1-based inclusive intervals of the True runs in ``flags``."""
    if flags.size == 0 or not flags.any():
        return []
    padded = np.concatenate(([False], flags, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    starts, ends = edges[0::2], edges[1::2]
    return [(int(s) + 1, int(e)) for s, e in zip(starts, ends)]


@dataclass(frozen=True, eq=False)
class Genome:
    """A named symbol sequence with masked (invalid) intervals.

    ``codes`` holds alphabet indices (0 at masked positions); ``mask`` is a
    sorted tuple of disjoint 1-based inclusive ``(start, end)`` intervals.
    """

    name: str
    alphabet: Alphabet
    codes: np.ndarray
    mask: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        codes = np.ascontiguousarray(self.codes, dtype=np.uint8)
        if codes.ndim != 1 or codes.size == 0:
            raise ValueError(f"genome {self.name!r} is empty")
        mask = tuple((int(s), int(e)) for s, e in self.mask)
        prev_end = 0
        for s, e in mask:
            if not (prev_end < s <= e <= codes.size):
                raise ValueError(f"genome {self.name!r}: bad mask interval [{s}, {e}]")
            prev_end = e
        flags = np.zeros(codes.size, dtype=bool)
        for s, e in mask:
            flags[s - 1:e] = True
        codes = codes.copy()
        codes[flags] = 0
        if codes.size and int(codes.max()) >= self.alphabet.size:
            raise ValueError(f"genome {self.name!r}: code out of alphabet range")
        codes.setflags(write=False)
        flags.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "_masked", flags)

    @classmethod
    def from_string(cls, text: str, alphabet: Alphabet | None = None, name: str = "seq",
                    soft_mask: bool = False) -> "Genome":
        """Build a genome from a plain string; characters outside the alphabet are masked."""
        if alphabet is None:
            alphabet = Alphabet.infer(text)
        raw = np.frombuffer(text.encode("ascii"), dtype=np.uint8)
        lut = alphabet.lookup_table(soft_mask)
        return cls._from_mapped(name, alphabet, lut[raw])

    @classmethod
    def _from_mapped(cls, name: str, alphabet: Alphabet, mapped: np.ndarray) -> "Genome":
        masked = mapped == _UNMAPPED
        return cls(name, alphabet, np.where(masked, 0, mapped), tuple(_intervals_of(masked)))

    def __len__(self) -> int:
        return int(self.codes.size)

    @property
    def length(self) -> int:
        return int(self.codes.size)

    @property
    def masked_count(self) -> int:
        return sum(e - s + 1 for s, e in self.mask)

    @property
    def unmasked_length(self) -> int:
        return self.length - self.masked_count

    @property
    def masked(self) -> np.ndarray:
        """Boolean array, True at masked positions."""
        return self._masked  # type: ignore[attr-defined]

    @cached_property
    def blocks(self) -> list[tuple[int, int]]:
        """Valid blocks as 0-based half-open ``(start, end)`` pairs."""
        out = []
        pos = 0
        for s, e in self.mask:
            if s - 1 > pos:
                out.append((pos, s - 1))
            pos = e
        if pos < self.length:
            out.append((pos, self.length))
        return out

    @cached_property
    def text(self) -> str:
        """Symbol string; masked positions are rendered as ``N`` (or ``?`` if ``N`` is a symbol)."""
        mask_char = "?" if "N" in self.alphabet.symbols else "N"
        table = np.frombuffer((str(self.alphabet)).encode("ascii"), dtype=np.uint8)
        raw = table[self.codes].copy()
        raw[self.masked] = ord(mask_char)
        return raw.tobytes().decode("ascii")

    def block_texts(self) -> Iterator[str]:
        text = self.text
        for s, e in self.blocks:
            yield text[s:e]

    def header(self) -> str:
        """Report header line describing this genome."""
        return f"#genome={self.name} length={self.length} masked={self.masked_count}"

    def __eq__(self, other):
        if not isinstance(other, Genome):
            return NotImplemented
        return (self.name == other.name and self.alphabet == other.alphabet
                and self.mask == other.mask and np.array_equal(self.codes, other.codes))

    def __hash__(self):
        return hash((self.name, self.alphabet, self.mask, self.codes.tobytes()))

    def __repr__(self) -> str:
        preview = self.text if self.length <= 40 else self.text[:37] + "..."
        return f"Genome({self.name!r}, {preview!r}, L={self.length}, masked={self.masked_count})"


def reverse(g: Genome) -> Genome:
    """Reversed genome, with mask intervals mirrored."""
    n = g.length
    mask = tuple((n - e + 1, n - s + 1) for s, e in reversed(g.mask))
    return Genome(g.name, g.alphabet, g.codes[::-1], mask)


def valid_positions(g: Genome, k: int) -> int:
    """Number of k-windows lying entirely inside one valid block."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return sum(max(0, (e - s) - k + 1) for s, e in g.blocks)


FastaSource = Union[bytes, str, BinaryIO, io.IOBase]


def _iter_records(data: bytes) -> Iterator[tuple[str, list[bytes]]]:
    name = None
    chunks: list[bytes] = []
    for line in data.splitlines():
        if line.startswith(b">"):
            if name is not None:
                yield name, chunks
            name = line[1:].strip().decode("utf-8", errors="replace")
            chunks = []
        elif line.startswith(b";"):
            continue
        else:
            line = line.strip()
            if not line:
                continue
            if name is None:
                raise ValueError("FASTA sequence data before the first '>' header")
            chunks.append(line)
    if name is not None:
        yield name, chunks


def parse_fasta(source: FastaSource, alphabet: Alphabet | None = DNA,
                soft_mask: bool = False) -> list[Genome]:
    """Parse FASTA records into genomes, one per record.

    Any character not in ``alphabet`` is masked.  With ``alphabet=None`` the
    alphabet is inferred per record (see :meth:`Alphabet.infer`).  Lowercase
    letters are valid symbols unless ``soft_mask`` is set.
    """
    if isinstance(source, str):
        data = source.encode("ascii")
    elif isinstance(source, (bytes, bytearray, memoryview)):
        data = bytes(source)
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("ascii")

    genomes = []
    for name, chunks in _iter_records(data):
        seq = b"".join(b"".join(c.split()) for c in chunks)
        if not seq:
            raise ValueError(f"FASTA record {name!r} is empty")
        alpha = alphabet if alphabet is not None else Alphabet.infer(seq)
        raw = np.frombuffer(seq, dtype=np.uint8)
        mapped = alpha.lookup_table(soft_mask)[raw]
        genomes.append(Genome._from_mapped(name.split()[0] if name else name, alpha, mapped))
    if not genomes:
        raise ValueError("no FASTA records found")
    return genomes


def read_fasta(path, alphabet: Alphabet | None = DNA, soft_mask: bool = False) -> list[Genome]:
    with open(path, "rb") as fh:
        return parse_fasta(fh, alphabet, soft_mask)


def write_fasta(genomes: Sequence[Genome], width: int = 60) -> str:
    """Serialize genomes to FASTA text (masked positions as ``N``)."""
    out = []
    for g in genomes:
        out.append(f">{g.name}\n")
        text = g.text
        for i in range(0, len(text), width):
            out.append(text[i:i + width] + "\n")
    return "".join(out)


def log_base(x: float, base: int) -> float:
    return math.log(x) / math.log(base)
