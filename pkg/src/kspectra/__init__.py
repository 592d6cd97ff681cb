"""Genomic k-spectra, hapax/repeat informational indexes and k-spectral segmentations."""

__version__ = "0.1.0"

from .seqcore import DNA, Alphabet, Genome, parse_fasta, read_fasta, reverse, valid_positions
from .spectrum import (
    KSpectrum,
    SpectrumIndexes,
    classify,
    completeness_indexes,
    compute_spectrum,
    dictionary,
    entropy,
    hapaxes,
    informational_indexes,
    lexical_index,
    multiset_diff,
    multiset_sum,
    repeats,
)
from .suffix_index import SuffixIndex, build_index, kmer_intervals, max_repeat_length, min_hapax_length
from .segmentation import (
    Segmentation,
    SegmentationRow,
    SpectralSegment,
    k_concat,
    procedure1,
    procedure2,
    sweep,
    univocal_successors,
)
from .reconstruct import GuardExceeded, build_graph, enumerate_genomes, is_k_univocal
