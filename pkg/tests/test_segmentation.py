from collections import Counter

import numpy as np
import pytest

from kspectra.seqcore import DNA, Alphabet, Genome
from kspectra.segmentation import (
    compare_procedures,
    is_spectral_segment,
    k_concat,
    procedure1,
    procedure2,
    sweep,
    univocal_positions,
    univocal_successors,
)
from kspectra.spectrum import KSpectrum, compute_spectrum, dictionary
from kspectra.suffix_index import build_index

from oracles import blocks_of, naive_procedure2


def G(text, alphabet=None):
    return Genome.from_string(text, alphabet)


def test_k_concat():
    assert k_concat("aa", "ag", 2) == "aag"
    assert k_concat("abb", "bba", 3) == "abba"
    w = "abb"
    for beta in ("bba", "bab", "abc", "bca"):
        w = k_concat(w, beta, 3)
    assert w == "abbabca"
    with pytest.raises(ValueError, match="overlap"):
        k_concat("ab", "ca", 2)


def test_univocal_successors():
    d = dictionary(compute_spectrum(G("abcabbaba"), 3))
    assert univocal_successors("abc", d) == {"bca"}
    assert univocal_successors("cab", d) == {"abc", "abb", "aba"}
    assert univocal_successors("aa", {"aa", "ab"}) == {"aa", "ab"}


def test_procedure2_toy():
    seg, row = procedure2(G("abcabbaba"), 3)
    assert [s.origin for s in seg.segments] == [(0, 5), (3, 8), (6, 9)]
    assert [s.word for s in seg.segments] == ["abcab", "abbab", "aba"]
    assert (row.dict_size, row.univocal_size, row.maximals) == (7, 5, 3)
    assert row.ratio == pytest.approx(5 / 7)
    assert row.max_len == 5
    assert row.avg_len == pytest.approx(13 / 3)
    # runs [1..2],[4..5],[7..7] cover k-mer spans [1..4],[4..7],[7..9]
    assert row.coverage == 1.0


def test_trailing_run_is_clamped_at_block_end():
    # "ab" has the unique successor "bc"; "bc" has two (ca, cb); the final
    # "cb" is univocal too but its word is clamped at the block end
    seg, row = procedure2(G("abcacb"), 2)
    assert [s.word for s in seg.segments] == ["abc", "cb"]
    assert row.max_len == 3


def test_procedure2_masked_runs_do_not_cross_blocks():
    g = G("ACGTNACGT", DNA)
    marks, _, _ = univocal_positions(build_index(g), 2)
    assert not marks[4]
    seg, row = procedure2(g, 2)
    for s in seg.segments:
        assert "N" not in s.word
    assert row.coverage <= 1.0


def _oracle_coverage(text, runs, k):
    covered = set()
    for i, j in runs:
        covered.update(range(i, j + k))
    return len(covered) / sum(e - s for s, e in blocks_of(text))


def test_procedure2_matches_oracle_on_random_strings():
    rng = np.random.default_rng(3)
    for trial in range(300):
        alpha = "ab" if trial % 3 == 0 else "ACGT"
        symbols = list(alpha) + (["N"] if trial % 4 == 0 else [])
        text = "".join(rng.choice(symbols, int(rng.integers(1, 60))))
        g = G(text, Alphabet(tuple(alpha)))
        if g.unmasked_length == 0:
            continue
        for k in range(1, 7):
            if not any(e - s >= k for s, e in blocks_of(text)):
                continue
            seg, row = procedure2(g, k)
            marks, runs, words, univ = naive_procedure2(text, k)
            assert [s.word for s in seg.segments] == words
            assert row.maximals == len(runs)
            assert row.univocal_size == len(univ)
            assert row.coverage == pytest.approx(_oracle_coverage(text, runs, k))


def test_sweep_rows():
    g = G("abcabbabaabbbacbcabacbbb")
    rows = sweep(g, 2, 6)
    assert [r.k for r in rows] == [2, 3, 4, 5, 6]
    for r in rows:
        seg, single = procedure2(g, r.k)
        assert r == single
    assert sweep(G("abc"), 5, 7) == []
    with pytest.raises(ValueError):
        sweep(g, 4, 3)


def test_sweep_threads_match_serial():
    rng = np.random.default_rng(0)
    g = G("".join(rng.choice(list("ACGT"), 3000)), DNA)
    assert sweep(g, 3, 12, threads=4) == sweep(g, 3, 12)


def test_procedure1_aab_example():
    spec = KSpectrum(2, {"aa": 6, "ab": 1, "bb": 1, "ba": 1})
    seg = procedure1(spec)
    assert seg.multiset() == Counter({"aa": 5, "bbaab": 1})
    assert seg.consumed == 9
    assert seg.count == 6


def test_procedure1_hapax_example_uses_all_bricks():
    spec = compute_spectrum(G("abcabbaba"), 3)
    seg = procedure1(spec)
    ((word, mult),) = seg.multiset().items()
    assert mult == 1 and len(word) == 9
    assert word == "abcababba"
    assert compute_spectrum(G(word, Alphabet(("a", "b", "c"))), 3) == spec


def test_procedure1_lone_kmer():
    assert procedure1(KSpectrum(2, {"ab": 1})).multiset() == Counter({"ab": 1})


def test_procedure1_custom_policy_is_used():
    spec = KSpectrum(2, {"aa": 6, "ab": 1, "bb": 1, "ba": 1})
    last = lambda ws: max(ws.counts)
    seg = procedure1(spec, policy=last)
    assert sum((len(w) - 1) * m for w, m in seg.multiset().items()) == 9
    assert procedure1(spec, policy=last).multiset() == seg.multiset()


def test_spectral_segment_need_not_be_substring():
    text = "canegattogallogattone"
    spec = compute_spectrum(G(text, Alphabet.from_string("acegilnot")), 4)
    assert is_spectral_segment("canegattone", spec)
    assert "canegattone" not in text
    assert not is_spectral_segment("canegattogattogattone", spec)


def test_abbabca_is_spectral_but_not_substring():
    spec = compute_spectrum(G("abcabbaba"), 3)
    assert is_spectral_segment("abbabca", spec)
    assert "abbabca" not in "abcabbaba"


def test_compare_procedures_reports():
    report = compare_procedures(G("abcabbaba"), 3)
    assert report["equal"] is False
    assert report["procedure2"] == {"abcab": 1, "abbab": 1, "aba": 1}
    assert report["procedure1"] == {"abcababba": 1}
