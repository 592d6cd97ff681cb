import io
import math

import pytest
from hypothesis import given, strategies as st

from kspectra.seqcore import DNA, Alphabet, Genome, reverse
from kspectra.spectrum import (
    EmptySpectrumError,
    KSpectrum,
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
    read_spectrum,
    repeats,
    write_spectrum,
)

from oracles import kmer_counts

AB = Alphabet(("a", "b"))


def G(text, alphabet=None):
    return Genome.from_string(text, alphabet)


def spec_of(pairs, k=None):
    pairs = dict(pairs)
    return KSpectrum(k or len(next(iter(pairs))), pairs)


def test_spectrum_of_swapped_genome_example():
    expected = {"aa": 3, "ag": 2, "gg": 3, "gc": 2, "cc": 3, "cg": 1, "ga": 1, "ca": 2, "ac": 1}
    assert dict(compute_spectrum(G("aaggccgaagggcacccaa"), 2)) == expected
    assert dict(compute_spectrum(G("aagggcacccaaggccgaa"), 2)) == expected


def test_spectrum_examples():
    assert dict(compute_spectrum(G("aaabbaaaaa"), 2)) == {"aa": 6, "ab": 1, "bb": 1, "ba": 1}
    s = compute_spectrum(G("abcbbabcaa"), 2)
    assert dict(s) == {"ab": 2, "bc": 2, "cb": 1, "bb": 1, "ba": 1, "ca": 1, "aa": 1}
    assert s.total == 9


def test_masked_spectrum_and_empty_error():
    s = compute_spectrum(G("ACNNGT", DNA), 2)
    assert dict(s) == {"AC": 1, "GT": 1}
    with pytest.raises(EmptySpectrumError, match="'seq'.*5"):
        compute_spectrum(G("ACNNGT", DNA), 5)


def test_dictionary():
    assert dictionary(compute_spectrum(G("aaabbaaaaa"), 2)) == {"aa", "ab", "bb", "ba"}
    assert dictionary(KSpectrum(2)) == frozenset()
    d = dictionary(compute_spectrum(G("aaccggttagatctgca"), 2))
    assert d == {a + b for a in "acgt" for b in "acgt"}


def test_multiset_sum_and_diff():
    a = spec_of({"aa": 1})
    b = spec_of({"aa": 2, "ab": 1})
    assert dict(multiset_sum(a, b)) == {"aa": 3, "ab": 1}
    assert multiset_sum(a, KSpectrum(2)) == a
    g = compute_spectrum(G("abcbbabcaa"), 2)
    assert dict(g + g) == {w: 2 * m for w, m in g.items()}
    assert (g + g).total == 2 * g.total
    assert dict(spec_of({"aa": 3}) - spec_of({"aa": 1})) == {"aa": 2}
    empty = multiset_diff(spec_of({"aa": 1}), spec_of({"aa": 5}))
    assert len(empty) == 0 and empty.total == 0
    with pytest.raises(ValueError):
        multiset_sum(spec_of({"aa": 1}), spec_of({"aaa": 1}))


def test_toy_spectra_algebra():
    a = compute_spectrum(G("aaggccgaagggcacccaa"), 2)
    b = compute_spectrum(G("aaabbaaaaa"), 2)
    assert (a + b) - b == a
    assert (b + a) - a == b


def test_spectrum_rejects_bad_entries():
    with pytest.raises(ValueError):
        KSpectrum(2, {"aaa": 1})
    with pytest.raises(ValueError):
        KSpectrum(2, {"aa": -1})
    assert "aa" not in KSpectrum(2, {"aa": 0})


def test_hapaxes_and_repeats():
    s = compute_spectrum(G("abcbbabcaa"), 2)
    assert hapaxes(s) == {"cb", "bb", "ba", "ca", "aa"}
    assert repeats(s) == {"ab", "bc"}
    s1 = compute_spectrum(G("abcbbabcaa"), 1)
    assert repeats(s1) == {"a", "b", "c"} and hapaxes(s1) == frozenset()
    assert repeats(compute_spectrum(G("aaccggttagatctg"), 2)) == frozenset()


def test_lexical_index():
    assert lexical_index(G("abcbbabcaa"), 2) == pytest.approx(9 / 7)
    assert lexical_index(G("aaccggttagatctg"), 2) == 1.0
    assert lexical_index(G("aaabbaaaaa"), 2) == 2.25


def test_entropy():
    assert entropy(G("aaccggttagatctg"), 2) == pytest.approx(math.log2(14))
    assert entropy(G("aaaa", AB), 2) == 0.0
    expected = -(6 / 9 * math.log2(6 / 9) + 3 * (1 / 9 * math.log2(1 / 9)))
    assert entropy(G("aaabbaaaaa"), 2) == pytest.approx(expected)
    assert entropy(G("aaabbaaaaa"), 2) == pytest.approx(1.4466, abs=1e-4)


def test_entropy_uses_valid_windows_for_masked_genomes():
    # windows AC, CG | GT, TA : four hapaxes
    assert entropy(G("ACGNGTA", DNA), 2) == pytest.approx(2.0)


def test_completeness_indexes():
    g = G("aaccggttagatctgca")
    assert completeness_indexes(g) == (2, 3)
    assert informational_indexes(g).lg_length == pytest.approx(math.log(17, 4))
    assert completeness_indexes(G("abcbbabcaa")) == (1, 2)
    assert completeness_indexes(G("aaaa", AB)) == (0, 1)


def test_classify():
    assert classify(G("aaccggttagatctg"), 2) == (True, False)
    g = G("aaccggttagatctgca")
    assert classify(g, 2) == (True, True)
    assert len(g) == 4 ** 2 + 2 - 1
    assert classify(G("aaccggttagatctgac"), 2).is_k_hapax is False


def test_informational_indexes_toy():
    ix = informational_indexes(G("abcbbabcaa"))
    assert (ix.mrl, ix.mhl, ix.mcl, ix.mfl) == (3, 2, 1, 2)
    assert ix.lg_length == pytest.approx(math.log(10, 3))


def test_spectrum_tsv_round_trip():
    s = compute_spectrum(G("aaggccgaagggcacccaa"), 2)
    buf = io.StringIO()
    write_spectrum(s, buf)
    text = buf.getvalue()
    lines = text.splitlines()
    assert lines[0] == "#k=2\t#total=18"
    assert lines[1:3] == ["aa\t3", "ac\t1"]
    assert read_spectrum(io.StringIO(text)) == s


def test_spectrum_tsv_respects_alphabet_order():
    s = KSpectrum(1, {"T": 1, "A": 2}, Alphabet(("T", "A")))
    buf = io.StringIO()
    write_spectrum(s, buf)
    assert buf.getvalue().splitlines()[1:] == ["T\t1", "A\t2"]


@pytest.mark.parametrize("body,msg", [
    ("#k=2\t#total=2\naa\t1\naa\t1\n", "duplicate"),
    ("#k=2\t#total=0\naa\t0\n", "nonpositive"),
    ("#k=2\t#total=1\naa\t-1\n", "nonpositive"),
    ("#k=2\t#total=1\naaa\t1\n", "length"),
    ("#k=2\t#total=5\naa\t1\n", "total"),
    ("aa\t1\n", "header"),
])
def test_spectrum_reader_rejects(body, msg):
    with pytest.raises(ValueError, match=msg):
        read_spectrum(io.StringIO(body))


words = st.text(alphabet="ab", min_size=3, max_size=3)
spectra = st.dictionaries(words, st.integers(1, 5), max_size=8).map(lambda d: KSpectrum(3, d))


@given(spectra, spectra)
def test_sum_then_diff_is_identity(a, b):
    assert (a + b) - b == a
    assert (a + b).total == a.total + b.total


@given(st.text(alphabet="abc", min_size=1, max_size=40), st.integers(1, 6))
def test_spectrum_matches_oracle_and_reversal(text, k):
    alpha = Alphabet(("a", "b", "c"))
    if k > len(text):
        return
    g = G(text, alpha)
    s = compute_spectrum(g, k)
    assert dict(s) == kmer_counts(text, k)
    assert s.total == len(text) - k + 1
    r = compute_spectrum(reverse(g), k)
    assert dict(r) == {w[::-1]: m for w, m in s.items()}
