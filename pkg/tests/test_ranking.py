import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ampshape.combinatorics import build_mr_lut, build_sr_lut, enumerate_compositions, multinom
from ampshape.errors import CompositionMismatchError, DecodeIntegrityError
from ampshape.ranking import (
    Engine,
    ccdm_payload_bits,
    mr_demap,
    mr_map,
    pa_demap,
    pa_level_bits,
    pa_level_order,
    pa_map,
    pa_payload_bits,
    relative_ranks,
    sr_rank,
    sr_unrank,
    subset_rank,
    subset_unrank,
)


def lex_permutations(comp):
    symbols = [i + 1 for i, c in enumerate(comp) for _ in range(c)]
    return sorted(set(itertools.permutations(symbols)))


def heavy_positions(seq):
    return tuple(i for i, s in enumerate(seq, start=1) if s == 2)


def all_words(k):
    return ["".join(w) for w in itertools.product("01", repeat=k)]


class TestMultisetRanking:
    def test_examples(self):
        assert mr_map([3, 0], 0) == (1, 1, 1)
        assert mr_map([2, 1], 2) == (2, 1, 1)
        assert mr_map([1, 1, 1], 5) == (3, 2, 1)
        assert mr_demap([3, 0], (1, 1, 1)) == 0
        assert mr_demap([2, 1], (1, 2, 1)) == 1

    def test_roundtrip_6_4(self):
        seqs = [mr_map([6, 4], r) for r in range(210)]
        assert len(set(seqs)) == 210
        assert [mr_demap([6, 4], s) for s in seqs] == list(range(210))

    def test_order_matches_enumeration(self):
        for m in (2, 3):
            for n in range(1, 9):
                for comp in enumerate_compositions(n, m):
                    expected = lex_permutations(comp)
                    got = [mr_map(comp, r) for r in range(multinom(comp))]
                    assert got == expected, comp

    def test_selection_rule(self):
        comp = [3, 2, 0, 2]
        for rank in range(multinom(comp)):
            remaining, target = list(comp), rank
            for s in mr_map(comp, rank):
                rel = relative_ranks(remaining, None)
                l = s - 1
                assert rel[0] == 0
                assert rel == sorted(rel)
                assert rel[l] <= target
                assert l == len(rel) - 1 or rel[l + 1] > target
                target -= rel[l]
                remaining[l] -= 1

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            mr_map([2, 1], 3)
        with pytest.raises(ValueError):
            mr_map([2, 1], -1)

    def test_mismatch(self):
        with pytest.raises(CompositionMismatchError):
            mr_demap([2, 1], (1, 2, 2))
        with pytest.raises(CompositionMismatchError):
            mr_demap([2, 1], (1, 3, 1))

    def test_lut_path_bit_identical(self):
        comp = (5, 4, 2, 1)
        lut = build_mr_lut(sum(comp), 4)
        for rank in range(0, multinom(comp), 997):
            seq = mr_map(comp, rank)
            assert mr_map(comp, rank, lut) == seq
            assert mr_demap(comp, seq, lut) == rank

    def test_short_lut_falls_back(self):
        comp = (4, 3, 2)
        lut = build_mr_lut(4, 3)
        for rank in range(0, multinom(comp), 37):
            assert mr_map(comp, rank, lut) == mr_map(comp, rank)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=2, max_size=5).filter(lambda c: sum(c) > 0), st.data())
def test_mr_roundtrip_property(comp, data):
    rank = data.draw(st.integers(0, multinom(comp) - 1))
    seq = mr_map(comp, rank)
    assert [seq.count(i + 1) for i in range(len(comp))] == comp
    assert mr_demap(comp, seq) == rank


class TestSubsetRanking:
    def test_first_elements(self):
        assert heavy_positions(sr_unrank(10, 4, 0)) == (1, 2, 3, 4)
        assert heavy_positions(sr_unrank(10, 4, 1)) == (1, 2, 3, 5)
        assert sr_rank(10, 4, sr_unrank(10, 4, 0)) == 0

    def test_rank_of_2_4_7_9(self):
        # 115 subsets precede [2,4,7,9] in lexicographic order
        seq = tuple(2 if i in (2, 4, 7, 9) else 1 for i in range(1, 11))
        assert sr_rank(10, 4, seq) == 115
        assert sr_unrank(10, 4, 115) == seq

    def test_example_sequence_layout(self):
        # heavy symbol marks the selected positions: [2,4,7,9] -> a b a b a a b a b a
        assert sr_unrank(10, 4, 115) == (1, 2, 1, 2, 1, 1, 2, 1, 2, 1)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_order_matches_enumeration(self, n):
        for w in range(n + 1):
            expected = list(itertools.combinations(range(1, n + 1), w))
            got = [subset_unrank(n, w, r) for r in range(math.comb(n, w))]
            assert got == expected
            assert [subset_rank(n, s) for s in expected] == list(range(len(expected)))

    def test_roundtrip_10_4(self):
        seqs = {sr_unrank(10, 4, r) for r in range(210)}
        assert len(seqs) == 210
        assert sorted(sr_rank(10, 4, s) for s in seqs) == list(range(210))

    def test_errors(self):
        with pytest.raises(ValueError):
            sr_unrank(10, 4, 210)
        with pytest.raises(CompositionMismatchError):
            sr_rank(10, 4, (2,) * 5 + (1,) * 5)

    def test_lut_path(self):
        lut = build_sr_lut(16)
        for r in range(0, math.comb(30, 11), 104729):
            s = subset_unrank(30, 11, r)
            assert subset_unrank(30, 11, r, lut) == s
            assert subset_rank(30, s, lut) == r


class TestParallelAmplitude:
    def test_degenerate(self):
        assert pa_payload_bits((5, 0, 0, 0)) == 0
        assert pa_map((5, 0, 0, 0), "") == (1,) * 5
        assert pa_demap((5, 0, 0, 0), (1,) * 5) == ""

    def test_binary_equivalence(self):
        assert pa_payload_bits((6, 4)) == 7
        assert pa_level_order((6, 4)) == (1, 0)
        for word in all_words(7):
            seq = pa_map((6, 4), word)
            assert seq == sr_unrank(10, 4, int(word, 2))
            assert pa_demap((6, 4), seq) == word
        # ascending order places amplitude 1 instead: the complement of a weight-6 subset
        for word in all_words(7):
            seq = pa_map((6, 4), word, order=(0, 1))
            assert seq == tuple(3 - s for s in sr_unrank(10, 6, int(word, 2)))

    def test_2_1_1(self):
        comp = (2, 1, 1)
        assert pa_level_bits(comp, (0, 1, 2)) == [2, 1]
        assert pa_payload_bits(comp) == 3
        seqs = [pa_map(comp, w) for w in all_words(3)]
        assert len(set(seqs)) == 8
        assert [pa_demap(comp, s) for s in seqs] == all_words(3)

    def test_ascending_order_formula(self):
        for comp in enumerate_compositions(9, 4):
            expected, free = 0, 9
            for c in comp[:-1]:
                expected += math.floor(math.log2(math.comb(free, c)))
                free -= c
            assert pa_payload_bits(comp, order=(0, 1, 2, 3)) == expected

    def test_best_order_never_worse(self):
        for comp in enumerate_compositions(10, 4):
            best = pa_payload_bits(comp)
            for order in itertools.permutations(range(4)):
                assert pa_payload_bits(comp, order) <= best

    def test_never_exceeds_mr(self):
        for m in (2, 3, 4):
            for n in range(1, 13):
                for comp in enumerate_compositions(n, m):
                    assert pa_payload_bits(comp) <= ccdm_payload_bits(comp, Engine.MR)

    @pytest.mark.parametrize("comp", [(3, 2, 2), (2, 2, 1, 1), (4, 0, 2, 1), (1, 3, 0, 2)])
    def test_exhaustive_roundtrip(self, comp):
        k = pa_payload_bits(comp)
        words = all_words(k)
        seqs = [pa_map(comp, w) for w in words]
        assert len(set(seqs)) == len(words)
        for w, s in zip(words, seqs):
            assert [s.count(i + 1) for i in range(len(comp))] == list(comp)
            assert pa_demap(comp, s) == w

    def test_unreachable_sequence(self):
        # 5 choose 3 = 10 but the level only carries 3 bits (8 ranks)
        comp = (2, 3)
        assert pa_level_order(comp) == (1, 0)
        with pytest.raises(DecodeIntegrityError):
            pa_demap(comp, sr_unrank(5, 3, 9))

    def test_bit_length_checked(self):
        with pytest.raises(ValueError):
            pa_map((6, 4), "101")


class TestPayloadBits:
    def test_examples(self):
        assert ccdm_payload_bits([6, 4], "mr") == 7
        assert ccdm_payload_bits([8, 0, 0, 0], "mr") == 0
        assert ccdm_payload_bits([8, 0, 0, 0], "sr") == 0
        assert ccdm_payload_bits([2, 1, 1], Engine.MR) == 3
        assert ccdm_payload_bits([2, 1, 1], Engine.SR_PA) == 3

    def test_unknown_engine(self):
        with pytest.raises(ValueError):
            ccdm_payload_bits([2, 1], "ac")
