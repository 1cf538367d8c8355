"""CCDM mapping engines: multiset ranking, subset ranking, parallel amplitudes.

Sequences are tuples of amplitude indices ``1..m``. Ranks are Python ints.
Bit words are strings of ``'0'``/``'1'`` read most significant bit first.
"""

from __future__ import annotations

import enum
import itertools
from functools import lru_cache
from typing import Sequence

from .combinatorics import (
    CoefficientLUT,
    Composition,
    as_composition,
    floor_log2,
    lut_binom,
    lut_multinom,
)
from .errors import CompositionMismatchError, DecodeIntegrityError


class Engine(str, enum.Enum):
    """CCDM engine used inside a shaper."""

    MR = "mr"
    SR_PA = "sr"

    @classmethod
    def parse(cls, value) -> "Engine":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown engine {value!r}; expected 'mr' or 'sr'") from None


def bits_to_int(bits: str) -> int:
    if bits and set(bits) - {"0", "1"}:
        raise ValueError(f"not a bit string: {bits!r}")
    return int(bits, 2) if bits else 0


def int_to_bits(value: int, width: int) -> str:
    if value < 0 or value >> width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def sequence_composition(seq: Sequence[int], m: int) -> Composition:
    counts = [0] * m
    for s in seq:
        if not 1 <= s <= m:
            raise CompositionMismatchError(f"amplitude index {s} outside 1..{m}")
        counts[s - 1] += 1
    return tuple(counts)


def _check_consistent(comp: Composition, seq: Sequence[int]) -> None:
    if sequence_composition(seq, len(comp)) != tuple(comp):
        raise CompositionMismatchError(f"sequence does not have composition {tuple(comp)}")


# -- multiset ranking -------------------------------------------------------

def relative_ranks(remaining: Sequence[int], lut: CoefficientLUT | None = None) -> list[int]:
    """Cumulative predecessor counts for each candidate amplitude.

    Entry ``j`` is the number of completions that start with an amplitude
    index below ``j + 1``. The first entry is always 0. The m-1 multinomials
    are independent of each other; only the running sum is sequential.
    """
    terms = []
    for j in range(len(remaining) - 1):
        if remaining[j] == 0:
            terms.append(0)
            continue
        reduced = list(remaining)
        reduced[j] -= 1
        terms.append(lut_multinom(lut, reduced))
    return list(itertools.accumulate(terms, initial=0))


def mr_map(comp: Sequence[int], rank: int, lut: CoefficientLUT | None = None) -> tuple[int, ...]:
    """Multiset unranking: the ``rank``-th permutation of ``comp``.

    Permutations are ordered lexicographically with amplitude index 1
    smallest, and rank 0 is the first one.

    Parameters
    ----------
    comp : sequence of int
        Composition ``(c_1, ..., c_m)``.
    rank : int
        Target rank, ``0 <= rank < multinom(comp)``.
    lut : CoefficientLUT, optional
        MR table; misses fall back to direct evaluation.

    Returns
    -------
    tuple of int
        Amplitude indices in ``1..m``.
    """
    comp = as_composition(comp)
    total = lut_multinom(lut, comp)
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} outside [0, {total}) for composition {comp}")
    remaining = list(comp)
    target = rank
    out = []
    for _ in range(sum(comp)):
        rel = relative_ranks(remaining, lut)
        # largest index whose cumulative predecessor count does not exceed the
        # target; zero-count amplitudes tie with their successor and are skipped
        l = max(j for j in range(len(rel)) if rel[j] <= target)
        out.append(l + 1)
        remaining[l] -= 1
        target -= rel[l]
    return tuple(out)


def mr_demap(comp: Sequence[int], seq: Sequence[int], lut: CoefficientLUT | None = None) -> int:
    """Multiset ranking; exact inverse of :func:`mr_map`."""
    comp = as_composition(comp)
    _check_consistent(comp, seq)
    remaining = list(comp)
    rank = 0
    for s in seq:
        rel = relative_ranks(remaining, lut)
        rank += rel[s - 1]
        remaining[s - 1] -= 1
    return rank


# -- subset ranking ---------------------------------------------------------

def subset_unrank(n: int, w: int, rank: int, lut: CoefficientLUT | None = None) -> tuple[int, ...]:
    """The ``rank``-th ``w``-subset of ``{1..n}`` in lexicographic order."""
    total = lut_binom(lut, n, w)
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} outside [0, {total}) for ({n} choose {w})")
    out = []
    x = 1
    for slot in range(w, 0, -1):
        while True:
            # subsets whose next element is x
            block = lut_binom(lut, n - x, slot - 1)
            if rank < block:
                break
            rank -= block
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def subset_rank(n: int, positions: Sequence[int], lut: CoefficientLUT | None = None) -> int:
    """Lexicographic rank of a sorted subset of ``{1..n}``."""
    w = len(positions)
    rank = 0
    prev = 0
    for i, p in enumerate(positions):
        if not prev < p <= n:
            raise ValueError(f"positions must be strictly increasing within 1..{n}")
        for x in range(prev + 1, p):
            rank += lut_binom(lut, n - x, w - i - 1)
        prev = p
    return rank


def sr_unrank(n: int, w: int, rank: int, lut: CoefficientLUT | None = None) -> tuple[int, ...]:
    """Binary CCDM mapping: index 2 (heavy) at the selected positions, 1 elsewhere."""
    heavy = set(subset_unrank(n, w, rank, lut))
    return tuple(2 if i in heavy else 1 for i in range(1, n + 1))


def sr_rank(n: int, w: int, seq: Sequence[int], lut: CoefficientLUT | None = None) -> int:
    """Binary CCDM demapping; exact inverse of :func:`sr_unrank`."""
    if len(seq) != n:
        raise CompositionMismatchError(f"expected {n} symbols, got {len(seq)}")
    heavy = [i for i, s in enumerate(seq, start=1) if s == 2]
    if len(heavy) != w or any(s not in (1, 2) for s in seq):
        raise CompositionMismatchError(f"sequence is not binary with weight {w}")
    return subset_rank(n, heavy, lut)


# -- parallel amplitudes ------------------------------------------------------

def pa_level_bits(comp: Sequence[int], order: Sequence[int]) -> list[int]:
    """Bit budget of each binary level when amplitudes are placed in ``order``.

    ``order`` lists 0-based amplitude indices; the last one fills whatever
    positions are left and needs no level of its own.
    """
    free = sum(comp)
    out = []
    for a in order[:-1]:
        out.append(floor_log2(lut_binom(None, free, comp[a])))
        free -= comp[a]
    return out


@lru_cache(maxsize=1 << 16)
def pa_level_order(comp: Composition) -> tuple[int, ...]:
    """Placement order that maximizes the total PA payload of ``comp``.

    Among equally good orders the lexicographically largest wins, i.e.
    higher amplitudes are placed first. For a binary composition the single
    level then selects the positions of amplitude 2, exactly as
    :func:`sr_unrank` does. Zero-count amplitudes carry no bits and are
    listed first.
    """
    used = [a for a in range(len(comp)) if comp[a] > 0]
    unused = tuple(a for a in range(len(comp)) if comp[a] == 0)
    return max(
        (unused + perm for perm in itertools.permutations(used)),
        key=lambda order: (sum(pa_level_bits(comp, order)), order),
    )


def pa_payload_bits(comp: Sequence[int], order: Sequence[int] | None = None) -> int:
    comp = tuple(comp)
    if order is None:
        order = pa_level_order(comp)
    return sum(pa_level_bits(comp, order))


def pa_map(
    comp: Sequence[int],
    bits: str,
    order: Sequence[int] | None = None,
    lut: CoefficientLUT | None = None,
) -> tuple[int, ...]:
    """Map a bit word to a sequence of composition ``comp`` with binary levels.

    Level ``t`` takes the next ``pa_level_bits(...)[t]`` input bits as a
    subset rank and places amplitude ``order[t]`` on the selected positions
    among those still free, scanned left to right. The last amplitude in
    ``order`` fills the rest.
    """
    comp = as_composition(comp)
    if order is None:
        order = pa_level_order(comp)
    budgets = pa_level_bits(comp, order)
    if len(bits) != sum(budgets):
        raise ValueError(f"expected {sum(budgets)} input bits, got {len(bits)}")
    n = sum(comp)
    out = [0] * n
    free = list(range(n))
    pos = 0
    for a, b in zip(order, budgets):
        rank = bits_to_int(bits[pos:pos + b])
        pos += b
        chosen = subset_unrank(len(free), comp[a], rank, lut)
        picked = {free[i - 1] for i in chosen}
        for p in picked:
            out[p] = a + 1
        free = [p for p in free if p not in picked]
    for p in free:
        out[p] = order[-1] + 1
    return tuple(out)


def pa_demap(
    comp: Sequence[int],
    seq: Sequence[int],
    order: Sequence[int] | None = None,
    lut: CoefficientLUT | None = None,
) -> str:
    """Inverse of :func:`pa_map`.

    Raises :class:`DecodeIntegrityError` if a level's recovered rank does
    not fit its bit budget, which no output of :func:`pa_map` can produce.
    """
    comp = as_composition(comp)
    _check_consistent(comp, seq)
    if order is None:
        order = pa_level_order(comp)
    budgets = pa_level_bits(comp, order)
    free = list(range(len(seq)))
    words = []
    for a, b in zip(order, budgets):
        hits = [i for i, p in enumerate(free, start=1) if seq[p] == a + 1]
        rank = subset_rank(len(free), hits, lut)
        if rank >> b:
            raise DecodeIntegrityError(
                f"level for amplitude {a + 1} has rank {rank}, budget is {b} bits"
            )
        words.append(int_to_bits(rank, b))
        free = [p for p in free if seq[p] != a + 1]
    return "".join(words)


def ccdm_payload_bits(comp: Sequence[int], engine: Engine | str = Engine.MR) -> int:
    """Number of input bits a single-composition matcher can carry."""
    engine = Engine.parse(engine)
    comp = as_composition(comp)
    if engine is Engine.MR:
        return floor_log2(lut_multinom(None, comp))
    return pa_payload_bits(comp)
