"""Exact binomial/multinomial arithmetic, compositions, and coefficient LUTs.

Everything here works on Python ints, so values never round. A composition
is a plain tuple of occurrence counts ``(c_1, ..., c_m)``; its block length
is ``sum(counts)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence, Tuple

from .errors import LUTMiss

Composition = Tuple[int, ...]

DEFAULT_AMPLITUDES = (1, 3, 5, 7)


@dataclass(frozen=True)
class Alphabet:
    """Ordered one-sided ASK amplitude levels."""

    amplitudes: Tuple[int, ...] = DEFAULT_AMPLITUDES

    def __post_init__(self):
        amps = tuple(int(a) for a in self.amplitudes)
        object.__setattr__(self, "amplitudes", amps)
        if len(amps) < 2:
            raise ValueError("alphabet needs at least two amplitudes")
        if amps[0] < 1 or any(b <= a for a, b in zip(amps, amps[1:])):
            raise ValueError(f"amplitudes must be positive and strictly increasing: {amps}")

    @property
    def m(self) -> int:
        return len(self.amplitudes)

    @classmethod
    def ask(cls, m: int) -> "Alphabet":
        """The odd-integer ladder 1, 3, ..., 2m-1."""
        return cls(tuple(range(1, 2 * m, 2)))

    @classmethod
    def parse(cls, text: str) -> "Alphabet":
        return cls(tuple(int(t) for t in text.split(",") if t.strip()))

    def __str__(self) -> str:
        return ",".join(map(str, self.amplitudes))


def as_composition(counts: Sequence[int], m: int | None = None) -> Composition:
    """Validate ``counts`` and return it as a composition tuple."""
    comp = tuple(int(c) for c in counts)
    if any(c < 0 for c in comp):
        raise ValueError(f"negative count in composition {comp}")
    if sum(comp) < 1:
        raise ValueError(f"composition {comp} has empty block length")
    if m is not None and len(comp) != m:
        raise ValueError(f"composition {comp} has {len(comp)} parts, expected {m}")
    return comp


def ceil_log2(value: int) -> int:
    """Bits needed to store ``value``; ceil(log2 1) is taken as 0."""
    if value < 1:
        raise ValueError("ceil_log2 is defined for positive integers only")
    return (value - 1).bit_length()


def floor_log2(value: int) -> int:
    if value < 1:
        raise ValueError("floor_log2 is defined for positive integers only")
    return value.bit_length() - 1


def binom(n: int, w: int) -> int:
    """Exact n-choose-w via the multiplicative formula."""
    if n < 0 or w < 0 or w > n:
        raise ValueError(f"binom({n}, {w}) is outside 0 <= w <= n")
    w = min(w, n - w)
    value = 1
    for j in range(1, w + 1):
        # exact at every step: value holds binom(n - w + j - 1, j - 1)
        value = value * (n - w + j) // j
    return value


def multinom(counts: Sequence[int]) -> int:
    """Number of distinct permutations of a multiset with these counts.

    Evaluated as a product of binomials so no factorial is ever formed.
    """
    remaining = sum(counts)
    value = 1
    for c in counts:
        if c < 0:
            raise ValueError(f"negative count in {tuple(counts)}")
        value *= binom(remaining, c)
        remaining -= c
    return value


def enumerate_compositions(n: int, m: int | Alphabet) -> list[Composition]:
    """All compositions of ``n`` into ``m`` parts, each exactly once.

    The order is fixed: the first count runs from ``n`` down to 0 and the
    last index varies fastest, so ``(n, 0, ..., 0)`` comes first and
    ``(0, ..., 0, n)`` last.
    """
    if isinstance(m, Alphabet):
        m = m.m
    if n < 1:
        raise ValueError("block length must be positive")
    if m < 1:
        raise ValueError("need at least one part")
    return list(_compositions(n, m))


def _compositions(n: int, m: int) -> Iterator[Composition]:
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


def composition_energy(counts: Sequence[int], alphabet: Alphabet) -> int:
    """Total energy of any sequence with this composition."""
    if len(counts) != alphabet.m:
        raise ValueError("composition and alphabet lengths differ")
    return sum(c * a * a for c, a in zip(counts, alphabet.amplitudes))


def sorted_multisets(total: int, m: int) -> Iterator[Composition]:
    """Count multisets of ``m`` non-negative parts summing to ``total``.

    Parts are listed in non-increasing order, which is the canonical key
    used by MR lookup tables.
    """
    yield from _partitions(total, m, total)


def _partitions(total: int, parts: int, cap: int) -> Iterator[Composition]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap), -1, -1):
        if first * parts < total:
            break
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


# -- lookup tables ---------------------------------------------------------

SR = "sr"
MR = "mr"


@dataclass(frozen=True, eq=False)
class CoefficientLUT:
    """Precomputed binomial (SR) or multinomial (MR) coefficients.

    ``n_max`` is the largest covered block length for SR tables and the
    shaper block length ``n`` for MR tables (which then cover lengths
    1 .. n-1). ``total_bits`` is the storage cost in bits, one
    ``ceil(log2 value)`` wide slot per entry.
    """

    kind: str
    n_max: int
    entries: Mapping[tuple, int]
    total_bits: int
    m: int | None = None

    def __post_init__(self):
        if self.kind not in (SR, MR):
            raise ValueError(f"unknown LUT kind {self.kind!r}")
        if not isinstance(self.entries, MappingProxyType):
            object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def max_entry_bits(self) -> int:
        return max((ceil_log2(v) for v in self.entries.values()), default=0)


def sr_key(i: int, w: int) -> tuple[int, int]:
    """Canonical SR key: binomials are stored for the smaller weight only."""
    return (i, min(w, i - w))


def mr_key(counts: Sequence[int]) -> Composition:
    """Canonical MR key: the counts sorted in non-increasing order."""
    return tuple(sorted(counts, reverse=True))


def build_sr_lut(n_max: int) -> CoefficientLUT:
    """Binomials for every length 4..n_max and weight 2..floor(i/2).

    Weights 0 and 1 (values 1 and ``i``) and the mirrored upper half are
    left out; lookups for them go through :func:`sr_key` or are trivial.
    """
    entries = {}
    for i in range(4, n_max + 1):
        for w in range(2, i // 2 + 1):
            entries[(i, w)] = binom(i, w)
    total = sum(ceil_log2(v) for v in entries.values())
    return CoefficientLUT(SR, n_max, entries, total)


def build_mr_lut(n: int, alphabet: Alphabet | int) -> CoefficientLUT:
    """Multinomials of all sorted count multisets with total 1..n-1."""
    m = alphabet.m if isinstance(alphabet, Alphabet) else int(alphabet)
    if n < 2:
        raise ValueError("MR lookup tables need n >= 2")
    entries = {}
    for i in range(1, n):
        for key in sorted_multisets(i, m):
            entries[key] = multinom(key)
    total = sum(ceil_log2(v) for v in entries.values())
    return CoefficientLUT(MR, n, entries, total, m=m)


@lru_cache(maxsize=None)
def _mr_bits_for_length(i: int, m: int) -> int:
    return sum(ceil_log2(multinom(key)) for key in sorted_multisets(i, m))


def mr_lut_bits(n: int, m: int) -> int:
    """``build_mr_lut(n, m).total_bits`` without materializing the table."""
    return sum(_mr_bits_for_length(i, m) for i in range(1, n))


def sr_lut_bits(n_max: int) -> int:
    """``build_sr_lut(n_max).total_bits`` without materializing the table."""
    return sum(
        ceil_log2(binom(i, w)) for i in range(4, n_max + 1) for w in range(2, i // 2 + 1)
    )


def lut_lookup(lut: CoefficientLUT, key) -> int:
    """Raw table read. Keys are not normalized; see :func:`sr_key`/:func:`mr_key`."""
    try:
        return lut.entries[tuple(key)]
    except KeyError:
        raise LUTMiss(f"{lut.kind.upper()} LUT has no entry {tuple(key)}") from None


def lut_binom(lut: CoefficientLUT | None, n: int, w: int) -> int:
    """Binomial through ``lut`` with symmetry folding and direct fallback."""
    if lut is not None and lut.kind == SR and 0 <= w <= n:
        try:
            return lut_lookup(lut, sr_key(n, w))
        except LUTMiss:
            pass
    return binom(n, w)


def lut_multinom(lut: CoefficientLUT | None, counts: Sequence[int]) -> int:
    """Multinomial through ``lut`` with permutation folding and direct fallback."""
    if lut is not None and lut.kind == MR and len(counts) == lut.m:
        try:
            return lut_lookup(lut, mr_key(counts))
        except LUTMiss:
            pass
    return multinom(counts)


# -- persistence -----------------------------------------------------------

def dump_lut(lut: CoefficientLUT) -> str:
    """Line-oriented text form; values are written in decimal."""
    if lut.kind == SR:
        lines = [f"SRLUT n_max={lut.n_max}"]
    else:
        lines = [f"MRLUT n={lut.n_max} m={lut.m}"]
    for key, value in lut.entries.items():
        lines.append(f"{','.join(map(str, key))} {value}")
    lines.append(f"TOTAL_BITS {lut.total_bits}")
    return "\n".join(lines) + "\n"


def load_lut(text: str) -> CoefficientLUT:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty LUT file")
    head = lines[0].split()
    params = dict(tok.split("=", 1) for tok in head[1:])
    if head[0] == "SRLUT":
        kind, n_max, m = SR, int(params["n_max"]), None
    elif head[0] == "MRLUT":
        kind, n_max, m = MR, int(params["n"]), int(params["m"])
    else:
        raise ValueError(f"unknown LUT header {lines[0]!r}")
    entries = {}
    total = None
    for ln in lines[1:]:
        left, right = ln.split()
        if left == "TOTAL_BITS":
            total = int(right)
            continue
        entries[tuple(int(t) for t in left.split(","))] = int(right)
    recomputed = sum(ceil_log2(v) for v in entries.values())
    if total is None:
        raise ValueError("LUT file lacks a TOTAL_BITS line")
    if total != recomputed:
        raise ValueError(f"TOTAL_BITS {total} does not match entries ({recomputed})")
    return CoefficientLUT(kind, n_max, entries, total, m=m)
