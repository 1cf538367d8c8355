"""Block shapers built on the ranking engines.

A shaper maps ``k`` uniform input bits to one length-``n`` amplitude
sequence. All three schemes share one codebook layout: a prefix-free code
picks a composition, and the remaining payload bits are mapped within that
composition by a CCDM engine (multiset ranking or parallel-amplitude subset
ranking).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .combinatorics import (
    Alphabet,
    CoefficientLUT,
    Composition,
    as_composition,
    composition_energy,
    enumerate_compositions,
    floor_log2,
    multinom,
)
from .errors import (
    CodebookError,
    DecodeIntegrityError,
    DegenerateShaperError,
    RateInfeasibleError,
)
from .ranking import (
    Engine,
    bits_to_int,
    ccdm_payload_bits,
    int_to_bits,
    mr_demap,
    mr_map,
    pa_demap,
    pa_map,
    sequence_composition,
)


class Scheme(str, enum.Enum):
    CCDM = "ccdm"
    HCSS = "hcss"
    MPDM = "mpdm"


@dataclass(frozen=True)
class CodebookEntry:
    """One leaf of the prefix tree."""

    prefix: str
    composition: Composition
    payload_bits: int
    mpdm_twin: Composition | None = None


@dataclass(frozen=True)
class ShaperCodebook:
    """Prefix code over compositions plus the engine that maps payloads.

    Entry ``e`` owns the ``2**e.payload_bits`` inputs that start with
    ``e.prefix``. For a valid codebook these blocks tile all ``2**k`` inputs.
    """

    scheme: Scheme
    engine: Engine
    alphabet: Alphabet
    n: int
    k: int
    entries: tuple[CodebookEntry, ...]

    @cached_property
    def _by_prefix(self) -> dict[str, CodebookEntry]:
        return {e.prefix: e for e in self.entries}

    @cached_property
    def _by_composition(self) -> dict[Composition, CodebookEntry]:
        return {e.composition: e for e in self.entries}

    @property
    def num_compositions(self) -> int:
        return len(self.entries)

    @property
    def tree_depth(self) -> int:
        """Longest prefix, i.e. the depth of the Huffman tree."""
        return max(len(e.prefix) for e in self.entries)

    @property
    def rate(self) -> float:
        return self.k / self.n

    def entry_for_composition(self, comp: Composition) -> CodebookEntry | None:
        return self._by_composition.get(tuple(comp))

    def validate(self) -> None:
        """Raise :class:`CodebookError` unless every structural invariant holds."""
        m = self.alphabet.m
        kraft = Fraction(0)
        seen_comps = set()
        for e in self.entries:
            if len(e.composition) != m or sum(e.composition) != self.n:
                raise CodebookError(f"entry {e.composition} is not a length-{self.n} composition")
            if e.composition in seen_comps:
                raise CodebookError(f"composition {e.composition} appears twice")
            seen_comps.add(e.composition)
            if len(e.prefix) + e.payload_bits != self.k:
                raise CodebookError(f"prefix {e.prefix!r} + {e.payload_bits} payload bits != k")
            if e.payload_bits > ccdm_payload_bits(e.composition, self.engine):
                raise CodebookError(f"payload of {e.composition} exceeds engine capacity")
            if e.mpdm_twin is not None:
                target = [a + b for a, b in zip(e.composition, e.mpdm_twin)]
                if any(t % 2 for t in target):
                    raise CodebookError(f"twin of {e.composition} does not average to a composition")
            kraft += Fraction(1, 2 ** len(e.prefix))
        if kraft != 1:
            raise CodebookError(f"Kraft sum is {kraft}, expected 1")
        prefixes = sorted(e.prefix for e in self.entries)
        for a, b in zip(prefixes, prefixes[1:]):
            if b.startswith(a):
                raise CodebookError(f"prefix {a!r} is a prefix of {b!r}")


# -- construction helpers -------------------------------------------------------

def ccdm_composition_from_pmf(pmf: Sequence[float], n: int) -> Composition:
    """Quantize a PMF to counts summing to ``n`` by largest remainder.

    Remainder ties go to the lower index. Probabilities are taken at their
    shortest decimal representation so that e.g. ``0.3 * 10`` is exactly 3.
    """
    check_pmf(pmf)
    exact = [Fraction(str(p)) * n for p in pmf]
    counts = [int(x) for x in exact]
    short = n - sum(counts)
    order = sorted(range(len(pmf)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return tuple(counts)


def check_pmf(pmf: Sequence[float]) -> None:
    if any(p < 0 or p > 1 for p in pmf):
        raise ValueError(f"probabilities must lie in [0, 1]: {tuple(pmf)}")
    if abs(sum(pmf) - 1.0) > 1e-12:
        raise ValueError(f"PMF sums to {sum(pmf)}, not 1")


def _dyadic_fill(exponents: Iterable[int], k: int) -> list[int]:
    """Grant ``2**min(e, floor(log2 residual))`` per item until ``2**k`` is covered.

    Returns the granted exponents for the consumed prefix of ``exponents``.
    """
    residual = 1 << k
    granted = []
    for e in exponents:
        u = min(e, floor_log2(residual))
        granted.append(u)
        residual -= 1 << u
        if residual == 0:
            return granted
    raise RateInfeasibleError(f"only {(1 << k) - residual} of {1 << k} sequences are available")


def _assign_prefixes(grants: Sequence[tuple[Composition, int, Composition | None]], k: int):
    """Canonical prefix code for dyadic blocks.

    Blocks are laid out in order of decreasing size (stable with respect to
    the grant order), so every block starts at a multiple of its own size
    and its prefix is simply the block start shifted down.
    """
    order = sorted(range(len(grants)), key=lambda i: -grants[i][1])
    start = 0
    entries = []
    for i in order:
        comp, u, twin = grants[i]
        entries.append(CodebookEntry(int_to_bits(start >> u, k - u), comp, u, twin))
        start += 1 << u
    if start != 1 << k:
        raise CodebookError("granted blocks do not tile the input space")
    return tuple(entries)


def build_ccdm(
    pmf: Sequence[float],
    n: int,
    engine: Engine | str = Engine.MR,
    alphabet: Alphabet | None = None,
) -> ShaperCodebook:
    """Single-composition matcher: one entry with an empty prefix."""
    engine = Engine.parse(engine)
    alphabet = alphabet or Alphabet.ask(len(pmf))
    if alphabet.m != len(pmf):
        raise ValueError("PMF and alphabet sizes differ")
    comp = ccdm_composition_from_pmf(pmf, n)
    k = ccdm_payload_bits(comp, engine)
    if k == 0:
        raise DegenerateShaperError(f"composition {comp} carries no input bits")
    entry = CodebookEntry("", comp, k)
    return ShaperCodebook(Scheme.CCDM, engine, alphabet, n, k, (entry,))


def build_hcss(
    n: int,
    alphabet: Alphabet,
    k_target: int,
    engine: Engine | str = Engine.MR,
    min_perm_exponent: int | None = None,
) -> ShaperCodebook:
    """Huffman-coded sphere shaping codebook.

    Compositions are taken in ascending energy order (ties keep the order of
    :func:`enumerate_compositions`) and each is granted its capacity rounded
    down to a power of two, capped by what is still needed to reach exactly
    ``2**k_target`` inputs. The last composition is usually cut short.

    Parameters
    ----------
    n : int
        Block length.
    alphabet : Alphabet
        Amplitude levels.
    k_target : int
        Number of input bits per block.
    engine : Engine or str
        ``"mr"`` or ``"sr"``; sets each composition's capacity.
    min_perm_exponent : int, optional
        Pruning threshold ``e``: compositions whose rounded capacity
        ``2**payload`` is at most ``2**e`` are left out. ``None`` keeps all.

    Raises
    ------
    RateInfeasibleError
        If the kept compositions cannot address ``2**k_target`` inputs.
    """
    engine = Engine.parse(engine)
    if k_target < 1:
        raise ValueError("k_target must be at least 1")
    comps = sorted(enumerate_compositions(n, alphabet), key=lambda c: composition_energy(c, alphabet))

    walked = []

    def capacities():
        # lazy: the fill usually stops long before the last composition
        for c in comps:
            p = ccdm_payload_bits(c, engine)
            if min_perm_exponent is not None and p <= min_perm_exponent:
                continue
            walked.append(c)
            yield p

    granted = _dyadic_fill(capacities(), k_target)
    grants = [(c, u, None) for c, u in zip(walked, granted)]
    entries = _assign_prefixes(grants, k_target)
    return ShaperCodebook(Scheme.HCSS, engine, alphabet, n, k_target, entries)


def mpdm_deviations(target: Composition) -> list[tuple[int, ...]]:
    """Nonzero integer shifts ``d`` with ``sum(d) == 0`` and ``target +- d`` valid.

    Each unordered pair ``{target + d, target - d}`` appears once, as the
    ``d`` whose first nonzero element is positive. Order is lexicographic
    in ``d``.
    """
    head = [range(-t, t + 1) for t in target[:-1]]
    out = []
    for d in itertools.product(*head):
        last = -sum(d)
        if abs(last) > target[-1]:
            continue
        d = d + (last,)
        first = next((x for x in d if x), 0)
        if first > 0:
            out.append(d)
    return out


def build_mpdm(
    pmf: Sequence[float],
    n: int,
    engine: Engine | str = Engine.MR,
    alphabet: Alphabet | None = None,
) -> ShaperCodebook:
    """Pairwise multiset-partition matcher.

    Each pair ``(T + d, T - d)`` around the target composition ``T`` gets
    twice the smaller member's rounded capacity, split evenly between the
    members, so the pair averages to ``T`` exactly. ``T`` itself is a
    singleton entry. Pair energies all equal ``2 * energy(T)``, so grants are
    made largest first; ties keep the order of :func:`mpdm_deviations`.
    """
    engine = Engine.parse(engine)
    alphabet = alphabet or Alphabet.ask(len(pmf))
    if alphabet.m != len(pmf):
        raise ValueError("PMF and alphabet sizes differ")
    target = ccdm_composition_from_pmf(pmf, n)

    # (exponent of the whole grant, members)
    items = [(ccdm_payload_bits(target, engine), (target,))]
    for d in mpdm_deviations(target):
        a = tuple(t + x for t, x in zip(target, d))
        b = tuple(t - x for t, x in zip(target, d))
        q = min(ccdm_payload_bits(a, engine), ccdm_payload_bits(b, engine))
        items.append((q + 1, (a, b)))

    total = sum(1 << e for e, _ in items)
    k = floor_log2(total)
    if k == 0:
        raise RateInfeasibleError(f"no usable pairs around {target}")
    items.sort(key=lambda it: -it[0])
    granted = _dyadic_fill((e for e, _ in items), k)

    grants = []
    for (e, members), u in zip(items, granted):
        if u != e:
            raise CodebookError("pair grant was split; dyadic fill lost pair symmetry")
        if len(members) == 1:
            grants.append((target, u, target))
        else:
            a, b = members
            grants.append((a, u - 1, b))
            grants.append((b, u - 1, a))
    entries = _assign_prefixes(grants, k)
    return ShaperCodebook(Scheme.MPDM, engine, alphabet, n, k, entries)


# -- mapping ------------------------------------------------------------------

def _engine_map(cb: ShaperCodebook, entry: CodebookEntry, payload: str, lut) -> tuple[int, ...]:
    if cb.engine is Engine.MR:
        return mr_map(entry.composition, bits_to_int(payload), lut)
    # payload occupies the low bits of the PA input; unused high bits are zero
    width = ccdm_payload_bits(entry.composition, Engine.SR_PA)
    return pa_map(entry.composition, payload.rjust(width, "0"), lut=lut)


def _engine_demap(cb: ShaperCodebook, entry: CodebookEntry, seq, lut) -> str:
    u = entry.payload_bits
    if cb.engine is Engine.MR:
        rank = mr_demap(entry.composition, seq, lut)
    else:
        rank = bits_to_int(pa_demap(entry.composition, seq, lut=lut))
    if rank >> u:
        raise DecodeIntegrityError(
            f"rank {rank} exceeds the {u}-bit payload of composition {entry.composition}"
        )
    return int_to_bits(rank, u)


def shape(cb: ShaperCodebook, bits: str, lut: CoefficientLUT | None = None) -> tuple[int, ...]:
    """Map ``cb.k`` input bits to a length-``cb.n`` sequence of amplitude indices."""
    if len(bits) != cb.k:
        raise ValueError(f"expected {cb.k} input bits, got {len(bits)}")
    bits_to_int(bits)
    table = cb._by_prefix
    for cut in range(cb.k + 1):
        entry = table.get(bits[:cut])
        if entry is not None:
            return _engine_map(cb, entry, bits[cut:], lut)
    raise CodebookError(f"no prefix of {bits} is in the codebook")


def deshape(cb: ShaperCodebook, seq: Sequence[int], lut: CoefficientLUT | None = None) -> str:
    """Inverse of :func:`shape`."""
    if len(seq) != cb.n:
        raise DecodeIntegrityError(f"expected {cb.n} symbols, got {len(seq)}")
    try:
        comp = sequence_composition(seq, cb.alphabet.m)
    except ValueError as exc:
        raise DecodeIntegrityError(str(exc)) from None
    entry = cb.entry_for_composition(comp)
    if entry is None:
        raise DecodeIntegrityError(f"composition {comp} is not used by this codebook")
    return entry.prefix + _engine_demap(cb, entry, seq, lut)


def codebook_average_pmf_exact(cb: ShaperCodebook) -> tuple[Fraction, ...]:
    weighted = [0] * cb.alphabet.m
    for e in cb.entries:
        for i, c in enumerate(e.composition):
            weighted[i] += c << e.payload_bits
    denom = cb.n << cb.k
    return tuple(Fraction(w, denom) for w in weighted)


def codebook_average_pmf(cb: ShaperCodebook) -> tuple[float, ...]:
    """Amplitude PMF averaged over all ``2**k`` output sequences."""
    return tuple(float(p) for p in codebook_average_pmf_exact(cb))


# -- persistence -----------------------------------------------------------------

def _fmt(comp: Sequence[int]) -> str:
    return ",".join(map(str, comp))


def _parse_comp(text: str) -> Composition:
    return as_composition(int(t) for t in text.split(","))


def dump_codebook(cb: ShaperCodebook) -> str:
    """Text form; an empty prefix is written as ``-``."""
    lines = [
        f"CODEBOOK scheme={cb.scheme.value} engine={cb.engine.value} "
        f"n={cb.n} k={cb.k} amps={cb.alphabet}"
    ]
    for e in cb.entries:
        line = f"{e.prefix or '-'} {_fmt(e.composition)} {e.payload_bits}"
        if e.mpdm_twin is not None:
            line += f" twin={_fmt(e.mpdm_twin)}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def load_codebook(text: str) -> ShaperCodebook:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("CODEBOOK"):
        raise CodebookError("missing CODEBOOK header")
    try:
        head = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
        scheme = Scheme(head["scheme"])
        engine = Engine.parse(head["engine"])
        alphabet = Alphabet.parse(head["amps"])
        n, k = int(head["n"]), int(head["k"])
        entries = []
        for ln in lines[1:]:
            parts = ln.split()
            prefix = "" if parts[0] == "-" else parts[0]
            twin = None
            for extra in parts[3:]:
                key, _, val = extra.partition("=")
                if key != "twin":
                    raise CodebookError(f"unknown field {extra!r}")
                twin = _parse_comp(val)
            entries.append(CodebookEntry(prefix, _parse_comp(parts[1]), int(parts[2]), twin))
    except (KeyError, IndexError, ValueError) as exc:
        raise CodebookError(f"malformed codebook: {exc}") from None
    cb = ShaperCodebook(scheme, engine, alphabet, n, k, tuple(entries))
    cb.validate()
    return cb
