"""Rate loss, energy and LUT-size metrics, and the sweeps built from them."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence

from .combinatorics import Alphabet, composition_energy, mr_lut_bits, sr_lut_bits
from .ranking import Engine
from .shapers import (
    ShaperCodebook,
    build_ccdm,
    build_hcss,
    build_mpdm,
    codebook_average_pmf,
)
from .sphere import build_shell_spectrum, sphere_metrics, sphere_usage

RATE_LOSS_SCHEMES = ("ccdm", "mpdm", "mr-hcss", "sr-hcss", "baseline")


def entropy(pmf: Sequence[float]) -> float:
    """Entropy in bits, with 0 log 0 = 0."""
    return -sum(p * math.log2(p) for p in pmf if p > 0)


def average_energy(pmf: Sequence[float], alphabet: Alphabet) -> float:
    if len(pmf) != alphabet.m:
        raise ValueError("PMF and alphabet sizes differ")
    return sum(p * a * a for p, a in zip(pmf, alphabet.amplitudes))


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    n: int
    k: int
    rate: float
    rate_loss: float
    avg_energy: float
    entropy: float
    num_compositions: int
    tree_depth: int
    lut_bits: int


@dataclass(frozen=True)
class PruningRow:
    min_perm_exponent: int
    row: SweepRow
    energy_increase: float


def lut_bits_for(engine: Engine, n: int, m: int) -> int:
    """Size of the table a shaper of block length ``n`` needs."""
    if engine is Engine.SR_PA:
        return sr_lut_bits(n)
    return mr_lut_bits(n, m)


def codebook_row(cb: ShaperCodebook, scheme: str | None = None) -> SweepRow:
    pmf = codebook_average_pmf(cb)
    h = entropy(pmf)
    return SweepRow(
        scheme=scheme or cb.scheme.value,
        n=cb.n,
        k=cb.k,
        rate=cb.k / cb.n,
        rate_loss=h - cb.k / cb.n,
        avg_energy=average_energy(pmf, cb.alphabet),
        entropy=h,
        num_compositions=cb.num_compositions,
        tree_depth=cb.tree_depth,
        lut_bits=lut_bits_for(cb.engine, cb.n, cb.alphabet.m),
    )


def baseline_row(n: int, alphabet: Alphabet, k: int, spectrum=None) -> SweepRow:
    spectrum = spectrum or build_shell_spectrum(n, alphabet)
    usage = sphere_usage(spectrum, k)
    metrics = sphere_metrics(usage)
    return SweepRow(
        scheme="baseline",
        n=n,
        k=k,
        rate=k / n,
        rate_loss=metrics.rate_loss,
        avg_energy=metrics.avg_energy,
        entropy=entropy(metrics.pmf),
        num_compositions=usage.num_compositions,
        tree_depth=0,
        lut_bits=0,
    )


def rate_loss_sweep(
    schemes: Iterable[str],
    pmf: Sequence[float],
    n_list: Iterable[int],
    alphabet: Alphabet | None = None,
) -> list[SweepRow]:
    """Rate loss of each scheme versus block length.

    For every ``n`` the MPDM codebook at ``pmf`` fixes ``k``; the sphere
    schemes (both HCSS engines and the baseline) run at that same ``k``.
    CCDM keeps its own ``k``. Rows come out in ``n_list`` order, then in
    ``schemes`` order.
    """
    schemes = list(schemes)
    unknown = set(schemes) - set(RATE_LOSS_SCHEMES)
    if unknown:
        raise ValueError(f"unknown schemes {sorted(unknown)}")
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list must not be empty")
    alphabet = alphabet or Alphabet.ask(len(pmf))
    rows = []
    for n in n_list:
        mpdm = build_mpdm(pmf, n, alphabet=alphabet)
        k = mpdm.k
        for scheme in schemes:
            if scheme == "ccdm":
                rows.append(codebook_row(build_ccdm(pmf, n, alphabet=alphabet)))
            elif scheme == "mpdm":
                rows.append(codebook_row(mpdm))
            elif scheme == "mr-hcss":
                rows.append(codebook_row(build_hcss(n, alphabet, k, Engine.MR), scheme))
            elif scheme == "sr-hcss":
                rows.append(codebook_row(build_hcss(n, alphabet, k, Engine.SR_PA), scheme))
            else:
                rows.append(baseline_row(n, alphabet, k))
    return rows


def pruning_sweep(
    n: int,
    alphabet: Alphabet,
    k: int,
    engine: Engine | str,
    exponent_list: Iterable[int],
) -> list[PruningRow]:
    """HCSS metrics versus the composition pruning threshold.

    ``energy_increase`` is the HCSS average energy minus the sphere
    baseline's at the same ``(n, k)``.
    """
    engine = Engine.parse(engine)
    reference = baseline_row(n, alphabet, k)
    out = []
    for e in exponent_list:
        row = codebook_row(build_hcss(n, alphabet, k, engine, min_perm_exponent=e))
        out.append(PruningRow(e, row, row.avg_energy - reference.avg_energy))
    return out


def lut_size_sweep(kind: str, n_list: Iterable[int], alphabet: Alphabet | int = 4) -> list[tuple[int, int]]:
    """LUT size in bits for each block length."""
    m = alphabet.m if isinstance(alphabet, Alphabet) else int(alphabet)
    if kind == "sr":
        return [(n, sr_lut_bits(n)) for n in n_list]
    if kind == "mr":
        return [(n, mr_lut_bits(n, m)) for n in n_list]
    raise ValueError(f"unknown LUT kind {kind!r}")


def max_energy(cb: ShaperCodebook) -> int:
    """Largest block energy among the codebook's compositions."""
    return max(composition_energy(e.composition, cb.alphabet) for e in cb.entries)


# -- TSV output -------------------------------------------------------------------

def _cell(value) -> str:
    if isinstance(value, float):
        return "%.6f" % value
    return str(value)


def rows_to_tsv(rows: Sequence[SweepRow]) -> str:
    header = [f.name for f in fields(SweepRow)]
    lines = ["\t".join(header)]
    lines += ["\t".join(_cell(v) for v in astuple(r)) for r in rows]
    return "\n".join(lines) + "\n"


def pruning_to_tsv(rows: Sequence[PruningRow]) -> str:
    header = [f.name for f in fields(SweepRow)] + ["min_perm_exp", "energy_increase"]
    lines = ["\t".join(header)]
    for r in rows:
        cells = [_cell(v) for v in astuple(r.row)] + [str(r.min_perm_exponent), _cell(r.energy_increase)]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def lut_sizes_to_tsv(pairs: Sequence[tuple[int, int]]) -> str:
    return "n\tbits\n" + "".join(f"{n}\t{bits}\n" for n, bits in pairs)
