"""Analytic sphere-shaping baseline.

The shell spectrum of the n-sphere is computed exactly, and a sphere shaper
addressing ``2**k`` sequences is modelled by filling shells in order of
increasing energy, using the outermost one only partially. This reproduces
the rate and average energy of enumerative sphere shaping without its
trellis mapper.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .combinatorics import (
    Alphabet,
    Composition,
    composition_energy,
    enumerate_compositions,
    multinom,
)
from .errors import RateInfeasibleError


@dataclass(frozen=True)
class Shell:
    energy: int
    count: int
    compositions: tuple[Composition, ...]


@dataclass(frozen=True)
class ShellSpectrum:
    n: int
    alphabet: Alphabet
    shells: tuple[Shell, ...]

    @property
    def total(self) -> int:
        return sum(s.count for s in self.shells)

    def to_tsv(self) -> str:
        lines = ["energy\tcount\tnum_compositions"]
        lines += [f"{s.energy}\t{s.count}\t{len(s.compositions)}" for s in self.shells]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SphereUsage:
    """``full_shells`` complete shells plus a fraction of the next one."""

    spectrum: ShellSpectrum
    k: int
    full_shells: int
    boundary_fraction: Fraction

    def weighted_shells(self):
        """Yield ``(shell, fraction used)`` for every shell that contributes."""
        shells = self.spectrum.shells
        for s in shells[: self.full_shells]:
            yield s, Fraction(1)
        if self.boundary_fraction:
            yield shells[self.full_shells], self.boundary_fraction

    @property
    def num_compositions(self) -> int:
        return sum(len(s.compositions) for s, _ in self.weighted_shells())


class SphereMetrics(NamedTuple):
    avg_energy: float
    pmf: tuple[float, ...]
    rate_loss: float


def build_shell_spectrum(n: int, alphabet: Alphabet) -> ShellSpectrum:
    """Group all compositions of length ``n`` by total energy."""
    groups: dict[int, list[Composition]] = {}
    for c in enumerate_compositions(n, alphabet):
        groups.setdefault(composition_energy(c, alphabet), []).append(c)
    shells = tuple(
        Shell(e, sum(multinom(c) for c in groups[e]), tuple(groups[e])) for e in sorted(groups)
    )
    return ShellSpectrum(n, alphabet, shells)


def sphere_usage(spectrum: ShellSpectrum, k: int) -> SphereUsage:
    """Fill shells from the lowest energy until exactly ``2**k`` sequences are used."""
    if k < 0:
        raise ValueError("k must be non-negative")
    residual = 1 << k
    for i, shell in enumerate(spectrum.shells):
        if residual < shell.count:
            return SphereUsage(spectrum, k, i, Fraction(residual, shell.count))
        residual -= shell.count
        if residual == 0:
            return SphereUsage(spectrum, k, i + 1, Fraction(0))
    raise RateInfeasibleError(f"2^{k} exceeds the {spectrum.total} sequences of the sphere")


def sphere_pmf_exact(usage: SphereUsage) -> tuple[Fraction, ...]:
    # inside the boundary shell every sequence is equally likely to be used
    m = usage.spectrum.alphabet.m
    weighted = [Fraction(0)] * m
    for shell, frac in usage.weighted_shells():
        for c in shell.compositions:
            w = frac * multinom(c)
            for i in range(m):
                weighted[i] += w * c[i]
    denom = usage.spectrum.n << usage.k
    return tuple(w / denom for w in weighted)


def sphere_energy_exact(usage: SphereUsage) -> Fraction:
    total = sum(frac * shell.count * shell.energy for shell, frac in usage.weighted_shells())
    return Fraction(total) / (usage.spectrum.n << usage.k)


def sphere_metrics(usage: SphereUsage) -> SphereMetrics:
    from .analysis import entropy

    pmf = tuple(float(p) for p in sphere_pmf_exact(usage))
    rate_loss = entropy(pmf) - usage.k / usage.spectrum.n
    return SphereMetrics(float(sphere_energy_exact(usage)), pmf, rate_loss)
