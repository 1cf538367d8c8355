import itertools
from fractions import Fraction

import pytest

from ampshape.analysis import codebook_row
from ampshape.combinatorics import Alphabet
from ampshape.errors import RateInfeasibleError
from ampshape.ranking import Engine
from ampshape.shapers import build_ccdm, build_hcss, build_mpdm
from ampshape.sphere import (
    build_shell_spectrum,
    sphere_energy_exact,
    sphere_metrics,
    sphere_pmf_exact,
    sphere_usage,
)

AMPS = Alphabet((1, 3, 5, 7))
BIN = Alphabet((1, 3))


def brute_energy(n, alphabet, k):
    energies = sorted(sum(a * a for a in seq) for seq in itertools.product(alphabet.amplitudes, repeat=n))
    return Fraction(sum(energies[: 2 ** k]), n * 2 ** k)


class TestSpectrum:
    def test_one_symbol(self):
        spec = build_shell_spectrum(1, BIN)
        assert [(s.energy, s.count) for s in spec.shells] == [(1, 1), (9, 1)]

    def test_two_symbols(self):
        spec = build_shell_spectrum(2, BIN)
        assert [(s.energy, s.count) for s in spec.shells] == [(2, 1), (10, 2), (18, 1)]

    @pytest.mark.parametrize("n", [1, 5, 20])
    def test_total(self, n):
        spec = build_shell_spectrum(n, AMPS)
        assert spec.total == 4 ** n
        energies = [s.energy for s in spec.shells]
        assert energies == sorted(set(energies))

    def test_tsv(self):
        text = build_shell_spectrum(2, BIN).to_tsv()
        assert text == "energy\tcount\tnum_compositions\n2\t1\t1\n10\t2\t1\n18\t1\t1\n"


class TestUsage:
    def test_exact_count(self):
        spec = build_shell_spectrum(12, AMPS)
        for k in (0, 5, 13, 24):
            u = sphere_usage(spec, k)
            used = sum(s.count * f for s, f in u.weighted_shells())
            assert used == 2 ** k
            assert 0 <= u.boundary_fraction < 1

    def test_k_zero(self):
        u = sphere_usage(build_shell_spectrum(9, AMPS), 0)
        assert sphere_energy_exact(u) == 1
        assert sphere_pmf_exact(u) == (1, 0, 0, 0)

    def test_full_sphere(self):
        u = sphere_usage(build_shell_spectrum(5, AMPS), 10)
        assert u.full_shells == len(u.spectrum.shells)
        assert u.boundary_fraction == 0
        assert sphere_energy_exact(u) == 21

    def test_infeasible(self):
        with pytest.raises(RateInfeasibleError):
            sphere_usage(build_shell_spectrum(5, AMPS), 11)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_brute_force_energy(self, n):
        spec = build_shell_spectrum(n, BIN)
        for k in range(n + 1):
            assert sphere_energy_exact(sphere_usage(spec, k)) == brute_energy(n, BIN, k)

    def test_brute_force_four_level(self):
        spec = build_shell_spectrum(4, AMPS)
        for k in range(9):
            assert sphere_energy_exact(sphere_usage(spec, k)) == brute_energy(4, AMPS, k)

    def test_monotone_in_k(self):
        spec = build_shell_spectrum(16, AMPS)
        energies = [sphere_energy_exact(sphere_usage(spec, k)) for k in range(33)]
        assert energies == sorted(energies)


class TestMetrics:
    def test_reference_energy(self):
        m = sphere_metrics(sphere_usage(build_shell_spectrum(20, AMPS), 30))
        assert m.avg_energy == pytest.approx(8.416, abs=0.001)
        assert sum(m.pmf) == pytest.approx(1)
        assert m.rate_loss > 0

    def test_pmf_consistent_with_energy(self):
        u = sphere_usage(build_shell_spectrum(10, AMPS), 15)
        pmf = sphere_pmf_exact(u)
        assert sum(pmf) == 1
        assert sum(p * a * a for p, a in zip(pmf, AMPS.amplitudes)) == sphere_energy_exact(u)

    @pytest.mark.parametrize("n", [10, 16])
    def test_lower_bound_on_codebooks(self, n):
        pmf = [0.4, 0.3, 0.2, 0.1]
        mpdm = build_mpdm(pmf, n)
        k = mpdm.k
        base = sphere_metrics(sphere_usage(build_shell_spectrum(n, AMPS), k)).rate_loss
        for cb in (mpdm, build_hcss(n, AMPS, k, Engine.MR), build_hcss(n, AMPS, k, Engine.SR_PA)):
            assert codebook_row(cb).rate_loss >= base
        ccdm = build_ccdm(pmf, n)
        base_ccdm = sphere_metrics(sphere_usage(build_shell_spectrum(n, AMPS), ccdm.k)).rate_loss
        assert codebook_row(ccdm).rate_loss >= base_ccdm
