import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import logsumexp

from rfcw.exact import (
    GridTooNarrowError,
    ZeroConditionError,
    exact_log_pmf,
    gaussian_convolve,
    hs_log_density,
    interval_log_prob,
)
from rfcw.fields import FieldRealization, dirac, make_distribution, sample_fields, two_point
from rfcw.gfunction import GFunction

from conftest import brute_force_log_pmf


def _fields(values):
    arr = np.asarray(values, dtype=float)
    return FieldRealization(values=arr, n=arr.size, seed=0)


class TestExactLogPMF:
    def test_single_spin_closed_form(self):
        beta, h = 1.3, 0.4
        pmf = exact_log_pmf(_fields([h]), beta)
        expected_up = beta * h - math.log(2 * math.cosh(beta * h))
        assert pmf.log_p[1] == pytest.approx(expected_up, abs=1e-14)

    def test_two_spins_no_field(self):
        pmf = exact_log_pmf(_fields([0.0, 0.0]), 1.0)
        # four configurations; the opposite-spin pair has total weight 2
        assert math.exp(pmf.log_p[1]) == pytest.approx(1.0 / (1.0 + math.e), abs=1e-12)

    def test_brute_force_n10(self):
        rng = np.random.Generator(np.random.Philox(key=3))
        h = rng.normal(0, 0.5, size=10)
        pmf = exact_log_pmf(_fields(h), 1.1)
        s, log_p, log_z = brute_force_log_pmf(h, 1.1)
        assert np.array_equal(pmf.s, s)
        assert np.max(np.abs(pmf.log_p - log_p)) < 1e-12
        assert pmf.log_Z == pytest.approx(log_z, abs=1e-10)

    def test_brute_force_random_ensemble(self):
        # 20 random (beta, law, seed) triples at n <= 12
        rng = np.random.Generator(np.random.Philox(key=99))
        for trial in range(20):
            n = int(rng.integers(2, 13))
            beta = float(rng.uniform(0.2, 2.5))
            kind = trial % 3
            if kind == 0:
                dist = dirac(float(rng.uniform(-0.5, 0.5)))
            elif kind == 1:
                dist = two_point(float(rng.uniform(0, 0.6)), float(rng.uniform(0, 1)))
            else:
                dist = make_distribution("gaussian 0.0 0.5")
            fields = sample_fields(dist, n, int(rng.integers(0, 2**31)))
            pmf = exact_log_pmf(fields, beta)
            _, log_p, _ = brute_force_log_pmf(fields.values, beta)
            assert np.max(np.abs(pmf.log_p - log_p)) < 1e-12

    def test_normalization(self):
        pmf = exact_log_pmf(sample_fields(two_point(0.3, 0.5), 300, 5), 1.2)
        assert abs(logsumexp(pmf.log_p)) < 1e-10

    def test_exact_symmetry_zero_field(self):
        pmf = exact_log_pmf(_fields(np.zeros(40)), 1.5)
        assert np.array_equal(pmf.log_p, pmf.log_p[::-1])

    def test_field_negation_mirrors_law(self):
        fields = sample_fields(two_point(0.3, 0.5), 24, 8)
        a = exact_log_pmf(fields, 1.2)
        b = exact_log_pmf(_fields(-fields.values), 1.2)
        assert np.max(np.abs(a.log_p - b.log_p[::-1])) < 1e-12

    def test_size_guard(self):
        with pytest.raises(ValueError):
            exact_log_pmf(_fields(np.zeros((1 << 20) + 2)), 1.0)

    @given(n=st.integers(2, 8), key=st.integers(0, 1000), beta=st.floats(0.1, 2.0))
    @settings(max_examples=25, deadline=None)
    def test_brute_force_property(self, n, key, beta):
        rng = np.random.Generator(np.random.Philox(key=key))
        h = rng.uniform(-1, 1, size=n)
        pmf = exact_log_pmf(_fields(h), beta)
        _, log_p, _ = brute_force_log_pmf(h, beta)
        assert np.max(np.abs(pmf.log_p - log_p)) < 1e-12


class TestIntervalLogProb:
    @pytest.fixture(scope="class")
    def pmf(self):
        return exact_log_pmf(sample_fields(two_point(0.3, 0.5), 10, 3), 1.2)

    def test_total_mass(self, pmf):
        assert interval_log_prob(pmf, 0.0, 0.75, (-math.inf, math.inf)) == pytest.approx(
            0.0, abs=1e-10
        )

    def test_conditional_total_mass(self, pmf):
        val = interval_log_prob(
            pmf, 0.0, 0.75, (-math.inf, math.inf), condition=(-0.5, 0.5)
        )
        assert val == pytest.approx(0.0, abs=1e-12)

    def test_against_brute_force_conditional(self, pmf):
        s, log_p, _ = brute_force_log_pmf(pmf.fields.values, 1.2)
        m, alpha = 0.1, 0.75
        x = (s - 10 * m) / 10**alpha
        y = s / 10
        ev = (x >= 0.0) & (x < 1.0)
        cond = (y >= -0.6) & (y < 0.8)
        expected = logsumexp(log_p[ev & cond]) - logsumexp(log_p[cond])
        got = interval_log_prob(pmf, m, alpha, (0.0, 1.0), condition=(-0.6, 0.8))
        assert got == pytest.approx(expected, abs=1e-12)

    def test_conditioning_coherence(self, pmf):
        # P(event | cond) = P(event cap cond-preimage) / P(cond-preimage)
        m, alpha = 0.0, 0.8
        cond = (-0.3, 0.5)
        ev = (0.1, 1.7)
        lhs = interval_log_prob(pmf, m, alpha, ev, condition=cond)
        # preimage of the condition in rescaled units
        lo = (cond[0] * 10 - 10 * m) / 10**alpha
        hi = (cond[1] * 10 - 10 * m) / 10**alpha
        joint = interval_log_prob(pmf, m, alpha, (max(ev[0], lo), min(ev[1], hi)))
        denom = interval_log_prob(pmf, m, alpha, (lo, hi))
        assert lhs == pytest.approx(joint - denom, abs=1e-12)

    def test_empty_event_is_minus_inf(self, pmf):
        assert interval_log_prob(pmf, 0.0, 0.75, (50.0, 60.0)) == -math.inf

    def test_zero_probability_condition_raises(self, pmf):
        with pytest.raises(ZeroConditionError):
            interval_log_prob(pmf, 0.0, 0.75, (0.0, 1.0), condition=(5.0, 6.0))

    def test_half_open_convention(self, pmf):
        # partitioning the line leaves no double-counted boundary
        cuts = [-math.inf, -0.7, 0.0, 0.4, math.inf]
        parts = [
            interval_log_prob(pmf, 0.0, 1.0, (a, b)) for a, b in zip(cuts, cuts[1:])
        ]
        assert logsumexp(parts) == pytest.approx(0.0, abs=1e-12)


class TestSmoothedDensity:
    def test_single_spin_formula(self):
        # n=1, h=0: density proportional to exp(-(s^2/2 - ln cosh s))
        fields = _fields([0.0])
        hs = hs_log_density(fields, 1.0, 0.0, 0.5, np.linspace(-6, 6, 801))
        s = hs.grid
        expected = -(s**2 / 2 - np.log(np.cosh(s)))
        expected -= logsumexp(
            np.logaddexp(expected[:-1], expected[1:]) + np.log(np.diff(s) / 2)
        )
        assert np.max(np.abs(hs.log_density - expected)) < 1e-8

    def test_two_atom_convolution(self):
        # n=1, h=0, beta=1, alpha=1/2: two unit-variance Gaussians at +-1
        fields = _fields([0.0])
        pmf = exact_log_pmf(fields, 1.0)
        ys = np.linspace(-5, 5, 101)
        got = gaussian_convolve(pmf, 0.0, 0.5, ys)
        phi = lambda y: np.exp(-(y**2) / 2) / math.sqrt(2 * math.pi)
        expected = np.log(0.5 * phi(ys - 1.0) + 0.5 * phi(ys + 1.0))
        assert np.max(np.abs(got - expected)) < 1e-12

    def test_convolution_normalized(self):
        pmf = exact_log_pmf(sample_fields(two_point(0.3, 0.5), 60, 4), 1.2)
        ys = np.linspace(-25, 25, 4001)
        log_f = gaussian_convolve(pmf, 0.0, 0.75, ys)
        mass = np.trapezoid(np.exp(log_f), ys)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_identity_convolution_vs_density(self):
        # the module's primary correctness oracle at a small size
        beta, alpha = 1.2, 0.75
        fields = sample_fields(two_point(0.3, 0.5), 50, 42)
        pmf = exact_log_pmf(fields, beta)
        grid = np.linspace(-8, 8, 1001)
        conv = gaussian_convolve(pmf, 0.2, alpha, grid)
        hs = hs_log_density(fields, beta, 0.2, alpha, grid)
        assert np.max(np.abs(np.expm1(conv - hs.log_density))) < 1e-9

    def test_peak_location_tracks_argmin(self):
        beta, alpha, m = 1.2, 0.75, 0.0
        fields = sample_fields(two_point(0.3, 0.5), 80, 6)
        grid = np.linspace(-10, 10, 2001)
        hs = hs_log_density(fields, beta, m, alpha, grid)
        g = GFunction.from_fields(beta, fields)
        vals = np.asarray(g.value(m + 80 ** (alpha - 1) * grid))
        assert abs(grid[np.argmax(hs.log_density)] - grid[np.argmin(vals)]) <= (
            grid[1] - grid[0]
        )

    def test_gauss_variance_field(self):
        fields = _fields(np.zeros(16))
        hs = hs_log_density(fields, 2.0, 0.0, 0.75, np.linspace(-9, 9, 901))
        assert hs.gauss_variance == pytest.approx(16 ** (1 - 1.5) / 2.0)

    def test_narrow_grid_rejected(self):
        fields = sample_fields(two_point(0.3, 0.5), 60, 4)
        with pytest.raises(GridTooNarrowError):
            hs_log_density(fields, 1.2, 0.0, 0.75, np.linspace(-0.3, 0.3, 11))

    def test_bad_grid_rejected(self):
        fields = _fields([0.0])
        with pytest.raises(ValueError):
            hs_log_density(fields, 1.0, 0.0, 0.5, np.array([1.0, 0.5]))
