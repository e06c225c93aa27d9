import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rfcw.fields import (
    DistributionError,
    dirac,
    discrete,
    empirical,
    expect_lncosh,
    expect_tanh_poly,
    gaussian,
    make_distribution,
    sample_fields,
    two_point,
)


class TestParsing:
    def test_dirac(self):
        d = make_distribution("dirac 0.0")
        assert d.kind == "dirac" and d.points[0] == 0.0

    def test_two_point(self):
        d = make_distribution("two_point 0.3 0.5")
        assert np.allclose(d.points, [0.3, -0.3])
        assert np.allclose(d.weights, [0.5, 0.5])

    def test_gaussian(self):
        d = make_distribution("gaussian 0.0 1.0")
        assert d.mean == 0.0 and d.sd == 1.0

    def test_discrete(self):
        d = make_distribution("discrete [0.1,-0.2] [0.25,0.75]")
        assert np.allclose(d.points, [0.1, -0.2])

    def test_empirical_file(self, tmp_path):
        path = tmp_path / "samples.txt"
        path.write_text("0.5\n-0.5\n0.5\n")
        d = make_distribution(f"empirical {path}")
        assert d.points.size == 3

    @pytest.mark.parametrize(
        "spec",
        [
            "lognormal 1 2",        # unknown kind
            "discrete [1] [0.9]",   # weights sum != 1
            "discrete [1,2] [1.5,-0.5]",  # negative weight
            "gaussian 0 0",         # sd <= 0
            "gaussian 0 -1",
            "two_point 0.3",        # arity
            "",
        ],
    )
    def test_rejects(self, spec):
        with pytest.raises(DistributionError):
            make_distribution(spec)

    def test_second_moment_each_kind(self, tmp_path):
        assert dirac(2.0).second_moment() == 4.0
        assert two_point(0.5, 0.3).second_moment() == pytest.approx(0.25)
        assert gaussian(1.0, 2.0).second_moment() == pytest.approx(5.0)
        assert discrete([1.0, -1.0], [0.5, 0.5]).second_moment() == pytest.approx(1.0)
        assert empirical([1.0, 3.0]).second_moment() == pytest.approx(5.0)


class TestExpectations:
    def test_lncosh_at_zero(self):
        assert expect_lncosh(dirac(0.0), 1.0, 0.0) == 0.0

    def test_lncosh_symmetric_two_point(self):
        beta, h = 1.7, 0.4
        val = expect_lncosh(two_point(h, 0.5), beta, 0.0)
        assert val == pytest.approx(math.log(math.cosh(beta * h)), abs=1e-14)

    def test_lncosh_gaussian_against_mc_oracle(self):
        # Monte Carlo oracle, 1e7 standard normals from a fixed counter-based
        # stream; agreement to three significant digits.
        rng = np.random.Generator(np.random.Philox(key=12345))
        z = rng.standard_normal(10**7)
        mc = float(np.mean(np.logaddexp(z, -z) - math.log(2.0)))
        quad = expect_lncosh(gaussian(0.0, 1.0), 1.0, 0.0)
        assert abs(quad - mc) < 5e-4

    def test_lncosh_quadrature_matches_atomic_refinement(self):
        # Gaussian expectation vs a dense discrete approximation of the law.
        beta, x = 1.2, 0.7
        quad = expect_lncosh(gaussian(0.3, 0.8), beta, x)
        zs = np.linspace(-8, 8, 20001)
        w = np.exp(-(zs**2) / 2.0)
        w /= w.sum()
        ref = float(np.sum(w * np.log(np.cosh(beta * (x + 0.3 + 0.8 * zs)))))
        assert quad == pytest.approx(ref, abs=1e-9)

    def test_tanh_poly_trivial(self):
        assert expect_tanh_poly(dirac(0.0), [0.0, 1.0], 1.3, 0.0) == 0.0
        assert expect_tanh_poly(dirac(0.2), [0.0, 1.0], 1.0, 0.0) == pytest.approx(
            math.tanh(0.2), abs=1e-15
        )

    def test_tanh_poly_even_symmetric(self):
        beta, h = 0.9, 0.6
        val = expect_tanh_poly(two_point(h, 0.5), [0.0, 0.0, 1.0], beta, 0.0)
        assert val == pytest.approx(math.tanh(beta * h) ** 2, abs=1e-15)

    def test_empty_coeffs_rejected(self):
        with pytest.raises(ValueError):
            expect_tanh_poly(dirac(0.0), [], 1.0, 0.0)

    def test_nonfinite_x_rejected(self):
        with pytest.raises(ValueError):
            expect_lncosh(dirac(0.0), 1.0, math.inf)

    def test_even_in_x_for_symmetric_laws(self):
        xs = np.linspace(0.0, 2.0, 21)
        for dist in (dirac(0.0), two_point(0.7, 0.5), gaussian(0.0, 0.5)):
            left = expect_lncosh(dist, 1.1, -xs)
            right = expect_lncosh(dist, 1.1, xs)
            assert np.max(np.abs(left - right)) < 1e-12

    @given(
        pts=st.lists(st.floats(-2, 2), min_size=1, max_size=5),
        x=st.floats(-3, 3),
        beta=st.floats(0.1, 3),
    )
    @settings(max_examples=50, deadline=None)
    def test_atomic_expectation_is_weighted_sum(self, pts, x, beta):
        w = np.full(len(pts), 1.0 / len(pts))
        d = discrete(pts, w)
        manual = sum(wi * math.log(math.cosh(beta * (x + p))) for p, wi in zip(pts, w))
        assert expect_lncosh(d, beta, x) == pytest.approx(manual, abs=1e-12)


class TestSampling:
    def test_dirac_values(self):
        r = sample_fields(dirac(0.5), 4, 123)
        assert np.array_equal(r.values, [0.5, 0.5, 0.5, 0.5])

    def test_determinism(self):
        a = sample_fields(two_point(1.0, 0.5), 1000, 7)
        b = sample_fields(two_point(1.0, 0.5), 1000, 7)
        assert np.array_equal(a.values, b.values)

    def test_prefix_property(self):
        short = sample_fields(two_point(1.0, 0.5), 100, 7)
        long = sample_fields(two_point(1.0, 0.5), 10000, 7)
        assert np.array_equal(long.values[:100], short.values)

    def test_clt_band(self):
        n = 10**5
        r = sample_fields(two_point(1.0, 0.5), n, 7)
        assert abs(r.values.mean()) < 3.0 / math.sqrt(n)

    def test_gaussian_moments(self):
        r = sample_fields(gaussian(0.5, 2.0), 10**5, 11)
        assert r.values.mean() == pytest.approx(0.5, abs=0.03)
        assert r.values.std() == pytest.approx(2.0, rel=0.02)

    def test_discrete_frequencies(self):
        d = discrete([1.0, 2.0, 3.0], [0.2, 0.3, 0.5])
        r = sample_fields(d, 10**5, 3)
        freq = np.mean(r.values == 3.0)
        assert freq == pytest.approx(0.5, abs=0.01)

    def test_n_zero_rejected(self):
        with pytest.raises(ValueError):
            sample_fields(dirac(0.0), 0, 1)

    def test_empirical_as_distribution_roundtrip(self):
        r = sample_fields(two_point(0.3, 0.5), 50, 42)
        d = r.as_distribution()
        assert d.kind == "empirical"
        assert np.allclose(np.sort(d.points), np.sort(r.values))
        assert d.weights.sum() == pytest.approx(1.0, abs=1e-14)
