import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from rggparadox.density import (
    CDF_KNOTS,
    Tabulated,
    Uniform,
    VonMises,
    bessel_i,
    bessel_i0,
    make_density,
)
from rggparadox.errors import InvalidDensity
from rggparadox.quadrature import integrate_converged

# Frozen from scipy.integrate.quad of (1/2pi) int_0^{2pi} exp(k cos t) cos(m t) dt
I0_1 = 1.2660658777520084
I0_10 = 2815.716628466253
I1_OVER_I0_5 = 0.8933831370440852


def defining_integral(kappa, order=0):
    val, _ = integrate.quad(
        lambda t: math.exp(kappa * math.cos(t)) * math.cos(order * t), 0, 2 * math.pi, epsabs=0, epsrel=1e-13, limit=200
    )
    return val / (2 * math.pi)


DENSITIES = [
    Uniform(),
    VonMises(0.0, 0.5),
    VonMises(1.0, 0.0),
    VonMises(5.0, 0.3),
    VonMises(10.0, 2.0, floor=1e-9),
    Tabulated(2.0 + np.cos(2 * np.pi * np.arange(256) / 256)),
]


class TestBessel:
    def test_zero(self):
        assert bessel_i0(0.0) == 1.0

    @pytest.mark.parametrize("kappa, expected", [(1.0, I0_1), (10.0, I0_10)])
    def test_frozen_values(self, kappa, expected):
        assert bessel_i0(kappa) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("kappa", [0.001, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0])
    def test_matches_defining_integral(self, kappa):
        assert abs(bessel_i0(kappa) - defining_integral(kappa)) <= 1e-12 * bessel_i0(kappa)

    @pytest.mark.parametrize("order", [1, 2, 3])
    @pytest.mark.parametrize("kappa", [0.3, 2.0, 10.0])
    def test_higher_orders(self, order, kappa):
        assert bessel_i(order, kappa) == pytest.approx(special.iv(order, kappa), rel=1e-13)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            bessel_i(0, -1.0)


class TestEval:
    def test_uniform(self):
        assert Uniform().eval(0.37) == 1.0

    def test_kappa_zero_is_uniform(self):
        assert VonMises(0.0, 0.5).eval(0.2) == pytest.approx(1.0, abs=1e-15)

    def test_von_mises_peak(self):
        assert VonMises(1.0, 0.0).eval(0.0) == pytest.approx(math.e / I0_1, rel=1e-14)
        assert VonMises(1.0, 0.0).eval(0.0) == pytest.approx(2.1470, abs=1e-4)

    def test_reduces_mod_one(self):
        d = VonMises(2.0, 0.4)
        assert d.eval(1.3) == pytest.approx(d.eval(0.3), rel=1e-14)
        assert d.eval(-0.7) == pytest.approx(d.eval(0.3), rel=1e-14)

    def test_vectorized(self):
        d = VonMises(2.0, 0.4)
        xs = np.linspace(0, 1, 7)
        assert np.allclose(d.eval(xs), [d.eval(x) for x in xs])

    @pytest.mark.parametrize("d", DENSITIES, ids=repr)
    def test_unit_mass(self, d):
        assert abs(integrate_converged(d.eval, rtol=1e-13, max_panels=2**16) - 1.0) <= 1e-10

    @pytest.mark.parametrize("d", DENSITIES, ids=repr)
    def test_periodic_seam(self, d):
        assert abs(d.eval(0.0) - d.eval(1.0 - 1e-13)) <= 1e-10

    @settings(max_examples=200, deadline=None)
    @given(
        x=st.floats(0, 1, exclude_max=True),
        delta=st.floats(-1, 1),
        kappa=st.floats(0, 7),
        mu=st.floats(0, 1),
    )
    def test_rotation_invariance(self, x, delta, kappa, mu):
        a = VonMises(kappa, mu).eval(x)
        b = VonMises(kappa, mu + 2 * math.pi * delta).eval(x + delta)
        assert b == pytest.approx(a, rel=1e-9)


class TestDeriv:
    def test_uniform(self):
        assert Uniform().deriv(0.3, 1) == 0.0
        assert Uniform().deriv(0.3, 2) == 0.0

    def test_zero_at_mode(self):
        d = VonMises(3.0, 1.2)
        assert d.deriv(1.2 / (2 * math.pi), 1) == pytest.approx(0.0, abs=1e-12)

    def test_quarter_point(self):
        d = VonMises(1.0, 0.0)
        assert d.deriv(0.25, 1) == pytest.approx(-2 * math.pi / I0_1, rel=1e-13)
        assert d.deriv(0.25, 1) == pytest.approx(-4.96276, abs=1e-5)

    def test_first_derivative_finite_differences(self, rng):
        h = 1e-6
        for kappa, mu in [(1.0, 0.0), (5.0, 0.3), (0.5, 2.0)]:
            d = VonMises(kappa, mu)
            x = rng.random(1000)
            fd = (d.eval(x + h) - d.eval(x - h)) / (2 * h)
            assert np.max(np.abs(d.deriv(x, 1) - fd)) <= 1e-5 * max(1.0, d.eval(mu / (2 * math.pi)))

    def test_second_derivative_finite_differences(self, rng):
        h = 1e-5
        d = VonMises(2.0, 0.7)
        x = rng.random(200)
        fd = (d.deriv(x + h, 1) - d.deriv(x - h, 1)) / (2 * h)
        assert np.allclose(d.deriv(x, 2), fd, atol=1e-5)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            VonMises(1.0).deriv(0.1, 3)

    def test_tabulated_central_differences(self):
        m = 512
        grid = np.arange(m) / m
        d = Tabulated(1.0 + 0.5 * np.sin(2 * np.pi * grid))
        exact = 0.5 * 2 * np.pi * np.cos(2 * np.pi * grid)
        assert np.allclose(d.deriv(grid, 1), exact, atol=1e-3)
        assert d.deriv(0.0, 1) == pytest.approx(d.deriv(1.0 - 1e-15, 1), abs=1e-6)


class TestValidation:
    def test_zero_floor_rejected(self):
        grid = np.arange(64) / 64
        with pytest.raises(InvalidDensity):
            Tabulated(np.sin(np.pi * grid) ** 2)

    def test_negative_kappa_rejected(self):
        with pytest.raises(InvalidDensity):
            VonMises(-1.0)

    def test_tabulated_renormalized(self):
        d = Tabulated(np.full(10, 7.0))
        assert d.eval(0.123) == pytest.approx(1.0)

    def test_csv_roundtrip(self, tmp_path):
        m = 128
        grid = np.arange(m) / m
        vals = np.exp(np.cos(2 * np.pi * grid))
        path = tmp_path / "dens.csv"
        path.write_text("x,f\n" + "".join(f"{float(x)!r},{float(v)!r}\n" for x, v in zip(grid, vals)))
        d = Tabulated.from_csv(path)
        assert d.eval(grid[5]) == pytest.approx(vals[5] / vals.mean())
        no_header = tmp_path / "plain.csv"
        no_header.write_text("".join(f"{float(x)!r},{float(v)!r}\n" for x, v in zip(grid, vals)))
        assert np.array_equal(Tabulated.from_csv(no_header).values, d.values)

    def test_csv_uneven_grid_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,1\n0.3,1\n0.5,1\n0.75,1\n")
        with pytest.raises(InvalidDensity):
            Tabulated.from_csv(path)

    def test_make_density(self):
        assert make_density("uniform") == Uniform()
        assert make_density("vonmises:2:0.5") == VonMises(2.0, 0.5)
        assert make_density({"kind": "vonmises", "kappa": 1}) == VonMises(1.0, 0.0)
        with pytest.raises(InvalidDensity):
            make_density("cauchy")


class TestSampling:
    def test_deterministic(self):
        a = Uniform().sample(5, np.random.default_rng(3)).x
        b = Uniform().sample(5, np.random.default_rng(3)).x
        assert np.array_equal(a, b)
        assert np.all((a >= 0) & (a < 1))

    def test_von_mises_circular_mean(self):
        d = VonMises(5.0, 0.3)
        x = d.sample(10**5, np.random.default_rng(11)).x
        c = np.cos(2 * np.pi * x - 0.3)
        se = c.std(ddof=1) / math.sqrt(c.size)
        assert abs(c.mean() - I1_OVER_I0_5) <= 3 * se

    @pytest.mark.parametrize("d", DENSITIES[2:], ids=repr)
    def test_ks_against_cdf_table(self, d):
        x = np.sort(d.sample_array(np.random.default_rng(5), 10**6))
        ecdf_hi = np.arange(1, x.size + 1) / x.size
        ecdf_lo = np.arange(x.size) / x.size
        model = d.cdf(x)
        ks = max(np.max(ecdf_hi - model), np.max(model - ecdf_lo))
        assert ks < 0.002

    def test_cdf_table_matches_quadrature(self):
        d = VonMises(2.0, 1.0)
        for x in (0.1, 0.37, 0.8):
            ref, _ = integrate.quad(d.eval, 0, x, epsabs=1e-13)
            # linear interpolation between knots: error ~ h^2 max|f'| / 8
            assert d.cdf(x) == pytest.approx(ref, abs=5e-8)

    @pytest.mark.parametrize("d", [VonMises(2.0, 0.5), DENSITIES[-1]], ids=repr)
    def test_histogram_matches_density(self, d):
        bins = 1024
        n = 10**6
        x = d.sample_array(np.random.default_rng(9), n)
        counts = np.bincount(np.minimum((x * bins).astype(int), bins - 1), minlength=bins)
        edges = np.arange(bins + 1) / bins
        p = np.diff(d.cdf(edges))
        p[-1] = 1.0 - d.cdf(edges[-2])
        se = np.sqrt(n * p * (1 - p))
        ok = np.abs(counts - n * p) <= 4 * se
        assert ok.mean() >= 0.99

    def test_ks_scipy_vonmises(self):
        # independent reference distribution: scipy's von Mises on angles
        d = VonMises(3.0, 1.0)
        x = d.sample_array(np.random.default_rng(1), 20000)
        # compare on a window where [0, 2pi) angles and scipy's (-pi, pi] support agree
        inside = (x > 0.05) & (x < 0.45)
        t = 2 * np.pi * x[inside]
        cdf = stats.vonmises(3.0, loc=1.0).cdf
        lo, hi = cdf(2 * np.pi * 0.05), cdf(2 * np.pi * 0.45)
        res = stats.kstest(t, lambda s: (cdf(s) - lo) / (hi - lo))
        assert res.pvalue > 1e-4

    def test_shift_equivariance(self):
        d = VonMises(2.0, 0.3)
        a = d.sample_array(np.random.default_rng(4), 1000)
        b = d.shifted(0.5).sample_array(np.random.default_rng(4), 1000)
        diff = np.mod(b - a, 1.0)
        assert np.allclose(np.minimum(diff, 1 - diff), 0.5, atol=1e-12)

    def test_one_uniform_per_draw(self):
        d = VonMises(1.0)
        rng = np.random.default_rng(0)
        d.sample_array(rng, 10)
        assert rng.random() == np.random.default_rng(0).random(11)[-1]

    def test_table_size(self):
        assert VonMises(1.0).cdf_table.size == CDF_KNOTS + 1


def test_default_floor_rejects_very_concentrated():
    with pytest.raises(InvalidDensity):
        VonMises(10.0)
    assert VonMises(10.0, floor=1e-9).eval(0.0) > 0
