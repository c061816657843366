import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import iv

from rggparadox.density import Uniform, VonMises
from rggparadox.errors import NonFiniteIntegrand, RadiusOutOfRange
from rggparadox.quadrature import integrate_converged, integrate_periodic, simpson
from rggparadox.theory import (
    EXACT_MOTIFS,
    MotifKind,
    RegimeKind,
    classify_regime,
    expected_fn,
    motif_prob_asymptotic,
    motif_prob_exact,
    observed_order,
    table1,
    tau_f,
)

# closed form 2 pi^2 kappa I1(2 kappa) / (3 I0(kappa)^2), evaluated with scipy
TAU_ORACLE = {k: 2 * math.pi**2 * k * iv(1, 2 * k) / (3 * iv(0, k) ** 2) for k in (0.1, 0.5, 1.0, 5.0, 10.0)}


class TestQuadrature:
    def test_constant(self):
        assert integrate_periodic(lambda x: np.ones_like(x), 16) == pytest.approx(1.0, abs=1e-15)

    def test_sin_squared(self):
        val = integrate_periodic(lambda x: np.sin(2 * np.pi * x) ** 2, 64)
        assert val == pytest.approx(0.5, abs=1e-12)

    def test_bessel_weighted(self):
        fn = lambda x: np.exp(2 * np.cos(2 * np.pi * x)) * np.sin(2 * np.pi * x) ** 2
        ref = (iv(0, 2.0) - iv(2, 2.0)) / 2
        assert ref == pytest.approx(0.7953184273186645, rel=1e-14)
        assert integrate_converged(fn) == pytest.approx(ref, rel=1e-11)

    def test_non_finite(self):
        with pytest.raises(NonFiniteIntegrand):
            with np.errstate(divide="ignore"):
                simpson(lambda x: 1.0 / (x - 0.5), 0.0, 1.0, 8)

    def test_odd_panels_rejected(self):
        with pytest.raises(ValueError):
            simpson(np.sin, 0.0, 1.0, 7)


class TestRegime:
    @pytest.mark.parametrize(
        "nr3, kind",
        [(1e-4, RegimeKind.RELATIVELY_SPARSE), (0.5, RegimeKind.INTERMEDIATE), (1e3, RegimeKind.RELATIVELY_DENSE)],
    )
    def test_classes(self, nr3, kind):
        assert classify_regime(nr3).kind is kind

    def test_lambda_recorded(self):
        assert classify_regime(0.5).lam == 0.5
        assert str(classify_regime(0.5)) == "intermediate(lambda=0.5)"


class TestExpectedFn:
    def test_uniform_quarter(self):
        for n, r in [(100, 0.1), (10**6, 0.01), (50, 0.5)]:
            assert expected_fn(Uniform(), n, r).mean_fn == 0.25

    def test_intermediate_value(self):
        r = (0.5 / 10**5) ** (1 / 3)
        pred = expected_fn(VonMises(1.0, 0.3), 10**5, r)
        assert pred.mean_fn == pytest.approx(3.51465, abs=1e-4)
        assert pred.regime.kind is RegimeKind.INTERMEDIATE

    def test_sparse_limit(self):
        pred = expected_fn(VonMises(0.1), 1000, 1e-3)
        assert pred.mean_fn == pytest.approx(0.25 + 1e-6 * tau_f(0.1), abs=1e-15)
        assert pred.mean_fn == pytest.approx(0.25, abs=1e-7)
        assert pred.regime.kind is RegimeKind.RELATIVELY_SPARSE

    def test_fprime_integral_matches_tau(self):
        d = VonMises(5.0, 0.2)
        assert d.fprime_sq_integral() / 3 == pytest.approx(tau_f(5.0, 0.2), rel=1e-10)

    def test_radius_guard(self):
        for r in (0.0, 0.6):
            with pytest.raises(RadiusOutOfRange):
                expected_fn(Uniform(), 10, r)

    def test_dict(self):
        out = expected_fn(Uniform(), 1000, 0.1).to_dict()
        assert set(out) == {"n", "r", "nr3", "regime", "integral_fprime_sq", "mean_fn"}
        assert out["nr3"] == pytest.approx(1.0)


class TestTau:
    @pytest.mark.parametrize("kappa", sorted(TAU_ORACLE))
    def test_against_bessel_closed_form(self, kappa):
        assert tau_f(kappa, 0.3) == pytest.approx(TAU_ORACLE[kappa], rel=1e-11)

    @pytest.mark.parametrize(
        "kappa, mu, printed",
        [(0.5, 0.3, 1.6439), (1.0, 0.3, 6.5293), (5.0, 0.1, 118.4242), (10.0, 0.5, 352.3377)],
    )
    def test_printed_values(self, kappa, mu, printed):
        assert abs(round(tau_f(kappa, mu), 4) - printed) <= 5e-5

    def test_smallest_kappa_rounds_differently(self):
        # 0.065797... rounds to 0.0658, one unit above the printed 0.0657
        assert round(tau_f(0.1, 0.1), 4) == 0.0658

    def test_zero_kappa(self):
        assert tau_f(0.0, 0.7) == 0.0

    def test_negative_kappa(self):
        with pytest.raises(ValueError):
            tau_f(-1.0)

    def test_mu_invariance(self):
        for k in (0.1, 1.0, 10.0):
            base = tau_f(k, 0.0)
            for mu in np.linspace(0, 1, 11):
                assert abs(tau_f(k, float(mu)) - base) <= 1e-10 * base

    def test_small_kappa(self):
        ratio = tau_f(1e-3) / 1e-6
        assert abs(ratio - 2 * math.pi**2 / 3) / (2 * math.pi**2 / 3) <= 1e-4

    def test_table_layout(self):
        rows = table1()
        assert len(rows) == 15
        assert [r[1] for r in rows[:5]] == [0.1] * 5
        assert len({round(r[2], 4) for r in rows}) == 5


class TestMotifs:
    @pytest.mark.parametrize("r", [0.005, 0.02, 0.1])
    def test_uniform_closed_forms(self, r):
        u = Uniform()
        assert motif_prob_exact(u, 0.3, r, "edge") == pytest.approx(2 * r, abs=1e-14)
        assert motif_prob_exact(u, 0.3, r, "cherry") == pytest.approx(4 * r * r, abs=1e-14)
        assert motif_prob_exact(u, 0.3, r, "path") == pytest.approx(4 * r * r, abs=1e-14)
        assert abs(motif_prob_exact(u, 0.3, r, "triangle") - 3 * r * r) <= 1e-12

    def test_edge_against_quad(self):
        d = VonMises(1.0)
        for x in (0.0, 0.2, 0.995):
            ref, _ = integrate.quad(lambda y: d.eval(y), x - 0.04, x + 0.04, epsabs=0, epsrel=1e-13)
            assert motif_prob_exact(d, x, 0.04, "edge") == pytest.approx(ref, rel=1e-11)

    def test_path_and_triangle_against_dblquad(self):
        d = VonMises(2.0, 0.4)
        x, r = 0.3, 0.05
        f = lambda y: float(d.eval(y))

        def arc(a, b):
            return integrate.quad(f, a, b, epsabs=0, epsrel=1e-12)[0]

        path = integrate.quad(lambda y: f(y) * arc(y - r, y + r), x - r, x + r, epsabs=0, epsrel=1e-11)[0]
        tri = integrate.quad(
            lambda y: f(y) * arc(max(y, x) - r, min(y, x) + r), x - r, x + r, points=[x], epsabs=0, epsrel=1e-11
        )[0]
        assert motif_prob_exact(d, x, r, "path") == pytest.approx(path, rel=1e-9)
        assert motif_prob_exact(d, x, r, "triangle") == pytest.approx(tri, rel=1e-9)

    def test_seam_anchor_matches_rotation(self):
        d = VonMises(1.0)
        a = motif_prob_exact(d, 0.005, 0.03, "triangle")
        b = motif_prob_exact(d.shifted(0.5), 0.505, 0.03, "triangle")
        assert a == pytest.approx(b, rel=1e-12)

    def test_ordering(self):
        d = VonMises(1.0)
        tri = motif_prob_exact(d, 0.3, 0.05, "triangle")
        assert tri <= motif_prob_exact(d, 0.3, 0.05, "cherry")
        assert tri <= motif_prob_exact(d, 0.3, 0.05, "path")

    def test_radius_guard(self):
        with pytest.raises(RadiusOutOfRange):
            motif_prob_exact(Uniform(), 0.1, 0.2, "edge")
        with pytest.raises(RadiusOutOfRange):
            motif_prob_exact(Uniform(), 0.1, 0.0, "edge")

    def test_no_exact_for_families(self):
        with pytest.raises(ValueError):
            motif_prob_exact(Uniform(), 0.1, 0.05, "three_edge_path")

    def test_edge_remainder_small(self):
        d = VonMises(1.0)
        err = abs(motif_prob_exact(d, 0.2, 0.01, "edge") - motif_prob_asymptotic(d, 0.2, 0.01, "edge"))
        # the r^5 coefficient is f(x) / 60, and |f| <= (2 pi)^4 * 20 for kappa = 1
        assert err <= (2 * math.pi) ** 4 * 20 / 60 * 0.01**5

    @pytest.mark.parametrize("motif", EXACT_MOTIFS)
    def test_observed_order_random_anchors(self, motif):
        d = VonMises(1.0)
        rng = np.random.default_rng(11)
        r1, r2 = 0.04, 0.02
        for x in rng.random(20):
            e1 = abs(motif_prob_exact(d, x, r1, motif) - motif_prob_asymptotic(d, x, r1, motif))
            e2 = abs(motif_prob_exact(d, x, r2, motif) - motif_prob_asymptotic(d, x, r2, motif))
            assert observed_order(e1, e2, r1, r2) >= 3.5

    def test_observed_order_nan(self):
        assert math.isnan(observed_order(0.0, 1.0, 0.1, 0.05))
        assert observed_order(32.0, 1.0, 0.2, 0.1) == pytest.approx(5.0)

    def test_family_asymptotics(self):
        u = Uniform()
        assert motif_prob_asymptotic(u, 0.1, 0.1, MotifKind.THREE_EDGE_PATH) == pytest.approx(8e-3)
        assert motif_prob_asymptotic(u, 0.1, 0.1, MotifKind.TRIANGLE_PLUS_EDGE) == pytest.approx(6e-3)
