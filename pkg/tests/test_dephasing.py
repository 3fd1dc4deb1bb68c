from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy import optimize, special

from conftest import bell_triples
from xdiscord import measures
from xdiscord.dephasing import (DephasingScenario, ReservoirSpec, correlation_tensor, evolve,
                                evolve_gamma, gamma_closed, gamma_integral, gamma_rate,
                                spectral_density, trace_discord_dephasing_cases)
from xdiscord.errors import InvalidStateError, ValidationError
from xdiscord.states import from_bell_diagonal, to_fano_bloch

OHMIC_B1 = ReservoirSpec(1.0, 0.1, 1.0, 1.0)
SUB_B1 = ReservoirSpec(0.5, 0.1, 1.0, 1.0)
SUPER_T0 = ReservoirSpec(1.5, 0.2)

# gamma_integral values (adaptive quadrature of the spectral integral), frozen
OHMIC_B1_T1 = 0.19105456166474802
SUB_B1_T2 = 1.2539146194858386
SUPER_T0_T1 = 0.158183007620945


class TestReservoirSpec:
    def test_regimes(self):
        assert [ReservoirSpec(s, 0.1).regime for s in (0.5, 1.0, 1.5)] == ["sub-ohmic", "ohmic", "super-ohmic"]

    @pytest.mark.parametrize("kw", [dict(s=0.0, lam=0.1), dict(s=1.0, lam=-0.1),
                                    dict(s=1.0, lam=0.1, Omega=0.0), dict(s=1.0, lam=0.1, beta=0.0)])
    def test_rejects(self, kw):
        with pytest.raises(ValidationError):
            ReservoirSpec(**kw)

    def test_limits(self):
        assert_allclose(SUPER_T0.gamma_limit(), 0.4 * special.gamma(0.5))
        assert SUB_B1.gamma_limit() == math.inf
        assert ReservoirSpec(1.0, 0.1).gamma_limit() == math.inf


class TestSpectralDensity:
    def test_zero_frequency(self):
        assert spectral_density(OHMIC_B1, 0.0) == 0.0

    def test_ohmic_value(self):
        assert_allclose(spectral_density(ReservoirSpec(1.0, 0.1), 1.0), 0.1 * math.exp(-1))

    @pytest.mark.parametrize("s", [0.5, 1.0, 1.5, 3.0])
    def test_peak(self, s):
        r = ReservoirSpec(s, 0.1, 2.0)
        res = optimize.minimize_scalar(lambda w: -spectral_density(r, w), bounds=(1e-6, 20), method="bounded",
                                       options={"xatol": 1e-10})
        assert_allclose(res.x, s * r.Omega, rtol=1e-6)


class TestGammaIntegral:
    def test_zero_time(self):
        assert gamma_integral(OHMIC_B1, 0.0) == 0.0

    def test_ohmic_vacuum(self):
        assert_allclose(gamma_integral(ReservoirSpec(1.0, 0.1), 1.0), 0.1 * math.log(2), rtol=1e-9)

    def test_super_ohmic_large_time(self):
        # the approach to the plateau is slow, ~ (Omega t)^(1 - s)
        val = gamma_integral(SUPER_T0, 200.0)
        assert_allclose(val, gamma_closed(SUPER_T0, 200.0), rtol=1e-7)
        assert abs(val / SUPER_T0.gamma_limit() - 1) < 2 * 200.0 ** -0.5

    def test_negative_time(self):
        with pytest.raises(ValidationError):
            gamma_integral(OHMIC_B1, -1.0)


class TestGammaClosed:
    def test_zero_time(self):
        for r in (OHMIC_B1, SUB_B1, SUPER_T0):
            assert gamma_closed(r, 0.0) == 0.0

    def test_ohmic_vacuum(self):
        assert_allclose(gamma_closed(ReservoirSpec(1.0, 0.1), 1.0), 0.1 * math.log(2), rtol=1e-14)

    def test_frozen_quadrature_values(self):
        assert_allclose(gamma_closed(OHMIC_B1, 1.0), OHMIC_B1_T1, rtol=1e-6)
        assert_allclose(gamma_closed(SUB_B1, 2.0), SUB_B1_T2, rtol=1e-6)
        assert_allclose(gamma_closed(SUPER_T0, 1.0), SUPER_T0_T1, rtol=1e-6)

    def test_super_ohmic_asymptote(self):
        assert_allclose(gamma_closed(SUPER_T0, 1e16), 0.70898, rtol=1e-5)
        assert_allclose(gamma_closed(SUPER_T0, 1e16), SUPER_T0.gamma_limit(), rtol=1e-7)

    def test_minus_variant_breaks(self):
        assert not math.isfinite(gamma_closed(SUB_B1, 2.0, subohmic_variant="minus"))

    @settings(max_examples=25)
    @given(st.sampled_from([0.3, 0.5, 1.0, 1.5, 2.5]), st.sampled_from([0.5, 1.0, 5.0, math.inf]),
           st.floats(0.01, 15.0))
    def test_vs_quadrature(self, s, beta, t):
        r = ReservoirSpec(s, 0.1, 1.0, beta)
        assert_allclose(gamma_closed(r, t), gamma_integral(r, t), rtol=1e-7)

    @given(st.sampled_from([0.5, 1.0, 1.5]), st.floats(0.0, 20.0), st.floats(0.0, 20.0))
    def test_monotone_in_temperature(self, s, t, _):
        # hotter baths dephase faster
        assert gamma_closed(ReservoirSpec(s, 0.1, 1.0, 1.0), t) >= gamma_closed(ReservoirSpec(s, 0.1), t) - 1e-14

    @given(st.sampled_from([0.5, 1.0, 1.5]), st.floats(0.0, 20.0))
    def test_non_negative(self, s, t):
        assert gamma_closed(ReservoirSpec(s, 0.1, 1.0, 1.0), t) >= 0.0


class TestGammaRate:
    def test_zero_time(self):
        for r in (OHMIC_B1, SUB_B1, SUPER_T0):
            assert gamma_rate(r, 0.0) == 0.0

    def test_ohmic_vacuum(self):
        r = ReservoirSpec(1.0, 0.1)
        for t in (0.3, 1.0, 4.0):
            assert_allclose(gamma_rate(r, t), 2 * 0.1 * t / (1 + t * t), rtol=1e-14)

    @pytest.mark.parametrize("r", [OHMIC_B1, SUB_B1, SUPER_T0])
    def test_finite_difference(self, r):
        h = 1e-5
        for t in (0.5, 1.0, 3.0):
            fd = (gamma_closed(r, t + h) - gamma_closed(r, t - h)) / (2 * h)
            assert_allclose(gamma_rate(r, t), fd, rtol=1e-5)

    def test_ohmic_thermal_vs_quadrature(self):
        # d gamma / dt = 2 int J(w) w^-1 coth(beta w / 2) sin(w t) dw
        from scipy import integrate
        r, t = OHMIC_B1, 1.0

        def f(w):
            return 2 * 0.1 * math.exp(-w) / math.tanh(0.5 * w) * math.sin(w * t) if w > 0 else 0.0

        val, _ = integrate.quad(f, 0, 80, limit=400, epsrel=1e-12)
        assert_allclose(gamma_rate(r, t), val, rtol=1e-6)


class TestEvolution:
    def test_initial(self):
        sc = DephasingScenario(0.6, -0.3, 0.4, OHMIC_B1)
        assert evolve(sc, 0.0) == from_bell_diagonal(0.6, -0.3, 0.4)

    def test_full_dephasing(self):
        sc = DephasingScenario(0.6, -0.3, 0.4, OHMIC_B1)
        x = evolve_gamma(sc, 3.0, 80.0)
        assert abs(x.rho14) < 1e-30 and abs(x.rho23) < 1e-30
        assert measures.trace_discord(x) == pytest.approx(0.0, abs=1e-12)
        diag = from_bell_diagonal(0.0, 0.0, 0.4)
        assert_allclose(measures.lqu(x), measures.lqu(diag), atol=1e-12)

    def test_coherence_decay(self):
        sc = DephasingScenario(0.6, -0.3, 0.4, OHMIC_B1, 1.0, 1.0)
        assert_allclose(abs(evolve(sc, 1.0).rho14), 0.225 * math.exp(-gamma_integral(OHMIC_B1, 1.0)), rtol=1e-8)

    def test_invalid_triple(self):
        with pytest.raises(InvalidStateError):
            DephasingScenario(1.0, 1.0, 1.0, OHMIC_B1)

    @given(bell_triples(), st.floats(0.0, 10.0), st.floats(0.0, 3.0), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
    def test_correlation_tensor(self, c, t, g, v1, v2):
        sc = DephasingScenario(*c, OHMIC_B1, v1, v2)
        assert_allclose(correlation_tensor(sc, t, g).T, to_fano_bloch(evolve_gamma(sc, t, g)).T, atol=1e-14)

    @given(bell_triples(), st.floats(0.0, 10.0), st.floats(0.0, 3.0), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
    def test_measures_independent_of_frequencies(self, c, t, g, v1, v2):
        ref = evolve_gamma(DephasingScenario(*c, OHMIC_B1, 0.0, 0.0), t, g)
        x = evolve_gamma(DephasingScenario(*c, OHMIC_B1, v1, v2), t, g)
        assert_allclose(measures.lqu(x), measures.lqu(ref), atol=1e-12)
        assert_allclose(measures.trace_discord(x), measures.trace_discord(ref), atol=1e-12)


class TestDiscordCases:
    def test_frozen_at_start(self):
        assert trace_discord_dephasing_cases(0.6, -0.3, 0.4, 0.0) == (pytest.approx(0.2), "frozen")

    def test_after_crossing(self):
        g = math.log(0.6 / 0.4) + 0.1
        val, label = trace_discord_dephasing_cases(0.6, -0.3, 0.4, g)
        assert label == "c1"
        assert_allclose(val, 0.3 * math.exp(-g))

    def test_second_triple(self):
        g_star = math.log(5 / 3)
        assert trace_discord_dephasing_cases(-0.5, 0.0, 0.3, 0.5 * g_star)[0] == pytest.approx(0.15)
        val, label = trace_discord_dephasing_cases(-0.5, 0.0, 0.3, g_star + 0.2)
        assert label == "c1"
        assert_allclose(val, 0.25 * math.exp(-g_star - 0.2))

    @given(bell_triples(), st.floats(0.0, 10.0))
    def test_vs_generic(self, c, g):
        sc = DephasingScenario(*c, OHMIC_B1)
        assert_allclose(trace_discord_dephasing_cases(*c, g)[0],
                        measures.trace_discord(evolve_gamma(sc, 0.0, g)), atol=1e-12)
