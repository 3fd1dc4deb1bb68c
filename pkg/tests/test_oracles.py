from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from conftest import xstates
from xdiscord import measures
from xdiscord.numerics import trace_norm
from xdiscord.oracles import (CQParametrization, SphereGrid, lqu_bruteforce, lqu_random_observables,
                              nelder_mead_batch, skew_information, skew_information_operator,
                              trace_discord_bruteforce)
from xdiscord.states import (bell_state_phi_plus, from_bell_diagonal, maximally_mixed, product_state,
                             random_xstate)


class TestNelderMead:
    def test_rosenbrock(self):
        def f(v):
            return (1 - v[:, 0]) ** 2 + 100 * (v[:, 1] - v[:, 0] ** 2) ** 2

        x, fx = nelder_mead_batch(f, np.array([[-1.2, 1.0], [0.0, 0.0], [2.0, 2.0]]), 0.5,
                                  xatol=1e-10, fatol=1e-16, max_evals=5000)
        assert_allclose(x, 1.0, atol=1e-6)
        assert np.all(fx < 1e-12)

    def test_quadratic_many_starts(self, rng):
        centre = np.array([0.0, 1.0, 2.0])

        def f(v):
            return np.sum((v - centre) ** 2, axis=1)

        x, _ = nelder_mead_batch(f, rng.normal(size=(6, 3)), 1.0, xatol=1e-10, fatol=1e-16, max_evals=4000)
        assert_allclose(x, np.tile(centre, (6, 1)), atol=1e-6)

    def test_respects_budget(self):
        calls = []

        def f(v):
            calls.append(len(v))
            return np.sum(v ** 2, axis=1)

        nelder_mead_batch(f, np.ones((1, 4)), 0.1, xatol=0.0, fatol=0.0, max_evals=50)
        assert len(calls) <= 60


class TestSkewInformation:
    def test_phi_plus_any_direction(self, rng):
        x = bell_state_phi_plus()
        for _ in range(10):
            n = rng.normal(size=3)
            assert_allclose(skew_information(x, n), 1.0, atol=1e-12)

    def test_maximally_mixed(self):
        assert_allclose(skew_information(maximally_mixed(), [0.3, -0.2, 0.9]), 0.0, atol=1e-15)

    def test_z_direction_is_one_minus_w33(self, rng):
        for _ in range(20):
            x = random_xstate(rng)
            assert_allclose(skew_information(x, [0, 0, 1]), 1 - measures.w_matrix(x).w33, atol=1e-9)

    def test_commuting_observable(self):
        rho = np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex)
        assert skew_information_operator(rho, np.diag([1, 1, -1, -1]).astype(complex)) == pytest.approx(0.0)


class TestLquBruteforce:
    def test_phi_plus(self):
        assert_allclose(lqu_bruteforce(bell_state_phi_plus()), 1.0, atol=1e-12)

    def test_maximally_mixed(self):
        assert_allclose(lqu_bruteforce(maximally_mixed()), 0.0, atol=1e-12)

    def test_reference_triple(self):
        x = from_bell_diagonal(0.6, -0.3, 0.4)
        assert abs(lqu_bruteforce(x) - measures.lqu(x)) < 1e-6

    def test_coarse_grid_still_converges(self):
        x = from_bell_diagonal(0.6, -0.3, 0.4)
        assert abs(lqu_bruteforce(x, SphereGrid(n_theta=10, n_phi=20)) - measures.lqu(x)) < 1e-6

    @settings(max_examples=25)
    @given(xstates())
    def test_vs_closed_form(self, x):
        assert abs(lqu_bruteforce(x) - measures.lqu(x)) < 1e-6

    def test_random_observables_upper_bound(self, rng):
        x = random_xstate(rng)
        assert lqu_random_observables(x, 200, rng) >= measures.lqu(x) - 1e-12


class TestCQParametrization:
    def test_is_a_state(self):
        cq = CQParametrization(np.array([0.3, 0.4, 0.5]), 0.3, np.array([0.1, 0.2, 0.3]), np.array([0.0, -0.5, 0.5]))
        m = cq.matrix()
        assert_allclose(np.trace(m).real, 1.0)
        assert np.linalg.eigvalsh(m).min() > -1e-14

    def test_round_trip(self):
        cq = CQParametrization(np.array([0.0, 0.0, 1.0]), 0.5, np.zeros(3), np.zeros(3))
        assert_allclose(cq.matrix(), np.eye(4) / 4, atol=1e-15)


class TestTraceDiscordBruteforce:
    def test_product(self):
        assert trace_discord_bruteforce(product_state(1.0, 1.0), restarts=10).value < 1e-8

    def test_phi_plus(self):
        assert abs(trace_discord_bruteforce(bell_state_phi_plus()).value - 0.5) < 1e-3

    def test_reference_triple(self):
        x = from_bell_diagonal(0.6, -0.3, 0.4)
        assert abs(trace_discord_bruteforce(x).value - 0.2) < 1e-3

    def test_result_is_achieved(self):
        x = from_bell_diagonal(0.6, -0.3, 0.4)
        res = trace_discord_bruteforce(x, restarts=20)
        from xdiscord.oracles import _cq_matrices
        assert_allclose(0.5 * trace_norm(x.matrix() - _cq_matrices(res.best[None, :])[0]), res.value, atol=1e-12)

    def test_battery(self):
        rng = np.random.default_rng(7)
        for i in range(5):
            x = random_xstate(rng)
            bf = trace_discord_bruteforce(x, seed=i).value
            cf = measures.trace_discord(x)
            assert cf <= bf + 1e-9
            assert bf - cf < 1e-3

    def test_deterministic(self):
        x = random_xstate(np.random.default_rng(3))
        assert trace_discord_bruteforce(x, 20, seed=4).value == trace_discord_bruteforce(x, 20, seed=4).value
