import math

import numpy as np
import pytest
from scipy.linalg import expm

from adialab.dynamics import (
    DYSON_MAX_ORDER,
    IntegratorConfig,
    Propagator,
    cesaro_average,
    default_step_count,
    dephasing_average,
    derivation_bound_check,
    dyson_partial_sum,
    dyson_radius,
    frozen_evolve,
    polar_project,
    propagate,
    propagate_grid,
    trotter_product,
    unitarity_drift,
    unitary_exp,
)
from adialab.errors import NumericalToleranceError, ValidationError
from adialab.interactions import PAULI_Z, one_site_term
from adialab.lattice import Volume, embed, local_hamiltonian
from adialab.models import (
    standard_sweep_rule,
    transverse_field_chain,
    transverse_sweep_path,
)

from oracles import ode_unitary


def random_hermitian(rng, dim):
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (raw + raw.conj().T)


def integration_error(rule, dim, scheme, n, T):
    """Distance of the fixed-step unitary from the ODE reference."""
    ref = ode_unitary(rule, T, 0.0, 1.0, dim)
    cfg = IntegratorConfig(scheme=scheme, steps=n)
    u = propagate(rule, None, T, 0.0, 1.0, cfg)
    return float(np.linalg.norm(u - ref, 2))


def order_slope(rule, dim, scheme, counts, T=1.0):
    """Fitted convergence order of the fixed-step integrator."""
    errs = [integration_error(rule, dim, scheme, n, T) for n in counts]
    slope = np.polyfit(np.log(counts), np.log(errs), 1)[0]
    return slope, errs


class TestPrimitives:
    def test_unitary_exp_diagonal(self):
        u = unitary_exp(PAULI_Z, 0.7)
        assert u[0, 0] == pytest.approx(np.exp(-0.7j), abs=1e-14)
        assert u[1, 1] == pytest.approx(np.exp(0.7j), abs=1e-14)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_frozen_evolve_matches_expm(self, seed):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, 6)
        t = 0.83
        assert np.allclose(frozen_evolve(h, t), expm(-1j * t * h), atol=1e-12)

    def test_polar_project_restores_unitarity(self):
        rng = np.random.default_rng(3)
        u = expm(-1j * random_hermitian(rng, 5))
        dirty = u + 1e-6 * rng.normal(size=u.shape)
        clean = polar_project(dirty)
        assert unitarity_drift(clean) < 1e-13
        assert np.linalg.norm(clean - u, 2) < 1e-5

    def test_default_step_count(self):
        assert default_step_count(10.0, 2.0, 0.5) == 100
        assert default_step_count(0.0, 5.0, 1.0) == 1


class TestIntegratorConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"scheme": "rk4"},
            {"steps": 0},
            {"tolerance": 0.0},
            {"tolerance": -1e-6},
            {"max_steps": 0},
        ],
    )
    def test_rejects_bad_settings(self, kwargs):
        with pytest.raises(ValidationError):
            IntegratorConfig(**kwargs)


class TestConvergenceOrder:
    def test_cf4_is_fourth_order(self):
        slope, errs = order_slope(
            standard_sweep_rule, 2, "cf4", [4, 8, 16], T=2.0
        )
        assert errs[0] > errs[-1]
        assert -4.6 <= slope <= -3.4

    def test_midpoint_is_second_order(self):
        slope, errs = order_slope(
            standard_sweep_rule, 2, "midpoint", [8, 16, 32], T=2.0
        )
        assert errs[0] > errs[-1]
        assert -2.4 <= slope <= -1.6

    def test_cf4_beats_midpoint(self):
        cf4 = integration_error(standard_sweep_rule, 2, "cf4", 16, 2.0)
        mid = integration_error(standard_sweep_rule, 2, "midpoint", 16, 2.0)
        assert cf4 < mid


class TestPropagate:
    def test_interaction_path_matches_ode(self):
        path = transverse_sweep_path()
        volume = Volume.chain(3)
        h0 = local_hamiltonian(path.at(0.0), volume).matrix
        h1 = local_hamiltonian(path.at(1.0), volume).matrix

        def rule(tau):
            return (1.0 - tau) * h0 + tau * h1

        # the sweep is linear in tau, so the dense rule above is exact
        ref = ode_unitary(rule, 3.0, 0.0, 1.0, volume.dim)
        u = propagate(path, volume, 3.0, 0.0, 1.0, IntegratorConfig(tolerance=1e-11))
        assert np.linalg.norm(u - ref, 2) < 1e-8

    def test_zero_time_is_identity(self):
        u = propagate(standard_sweep_rule, None, 0.0, 0.0, 1.0)
        assert np.allclose(u, np.eye(2))

    def test_negative_time_rejected(self):
        with pytest.raises(ValidationError):
            propagate(standard_sweep_rule, None, -1.0, 0.0, 1.0)

    def test_backward_span_inverts(self):
        cfg = IntegratorConfig(tolerance=1e-11)
        fwd = propagate(standard_sweep_rule, None, 2.0, 0.0, 1.0, cfg)
        bwd = propagate(standard_sweep_rule, None, 2.0, 1.0, 0.0, cfg)
        assert np.linalg.norm(fwd @ bwd - np.eye(2), 2) < 1e-8

    def test_adaptive_reaches_tolerance(self):
        cfg = IntegratorConfig(tolerance=1e-10)
        ref = ode_unitary(standard_sweep_rule, 2.0, 0.0, 1.0, 2)
        u = propagate(standard_sweep_rule, None, 2.0, 0.0, 1.0, cfg)
        assert np.linalg.norm(u - ref, 2) < 1e-8

    def test_adaptive_step_budget_enforced(self):
        cfg = IntegratorConfig(steps=1, tolerance=1e-16, max_steps=8)
        with pytest.raises(NumericalToleranceError):
            propagate(standard_sweep_rule, None, 5.0, 0.0, 1.0, cfg)

    def test_result_is_unitary(self):
        u = propagate(standard_sweep_rule, None, 7.0, 0.0, 1.0)
        assert unitarity_drift(u) < 1e-11


class TestPropagator:
    def test_matches_one_shot(self):
        cfg = IntegratorConfig(tolerance=1e-11)
        prop = Propagator(standard_sweep_rule, None, 2.0, cfg)
        direct = propagate(standard_sweep_rule, None, 2.0, 0.0, 0.7, cfg)
        assert np.linalg.norm(prop.to(0.7) - direct, 2) < 1e-9

    def test_cache_hit_returns_same_object(self):
        prop = Propagator(standard_sweep_rule, None, 1.0)
        first = prop.to(0.5)
        assert prop.to(0.5) is first

    def test_between_composes(self):
        cfg = IntegratorConfig(tolerance=1e-11)
        prop = Propagator(standard_sweep_rule, None, 2.0, cfg)
        direct = propagate(standard_sweep_rule, None, 2.0, 0.3, 0.9, cfg)
        assert np.linalg.norm(prop.between(0.3, 0.9) - direct, 2) < 1e-9

    def test_counts_steps(self):
        prop = Propagator(standard_sweep_rule, None, 1.0, IntegratorConfig(steps=7))
        prop.to(0.5)
        prop.to(1.0)
        assert prop.steps_taken == 14
        prop.to(1.0)
        assert prop.steps_taken == 14

    def test_anchor_is_identity(self):
        prop = Propagator(standard_sweep_rule, None, 3.0, anchor=0.25)
        assert np.allclose(prop.to(0.25), np.eye(2))

    def test_grid_matches_ode(self):
        taus = [0.0, 0.25, 0.5, 1.0]
        cfg = IntegratorConfig(tolerance=1e-11)
        us = propagate_grid(standard_sweep_rule, None, 2.0, taus, cfg)
        for tau, u in zip(taus, us):
            ref = ode_unitary(standard_sweep_rule, 2.0, 0.0, tau, 2)
            assert np.linalg.norm(u - ref, 2) < 1e-8

    def test_empty_grid_rejected(self):
        with pytest.raises(ValidationError):
            propagate_grid(standard_sweep_rule, None, 1.0, [])


class TestTrotter:
    def test_single_step_is_frozen_exponential(self):
        u = trotter_product(standard_sweep_rule, None, 2.0, 0.0, 1.0, 1)
        assert np.allclose(u, unitary_exp(standard_sweep_rule(0.0), 2.0))

    def test_error_halves_with_doubled_steps(self):
        ref = ode_unitary(standard_sweep_rule, 0.5, 0.0, 1.0, 2)
        errs = [
            np.linalg.norm(
                trotter_product(standard_sweep_rule, None, 0.5, 0.0, 1.0, n) - ref, 2
            )
            for n in (16, 32, 64)
        ]
        assert errs[0] > errs[1] > errs[2]
        for a, b in zip(errs, errs[1:]):
            assert 0.35 <= b / a <= 0.65

    def test_interaction_path_converges(self):
        path = transverse_sweep_path()
        volume = Volume.chain(2)
        cfg = IntegratorConfig(tolerance=1e-11)
        ref = propagate(path, volume, 1.0, 0.0, 1.0, cfg)
        coarse = trotter_product(path, volume, 1.0, 0.0, 1.0, 64)
        fine = trotter_product(path, volume, 1.0, 0.0, 1.0, 256)
        a = np.linalg.norm(coarse - ref, 2)
        b = np.linalg.norm(fine - ref, 2)
        assert b < a / 3.0

    def test_needs_a_step(self):
        with pytest.raises(ValidationError):
            trotter_product(standard_sweep_rule, None, 1.0, 0.0, 1.0, 0)


class TestDyson:
    def setup_method(self):
        self.phi = transverse_field_chain(1.0, 1.0)
        self.volume = Volume.chain(3)
        self.a = embed(one_site_term(PAULI_Z), (1,), self.volume)

    def test_radius_formula(self):
        # norm_r = 1 (field) + 2 e (coupling) at weight r = 1
        want = 1.0 / (2.0 * (1.0 + 2.0 * math.e))
        assert dyson_radius(self.phi) == pytest.approx(want, rel=1e-12)

    def test_order_zero_returns_observable(self):
        out = dyson_partial_sum(self.phi, self.volume, 0.0, 0.05, 0, self.a)
        assert np.allclose(out, self.a.matrix)

    def test_converges_to_heisenberg_image(self):
        # constant generator, so the exact Heisenberg image is a conjugation
        # by the frozen exponential
        span = 0.6 * dyson_radius(self.phi)
        u = frozen_evolve(local_hamiltonian(self.phi, self.volume), span)
        target = u.conj().T @ self.a.matrix @ u
        errs = []
        for order in (1, 3, 5):
            out = dyson_partial_sum(self.phi, self.volume, 0.0, span, order, self.a)
            errs.append(np.linalg.norm(out - target, 2))
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-6

    def test_time_dependent_path(self):
        path = transverse_sweep_path()
        volume = Volume.chain(3)
        a = embed(one_site_term(PAULI_Z), (1,), volume)
        span = 0.6 * dyson_radius(path)
        u = propagate(path, volume, 1.0, 0.0, span, IntegratorConfig(tolerance=1e-12))
        target = u.conj().T @ a.matrix @ u
        out = dyson_partial_sum(path, volume, 0.0, span, 5, a)
        assert np.linalg.norm(out - target, 2) < 1e-7

    def test_order_ceiling(self):
        with pytest.raises(ValidationError):
            dyson_partial_sum(
                self.phi, self.volume, 0.0, 0.01, DYSON_MAX_ORDER + 1, self.a
            )

    def test_span_outside_radius_refused(self):
        span = 1.1 * dyson_radius(self.phi)
        with pytest.raises(ValidationError):
            dyson_partial_sum(self.phi, self.volume, 0.0, span, 2, self.a)


class TestDerivationBound:
    @pytest.mark.parametrize("order", [0, 1, 2, 3])
    def test_static_interaction(self, order):
        phi = transverse_field_chain(1.0, 0.8)
        check = derivation_bound_check(phi, one_site_term(PAULI_Z), order)
        assert check.ok
        assert check.measured <= check.bound

    def test_path_supremum_sampled(self):
        check = derivation_bound_check(
            transverse_sweep_path(), one_site_term(PAULI_Z), 2, samples=3, seed=1
        )
        assert check.ok

    def test_order_ceiling(self):
        with pytest.raises(ValidationError):
            derivation_bound_check(
                transverse_field_chain(1.0, 1.0), one_site_term(PAULI_Z), 5
            )

    def test_bound_grows_factorially(self):
        phi = transverse_field_chain(1.0, 1.0)
        b = [
            derivation_bound_check(phi, one_site_term(PAULI_Z), k).bound
            for k in (1, 2, 3)
        ]
        base = 2.0 * (1.0 + 2.0 * math.e)
        assert b[1] / b[0] == pytest.approx(2.0 * base, rel=1e-12)
        assert b[2] / b[1] == pytest.approx(3.0 * base, rel=1e-12)


class TestTimeAverages:
    def setup_method(self):
        rng = np.random.default_rng(17)
        self.h = random_hermitian(rng, 6)
        raw = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        m = raw @ raw.conj().T
        self.omega = m / np.trace(m).real
        self.a = random_hermitian(rng, 6)

    def test_cesaro_matches_trapezoid_oracle(self):
        from oracles import time_averaged_expectation

        horizon = 7.3
        got = cesaro_average(self.omega, self.h, self.a, horizon, samples=128)
        want = time_averaged_expectation(self.omega, self.h, self.a, horizon)
        assert got == pytest.approx(want, abs=5e-6)

    def test_cesaro_needs_positive_horizon(self):
        with pytest.raises(ValidationError):
            cesaro_average(self.omega, self.h, self.a, 0.0)

    def test_dephasing_for_diagonal_generator(self):
        h = np.diag([0.0, 1.0, 2.5])
        rng = np.random.default_rng(2)
        raw = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        m = raw @ raw.conj().T
        omega = m / np.trace(m).real
        a = random_hermitian(rng, 3)
        want = float(np.sum(np.diag(omega).real * np.diag(a).real))
        assert dephasing_average(omega, h, a) == pytest.approx(want, abs=1e-12)

    def test_cesaro_approaches_dephasing(self):
        # the deviation oscillates, so check the 1/horizon envelope
        limit = dephasing_average(self.omega, self.h, self.a)
        for horizon in (25.0, 100.0, 400.0):
            got = cesaro_average(
                self.omega, self.h, self.a, horizon, samples=max(256, int(8 * horizon))
            )
            assert abs(got - limit) <= 2.0 / horizon

    def test_invariant_state_is_constant(self):
        # a Gibbs state of h commutes with it, so the average is the plain trace
        from adialab.thermo import gibbs

        omega, _ = gibbs(self.h, 1.0)
        value = float(np.trace(omega.matrix @ self.a).real)
        got = cesaro_average(omega, self.h, self.a, 11.0, samples=128)
        assert got == pytest.approx(value, abs=1e-10)
