import dataclasses
import math

import numpy as np
import pytest

from adialab.adiabatic import (
    DEFAULT_TAU_GRID,
    MatrixModel,
    entropy_balance_check,
    entropy_dichotomy_report,
    gamma_factorization_check,
    gapless_scan,
    isothermal_equivalence_scan,
    kato_scan,
    many_body_scan,
    pressure_derivative_check,
)
from adialab.dynamics import IntegratorConfig
from adialab.errors import NumericalToleranceError, ValidationError
from adialab.interactions import PAULI_X, PAULI_Z, InteractionPath
from adialab.lattice import Volume, hamiltonian_diagonal, local_hamiltonian
from adialab.models import (
    chain_balance_model,
    commuting_sweep_path,
    crossing_two_level,
    degenerate_four_level,
    gapped_two_level,
    transverse_sweep_path,
)
from adialab.thermo import entropy, gibbs

from oracles import classical_gibbs_kl


class TestMatrixModel:
    def test_rejects_non_self_adjoint_drive(self):
        skew = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
        with pytest.raises(ValidationError):
            MatrixModel(h0=PAULI_Z, v=lambda t: t * skew, vdot=lambda t: skew)

    def test_rejects_bad_beta(self):
        with pytest.raises(ValidationError):
            MatrixModel(
                h0=PAULI_Z, v=lambda t: t * PAULI_X, vdot=lambda t: PAULI_X, beta=0.0
            )

    def test_band_indices(self):
        assert gapped_two_level().band_indices() == [0]
        assert degenerate_four_level().band_indices() == [0, 1]

    def test_hamiltonian_assembly(self):
        model = gapped_two_level()
        assert np.allclose(model.hamiltonian(0.5), PAULI_Z + 0.5 * PAULI_X)
        assert model.dim == 2


class TestKatoScan:
    def test_deviation_decays_at_rate_one(self):
        scan = kato_scan(gapped_two_level(), [2.0, 20.0, 200.0])
        assert scan.min_gap >= 2.0 - 1e-9
        devs = [d for _, d in scan.points]
        assert devs[0] > devs[1] > devs[2]
        assert -1.3 <= scan.slope <= -0.7

    def test_rank_two_band(self):
        scan = kato_scan(degenerate_four_level(), [5.0, 50.0])
        devs = [d for _, d in scan.points]
        assert devs[1] < devs[0]

    def test_crossing_refused(self):
        with pytest.raises(NumericalToleranceError, match="gap closed"):
            kato_scan(crossing_two_level(), [10.0])

    def test_empty_grids_rejected(self):
        with pytest.raises(ValidationError):
            kato_scan(gapped_two_level(), [])
        with pytest.raises(ValidationError):
            kato_scan(gapped_two_level(), [1.0], tau_grid=[])

    def test_default_grid_covers_unit_interval(self):
        assert DEFAULT_TAU_GRID[0] == 0.0
        assert DEFAULT_TAU_GRID[-1] == 1.0
        assert len(DEFAULT_TAU_GRID) == 101


class TestGaplessScan:
    def test_needs_projection_rule(self):
        with pytest.raises(ValidationError):
            gapless_scan(gapped_two_level(), [1.0, 10.0])

    def test_crossing_deviation_shrinks(self):
        scan = gapless_scan(crossing_two_level(), [10.0, 300.0])
        (t_lo, d_lo), (t_hi, d_hi) = scan.points
        assert d_hi < d_lo
        assert math.isnan(scan.slope)

    def test_decrease_assertion_fires_on_reversed_grid(self):
        with pytest.raises(NumericalToleranceError, match="failed to decrease"):
            gapless_scan(crossing_two_level(), [300.0, 10.0])

    def test_rejects_non_projection_family(self):
        model = dataclasses.replace(
            crossing_two_level(), projection_rule=lambda tau: 0.5 * np.eye(2)
        )
        with pytest.raises(ValidationError, match="not a projection"):
            gapless_scan(model, [10.0, 20.0])


class TestEntropyBalance:
    def test_residual_is_quadrature_noise(self):
        check = entropy_balance_check(
            chain_balance_model(3), T=2.0, tau_grid=np.linspace(0.0, 1.0, 11)
        )
        assert check.residual <= 1e-6
        assert check.lhs[0] == 0.0
        assert check.rhs[0] == 0.0

    def test_balance_for_two_level(self):
        check = entropy_balance_check(gapped_two_level(0.8), T=5.0)
        assert check.residual <= 1e-6

    def test_grid_is_prepended_with_zero(self):
        check = entropy_balance_check(gapped_two_level(), T=1.0, tau_grid=[0.5, 1.0])
        assert check.taus[0] == 0.0

    def test_grid_outside_unit_interval_rejected(self):
        with pytest.raises(ValidationError):
            entropy_balance_check(gapped_two_level(), T=1.0, tau_grid=[0.0, 1.5])


class TestGammaFactorization:
    @pytest.mark.parametrize("T", [1.0, 7.0])
    def test_two_level_factorizes(self, T):
        check = gamma_factorization_check(gapped_two_level(), T)
        assert check.defect <= 1e-7
        assert check.identity_residual <= 1e-8
        assert check.gamma_drift <= 1e-9

    def test_chain_model_factorizes(self):
        check = gamma_factorization_check(chain_balance_model(2), T=3.0)
        assert check.defect <= 1e-7
        assert check.identity_residual <= 1e-8

    def test_partial_window(self):
        check = gamma_factorization_check(gapped_two_level(), T=4.0, s=0.2, t=0.7)
        assert check.defect <= 1e-7


class TestIsothermalScan:
    def test_rows_satisfy_pinsker(self):
        rows = isothermal_equivalence_scan(gapped_two_level(), [1.0, 10.0])
        assert [r.T for r in rows] == [1.0, 10.0]
        for row in rows:
            assert row.pinsker_ok
            assert row.sup_trace_distance >= 0.0
            assert row.sup_pairing_defect >= 0.0

    def test_pure_shift_drive_has_zero_diagnostics(self):
        # V(tau) = tau * 1 shifts all levels equally: the Gibbs family is
        # constant and the driven state never moves, so all three
        # diagnostics vanish together
        eye = np.eye(2, dtype=complex)
        model = MatrixModel(h0=PAULI_Z, v=lambda t: t * eye, vdot=lambda t: eye)
        rows = isothermal_equivalence_scan(model, [3.0], tau_grid=np.linspace(0, 1, 9))
        assert rows[0].sup_trace_distance <= 1e-9
        assert rows[0].sup_relative_entropy <= 1e-9
        assert rows[0].sup_pairing_defect <= 1e-9

    def test_empty_grid_rejected(self):
        with pytest.raises(ValidationError):
            isothermal_equivalence_scan(gapped_two_level(), [])


class TestManyBodyScan:
    def test_initial_cell_is_exact(self):
        records = many_body_scan(
            transverse_sweep_path(),
            Volume.chain(4),
            [0.8],
            tau_grid=[0.0, 0.5, 1.0],
            cfg=IntegratorConfig(steps=10),
        )
        assert len(records) == 3
        first = records[0]
        assert first.tau == 0.0
        assert first.relative_entropy <= 1e-9
        assert first.trace_distance <= 1e-8

    def test_entropy_is_conserved_along_tau(self):
        records = many_body_scan(
            transverse_sweep_path(),
            Volume.chain(4),
            [2.0],
            tau_grid=np.linspace(0.0, 1.0, 5),
            cfg=IntegratorConfig(steps=10),
        )
        for rec in records:
            assert rec.entropy_drift <= 1e-10

    def test_step_counter_accumulates(self):
        records = many_body_scan(
            transverse_sweep_path(),
            Volume.chain(3),
            [1.0],
            tau_grid=[0.0, 0.5, 1.0],
            cfg=IntegratorConfig(steps=4),
        )
        assert [r.steps for r in records] == [0, 4, 8]

    def test_commuting_sweep_matches_classical_formula(self):
        # [H(tau), H(sigma)] = 0, so the driven state is frozen and the
        # divergence against the instantaneous Gibbs state is the KL of the
        # two diagonal distributions, at every T
        path = commuting_sweep_path()
        volume = Volume.chain(4)
        diag0 = hamiltonian_diagonal(path.at(0.0), volume)
        diag1 = hamiltonian_diagonal(path.at(1.0), volume)
        records = many_body_scan(
            path, volume, [0.7], tau_grid=[0.0, 1.0], cfg=IntegratorConfig(steps=16)
        )
        want = classical_gibbs_kl(diag0, diag1, 1.0) / volume.site_count
        assert records[-1].relative_entropy == pytest.approx(want, abs=1e-10)

    def test_pairing_channels_populated(self):
        records = many_body_scan(
            transverse_sweep_path(),
            Volume.chain(3),
            [1.0],
            tau_grid=[0.0, 1.0],
            cfg=IntegratorConfig(steps=8),
        )
        for rec in records:
            assert math.isfinite(rec.pairing_driven)
            assert math.isfinite(rec.pairing_instant)

    def test_empty_grids_rejected(self):
        with pytest.raises(ValidationError):
            many_body_scan(transverse_sweep_path(), Volume.chain(3), [])


class TestPressureDerivative:
    def test_transverse_sweep_identity(self):
        check = pressure_derivative_check(transverse_sweep_path(), Volume.chain(4))
        assert check.max_residual <= 1e-6
        assert len(check.taus) == len(check.fd_slope) == len(check.expectation)

    def test_refinement_flag(self):
        check = pressure_derivative_check(
            transverse_sweep_path(),
            Volume.chain(3),
            tau_grid=[0.5],
            tolerance=1e-30,
        )
        assert check.refined
        assert check.step == pytest.approx(5e-5)

    def test_quadratic_profile(self):
        from adialab.models import quadratic_mix_path

        check = pressure_derivative_check(quadratic_mix_path(), Volume.chain(3))
        assert check.max_residual <= 1e-6

    def test_boundary_taus_are_dropped(self):
        check = pressure_derivative_check(
            transverse_sweep_path(), Volume.chain(3), tau_grid=[0.0, 0.5, 1.0]
        )
        assert check.taus == (0.5,)

    def test_needs_derivative_rule(self):
        from adialab.models import transverse_field_chain

        path = InteractionPath.interpolation(
            transverse_field_chain(1.0, 0.2),
            transverse_field_chain(1.0, 1.0),
            lam=lambda t: t * t,
        )
        with pytest.raises(ValidationError):
            pressure_derivative_check(path, Volume.chain(3))

    def test_no_admissible_tau_rejected(self):
        with pytest.raises(ValidationError):
            pressure_derivative_check(
                transverse_sweep_path(), Volume.chain(3), tau_grid=[0.0], step=1e-4
            )


class TestDichotomy:
    def setup_method(self):
        self.path = transverse_sweep_path()
        self.volume = Volume.chain(3)
        h0 = local_hamiltonian(self.path.at(0.0), self.volume)
        self.nu0, _ = gibbs(h0, 1.0)
        self.phi1 = self.path.at(1.0)

    def test_averaged_entropies_never_drop(self):
        report = entropy_dichotomy_report(
            self.nu0, self.phi1, self.volume, [1.0, 10.0, 100.0]
        )
        assert report.entropy_nondecreasing
        assert len(report.rows) == 6

    def test_driven_entropy_equals_initial(self):
        report = entropy_dichotomy_report(self.nu0, self.phi1, self.volume, [5.0])
        initial = report.rows[0]
        driven = report.rows[-1]
        assert initial.kind == "initial"
        assert driven.kind == "driven"
        assert driven.entropy_per_site == initial.entropy_per_site

    def test_dephasing_strictly_mixes_noncommuting_quench(self):
        report = entropy_dichotomy_report(self.nu0, self.phi1, self.volume, [2.0])
        dephased = [r for r in report.rows if r.kind == "dephased"][0]
        assert dephased.entropy_per_site > report.rows[0].entropy_per_site + 1e-6

    def test_commuting_quench_leaves_entropy_alone(self):
        # nu0 is already diagonal in the eigenbasis of the quench generator
        phi = commuting_sweep_path()
        volume = Volume.chain(3)
        nu0, _ = gibbs(local_hamiltonian(phi.at(0.0), volume), 1.0)
        report = entropy_dichotomy_report(nu0, phi.at(1.0), volume, [3.0])
        base = report.rows[0].entropy_per_site
        for row in report.rows:
            assert row.entropy_per_site == pytest.approx(base, abs=1e-9)

    def test_positive_horizons_required(self):
        with pytest.raises(ValidationError):
            entropy_dichotomy_report(self.nu0, self.phi1, self.volume, [0.0])
