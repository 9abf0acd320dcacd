import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polystab import linalg, resolvent, zoo
from polystab.errors import DomainError, InsufficientData


class TestSweep:
    def test_single_point_origin(self):
        m = zoo.make_diagonal([-1.0, -2.0])
        prof = resolvent.sweep_imaginary_axis(m, grid=[0.0])
        np.testing.assert_allclose(prof.norms, [1.0], rtol=1e-12)

    def test_single_point_offset(self):
        # normal matrix: norm is 1 / distance to the spectrum = 1/sqrt(5)
        m = zoo.make_diagonal([-1.0, -2.0])
        prof = resolvent.sweep_imaginary_axis(m, grid=[2.0])
        np.testing.assert_allclose(prof.norms, [0.4472135954999579], rtol=1e-10)

    def test_normal_model_matches_distance(self):
        rng = np.random.default_rng(3)
        eigs = -rng.uniform(0.2, 2.0, 24) + 1j * rng.uniform(-30, 30, 24)
        m = zoo.make_diagonal(eigs)
        grid = np.linspace(-40, 40, 201)
        prof = resolvent.sweep_imaginary_axis(m, grid=grid)
        dist = np.abs(1j * grid[:, None] - eigs[None, :]).min(axis=1)
        np.testing.assert_allclose(prof.norms, 1.0 / dist, rtol=1e-9)

    def test_lower_bound_invariant(self):
        m = zoo.make_jordan_growth(1.0, 1.0, 0.0, 16)
        prof = resolvent.sweep_imaginary_axis(m, grid=np.linspace(-20, 20, 101))
        eigs = m.eigenvalues()
        dist = np.abs(1j * prof.xi_grid[:, None] - eigs[None, :]).min(axis=1)
        assert np.all(prof.norms >= 1.0 / dist - 1e-9)

    def test_default_grid_shape(self):
        g = resolvent.default_grid()
        assert g.min() == -1e4 and g.max() == 1e4
        assert np.any(np.abs(g) <= 0.1)


class TestFit:
    def test_flat_profile(self):
        xi = np.linspace(-50, 50, 101)
        beta, c, resid = resolvent.fit_growth_exponent(xi, np.ones_like(xi))
        assert beta == 0.0
        assert c == pytest.approx(1.0, rel=1e-12)
        assert resid <= 1e-12

    def test_exact_power_profile(self):
        xi = np.geomspace(0.1, 1e4, 300)
        xi = np.concatenate([-xi[::-1], xi])
        norms = (1.0 + np.abs(xi)) ** 2
        beta, c, resid = resolvent.fit_growth_exponent(xi, norms)
        assert beta == pytest.approx(2.0, abs=1e-9)
        assert c == pytest.approx(1.0, rel=1e-9)
        assert resid <= 1e-9

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            resolvent.fit_growth_exponent([0.0, 0.5], [1.0, 1.0])

    @pytest.mark.parametrize("alpha", [1.0, 2.0])
    def test_borichev_recovery_small(self, alpha):
        m = zoo.make_borichev_tomilov(alpha, 128)
        prof = resolvent.sweep_imaginary_axis(m)
        assert abs(prof.beta_hat - alpha) <= 0.1

    def test_envelope_dominates(self):
        m = zoo.make_borichev_tomilov(1.0, 64)
        prof = resolvent.sweep_imaginary_axis(m)
        env = prof.envelope()
        assert np.all(np.log(prof.norms) <= np.log(env) + 1e-9)


class TestHalfPlane:
    def test_scalar_contraction(self):
        m = zoo.make_diagonal([-1.0])
        rep = resolvent.verify_half_plane_bound(m, 0.0, 1.0, sample_count=200)
        assert rep.max_ratio <= 1.0 + 1e-12
        assert rep.passed

    def test_halved_constant_fails(self):
        m = zoo.make_diagonal([-1.0])
        rep = resolvent.verify_half_plane_bound(m, 0.0, 0.5, sample_count=200)
        assert rep.max_ratio > 1.0
        assert not rep.passed

    def test_fitted_envelope_dominates(self):
        m = zoo.make_borichev_tomilov(1.0, 48)
        prof = resolvent.sweep_imaginary_axis(m)
        rep = resolvent.verify_half_plane_bound(
            m, prof.beta_hat, prof.c_hat, sample_count=600, seed=1
        )
        assert rep.max_ratio <= 1.05
        assert np.isfinite(rep.beta_halfplane)


class TestResolventPowers:
    def test_k0_is_the_embedding(self):
        m = zoo.make_borichev_tomilov(1.0, 24)
        rep = resolvent.verify_resolvent_powers(m, 1.0, 0, 2.0, sample_vectors=16)
        assert rep.sup_ratio_per_k[0] > 0
        assert np.all(np.isfinite(rep.sup_ratio_per_k))

    def test_bounded_resolvent_small_ratios(self):
        # beta = 0: the interpolation norm degenerates to the ambient norm
        # and every ratio is bounded by sup ||R||^k over the grid
        m = zoo.make_diagonal([-1.0, -2.0])
        rep = resolvent.verify_resolvent_powers(m, 0.0, 1, 1.0, sample_vectors=8)
        sup_r = 1.0  # distance from iR to the spectrum is >= 1
        for k, val in enumerate(rep.sup_ratio_per_k):
            assert val <= sup_r ** k + 1e-9

    def test_ladder_bounded(self):
        reports, ratios, bounded = resolvent.resolvent_power_ladder(
            "borichev_tomilov", {"alpha": 1.0}, [32, 64], n=0, q=2.0,
            sample_vectors=16,
        )
        assert bounded
        assert len(reports) == 2


class TestRateTable:
    def test_hilbert_case(self):
        t = resolvent.predict_decay_rates(1.0, 2.0, 0.0)
        assert t.tau_main == 1.0

    def test_general_banach_case(self):
        t = resolvent.predict_decay_rates(1.0, 1.0, 1.0)
        assert t.tau_main == 3.0
        assert t.tau_old == 3.0  # the older threshold is strict

    def test_bounded_regime(self):
        t = resolvent.predict_decay_rates(2.0, 2.0, 1.0)
        assert t.tau_bounded == 2.0
        assert t.log_exp_bounded == 1.0
        assert t.bounded_regime_only

    def test_domain_error(self):
        with pytest.raises(DomainError):
            resolvent.predict_decay_rates(1.0, 3.0, 0.0)
        with pytest.raises(DomainError):
            resolvent.predict_decay_rates(-1.0, 2.0, 0.0)
        with pytest.raises(DomainError):
            resolvent.predict_decay_rates(1.0, 2.0, -0.5)

    @settings(max_examples=200, deadline=None)
    @given(
        beta=st.floats(0.01, 8.0),
        p=st.floats(1.0, 2.0),
        rho=st.floats(0.0, 5.0),
        drho=st.floats(0.01, 2.0),
        dbeta=st.floats(0.01, 2.0),
    )
    def test_monotonicity(self, beta, p, rho, drho, dbeta):
        base = resolvent.predict_decay_rates(beta, p, rho)
        assert base.tau_main <= base.tau_old
        more_rho = resolvent.predict_decay_rates(beta, p, rho + drho)
        assert more_rho.tau_main > base.tau_main
        more_beta = resolvent.predict_decay_rates(beta + dbeta, p, rho)
        assert more_beta.tau_main > base.tau_main

    @settings(max_examples=100, deadline=None)
    @given(beta=st.floats(0.0, 8.0), rho=st.floats(0.0, 5.0))
    def test_p2_specialization_exact(self, beta, rho):
        t = resolvent.predict_decay_rates(beta, 2.0, rho)
        assert t.tau_main == (rho + 1.0) * beta

    def test_json_export(self):
        t = resolvent.predict_decay_rates(1.0, 2.0, 0.0)
        doc = t.to_json()
        assert '"tau_main": 1.0' in doc


class TestProfileExport:
    def test_csv(self, tmp_path):
        m = zoo.make_diagonal([-1.0, -2.0])
        prof = resolvent.sweep_imaginary_axis(
            m, grid=np.linspace(-5, 5, 64), adaptive=False
        )
        path = tmp_path / "profile.csv"
        # an explicit tiny grid cannot be fitted; write with a synthetic fit
        prof.beta_hat, prof.c_hat = 0.0, float(prof.norms.max())
        prof.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "xi,norm,envelope"
        assert len(lines) == 65
