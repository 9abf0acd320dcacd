import math

import numpy as np
import pytest

from polystab import linalg, semigroup, zoo
from polystab.errors import DomainError, UnsupportedSpace


@pytest.fixture(scope="module")
def scalar_model():
    return zoo.make_diagonal([-1.0])


@pytest.fixture(scope="module")
def diag_model():
    return zoo.make_diagonal([-1.0, -2.0])


class TestOrbit:
    def test_diagonal_example(self, diag_model):
        rec = semigroup.orbit(diag_model, [1.0, 0.0], t_grid=np.array([1.0, 2.0]))
        assert rec.norms[-1] == pytest.approx(0.1353352832366127, rel=1e-12)

    def test_shifted_jordan_closed_form(self):
        # exp(tA) = e^(-0.1 t) [[1, t], [0, 1]] for the shifted Jordan block
        m = zoo.GeneratorModel(
            np.array([[-0.1, 1.0], [0.0, -0.1]], dtype=complex), family="custom"
        )
        rec = semigroup.orbit(m, [0.0, 1.0], t_grid=np.geomspace(1, 10, 8))
        want = math.exp(-1.0) * math.hypot(10.0, 1.0)
        assert rec.norms[-1] == pytest.approx(want, rel=1e-10)

    def test_zero_vector_flagged(self, diag_model):
        rec = semigroup.orbit(diag_model, [0.0, 0.0])
        assert not rec.rho_valid
        assert math.isnan(rec.rho_hat)
        assert np.all(rec.norms == 0.0)

    def test_normal_closed_form_invariant(self):
        rng = np.random.default_rng(4)
        eigs = -rng.uniform(0.1, 2, 12) + 1j * rng.uniform(-4, 4, 12)
        m = zoo.make_diagonal(eigs)
        x = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        rec = semigroup.orbit(m, x)
        want = np.sqrt(
            np.sum(
                np.exp(2.0 * np.outer(rec.t_grid, eigs.real)) * np.abs(x) ** 2,
                axis=1,
            )
        )
        np.testing.assert_allclose(rec.norms, want, rtol=1e-10)

    def test_cross_check(self):
        m = zoo.make_borichev_tomilov(1.0, 24)
        x = np.ones(24) / np.sqrt(24.0)
        rec = semigroup.orbit(m, x, cross_check=True)
        assert rec.cross_check_error is not None
        assert rec.cross_check_error <= 1e-8

    def test_decay_exponent_fit(self):
        m = zoo.make_diagonal([-0.5])
        rec = semigroup.orbit(m, [1.0], t_grid=np.geomspace(1, 100, 32))
        # pure exponential decays faster than any power on the tail
        assert rec.rho_hat > 5.0

    def test_bad_grid(self, diag_model):
        with pytest.raises(DomainError):
            semigroup.orbit(diag_model, [1.0, 0.0], t_grid=np.array([2.0, 1.0]))

    def test_csv_export(self, tmp_path, diag_model):
        rec = semigroup.orbit(diag_model, [1.0, 0.0])
        rec.to_csv(tmp_path / "orbit.csv", rho=1.0)
        header = (tmp_path / "orbit.csv").read_text().splitlines()[0]
        assert header == "t,norm,scaled_norm"


class TestGrowthBound:
    def test_scalar(self):
        ge = semigroup.growth_bound_estimate(zoo.make_diagonal([-1.0]))
        assert ge.omega_hat == pytest.approx(-1.0, abs=1e-9)
        assert ge.m_hat == pytest.approx(1.0, abs=1e-9)

    def test_contraction(self):
        ge = semigroup.growth_bound_estimate(zoo.make_borichev_tomilov(1.0, 32))
        assert ge.m_hat <= 1.0 + 1e-9
        assert ge.omega_hat <= 0.0

    def test_jordan_polynomial_growth(self):
        ge = semigroup.growth_bound_estimate(zoo.make_jordan_growth(1, 1, 0, 128))
        assert 0.8 <= ge.poly_gamma_hat <= 1.2


class TestKFunctional:
    def test_scalar_closed_form(self, scalar_model):
        # D(A)-weight is |b| + |A b| = 2|b|, so K(t, 1) = min(1, 2t)
        for j in range(-9, 10):
            t = 2.0 ** (-j / 2.0)
            got = semigroup.k_functional(scalar_model, 1, t, [1.0])
            assert got == pytest.approx(min(1.0, 2.0 * t), abs=1e-6)

    def test_large_t_limit(self, diag_model):
        x = np.array([0.3, -0.4])
        got = semigroup.k_functional(diag_model, 1, 2.0**30, x)
        assert got == pytest.approx(np.linalg.norm(x), rel=1e-6)

    def test_zero_vector(self, diag_model):
        assert semigroup.k_functional(diag_model, 1, 1.0, [0.0, 0.0]) == 0.0

    @pytest.mark.parametrize("seed", range(4))
    def test_upper_bounds(self, seed):
        rng = np.random.default_rng(seed)
        eigs = -rng.uniform(0.2, 3, 8) + 1j * rng.uniform(-2, 2, 8)
        m = zoo.make_diagonal(eigs)
        x = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        g = np.linalg.matrix_power(np.asarray(m.matrix), 2)
        xnorm = np.linalg.norm(x)
        dnorm = xnorm + np.linalg.norm(g @ x)
        for t in [0.01, 0.5, 4.0]:
            k = semigroup.k_functional(m, 2, t, x)
            assert k <= xnorm * (1 + 1e-9)
            assert k <= t * dnorm * (1 + 1e-9)

    def test_monotone_concave_in_t(self, diag_model):
        rng = np.random.default_rng(11)
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        ts = 2.0 ** np.arange(-8, 8, dtype=float)
        ks = [semigroup.k_functional(diag_model, 1, t, x) for t in ts]
        ks = np.array(ks)
        scale = ks.max()
        assert np.all(np.diff(ks) >= -1e-5 * scale)
        # concavity on the sampled points: increments per unit t decrease
        slopes = np.diff(ks) / np.diff(ts)
        assert np.all(np.diff(slopes) <= 1e-5 * scale)

    def test_trace_is_monotone(self, scalar_model):
        val, trace = semigroup.k_functional_trace(scalar_model, 1, 0.3, [1.0])
        assert val == trace[-1] or val == min(trace)
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))

    def test_exact_mode_needs_hilbert(self):
        m = zoo.make_diagonal([-1.0, -2.0], space_p=1.0)
        with pytest.raises(UnsupportedSpace):
            semigroup.k_functional(m, 1, 1.0, [1.0, 0.0], mode="exact")

    def test_approximate_mode_l1(self):
        # the l^1 problem is separable: per coordinate min(1, (1+|lam|) t)
        m = zoo.make_diagonal([-1.0, -2.0], space_p=1.0)
        x = np.array([1.0, 1.0])
        t = 0.25
        want = min(1.0, 2.0 * t) + min(1.0, 3.0 * t)
        k = semigroup.k_functional(m, 1, t, x)
        assert k == pytest.approx(want, rel=1e-3)

    @pytest.mark.parametrize("seed", range(6))
    def test_socp_oracle(self, seed):
        cvxpy = pytest.importorskip("cvxpy")
        rng = np.random.default_rng(40 + seed)
        n, m_pow = 5, 2
        eigs = -rng.uniform(0.2, 2, n) + 1j * rng.uniform(-2, 2, n)
        mdl = zoo.make_diagonal(eigs)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        t = float(2.0 ** rng.uniform(-3, 3))
        g = np.linalg.matrix_power(np.asarray(mdl.matrix), m_pow)

        # real embedding of the convex splitting problem
        def realify(mat):
            return np.block(
                [[mat.real, -mat.imag], [mat.imag, mat.real]]
            )

        xr = np.concatenate([x.real, x.imag])
        gr = realify(g)
        b = cvxpy.Variable(2 * n)
        objective = cvxpy.Minimize(
            cvxpy.norm(xr - b, 2)
            + t * (cvxpy.norm(b, 2) + cvxpy.norm(gr @ b, 2))
        )
        problem = cvxpy.Problem(objective)
        problem.solve()
        want = problem.value
        got = semigroup.k_functional(mdl, m_pow, t, x)
        assert got == pytest.approx(want, rel=2e-5, abs=1e-8)


class TestInterpolationNorm:
    def test_zero_vector(self, diag_model):
        assert semigroup.interpolation_norm(diag_model, 0.5, 2.0, [0.0, 0.0]) == 0.0

    def test_scalar_dyadic_oracle(self, scalar_model):
        # closed-form K(t, 1) = min(1, 2t) summed over the dyadic grid
        tau, q, m = 0.5, 2.0, 2
        theta = tau / m
        total = sum(
            (2.0 ** (j * theta) * min(1.0, 2.0 * 2.0 ** (-j))) ** 2
            for j in range(-40, 41)
        )
        want = math.sqrt(total)
        got = semigroup.interpolation_norm(scalar_model, tau, q, [1.0])
        assert got == pytest.approx(want, rel=1e-7)

    def test_q_ordering(self, diag_model):
        rng = np.random.default_rng(12)
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        n1 = semigroup.interpolation_norm(diag_model, 0.5, 1.0, x)
        ninf = semigroup.interpolation_norm(diag_model, 0.5, np.inf, x)
        assert n1 >= ninf

    @pytest.mark.parametrize("tau", [0.5, 1.5])
    def test_reiteration_consistency(self, tau):
        m = zoo.make_borichev_tomilov(1.0, 12)
        rng = np.random.default_rng(13)
        x = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        m1 = math.ceil(tau) + 1
        a = semigroup.interpolation_norm(m, tau, 2.0, x, m=m1)
        b = semigroup.interpolation_norm(m, tau, 2.0, x, m=m1 + 1)
        ratio = a / b
        assert 0.25 <= ratio <= 4.0

    def test_truncation_bound_reported(self, diag_model):
        val, tail = semigroup.interpolation_norm_detail(
            diag_model, 0.5, 2.0, [1.0, 1.0]
        )
        assert val > 0
        assert 0 <= tail < 1e-3 * val

    def test_batch_matches_single(self):
        m = zoo.make_borichev_tomilov(1.0, 10)
        rng = np.random.default_rng(14)
        cols = rng.standard_normal((10, 5)) + 1j * rng.standard_normal((10, 5))
        batch = semigroup.interpolation_norms(m, 0.75, 2.0, cols)
        for j in range(5):
            single = semigroup.interpolation_norm(m, 0.75, 2.0, cols[:, j])
            assert batch[j] == pytest.approx(single, rel=1e-9)

    def test_domain_validation(self, diag_model):
        with pytest.raises(DomainError):
            semigroup.interpolation_norm(diag_model, 0.0, 2.0, [1.0, 0.0])
        with pytest.raises(DomainError):
            semigroup.interpolation_norm(diag_model, 3.0, 2.0, [1.0, 0.0], m=2)


class TestFractionalDomainNorm:
    def test_tau_zero(self, diag_model):
        x = np.array([3.0, 4.0])
        got = semigroup.fractional_domain_norm(diag_model, 0.0, x)
        assert got == pytest.approx(2 * 5.0, rel=1e-12)

    def test_scalar_half(self):
        m = zoo.make_diagonal([-4.0])
        assert semigroup.fractional_domain_norm(m, 0.5, [1.0]) == pytest.approx(3.0)

    def test_graph_norm(self, diag_model):
        x = np.array([1.0, 1.0])
        got = semigroup.fractional_domain_norm(diag_model, 1.0, x)
        want = np.linalg.norm(x) + np.linalg.norm(np.asarray(diag_model.matrix) @ x)
        assert got == pytest.approx(want, rel=1e-12)


class TestNormChain:
    def test_interp_frac_comparison(self):
        # q=1 interpolation dominates the fractional norm dominates q=inf,
        # each up to constants that stay put under sample doubling
        m = zoo.make_borichev_tomilov(1.0, 16)
        rng = np.random.default_rng(15)
        tau = 0.75

        def constants(nsamples):
            c1, c2 = np.inf, np.inf
            for _ in range(nsamples):
                x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
                frac = semigroup.fractional_domain_norm(m, tau, x)
                i1 = semigroup.interpolation_norm(m, tau, 1.0, x)
                iinf = semigroup.interpolation_norm(m, tau, np.inf, x)
                assert i1 >= iinf
                c1 = min(c1, i1 / frac)
                c2 = min(c2, frac / iinf)
            return c1, c2

        c1a, c2a = constants(20)
        c1b, c2b = constants(40)
        assert c1b > 0 and c2b > 0
        assert c1b >= 0.5 * c1a and c2b >= 0.5 * c2a

    def test_smoothness_norms_record(self):
        m = zoo.make_diagonal([-1.0, -3.0])
        rec = semigroup.smoothness_norms(m, [1.0, 0.5])
        assert rec.x_norm > 0
        assert all(v > 0 for v in rec.frac_norms.values())
        assert all(v > 0 for v in rec.interp_norms.values())
        ts = sorted(rec.k_samples)
        ks = [rec.k_samples[t] for t in ts]
        assert all(b >= a - 1e-9 for a, b in zip(ks, ks[1:]))


class TestDecayVerification:
    def test_contraction_fractional_bounded_by_one(self, diag_model):
        rep = semigroup.decay_verification(
            diag_model, 0.0, 2.0, norm_kind="fractional", sample_count=30
        )
        # ||T(t)x|| <= ||x|| <= fractional norm for a contraction
        assert rep.sup_constant <= 1.0 + 1e-12
        assert rep.verdict == "pass"

    def test_scale_invariance(self):
        m = zoo.make_borichev_tomilov(1.0, 12)
        rng = np.random.default_rng(16)
        x = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        t_grid = np.geomspace(1, 50, 16)
        norms = semigroup.ambient_norm(
            m, np.stack([zoo.semigroup_apply(m, t, x) for t in t_grid], axis=1)
        )
        den1 = semigroup.interpolation_norm(m, 1.0, 2.0, x)
        den2 = semigroup.interpolation_norm(m, 1.0, 2.0, 2.0 * x)
        r1 = norms.max() / den1
        r2 = (2.0 * norms).max() / den2
        assert r1 == pytest.approx(r2, rel=1e-12)

    def test_rho_negative_rejected(self, diag_model):
        with pytest.raises(DomainError):
            semigroup.decay_verification(diag_model, -1.0, 2.0)

    def test_beta_required(self):
        m = zoo.make_damped_wave(6, lambda x: 1.0)
        with pytest.raises(DomainError):
            semigroup.decay_verification(m, 0.0, 2.0)

    def test_ladder_quick(self):
        rep = semigroup.decay_ladder(
            "borichev_tomilov", {"alpha": 1.0}, [16, 32],
            rho=1.0, p=2.0, sample_count=24,
        )
        assert rep.verdict == "pass"
        assert len(rep.ladder_trend) == 2
        assert rep.to_json_dict()["norm_kind"] == "interp"

    @pytest.mark.parametrize("alpha,n", [(1.0, 32), (2.0, 8)])
    def test_rho_hat_beats_theorem_rate(self, alpha, n):
        # smoothed initial data on the normal family decays at the sharp
        # bounded-semigroup rate, well above the 0.9 * tau/alpha floor;
        # n is chosen so the slowest mode's timescale n^alpha fits the
        # default horizon t <= 100
        m = zoo.make_borichev_tomilov(alpha, n)
        rng = np.random.default_rng(17)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        x = zoo.minus_a_power_apply(m, -alpha, v)
        rec = semigroup.orbit(m, x)
        assert rec.rho_hat >= 0.9


class TestSharpness:
    def test_singleton_dims_inconclusive(self):
        rep = semigroup.sharpness_probe(
            "jordan_growth",
            {"mu_spacing": 1.0, "a_decay": 1.0, "c_gain": 0.0},
            [1.0],
            [32],
            sample_count=20,
        )
        assert rep.classification[1.0] == "inconclusive"
        assert rep.ratios[1.0] == []

    def test_fraction_validation(self):
        with pytest.raises(DomainError):
            semigroup.sharpness_probe(
                "jordan_growth", {}, [1.5], [16, 32], sample_count=10
            )
