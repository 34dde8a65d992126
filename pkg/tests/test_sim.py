"""Process samplers and the confounded-instance generator."""

import math

import numpy as np
import pytest

from deconfound import (
    BandLimitedProcess,
    BasisKind,
    ConfigurationError,
    OUProcess,
    SimConfig,
    build_basis,
    generate,
    make_rng,
    sample_band_limited,
    sample_ou,
    transform,
)


class TestOu:
    def test_lag_one_autocorrelation(self):
        # exact discretization: corr(V_k, V_{k+1}) = exp(drift * dt); pool
        # lag-1 pairs from 1000 stationary paths of 100 steps at dt = 1/100
        rng = make_rng(0)
        first, second = [], []
        for _ in range(1000):
            v = sample_ou(100, 1.0, 1.0, -50.0, rng)
            first.append(v[:-1])
            second.append(v[1:])
        corr = np.corrcoef(np.concatenate(first), np.concatenate(second))[0, 1]
        assert corr == pytest.approx(math.exp(-0.5), abs=0.02)

    def test_stationary_variance(self):
        # Var = sigma^2 / (-2 drift) = 0.625 for (sigma, drift) = (1, -0.8)
        rng = make_rng(1)
        samples = np.concatenate([sample_ou(100, 1.0, 1.0, -0.8, rng) for _ in range(1000)])
        assert samples.var() == pytest.approx(0.625, rel=0.05)

    def test_same_seed_same_path(self):
        a = sample_ou(64, 1.0, 1.0, -0.5, make_rng(7))
        b = sample_ou(64, 1.0, 1.0, -0.5, make_rng(7))
        assert np.array_equal(a, b)

    def test_parameter_validation(self):
        with pytest.raises(ConfigurationError):
            sample_ou(10, 1.0, 1.0, 0.5, make_rng(0))
        with pytest.raises(ConfigurationError):
            OUProcess(sigma=-1.0, drift=-0.5)
        with pytest.raises(ConfigurationError):
            OUProcess(sigma=1.0, drift=0.0)


class TestBandLimited:
    def test_single_constant_component(self):
        basis = build_basis(BasisKind.COSINE, 16)
        v = sample_band_limited(basis, [1], 1.0, make_rng(3))
        assert np.max(np.abs(v - v[0])) < 1e-12
        assert v[0] == pytest.approx(transform(v, basis)[0], abs=1e-12)

    def test_transform_support_is_contained(self):
        basis = build_basis(BasisKind.COSINE, 32)
        support = [2, 5, 11]
        v = sample_band_limited(basis, support, 1.0, make_rng(4))
        coeffs = transform(v, basis)
        off = np.setdiff1d(np.arange(1, 33), support)
        assert np.max(np.abs(coeffs[off - 1])) < 1e-10

    def test_coefficient_variance(self):
        basis = build_basis(BasisKind.COSINE, 8)
        rng = make_rng(5)
        draws = np.array(
            [transform(sample_band_limited(basis, [3], 1.7, rng), basis)[2] for _ in range(10_000)]
        )
        assert draws.var() == pytest.approx(1.7**2, rel=0.05)

    def test_out_of_range_support_rejected(self):
        basis = build_basis(BasisKind.COSINE, 8)
        with pytest.raises(ValueError, match="1..8"):
            sample_band_limited(basis, [1, 9], 1.0, make_rng(0))


class TestGenerate:
    def test_unconfounded_noiseless_is_exactly_linear(self):
        cfg = SimConfig(n=32, conf_prob=0.0, sigma_eta2=0.0, seed=11)
        x, y, truth = generate(cfg)
        assert truth.g_set.size == 0
        assert np.max(np.abs(y - x @ truth.beta)) < 1e-12

    def test_confounded_count_is_round_of_fraction(self):
        x, y, truth = generate(SimConfig(n=400, conf_prob=0.25, seed=1))
        assert truth.g_set.size == 100
        assert 60 <= truth.g_set.size <= 140

    def test_confounder_is_sparse_on_g(self):
        cfg = SimConfig(n=64, sigma_eta2=1.0, seed=2)
        basis = build_basis(BasisKind.COSINE, 64)
        x, y, truth = generate(cfg, basis=basis)
        coeffs = transform(truth.u_time, basis)
        off = np.setdiff1d(np.arange(1, 65), truth.g_set)
        assert np.max(np.abs(coeffs[off - 1])) < 1e-10

    def test_dense_noise_breaks_sparsity_but_model_holds(self):
        cfg = SimConfig(n=64, sigma_eta2=0.5, dense_u_noise_std=1.0, seed=3)
        basis = build_basis(BasisKind.COSINE, 64)
        x, y, truth = generate(cfg, basis=basis)
        coeffs = transform(truth.u_time, basis)
        off = np.setdiff1d(np.arange(1, 65), truth.g_set)
        assert np.max(np.abs(coeffs[off - 1])) > 1e-6
        resid = y - x @ truth.beta - truth.u_time - truth.eta_time
        assert np.max(np.abs(resid)) < 1e-12

    def test_frozen_draw_order(self):
        # guards the documented draw order (G, confounder, covariate noise,
        # response noise, dense noise): values frozen from a reference run;
        # tolerance absorbs BLAS summation-order differences only
        x, y, truth = generate(SimConfig(n=8, sigma_eta2=1.0, seed=12345))
        assert list(truth.g_set) == [4, 7]
        assert np.allclose(
            x[:3, 0],
            [1.0248613108311133, -0.6611449133380258, 2.5321575017482623],
            atol=1e-12,
        )
        assert np.allclose(
            y[:3],
            [6.614156441767336, -3.84131342342975, 7.936988797643717],
            atol=1e-12,
        )
        assert np.allclose(
            truth.u_time[:3],
            [2.4713227096005737, -1.940500710518041, -0.6716263845468935],
            atol=1e-12,
        )

    def test_bit_identical_reproducibility(self):
        cfg = SimConfig(n=48, seed=12345)
        x1, y1, t1 = generate(cfg)
        x2, y2, t2 = generate(cfg)
        assert np.array_equal(x1, x2) and np.array_equal(y1, y2)
        assert np.array_equal(t1.g_set, t2.g_set)
        assert np.array_equal(t1.u_time, t2.u_time)

    def test_confounder_enters_every_column(self):
        cfg = SimConfig(n=32, d=3, seed=4)
        x, y, truth = generate(cfg)
        for c in range(3):
            assert np.allclose(x[:, c] - truth.eps_x_time[:, c], truth.u_time, atol=1e-12)

    def test_ou_confounder_masked(self):
        cfg = SimConfig(
            n=64,
            eps_process=OUProcess(1.0, -0.8),
            u_process=OUProcess(1.0, -0.5),
            seed=5,
        )
        basis = build_basis(BasisKind.COSINE, 64)
        x, y, truth = generate(cfg, basis=basis)
        coeffs = transform(truth.u_time, basis)
        off = np.setdiff1d(np.arange(1, 65), truth.g_set)
        assert np.max(np.abs(coeffs[off - 1])) < 1e-10

    def test_haar_power_of_two_enforced(self):
        with pytest.raises(ConfigurationError):
            generate(SimConfig(n=100, basis_kind=BasisKind.HAAR, seed=0))

    def test_explicit_support_above_n_rejected(self):
        cfg = SimConfig(n=8, u_process=BandLimitedProcess(support=tuple(range(1, 51))), seed=0)
        with pytest.raises(ValueError):
            generate(cfg)

    def test_mismatched_prebuilt_basis_rejected(self):
        basis = build_basis(BasisKind.COSINE, 16)
        with pytest.raises(ConfigurationError):
            generate(SimConfig(n=32, seed=0), basis=basis)

    def test_frequency_noise_variance_shrinks(self):
        # quick version of the distributional check: component variance of the
        # transformed noise is sigma^2 / n within 10% over 5000 replicates
        n, reps = 32, 5000
        basis = build_basis(BasisKind.COSINE, n)
        rng = make_rng(6)
        eta = rng.normal(0.0, 1.0, size=(reps, n))
        comps = eta @ basis.matrix / n
        rel = np.abs(comps.var(axis=0, ddof=1) - 1.0 / n) * n
        assert rel.max() < 0.10

    def test_beta_vector_shape_checked(self):
        with pytest.raises(ConfigurationError):
            SimConfig(n=8, d=2, beta=(1.0, 2.0, 3.0)).beta_vector()
