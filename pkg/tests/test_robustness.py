import math

import numpy as np
import pytest

import oracles
from phasestab import (
    BudgetExceededError,
    Frame,
    NotAFrameError,
    QepsConfig,
    ValidationError,
    analysis_map,
    delta,
    delta_x,
    dist_d,
    eps0,
    frame_bounds,
    lambdaF,
    lipschitz_constants,
    mercedes_benz_frame,
    omega,
    omega_witness_point,
    q_eps_brackets,
    q_eps_estimate,
    standard_basis_frame,
    tau,
    u_ratio,
    u_ratios_batch,
    v_ratio,
    v_ratios_batch,
    worst_case_witness,
)

MB3 = mercedes_benz_frame()
SQ2INV = math.sqrt(0.5)


def random_frame(n, m, seed):
    return Frame(np.random.default_rng(seed).standard_normal((n, m)))


class TestSubsetConstants:
    def test_mercedes_benz_values(self):
        d, _, d_exact = delta(MB3)
        w, _, w_exact = omega(MB3)
        assert d == pytest.approx(SQ2INV, abs=1e-12)
        assert w == pytest.approx(SQ2INV, abs=1e-12)
        assert tau(MB3) == pytest.approx(SQ2INV, abs=1e-12)
        assert d_exact and w_exact

    def test_bruteforce_agreement(self):
        for seed in range(8):
            fr = random_frame(3, 6, seed + 300)
            d, mask, _ = delta(fr)
            assert d == pytest.approx(oracles.delta_bruteforce(fr.matrix), abs=1e-9)
            w, _, _ = omega(fr)
            assert w == pytest.approx(oracles.omega_bruteforce(fr.matrix), abs=1e-9)
            assert tau(fr) == pytest.approx(oracles.tau_bruteforce(fr.matrix), abs=1e-9)
            # the returned mask actually achieves the minimum
            sc = mask.complement()
            achieved = math.sqrt(
                oracles.subset_sigma_n(fr.matrix, mask.indices()) ** 2
                + oracles.subset_sigma_n(fr.matrix, sc.indices()) ** 2
            )
            assert achieved == pytest.approx(d, abs=1e-9)

    def test_degenerate_frame_delta_zero(self):
        d, mask, _ = delta(standard_basis_frame(2))
        assert d == 0.0

    def test_sampled_is_upper_bound(self):
        fr = random_frame(3, 10, 17)
        d_exact, _, _ = delta(fr)
        d_sampled, _, exact_flag = delta(fr, mode="sampled", budget=64, seed=1)
        assert not exact_flag
        assert d_sampled >= d_exact - 1e-12

    def test_omega_budget(self):
        # a non-full-spark frame with m = 40 forces 2^m enumeration
        mat = np.random.default_rng(9).standard_normal((3, 40))
        mat[:, 1] = mat[:, 0]  # repeated column kills full spark
        with pytest.raises(BudgetExceededError):
            omega(Frame(mat), mode="exact")

    def test_tau_needs_rank_n_subset(self):
        with pytest.raises(NotAFrameError):
            tau(Frame(np.array([[1.0, 2.0], [0.0, 0.0]])))


class TestLambdaF:
    def test_mercedes_benz(self):
        val, x_star = lambdaF(MB3)
        assert val == pytest.approx((9.0 / 8.0) ** 0.25, abs=1e-9)

    def test_grid_oracle_2d(self):
        for seed in range(4):
            fr = random_frame(2, 4, seed + 40)
            val, _ = lambdaF(fr)
            assert val == pytest.approx(
                oracles.lambda_grid_2d(fr.matrix, 20001), rel=1e-5
            )

    def test_is_max_over_probes(self):
        fr = random_frame(3, 6, 77)
        val, x_star = lambdaF(fr)
        rng = np.random.default_rng(5)
        for _ in range(200):
            x = rng.standard_normal(3)
            x /= np.linalg.norm(x)
            lam = np.linalg.eigvalsh(oracles.r_matrix_naive(fr.matrix, x)).max()
            assert lam ** 0.25 <= val + 1e-6


class TestPointwiseThresholds:
    def test_eps0_mercedes_benz(self):
        # at e1 the coefficients are (0, ±sqrt(3)/2): smallest active is sqrt(3)/2
        assert eps0(MB3, np.array([1.0, 0.0])) == pytest.approx(
            math.sqrt(3.0) / 2.0, abs=1e-12
        )

    def test_delta_x_known_value(self):
        assert delta_x(MB3, np.array([1.0, 0.0])) == pytest.approx(
            0.71744, abs=1e-4
        )

    def test_scale_with_x(self):
        x = np.array([0.3, -0.9])
        for c in (0.5, 2.0, 7.0):
            assert eps0(MB3, c * x) == pytest.approx(c * eps0(MB3, x), rel=1e-12)


class TestRatios:
    def test_u_ratio_definition(self):
        fr = random_frame(3, 6, 1)
        rng = np.random.default_rng(6)
        x, y = rng.standard_normal((2, 3))
        num = np.linalg.norm(analysis_map(fr, x) - analysis_map(fr, y))
        assert u_ratio(fr, x, y) == pytest.approx(num / dist_d(x, y), rel=1e-9)

    def test_batch_matches_scalar(self):
        fr = random_frame(3, 6, 2)
        rng = np.random.default_rng(8)
        xs = rng.standard_normal((50, 3))
        ys = rng.standard_normal((50, 3))
        u_batch = u_ratios_batch(fr, xs, ys)
        v_batch = v_ratios_batch(fr, xs, ys)
        for i in range(50):
            assert u_batch[i] == pytest.approx(u_ratio(fr, xs[i], ys[i]), rel=1e-9)
            assert v_batch[i] == pytest.approx(v_ratio(fr, xs[i], ys[i]), rel=1e-9)

    def test_zero_distance_is_nan(self):
        fr = MB3
        x = np.array([[0.6, 0.8]])
        assert np.isnan(u_ratios_batch(fr, x, -x)[0])


class TestQeps:
    def test_brackets_mercedes_benz(self):
        br = q_eps_brackets(MB3, 0.1)
        assert br["exact"] == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert br["upper"] == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert br["q_inf"] == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert not br["unbounded"]

    def test_brackets_large_eps(self):
        br = q_eps_brackets(MB3, 100.0)
        assert br["exact"] is None
        assert br["lower"] == pytest.approx(0.01, rel=1e-12)

    def test_brackets_degenerate(self):
        br = q_eps_brackets(standard_basis_frame(2), 0.5)
        assert br["unbounded"] and br["upper"] == np.inf

    def test_rejects_bad_eps(self):
        with pytest.raises(ValidationError):
            q_eps_brackets(MB3, -1.0)

    def test_estimate_reaches_theory_small_eps(self):
        x = np.array([0.6, 0.8])
        eps = 0.5 * delta_x(MB3, x)
        rep = q_eps_estimate(MB3, x, eps)
        A, _ = frame_bounds(MB3)
        assert rep.Q_theory == pytest.approx(1.0 / math.sqrt(A), rel=1e-12)
        assert rep.Q_estimate >= rep.Q_theory - 1e-3
        assert rep.Q_estimate <= rep.bracket[1] + 1e-9

    def test_estimate_witness_is_feasible(self):
        x = np.array([0.6, 0.8])
        rep = q_eps_estimate(MB3, x, 0.3)
        _, _, y = rep.witness
        gap = np.linalg.norm(analysis_map(MB3, x) - analysis_map(MB3, y))
        assert gap <= rep.eps * (1 + 1e-9)
        assert dist_d(x, y) == pytest.approx(rep.Q_estimate * rep.eps, rel=1e-6)

    def test_sup_over_x_reaches_inverse_omega(self):
        # the extremal construction point pushes Q_eps(x) up to 1/omega
        eps = 0.05
        x = omega_witness_point(MB3, eps)
        rep = q_eps_estimate(MB3, x, eps)
        assert rep.Q_estimate >= math.sqrt(2.0) - 1e-3

    def test_scaling_invariance(self):
        x = np.array([0.6, 0.8])
        r1 = q_eps_estimate(MB3, x, 0.2)
        r2 = q_eps_estimate(MB3, 3.0 * x, 0.6)
        assert r2.Q_estimate == pytest.approx(r1.Q_estimate, rel=1e-6)


class TestWorstCaseWitness:
    def test_ratio_attains_inverse_delta(self):
        x, y, eps = worst_case_witness(MB3)
        gap = np.linalg.norm(analysis_map(MB3, x) - analysis_map(MB3, y))
        assert gap <= eps + 1e-12
        assert dist_d(x, y) / eps >= 1.0 / math.sqrt(2.0) * math.sqrt(2.0) - 1e-6

    def test_degenerate_frame_gives_collision(self):
        fr = standard_basis_frame(2)
        x, y, eps = worst_case_witness(fr)
        assert eps == 0.0
        np.testing.assert_allclose(
            analysis_map(fr, x), analysis_map(fr, y), atol=1e-12
        )
        assert dist_d(x, y) > 0.1


class TestLipschitzConstants:
    def test_chain_on_random_frames(self):
        for seed in range(6):
            fr = random_frame(3, 6, seed + 900)
            c = lipschitz_constants(fr)
            assert c.Delta <= c.omega + 1e-9
            assert c.omega <= c.sqrtA + 1e-9
            assert c.sqrtA <= c.sqrtB + 1e-9
            assert c.mu0 >= 0.0

    def test_mercedes_benz_constants(self):
        c = lipschitz_constants(MB3)
        assert c.Delta == pytest.approx(SQ2INV, abs=1e-9)
        assert c.omega == pytest.approx(SQ2INV, abs=1e-9)
        assert c.sqrtA == pytest.approx(math.sqrt(1.5), abs=1e-9)
        assert c.sqrtB == pytest.approx(math.sqrt(1.5), abs=1e-9)
        assert c.mu0 == pytest.approx(math.sqrt(0.375), abs=1e-6)
        assert c.lambdaF == pytest.approx((9.0 / 8.0) ** 0.25, abs=1e-6)
        assert c.exact["Delta"] and c.exact["omega"]

    def test_empirical_ratios_respect_bounds(self):
        fr = random_frame(3, 6, 901)
        c = lipschitz_constants(fr)
        rng = np.random.default_rng(10)
        xs = rng.standard_normal((2000, 3))
        ys = rng.standard_normal((2000, 3))
        u = u_ratios_batch(fr, xs, ys)
        v = v_ratios_batch(fr, xs, ys)
        ok = ~np.isnan(u)
        assert np.all(u[ok] >= c.Delta - 1e-7)
        assert np.all(u[ok] <= c.sqrtB + 1e-7)
        ok = ~np.isnan(v)
        assert np.all(v[ok] >= c.mu0 - 1e-7)
        assert np.all(v[ok] <= c.lambdaF**2 + 1e-7)
