"""Information functional, curvature at the Benford point, discrepancy."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact import (DomainError, UndefinedRatioError, benford_joint, cmi,
                      cmi_gradient, cmi_hessian, cmi_hessian_spectrum,
                      count_triples_geometric, i_infinity, l2_distance,
                      markov_projection, quadratic_ratios, star_discrepancy,
                      tangent_basis)
from artifact.infocore import cmi_ratio_form

from conftest import oracle_star_discrepancy


def random_simplex(rng, concentration=1.0):
    p = rng.dirichlet(np.full(900, concentration))
    p[-1] += 1.0 - p.sum()  # pin the float sum to exactly 1
    return p


simplex_strategy = st.integers(0, 2**32 - 1).map(
    lambda seed: random_simplex(np.random.default_rng(seed)))


class TestCmi:
    def test_uniform_is_independent(self):
        p = np.full(900, 1 / 900)
        p[-1] += 1.0 - p.sum()
        assert abs(cmi(p)) < 1e-12

    def test_accepts_triple_counts(self):
        tc = count_triples_geometric(2, 1000)
        assert cmi(tc) == cmi(tc.to_probs())

    def test_validation(self):
        with pytest.raises(DomainError):
            cmi(np.full(100, 1 / 100))
        bad = np.full(900, 1 / 900)
        bad[0] = -bad[0]
        with pytest.raises(DomainError):
            cmi(bad)
        with pytest.raises(DomainError):
            cmi(np.full(900, 1 / 899))

    @settings(max_examples=30, deadline=None)
    @given(p=simplex_strategy)
    def test_nonnegative(self, p):
        assert cmi(p) >= -1e-12

    @settings(max_examples=30, deadline=None)
    @given(p=simplex_strategy)
    def test_entropy_and_ratio_forms_agree(self, p):
        assert abs(cmi(p) - cmi_ratio_form(p)) < 1e-12

    def test_zero_cells_are_harmless(self):
        p = np.zeros(900)
        p[:450] = 1 / 450
        p[449] += 1.0 - p.sum()
        v = cmi(p)
        assert np.isfinite(v)
        assert v >= -1e-12


class TestIInfinity:
    def test_window(self):
        assert 3.370e-5 <= i_infinity() <= 3.380e-5

    def test_dual_route_agreement(self):
        # 50-digit arithmetic route vs the float plug-in at the exact
        # Benford point: ten significant digits in common.
        assert abs(cmi(benford_joint()) - i_infinity()) < 1e-14

    def test_cached(self):
        assert i_infinity() == i_infinity()


class TestMarkov:
    def test_distance_at_benford(self):
        _, dist = markov_projection(benford_joint())
        assert dist == pytest.approx(3.2607e-4, rel=5e-3)

    def test_projection_kills_cmi(self):
        q, _ = markov_projection(benford_joint())
        assert cmi(q) < 1e-12

    def test_projection_is_idempotent(self):
        q, _ = markov_projection(benford_joint())
        q2, dist2 = markov_projection(q)
        assert dist2 < 1e-15
        assert np.allclose(q, q2, atol=1e-15)

    def test_preserves_pair_marginals(self):
        p = count_triples_geometric(3, 2000).to_probs()
        p[p == 0] = 0.0
        q, _ = markov_projection(p)
        p3 = p.reshape(9, 10, 10)
        q3 = q.reshape(9, 10, 10)
        assert np.allclose(p3.sum(axis=2), q3.sum(axis=2), atol=1e-15)
        assert np.allclose(p3.sum(axis=0), q3.sum(axis=0), atol=1e-15)


class TestGradient:
    def test_projected_norm_at_benford(self):
        rep = cmi_gradient(benford_joint())
        assert rep.projected_norm == pytest.approx(0.2828, abs=1e-3)
        assert rep.component_mean == pytest.approx(3.08e-5, rel=0.02)
        assert rep.component_sd == pytest.approx(9.43e-3, rel=0.02)

    def test_projection_removes_mean(self):
        rep = cmi_gradient(benford_joint())
        assert abs(rep.projected.sum()) < 1e-12
        want = rep.gradient - rep.gradient.mean()
        assert np.allclose(rep.projected, want, atol=1e-15)

    def test_finite_difference_directional(self):
        p = benford_joint().astype(float)
        g = cmi_gradient(p).gradient
        rng = np.random.default_rng(11)
        h = 1e-7
        for _ in range(20):
            v = rng.standard_normal(900)
            v -= v.mean()
            v /= np.linalg.norm(v)
            fd = (cmi(p + h * v) - cmi(p - h * v)) / (2 * h)
            assert fd == pytest.approx(g @ v, rel=1e-3, abs=1e-9)

    def test_zero_cell_rejected(self):
        p = np.zeros(900)
        p[:450] = 1 / 450
        p[449] += 1.0 - p.sum()
        with pytest.raises(DomainError):
            cmi_gradient(p)


class TestHessian:
    def test_symmetric(self):
        H = cmi_hessian(benford_joint())
        assert np.array_equal(H, H.T) or np.allclose(H, H.T, atol=1e-12)

    def test_hessian_vector_finite_difference(self):
        p = benford_joint().astype(float)
        H = cmi_hessian(p)
        rng = np.random.default_rng(3)
        h = 1e-7
        for _ in range(10):
            v = rng.standard_normal(900)
            v -= v.mean()
            v /= np.linalg.norm(v)
            gp = cmi_gradient(p + h * v).gradient
            gm = cmi_gradient(p - h * v).gradient
            fd = (gp - gm) / (2 * h)
            rel = np.linalg.norm(fd - H @ v) / np.linalg.norm(H @ v)
            assert rel < 1e-7

    def test_second_order_taylor(self):
        p = benford_joint().astype(float)
        g = cmi_gradient(p).gradient
        H = cmi_hessian(p)
        base = cmi(p)
        rng = np.random.default_rng(5)
        for _ in range(5):
            v = rng.standard_normal(900)
            v -= v.mean()
            v /= np.linalg.norm(v)
            d = 1e-5 * v
            lhs = cmi(p + d)
            rhs = base + g @ d + 0.5 * d @ H @ d
            assert abs(lhs - rhs) < 5e-12

    def test_spectrum_shape_and_counts(self):
        spectrum = cmi_hessian_spectrum()
        assert spectrum.eigenvalues.shape == (899,)
        assert spectrum.n_pos + spectrum.n_neg + spectrum.n_null == 899
        assert spectrum.n_pos == 760
        assert spectrum.n_neg == 40
        assert spectrum.n_null == 99
        assert spectrum.op_norm == pytest.approx(3253.0, abs=1.0)
        assert spectrum.lambda_min == pytest.approx(-7.846, abs=1e-2)
        assert spectrum.lambda_max == spectrum.op_norm

    def test_null_count_tracks_markov_fibers(self):
        # 99 exact null directions: within each of the 99 nontrivial
        # (d1, d2) x (d2, d3) fibers the functional is flat to second
        # order along the Markov family.
        spectrum = cmi_hessian_spectrum()
        mags = np.sort(np.abs(spectrum.eigenvalues))
        assert mags[98] < 1e-9     # the 99 null directions
        assert mags[99] > 1e-8     # clear gap to the next eigenvalue

    def test_tangent_basis_orthonormal(self):
        B = tangent_basis()
        assert B.shape == (900, 899)
        assert np.allclose(B.T @ B, np.eye(899), atol=1e-12)
        assert np.allclose(B.T @ np.ones(900), 0.0, atol=1e-12)
        assert B is tangent_basis()


class TestQuadraticRatios:
    def test_real_orbit_sanity(self):
        p = count_triples_geometric(2, 5000)
        r = quadratic_ratios(p)
        assert r["quad_ratio"] > 0
        assert r["linear_ratio"] > 0
        assert np.isfinite(r["quad_ratio"])

    def test_zero_displacement_rejected(self):
        with pytest.raises(UndefinedRatioError):
            quadratic_ratios(benford_joint())


class TestStarDiscrepancy:
    def test_singleton(self):
        assert star_discrepancy([0.5]) == pytest.approx(0.5)

    def test_centered_grid(self):
        assert star_discrepancy([0.25, 0.75]) == pytest.approx(0.25)
        n = 10
        pts = [(2 * i - 1) / (2 * n) for i in range(1, n + 1)]
        assert star_discrepancy(pts) == pytest.approx(1 / (2 * n))

    def test_validation(self):
        with pytest.raises(DomainError):
            star_discrepancy([])
        with pytest.raises(DomainError):
            star_discrepancy([0.5, 1.5])

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            pts = rng.random(100)
            got = star_discrepancy(pts)
            want = oracle_star_discrepancy(pts)
            assert got == pytest.approx(want, abs=1e-12)


class TestL2Distance:
    def test_known_value(self):
        p = np.zeros(900)
        q = np.zeros(900)
        p[0] = 1.0
        q[1] = 1.0
        assert l2_distance(p, q) == pytest.approx(np.sqrt(2.0))

    def test_zero_on_equal(self):
        assert l2_distance(benford_joint(), benford_joint()) == 0.0
