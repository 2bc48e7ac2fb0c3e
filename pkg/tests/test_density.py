import math

import numpy as np
import pytest

from npcmi import parametric as P
from npcmi.bandwidth import rule_of_thumb
from npcmi.density import (
    Bandwidth,
    CopulaDensityGrid,
    EvaluationGrid,
    kernel_moments,
    ll_from_moments,
    local_fit_moments,
    local_likelihood_density,
    naive_density,
    normalize_copula,
)
from npcmi.errors import DegenerateInputError, DomainError
from npcmi.transform import ProbitFrame, probit_pca, pseudo_observations

from oracles import brute_force_local_density, gaussian_kernel


def _frame(points):
    points = np.asarray(points, dtype=float)
    return ProbitFrame(points, np.eye(2), np.ones(2))


@pytest.fixture(scope="module")
def fitted():
    uv = P.rosenblatt_sample(P.CopulaSpec.student_t(0.4, 2.0), 512, 21)
    frame = probit_pca(pseudo_observations(uv))
    return frame, rule_of_thumb(frame), EvaluationGrid(frame, 60)


class TestGrid:
    def test_midpoints(self, fitted):
        frame, _, _ = fitted
        g = EvaluationGrid(frame, 4)
        np.testing.assert_allclose(g.mid, [0.125, 0.375, 0.625, 0.875])
        assert g.cell_area_uv == 1 / 16
        np.testing.assert_allclose(g.pq, frame.forward(g.uv_midpoints))

    def test_rejects_small_k(self, fitted):
        with pytest.raises(DomainError):
            EvaluationGrid(fitted[0], 1)

    def test_bandwidth_validation(self):
        with pytest.raises(DomainError):
            Bandwidth(0.0, 1.0)


class TestMoments:
    def test_brute_force_resummation(self, rng, fitted):
        frame, bw, _ = fitted
        at = rng.standard_normal((5, 2))
        m = kernel_moments(frame, at, bw)
        for g, (p, q) in enumerate(at):
            dp = frame.points[:, 0] - p
            dq = frame.points[:, 1] - q
            w = gaussian_kernel(dp, bw.bp) * gaussian_kernel(dq, bw.bq)
            ref = [np.mean(w * t) for t in (1, dp, dq, dp * dp, dq * dq)]
            np.testing.assert_allclose(m[:5, g], ref, rtol=1e-12, atol=1e-300)
            assert m[5, g] == pytest.approx(w.sum() ** 2 / np.sum(w * w), rel=1e-12)

    def test_symmetric_data_odd_moments_vanish(self):
        frame = _frame([[1, 0], [-1, 0], [0, 2], [0, -2]])
        m = kernel_moments(frame, np.zeros((1, 2)), Bandwidth(0.7, 0.9))
        assert abs(m[1, 0]) < 1e-16 and abs(m[2, 0]) < 1e-16

    def test_single_sample_offset(self):
        frame = _frame([[0.3, 0.0]])
        m = kernel_moments(frame, np.zeros((1, 2)), Bandwidth(0.5, 0.5))
        assert m[1, 0] / m[0, 0] == pytest.approx(0.3, rel=1e-14)

    def test_single_kernel_value(self):
        frame = _frame([[0.0, 0.0]])
        bw = Bandwidth(0.4, 0.25)
        m = kernel_moments(frame, np.zeros((1, 2)), bw)
        assert m[0, 0] == pytest.approx(1 / (2 * math.pi * 0.4 * 0.25), rel=1e-14)

    def test_dataclass_roundtrip(self, fitted):
        frame, bw, grid = fitted
        mom = local_fit_moments(frame, bw, grid)
        assert mom.as_array().shape == (6, grid.k**2)
        assert np.all(mom.f3 >= 0) and np.all(mom.f4 >= 0)


class TestLocalLikelihood:
    def test_zero_first_moments(self):
        bw = Bandwidth(0.5, 0.4)
        m = np.array([[0.2], [0.0], [0.0], [0.2 * 0.3], [0.2 * 0.1]])
        f, deg = ll_from_moments(m, bw)
        e_p = 0.5 / math.sqrt(0.3)
        e_q = 0.4 / math.sqrt(0.1)
        assert f[0] == pytest.approx(0.2 * e_p * e_q, rel=1e-14)
        assert not deg[0]

    def test_negative_variance_falls_back(self):
        bw = Bandwidth(0.5, 0.5)
        m = np.array([[0.2], [0.1], [0.0], [0.2 * 0.01], [0.2 * 0.1]])
        f, deg = ll_from_moments(m, bw)
        assert f[0] == 0.2 and deg[0]

    def test_low_effective_sample_falls_back(self):
        bw = Bandwidth(0.5, 0.5)
        m = np.array([[0.2], [0.0], [0.0], [0.2 * 0.3], [0.2 * 0.1], [2.5]])
        f, deg = ll_from_moments(m, bw)
        assert f[0] == 0.2 and deg[0]

    def test_effective_sample_ramp(self):
        bw = Bandwidth(0.5, 0.5)
        base = np.array([[0.2], [0.0], [0.0], [0.2 * 0.3], [0.2 * 0.1]])
        full = ll_from_moments(base, bw)[0][0]
        n_eff = np.array([[2.999], [3.0], [4.0], [5.0], [50.0]])
        m = np.hstack([np.vstack([base, row]) for row in n_eff])
        f, deg = ll_from_moments(m, bw)
        assert f[1] == 0.2 and f[2] == pytest.approx(0.5 * (0.2 + full), rel=1e-14)
        assert f[3] == f[4] == pytest.approx(full, rel=1e-14)
        assert list(deg) == [True, True, True, False, False]

    def test_floor(self):
        f, deg = ll_from_moments(np.zeros((6, 1)), Bandwidth(1.0, 1.0))
        assert f[0] == 0.0 and not deg[0]

    def test_matches_likelihood_maximizer(self, rng, fitted):
        frame, bw, grid = fitted
        m = kernel_moments(frame, grid.pq, bw)
        f_ll, deg = ll_from_moments(m, bw)
        cells = rng.choice(np.flatnonzero(~deg & (m[0] > 1e-12)), 6, replace=False)
        for c in cells:
            ref = brute_force_local_density(frame.points, grid.pq[c], bw.bp, bw.bq)
            assert f_ll[c] == pytest.approx(ref, rel=1e-4)

    def test_corrects_smoothing_bias(self):
        # at the origin of independent standard normal data the naive
        # estimate is biased down by the kernel convolution
        errs_naive, errs_ll = [], []
        bw = Bandwidth(0.4, 0.4)
        for s in range(100):
            pts = np.random.default_rng(s).standard_normal((2000, 2))
            m = kernel_moments(_frame(pts), np.zeros((1, 2)), bw)
            errs_naive.append(abs(m[0, 0] - 1 / (2 * math.pi)))
            errs_ll.append(abs(ll_from_moments(m, bw)[0][0] - 1 / (2 * math.pi)))
        assert np.mean(errs_ll) < np.mean(errs_naive)


class TestNaive:
    def test_convolution_limit(self):
        pts = np.random.default_rng(1).standard_normal((100_000, 2))
        bw = Bandwidth(0.3, 0.5)
        m = kernel_moments(_frame(pts), np.zeros((1, 2)), bw)
        ref = 1 / (2 * math.pi * math.sqrt(1 + 0.09) * math.sqrt(1 + 0.25))
        assert m[0, 0] == pytest.approx(ref, rel=0.02)

    def test_mass_in_pq_space(self, fitted):
        frame, bw, _ = fitted
        grid = EvaluationGrid(frame, 200)
        f = kernel_moments(frame, grid.pq, bw)[0]
        assert np.sum(f * grid.pq_weight) == pytest.approx(1.0, abs=0.02)

    def test_copula_division(self, fitted):
        frame, bw, grid = fitted
        c = naive_density(frame, bw, grid)
        f = kernel_moments(frame, grid.pq, bw)[0].reshape(grid.k, grid.k)
        np.testing.assert_allclose(c.values, f / grid.phi_prod, rtol=1e-14)

    def test_finite_nonnegative(self, fitted):
        frame, bw, grid = fitted
        c = local_likelihood_density(local_fit_moments(frame, bw, grid), bw, grid, frame)
        assert np.all(np.isfinite(c.values)) and np.all(c.values >= 0)


class TestNormalize:
    def test_constant_fixed_point(self):
        out = normalize_copula(CopulaDensityGrid(np.ones((7, 7))))
        np.testing.assert_array_equal(out.values, np.ones((7, 7)))

    def test_product_density(self):
        k = 10
        mid = (np.arange(k) + 0.5) / k
        out = normalize_copula(CopulaDensityGrid(4 * np.outer(mid, mid)))
        np.testing.assert_allclose(out.values, 1.0, atol=1e-3)

    def test_fitted_margins(self, fitted):
        frame, bw, _ = fitted
        grid = EvaluationGrid(frame, 100)
        c = local_likelihood_density(local_fit_moments(frame, bw, grid), bw, grid, frame)
        out = normalize_copula(c, 1000)
        assert out.values.mean() == pytest.approx(1.0, abs=1e-6)
        assert out.max_marginal_deviation() <= 1e-3

    def test_zero_density(self):
        with pytest.raises(DegenerateInputError):
            normalize_copula(CopulaDensityGrid(np.zeros((3, 3))))

    def test_invalid_density(self):
        with pytest.raises(DomainError):
            normalize_copula(CopulaDensityGrid(np.array([[1.0, -1.0], [1.0, 1.0]])))


def test_csv_roundtrip(tmp_path):
    grid = CopulaDensityGrid(np.random.default_rng(0).uniform(0, 2, (5, 5)))
    path = tmp_path / "c.csv"
    grid.to_csv(path)
    assert path.read_text().splitlines()[0] == "5"
    np.testing.assert_array_equal(CopulaDensityGrid.from_csv(path).values, grid.values)
