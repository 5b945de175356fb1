import math

import numpy as np
import pytest

from rdbounds import (
    BAProblem,
    EpsilonLoss,
    Gaussian,
    Laplacian,
    auto_span,
    ba_curve,
    ba_iterate,
    build_problem,
)

import oracles

ALPHA = math.sqrt(2.0)
LAP = Laplacian(ALPHA)
GAU = Gaussian(1.0)


class TestBuildProblem:
    def test_construction_contract(self):
        prob = build_problem(GAU, EpsilonLoss(0.1), -2.0, n=2001, span_sigmas=8.0)
        assert prob.p_mass.sum() == pytest.approx(1.0, abs=1e-12)
        assert prob.x_grid.size == 2001
        assert prob.x_grid[1000] == 0.0
        assert GAU.tail_mass(prob.x_grid[-1]) < 1e-10

    def test_auto_span_covers_laplacian_tail(self):
        half = auto_span(LAP)
        assert half >= 16.3
        assert math.exp(-ALPHA * half) < 1e-10

    def test_rejects_insufficient_span(self):
        with pytest.raises(ValueError, match="insufficient span"):
            build_problem(GAU, EpsilonLoss(0.1), -2.0, n=101, span_sigmas=3.0)

    def test_rejects_even_or_tiny_n(self):
        with pytest.raises(ValueError):
            build_problem(GAU, EpsilonLoss(0.1), -2.0, n=100)
        with pytest.raises(ValueError):
            build_problem(GAU, EpsilonLoss(0.1), -2.0, n=1)

    def test_minimal_toy_problem(self):
        prob = build_problem(GAU, EpsilonLoss(0.0), -1.0, n=3, span_sigmas=None)
        res = ba_iterate(prob, tol=1e-12, max_iter=5000)
        assert res.q_mass.sum() == pytest.approx(1.0, abs=1e-12)


class TestKernelApplication:
    @pytest.mark.parametrize("s", [-0.5, -3.0, -40.0])
    def test_fft_toeplitz_matches_dense_matrix(self, s):
        from rdbounds.ba import _ToeplitzKernel

        rng = np.random.default_rng(7)
        x = np.linspace(-4.0, 4.0, 51)
        loss = EpsilonLoss(0.1)
        dense = np.exp(s * loss(x[:, None] - x[None, :]))
        kernel = _ToeplitzKernel(np.exp(s * loss((x[1] - x[0]) * np.arange(x.size))))
        for _ in range(4):
            v = rng.random(x.size)
            assert np.max(np.abs(kernel.apply(v) - dense @ v)) < 1e-13


class TestTwoPointSource:
    def test_matches_brute_force(self):
        s = -10.0
        prob = BAProblem(
            x_grid=np.array([-1.0, 1.0]),
            p_mass=np.array([0.5, 0.5]),
            y_grid=np.array([-1.0, 1.0]),
            loss=EpsilonLoss(0.0),
            s=s,
        )
        res = ba_iterate(prob, tol=1e-14, max_iter=10_000)
        d_want, r_want = oracles.two_point_brute_force(s)
        assert res.rate <= math.log(2.0) + 1e-12
        assert res.distortion >= 0.0
        assert res.distortion == pytest.approx(d_want, abs=1e-8)
        assert res.rate == pytest.approx(r_want, abs=1e-6)


class TestZeroRateLimit:
    def test_rate_collapses_for_weak_slopes(self):
        prob = build_problem(LAP, EpsilonLoss(0.1), -1e-6, n=501)
        res = ba_iterate(prob, tol=1e-10, max_iter=2000)
        assert res.rate < 1e-4
        assert not res.converged  # the reproduction mass drifts too slowly to settle
        assert res.distortion >= LAP.d_max(EpsilonLoss(0.1)) - 1e-3

    def test_distortion_approaches_d_max(self):
        # within the zero-rate regime the solution concentrates on the best
        # constant reproduction, so D tends to d_max and R to zero
        loss = EpsilonLoss(0.1)
        prob = build_problem(LAP, loss, -0.05, n=1001)
        res = ba_iterate(prob, tol=1e-10, max_iter=30_000)
        assert abs(res.distortion - LAP.d_max(loss)) < 2e-3
        assert res.rate < 1e-3


class TestExactCurve:
    def test_absolute_error_curve_single_slope(self):
        prob = build_problem(LAP, EpsilonLoss(0.0), -4.0, n=1001)
        res = ba_iterate(prob, tol=1e-10, max_iter=15_000)
        assert abs(res.rate + math.log(ALPHA * res.distortion)) < 2e-2


class TestIterationDiagnostics:
    def test_objective_monotone_and_q_normalized(self):
        for src, s in ((LAP, -3.0), (GAU, -7.0)):
            prob = build_problem(src, EpsilonLoss(0.1), s, n=801)
            res = ba_iterate(prob, tol=1e-11, max_iter=8000)
            assert res.objective_violations == 0
            assert res.max_objective_rise <= 1e-12
            diffs = np.diff(res.objective_trace)
            assert np.all(diffs <= 1e-12)
            assert res.q_mass.min() >= 0.0
            assert res.q_mass.sum() == pytest.approx(1.0, abs=1e-12)

    def test_non_convergence_is_reported(self):
        prob = build_problem(LAP, EpsilonLoss(0.1), -2.0, n=501)
        res = ba_iterate(prob, tol=1e-12, max_iter=5)
        assert not res.converged
        assert res.iterations == 5

    def test_grid_doubling_stability(self):
        loss = EpsilonLoss(0.1)
        for src in (LAP, GAU):
            coarse = ba_iterate(build_problem(src, loss, -5.0, n=1001), tol=1e-9,
                                max_iter=15_000)
            fine = ba_iterate(build_problem(src, loss, -5.0, n=2001), tol=1e-9,
                              max_iter=15_000)
            assert abs(coarse.distortion - fine.distortion) < 5e-3
            assert abs(coarse.rate - fine.rate) < 5e-3


class TestCurve:
    def test_singleton(self):
        pts = ba_curve(GAU, EpsilonLoss(0.1), [-5.0], n=501, tol=1e-9, max_iter=5000)
        assert len(pts) == 1
        assert pts[0].s == -5.0

    def test_sorted_and_monotone(self):
        s_list = [-20.0, -1.0, -5.0, -2.0]
        pts = ba_curve(LAP, EpsilonLoss(0.1), s_list, n=801, tol=1e-9, max_iter=10_000)
        ds = [pt.d for pt in pts]
        assert ds == sorted(ds)
        # weaker slopes sit at larger distortion
        assert [pt.s for pt in pts] == [-20.0, -5.0, -2.0, -1.0]

    def test_per_point_failures_do_not_abort(self):
        pts = ba_curve(GAU, EpsilonLoss(0.1), [-5.0, -math.inf], n=301, tol=1e-9,
                       max_iter=3000)
        flags = {pt.s: pt.flag for pt in pts}
        assert flags[-5.0] == "" or flags[-5.0] == "ba_not_converged"
        assert any(f.startswith("ba_error") for f in flags.values())
        with pytest.raises(ValueError):
            ba_curve(GAU, EpsilonLoss(0.1), [], n=301)
