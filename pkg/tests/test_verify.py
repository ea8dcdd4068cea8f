"""Grid checks of the ratio condition, line/tail/small-x bounds, and the step example."""

import math

import numpy as np
import pytest

from tauberian_lab import (
    BVFunction,
    TauberianCertificate,
    check_line_bound,
    check_small_x_bound,
    check_tail_bound,
    check_tauberian,
    delayed_step,
    delayed_step_ratio,
    delayed_step_restart,
    make_t_grid,
    make_x_grid,
    thread_cap,
)


def exp_density() -> BVFunction:
    return BVFunction.from_density("exponential", rate=-1.0)


class TestGrids:
    def test_t_grid_refines_after_jumps(self):
        bv = delayed_step(1.0)
        grid, spec = make_t_grid(bv, t_max=10.0)
        assert spec.refined_jumps == 1
        just_after = grid[(grid > 1.0) & (grid < 1.01)]
        assert just_after.size >= 10  # geometric cluster right of the jump
        assert grid[0] == 0.0 and grid[-1] == 10.0
        assert np.all(np.diff(grid) > 0)
        assert "jumps refined" in spec.describe()

    def test_x_grid(self):
        g = make_x_grid(0.1, 10.0, 5)
        assert g[0] == pytest.approx(0.1) and g[-1] == pytest.approx(10.0)
        assert np.all(np.diff(np.log(g)) > 0)
        assert make_x_grid(2.0, 2.0).tolist() == [2.0]
        with pytest.raises(ValueError):
            make_x_grid(-1.0, 2.0)


class TestDelayedStep:
    def test_ratio_closed_form(self):
        # 0 before the jump, e^{x(T-t)} after; the helper cross-checks at 1e-12
        assert delayed_step_ratio(1.0, 2.0, 0.5) == 0.0
        assert delayed_step_ratio(1.0, 2.0, 1.0) == 0.0
        got = delayed_step_ratio(1.0, 2.0, 2.0)
        assert got == pytest.approx(math.exp(-2.0), rel=1e-12)

    def test_sup_is_one_for_every_x(self):
        # sup over t of the ratio is 1, attained as t decreases to T
        grid, _ = make_t_grid(delayed_step(1.0), t_max=6.0)
        for x in (0.5, 1.0, 4.0):
            sup = max(delayed_step_ratio(1.0, x, float(t)) for t in grid)
            assert sup == pytest.approx(1.0, abs=1e-3)

    def test_violation_scales_like_one_over_x(self):
        # at x = 4 the sup (= 1) exceeds 1/x = 0.25: no constant bound C/x
        # with C < 1 can hold through the jump
        grid, _ = make_t_grid(delayed_step(1.0), t_max=6.0)
        sup = max(delayed_step_ratio(1.0, 4.0, float(t)) for t in grid)
        assert sup > 1.0 / 4.0

    def test_restart_clears_the_violation(self):
        # beyond the restart time the ratio stays below 1/x again
        x = 4.0
        t0 = delayed_step_restart(1.0, x)
        ts = np.linspace(t0, t0 + 10.0, 200)
        sup = max(delayed_step_ratio(1.0, x, float(t)) for t in ts)
        assert sup < 1.0 / x


class TestCheckTauberian:
    def test_step_with_cutoff_passes(self):
        bv = delayed_step(1.0)
        cert = TauberianCertificate(C=1.0, x0=1.0, R_rule=CutoffRuleConstantOne())
        report = check_tauberian(bv, cert, quad_tol=1e-12)
        assert report.passed()
        assert report.grid_sup == pytest.approx(1.0, abs=1e-3)
        assert report.witness_t == pytest.approx(1.0, abs=2e-3)

    def test_zero_integrator(self):
        bv = BVFunction.zero()
        cert = TauberianCertificate(C=1.0, x0=1.0)
        report = check_tauberian(bv, cert)
        assert report.grid_sup == 0.0
        assert report.passed()

    def test_exp_density_bounded_by_one(self):
        # x e^{-xt} int_0^t e^{(x-1)s} ds <= x/(x... stays below 1 for x >= 1
        cert = TauberianCertificate(C=1.0, x0=1.0)
        report = check_tauberian(exp_density(), cert,
                                 x_grid=np.geomspace(1.0, 100.0, 16))
        assert report.passed()

    def test_failing_certificate_reports_negative_margin(self):
        bv = delayed_step(1.0)
        cert = TauberianCertificate(C=0.5, x0=1.0, R_rule=CutoffRuleConstantOne())
        report = check_tauberian(bv, cert, quad_tol=1e-12)
        assert not report.passed()
        assert report.margin < 0

    def test_grid_refinement_stability_smooth(self):
        # doubling both grid densities moves the reported sup by under 1%
        bv = exp_density()
        cert = TauberianCertificate(C=1.0, x0=1.0)
        coarse_t, _ = make_t_grid(bv, t_max=30.0)
        fine_t, _ = make_t_grid(bv, t_max=30.0, base_points=1024, jump_points=128)
        xs = np.geomspace(1.0, 8.0, 16)
        a = check_tauberian(bv, cert, t_grid=coarse_t, x_grid=xs).grid_sup
        b = check_tauberian(bv, cert, t_grid=fine_t, x_grid=xs).grid_sup
        assert abs(a - b) <= 0.01 * max(a, b)

    def test_grid_refinement_stability_jump(self):
        # for jump instances the per-jump geometric cluster carries the sup,
        # so stability holds even at large x
        bv = delayed_step(1.0)
        from tauberian_lab import CutoffRule

        cert = TauberianCertificate(C=1.0, x0=1.0, R_rule=CutoffRule.constant(50.0))
        coarse_t, _ = make_t_grid(bv, t_max=10.0)
        fine_t, _ = make_t_grid(bv, t_max=10.0, base_points=1024, jump_points=128)
        xs = np.geomspace(1.0, 50.0, 8)
        a = check_tauberian(bv, cert, t_grid=coarse_t, x_grid=xs, quad_tol=1e-12).grid_sup
        b = check_tauberian(bv, cert, t_grid=fine_t, x_grid=xs, quad_tol=1e-12).grid_sup
        assert abs(a - b) <= 0.01 * max(a, b)


class CutoffRuleConstantOne:
    """Inline stand-in so the tests read the dependency explicitly."""

    def __new__(cls):
        from tauberian_lab import CutoffRule

        return CutoffRule.constant(1.0)


class TestLineTailSmallX:
    def test_line_bound_step(self):
        # unscaled hypothesis sup_t |e^{-xt} int e^{xs} dA| <= 1 holds for the
        # step; the vertical-line value obeys C (1 + |y|/x)
        bv = delayed_step(1.0)
        for x, y in ((0.5, 0.0), (1.0, 2.0), (1.0, 10.0)):
            rep = check_line_bound(bv, 1.0, x, y, quad_tol=1e-12)
            assert rep.passed(), (x, y)
            assert rep.bound == pytest.approx(1.0 + abs(y) / x)

    def test_line_bound_flags_broken_hypothesis(self):
        rep = check_line_bound(delayed_step(1.0), 0.5, 1.0, 2.0, quad_tol=1e-12)
        assert rep.hypothesis_failed
        assert not rep.passed()
        assert "hypothesis" in rep.note

    def test_tail_bound_step(self):
        bv = delayed_step(1.0)
        for x, y in ((0.5, 0.0), (1.0, 2.0), (1.0, 10.0)):
            rep = check_tail_bound(bv, 1.0, x, y, quad_tol=1e-12)
            assert rep.passed(), (x, y)
            assert rep.bound == pytest.approx(3.0 + abs(y) / x)
            assert "v_max" in rep.note

    def test_tail_bound_exp_density(self):
        rep = check_tail_bound(exp_density(), 1.0, 1.0, 2.0, quad_tol=1e-11)
        assert rep.passed()

    def test_small_x_bound(self):
        bv = delayed_step(1.0)
        rep = check_small_x_bound(bv, 1.0, x0=1.0, quad_tol=1e-12)
        assert rep.passed()
        assert rep.witness_x is not None and rep.witness_x <= 1.0
        # the reported case is the worst x: bound C x0 / x grows as x shrinks
        assert rep.bound >= 1.0

    def test_small_x_rejects_bad_grid(self):
        with pytest.raises(ValueError):
            check_small_x_bound(delayed_step(1.0), 1.0, 1.0,
                                x_grid=np.asarray([2.0]))


class TestThreadCap:
    def test_default_is_one(self, monkeypatch):
        monkeypatch.delenv("TAUBERIAN_LAB_THREADS", raising=False)
        assert thread_cap() == 1

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("TAUBERIAN_LAB_THREADS", "4")
        assert thread_cap() == 4

    def test_invalid_values_fail(self, monkeypatch):
        monkeypatch.setenv("TAUBERIAN_LAB_THREADS", "zero")
        with pytest.raises(ValueError):
            thread_cap()
        monkeypatch.setenv("TAUBERIAN_LAB_THREADS", "0")
        with pytest.raises(ValueError):
            thread_cap()

    def test_parallel_result_matches_serial(self, monkeypatch):
        bv = exp_density()
        cert = TauberianCertificate(C=1.0, x0=1.0)
        xs = np.geomspace(1.0, 20.0, 8)
        ts = np.linspace(0.0, 20.0, 200)
        monkeypatch.setenv("TAUBERIAN_LAB_THREADS", "1")
        serial = check_tauberian(bv, cert, t_grid=ts, x_grid=xs)
        monkeypatch.setenv("TAUBERIAN_LAB_THREADS", "3")
        parallel = check_tauberian(bv, cert, t_grid=ts, x_grid=xs)
        assert serial.grid_sup == parallel.grid_sup
        assert serial.witness_t == parallel.witness_t
