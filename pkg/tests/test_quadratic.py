import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dppm import (
    CyclicConjugateStrategy,
    GradientStrategy,
    QuadraticModel,
    ScheduleError,
    SingularUpdateError,
    SolverConfig,
    cyclic_conjugate_direction,
    cyclic_dppm_run,
    dppm_minimize,
    eigen_check,
    q_norm,
    quadratic_objective,
    rank_one_inverse_apply,
    rlinear_bound,
    superlinear_schedule,
)


def random_spd(rng, n):
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


class TestRankOneInverse:
    def test_zero_t_is_identity(self):
        x = np.array([1.0, -2.0, 0.5])
        out = rank_one_inverse_apply(np.array([2.0, 1.0, 3.0]), [1.0, 0.0, 0.0], 0.0, x)
        assert np.array_equal(out, x)

    def test_hand_evaluation(self):
        out = rank_one_inverse_apply(
            np.array([2.0, 1.0]), [1.0, 0.0], 1.0, [1.0, 1.0]
        )
        assert out == pytest.approx([1.0 / 3.0, 1.0])

    def test_matches_dense_inverse(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = 10
            Q = random_spd(rng, n)
            p = rng.standard_normal(n)
            p /= np.linalg.norm(p)
            x = rng.standard_normal(n)
            for t in (0.1, 1.0, 10.0):
                dense = np.linalg.solve(np.eye(n) + t * np.outer(p, p @ Q), x)
                ours = rank_one_inverse_apply(Q, p, t, x)
                assert np.max(np.abs(dense - ours)) <= 1e-10

    def test_singular_denominator_rejected(self):
        # 1 + t p'Qp = 0 for Q = (1), p = (1), t = -1.
        with pytest.raises(SingularUpdateError):
            rank_one_inverse_apply(np.array([1.0]), [1.0], -1.0, [1.0])


class TestEigenCheck:
    def test_identity_q(self):
        p = np.array([0.6, 0.8])
        assert eigen_check(np.eye(2), p, 3.0) == pytest.approx(0.25)

    def test_hand_evaluation(self):
        assert eigen_check(np.array([2.0, 1.0]), [1.0, 0.0], 1.0) == pytest.approx(
            1.0 / 3.0
        )

    def test_residual_small_on_random_instances(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            Q = random_spd(rng, 6)
            p = rng.standard_normal(6)
            p /= np.linalg.norm(p)
            eigen_check(Q, p, float(rng.uniform(0.1, 5.0)))

    def test_orthogonal_complement_structure(self):
        # For q with zero component along p, [I + t p p'Q] maps q to
        # q + t (p'Qq) p: the correction lives entirely along p.
        rng = np.random.default_rng(2)
        Q = random_spd(rng, 5)
        p = rng.standard_normal(5)
        p /= np.linalg.norm(p)
        q = rng.standard_normal(5)
        q -= p * np.dot(p, q)
        t = 0.7
        M = np.eye(5) + t * np.outer(p, p @ Q)
        assert M @ q == pytest.approx(q + t * float(p @ Q @ q) * p)


class TestCyclicDirection:
    def test_sign_rule(self):
        model = QuadraticModel(diag=np.array([2.0, 1.0]))
        d = cyclic_conjugate_direction(model, [1.0, 0.0], 0)
        assert np.array_equal(d, [-1.0, 0.0])

    def test_skip_on_orthogonal_component(self):
        model = QuadraticModel(diag=np.array([2.0, 1.0]))
        assert cyclic_conjugate_direction(model, [0.0, 1.0], 0) is None

    def test_output_is_descent(self):
        rng = np.random.default_rng(3)
        model = QuadraticModel(diag=rng.uniform(0.5, 5.0, 6))
        for k in range(12):
            x = rng.uniform(-2.0, 2.0, 6)
            d = cyclic_conjugate_direction(model, x, k)
            if d is not None:
                assert float(np.dot(d, model.diag * x)) < 0.0

    def test_negative_index_rejected(self):
        model = QuadraticModel(diag=np.array([1.0]))
        with pytest.raises(ValueError):
            cyclic_conjugate_direction(model, [1.0], -1)


class TestModelValidation:
    def test_non_unit_basis_rejected(self):
        with pytest.raises(ValueError):
            QuadraticModel(diag=np.array([1.0, 1.0]),
                           basis=[np.array([2.0, 0.0]), np.array([0.0, 1.0])])

    def test_non_conjugate_basis_rejected(self):
        s = 1.0 / np.sqrt(2.0)
        with pytest.raises(ValueError):
            QuadraticModel(diag=np.array([1.0, 3.0]),
                           basis=[np.array([s, s]), np.array([s, -s])])

    def test_nonpositive_diag_rejected(self):
        with pytest.raises(ValueError):
            QuadraticModel(diag=np.array([1.0, -1.0]))


class TestNormsAndBounds:
    def test_q_norm_values(self):
        assert q_norm(np.array([4.0]), [0.0]) == 0.0
        assert q_norm(np.array([4.0]), [1.0]) == 2.0

    def test_q_norm_equals_energy(self):
        rng = np.random.default_rng(4)
        diag = rng.uniform(0.5, 5.0, 5)
        obj = quadratic_objective(diag)
        x = rng.uniform(-2.0, 2.0, 5)
        assert q_norm(diag, x) ** 2 == pytest.approx(2.0 * obj.value(x))

    def test_rlinear_bound_values(self):
        per_cycle, per_iter = rlinear_bound(0.1, 30.0, 4)
        assert per_cycle == pytest.approx(0.25)
        assert per_iter == pytest.approx(0.25**0.25)
        assert rlinear_bound(10.0, 30.0, 2)[0] == pytest.approx(1.0 / 301.0)

    def test_rlinear_bound_small_step_limit(self):
        assert rlinear_bound(1e-12, 30.0, 3)[0] == pytest.approx(1.0, abs=1e-9)

    def test_schedule_values(self):
        assert superlinear_schedule(0.1, 10.0, 0) == pytest.approx(0.1)
        assert superlinear_schedule(0.1, 10.0, 2) == pytest.approx(10.0)

    def test_schedule_bounds_vanish(self):
        m = 30.0
        bounds = [1.0 / (1.0 + superlinear_schedule(0.1, 10.0, k) * m)
                  for k in range(6)]
        assert all(b > nb for b, nb in zip(bounds, bounds[1:]))
        assert bounds[-1] < 1e-4

    def test_schedule_growth_validation(self):
        with pytest.raises(ScheduleError):
            superlinear_schedule(0.1, 1.0, 0)
        with pytest.raises(ValueError):
            superlinear_schedule(0.0, 2.0, 0)


class TestCyclicRun:
    def test_cycle_contraction(self):
        rng = np.random.default_rng(5)
        model = QuadraticModel(diag=rng.uniform(1.0, 10.0, 20))
        run = cyclic_dppm_run(model, rng.standard_normal(20), cycles=8, lam=0.5)
        bound = 1.0 / (1.0 + 0.5 * model.m)
        assert np.all(run.ratios <= bound + 1e-10)

    def test_q_norm_nonincreasing(self):
        rng = np.random.default_rng(6)
        model = QuadraticModel(diag=rng.uniform(1.0, 10.0, 15))
        run = cyclic_dppm_run(model, rng.standard_normal(15), cycles=10, lam=0.2)
        assert np.all(np.diff(run.iterates_q_norm) <= 1e-12)

    def test_one_cycle_closed_form(self):
        # After one full cycle from x = sum b_i g_i the coefficient along
        # each basis vector shrinks by 1/(1 + lam g_i'Q g_i).
        rng = np.random.default_rng(7)
        diag = rng.uniform(0.5, 5.0, 5)
        model = QuadraticModel(diag=diag)
        x0 = rng.uniform(-2.0, 2.0, 5)
        lam = 0.7
        run = cyclic_dppm_run(model, x0, cycles=1, lam=lam)
        expected = x0 / (1.0 + lam * diag)
        assert run.x_final == pytest.approx(expected, abs=1e-8)

    def test_matches_line_search_path(self):
        # The closed-form update and the golden-section route must agree.
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = 10
            diag = rng.uniform(0.5, 5.0, n)
            x0 = rng.uniform(-2.0, 2.0, n)
            lam = float(rng.uniform(0.1, 1.0))
            model = QuadraticModel(diag=diag)
            run = cyclic_dppm_run(model, x0, cycles=2, lam=lam)
            obj = quadratic_objective(diag)
            strat = CyclicConjugateStrategy(model.basis, diag)
            cfg = SolverConfig(max_iter=2 * n, tol_grad=0.0,
                               convex_mode=True, lambda_const=lam)
            trace = dppm_minimize(obj, x0, strat, cfg)
            assert trace.x_final == pytest.approx(run.x_final, abs=1e-6)

    def test_requires_exactly_one_step_rule(self):
        model = QuadraticModel(diag=np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            cyclic_dppm_run(model, [1.0, 1.0], cycles=1)
        with pytest.raises(ValueError):
            cyclic_dppm_run(model, [1.0, 1.0], cycles=1, lam=0.1,
                            schedule=(0.1, 10.0))

    def test_schedule_bounds_recorded(self):
        rng = np.random.default_rng(9)
        model = QuadraticModel(diag=rng.uniform(1.0, 5.0, 10))
        run = cyclic_dppm_run(model, rng.standard_normal(10), cycles=3,
                              schedule=(0.1, 10.0))
        for k in range(3):
            expected = 1.0 / (1.0 + 0.1 * 10.0**k * model.m)
            assert run.bounds[k] == pytest.approx(expected)
            assert run.ratios[k] <= run.bounds[k] + 1e-10

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_gradient_runs_match_rank_one_composition(self, seed):
        # A plain gradient-direction run on a quadratic is the same
        # sequence of rank-one-corrected inverse applications.
        rng = np.random.default_rng(seed)
        diag = rng.uniform(0.5, 5.0, 4)
        x0 = rng.uniform(-2.0, 2.0, 4)
        obj = quadratic_objective(diag)
        cfg = SolverConfig(max_iter=5, tol_grad=0.0, convex_mode=True,
                           lambda_const=0.3)
        trace = dppm_minimize(obj, x0, GradientStrategy(), cfg)
        x = x0.copy()
        for rec in trace.records:
            g = diag * x
            gn = np.linalg.norm(g)
            if gn < 1e-13:
                break
            d = -g / gn
            x = rank_one_inverse_apply(diag, d, 0.3, x)
            assert rec.x == pytest.approx(x, abs=1e-6)
