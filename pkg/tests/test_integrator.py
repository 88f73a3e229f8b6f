import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projrk import schemes as sch
from projrk.integrator import (
    InstabilityError,
    OdeSystem,
    PartitionedState,
    embedded_step,
    integrate,
    partitioned_step,
    richardson_correct,
    richardson_estimate,
    rk_step,
    write_trajectory_csv,
)
from projrk.tableau import ParameterError

DECAY = OdeSystem(1, lambda u: -u, lambda t: np.array([np.exp(-t)]), name="decay")


def linear(M):
    M = np.asarray(M, dtype=float)
    return OdeSystem(M.shape[0], lambda u: M @ u)


class Counting:
    def __init__(self, f):
        self.f, self.calls = f, 0

    def __call__(self, u):
        self.calls += 1
        return self.f(u)


class TestRkStep:
    def test_fe(self):
        assert rk_step(sch.fe(), DECAY, [1.0], 0.1).u_next[0] == pytest.approx(0.9, abs=1e-16)

    def test_heun(self):
        assert rk_step(sch.heun(), DECAY, [1.0], 0.1).u_next[0] == pytest.approx(0.905, abs=2e-16)

    def test_pfe(self):
        assert rk_step(sch.pfe(K=1, lam=0.1), DECAY, [1.0], 0.1).u_next[0] == pytest.approx(0.9009, abs=1e-15)

    def test_pfe_literal_recipe(self):
        # two micro steps of 0.01 then extrapolation over the 0.08 left
        u1 = 1 - 0.01
        u2 = u1 - 0.01 * u1
        expect = u2 + 0.08 * (u2 - u1) / 0.01
        assert rk_step(sch.pfe(K=1, lam=0.1), DECAY, [1.0], 0.1).u_next[0] == pytest.approx(expect, rel=1e-14)

    def test_one_evaluation_per_stage(self):
        f = Counting(lambda u: -u)
        t = sch.prk4k2(0.1)
        res = rk_step(t, OdeSystem(1, f), [1.0], 0.1)
        assert f.calls == t.s == len(res.stage_slopes)

    def test_instability_is_reported(self):
        blow = OdeSystem(1, lambda u: 1e200 * u * u)
        with pytest.raises(InstabilityError) as exc:
            rk_step(sch.rk4_38(), blow, [1e100], 1.0)
        assert exc.value.stage is not None

    @pytest.mark.parametrize("dt", [0.0, -0.1, np.inf])
    def test_bad_dt(self, dt):
        with pytest.raises(ParameterError):
            rk_step(sch.fe(), DECAY, [1.0], dt)


class TestEmbedded:
    def test_heun_fe(self):
        res = embedded_step(sch.embedded_heun_fe(), DECAY, [1.0], 0.1)
        assert res.error_estimate[0] == pytest.approx(0.005, abs=1e-16)
        assert res.u_next[0] - res.u_low[0] == pytest.approx(0.005, abs=1e-16)

    def test_high_solution_matches_plain_step(self):
        t = sch.ephpfe(0.1)
        M = [[-1.0, 0.3], [0.2, -2.0]]
        a = embedded_step(t, linear(M), [1.0, 0.5], 0.1)
        b = rk_step(t.base, linear(M), [1.0, 0.5], 0.1)
        assert np.array_equal(a.u_next, b.u_next)

    @settings(max_examples=40)
    @given(st.floats(1e-4, 1 / 3), st.floats(0.01, 0.5))
    def test_ephpfe_stagewise_formula(self, lam, dt):
        M = np.array([[-1.0, 0.4], [0.1, -3.0]])
        res = embedded_step(sch.ephpfe(lam), linear(M), [1.0, -0.5], dt)
        k = res.stage_slopes
        expect = dt * (1.5 * lam - 0.5) * (k[2] - k[5])
        assert np.allclose(res.error_estimate, expect, rtol=1e-12, atol=1e-15)

    @settings(max_examples=40)
    @given(st.floats(1e-4, 0.5), st.floats(0.01, 0.5))
    def test_pisv_stagewise_formula(self, lam, dt):
        M = np.array([[-2.0, 0.4], [0.1, -1.0]])
        res = embedded_step(sch.pisv_embedded(lam), linear(M), [0.3, 1.0], dt)
        k = res.stage_slopes
        expect = dt * (-1 + 1.5 * lam) * (k[1] - k[2])
        assert np.allclose(res.error_estimate, expect, rtol=1e-12, atol=1e-15)

    def test_requires_embedded(self):
        with pytest.raises(ParameterError):
            embedded_step(sch.heun(), DECAY, [1.0], 0.1)

    def test_plain_step_has_no_low_solution(self):
        with pytest.raises(AttributeError):
            rk_step(sch.heun(), DECAY, [1.0], 0.1).u_low


class TestPartitioned:
    @staticmethod
    def decoupled():
        return (lambda uL, uR: -uL), (lambda uL, uR: -uR)

    def test_safe_substeps(self):
        fL, fR = self.decoupled()
        out = partitioned_step(sch.safe(2), fL, fR, PartitionedState([1.0], [1.0]), 0.1)
        assert out.u_L[0] == pytest.approx(0.9025, abs=1e-15)
        assert out.u_R[0] == pytest.approx(0.9, abs=1e-15)

    def test_sapfe_left_is_pfe(self):
        fL, fR = self.decoupled()
        out = partitioned_step(sch.sapfe(K=1, lam=0.1), fL, fR, PartitionedState([1.0, 2.0], [1.0]), 0.1)
        ref = rk_step(sch.pfe(K=1, lam=0.1), linear(-np.eye(2)), [1.0, 2.0], 0.1)
        assert np.allclose(out.u_L, ref.u_next, rtol=0, atol=1e-16)

    def test_sappfe_runs(self):
        M = np.array([[-50.0, 1.0], [1.0, -1.0]])
        fL = lambda uL, uR: M[0, 0] * uL + M[0, 1] * uR  # noqa: E731
        fR = lambda uL, uR: M[1, 0] * uL + M[1, 1] * uR  # noqa: E731
        out = partitioned_step(sch.sappfe(0.01, 0.1), fL, fR, PartitionedState([1.0], [1.0]), 0.01)
        assert np.all(np.isfinite(out.u_L)) and np.all(np.isfinite(out.u_R))

    def test_split(self):
        st_ = PartitionedState.split(np.array([1.0, 2.0, 3.0]), [2])
        assert st_.u_L.tolist() == [3.0] and st_.u_R.tolist() == [1.0, 2.0]

    def test_coupling_sees_current_stage(self):
        # u_R' = u_L: the right part must integrate the left part's stage values
        fL = lambda uL, uR: -uL  # noqa: E731
        fR = lambda uL, uR: uL  # noqa: E731
        out = partitioned_step(sch.safe(2), fL, fR, PartitionedState([1.0], [0.0]), 0.1)
        assert out.u_R[0] == pytest.approx(0.1, abs=1e-16)


class TestIntegrate:
    def test_fe_states(self):
        traj = integrate(sch.fe(), DECAY, [1.0], 0.1, 0.2)
        assert traj.states[:, 0] == pytest.approx([1.0, 0.9, 0.81], abs=1e-15)
        assert traj.times == pytest.approx([0.0, 0.1, 0.2])

    def test_non_multiple_end_time(self):
        with pytest.raises(ParameterError, match="multiple"):
            integrate(sch.fe(), DECAY, [1.0], 0.1, 0.25)

    def test_records_estimates(self):
        traj = integrate(sch.ephpfe(0.05), DECAY, [1.0], 0.1, 0.3)
        assert traj.estimates.shape == (4, 1) and traj.estimates[0, 0] == 0.0

    def test_instability_carries_step(self):
        stiff = OdeSystem(1, lambda u: -1e5 * u)
        with pytest.raises(InstabilityError) as exc:
            integrate(sch.fe(), stiff, [1.0], 0.1, 100.0)
        assert exc.value.step is not None and exc.value.step > 0

    def test_csv(self, tmp_path):
        traj = integrate(sch.embedded_heun_fe(), DECAY, [1.0], 0.5, 1.0)
        path = tmp_path / "t.csv"
        write_trajectory_csv(traj, path, precision=6)
        text = path.read_bytes().decode()
        assert text.splitlines()[0] == "t,u0,est0"
        assert text.splitlines()[1] == "0,1,0"
        assert "\r" not in text and text.endswith("\n")


class TestRichardson:
    def test_correct(self):
        assert richardson_correct(0.9, 0.9025, 1) == pytest.approx(0.905, abs=1e-15)
        assert richardson_correct(1.0, 1.3, 2) == pytest.approx(1.4, abs=1e-15)

    def test_estimate(self):
        assert richardson_estimate(0.9, 0.9025, 1) == pytest.approx(-0.005, abs=1e-15)
        assert richardson_estimate(0.7, 0.7, 3) == 0.0

    @given(st.floats(-1e6, 1e6), st.integers(1, 8))
    def test_fixed_point(self, x, p):
        assert richardson_correct(x, x, p) == pytest.approx(x, rel=1e-14, abs=1e-300)

    def test_order_must_be_positive(self):
        with pytest.raises(ParameterError):
            richardson_correct(1.0, 1.0, 0)

    def test_step_doubling_corrected_is_emr(self):
        pair = sch.fe_step_doubling()
        M = np.array([[-1.0, 2.0], [0.0, -3.0]])
        u0 = np.array([1.0, 1.0])
        full = rk_step(pair.low, linear(M), u0, 0.2).u_next
        half = rk_step(pair.base, linear(M), u0, 0.2).u_next
        emr = rk_step(sch.emr(), linear(M), u0, 0.2).u_next
        assert np.allclose(richardson_correct(full, half, 1), emr, rtol=1e-14)
