import numpy as np
import pytest
from hypothesis import given, strategies as st

from projrk import schemes as sch
from projrk.analysis import prk_limit_tableau
from projrk.tableau import EmbeddedTableau, ParameterError, PartitionedTableau, PiParams, validate

from test_tableau import pi_params


def max_dev(a, b):
    return max(np.max(np.abs(a.c_arr - b.c_arr)), np.max(np.abs(a.A_arr - b.A_arr)),
               np.max(np.abs(a.b_arr - b.b_arr)))


class TestClassical:
    def test_fe(self):
        t = sch.fe()
        assert (t.s, t.c, t.b) == (1, (0.0,), (1.0,))

    def test_heun(self):
        t = sch.heun()
        assert t.c == (0.0, 1.0) and t.A[1][0] == 1.0 and t.b == (0.5, 0.5)

    def test_rk4_38_weights(self):
        assert sch.rk4_38().b == (1 / 8, 3 / 8, 3 / 8, 1 / 8)

    @pytest.mark.parametrize("f", [sch.heun, sch.emr, sch.rk4_38])
    def test_second_order(self, f):
        assert validate(f(), order=2).ok

    def test_step_doubling_pair(self):
        t = sch.fe_step_doubling()
        assert t.b == (0.5, 0.5) and t.b_tilde == (1.0, 0.0)


class TestPfe:
    def test_entries(self):
        t = sch.pfe(K=2, lam=0.1)
        assert t.c == pytest.approx((0.0, 0.1, 0.2), abs=1e-16)
        assert t.b == pytest.approx((0.1, 0.1, 0.8), abs=1e-16)

    def test_two_stage_weights(self):
        assert sch.pfe(K=1, lam=0.25).b == (0.25, 0.75)

    @given(st.floats(1e-6, 1.0))
    def test_K0_is_fe(self, lam):
        t = sch.pfe(K=0, lam=lam)
        assert (t.c, t.A, t.b) == (sch.fe().c, sch.fe().A, sch.fe().b)

    def test_accepts_params_object(self):
        assert sch.pfe(PiParams(3, 0.1)) == sch.pfe(K=3, lam=0.1)

    def test_parameter_errors(self):
        with pytest.raises(ParameterError):
            sch.pfe(K=2, lam=0.5)


class TestPrk:
    @pytest.mark.parametrize("lam", [0.3, 0.1, 0.01])
    def test_heun_K2_is_ephpfe_high_part(self, lam):
        t = sch.prk(sch.heun(), K=2, lam=lam)
        assert max_dev(t, sch.ephpfe(lam).base) <= 1e-15
        assert t.A[3][2] == pytest.approx(1 - 2 * lam, abs=1e-15)

    @pytest.mark.parametrize("lam", [0.5, 0.2, 0.05, 1e-3])
    def test_rk4_38_K1_is_prk4k1(self, lam):
        assert max_dev(sch.prk(sch.rk4_38(), K=1, lam=lam), sch.prk4k1(lam)) <= 1e-15

    @pytest.mark.parametrize("lam", [1 / 3, 0.2, 0.05, 1e-3])
    def test_rk4_38_K2_is_prk4k2(self, lam):
        assert max_dev(sch.prk(sch.rk4_38(), K=2, lam=lam), sch.prk4k2(lam)) <= 1e-15

    @given(pi_params())
    def test_fe_outer_is_pfe(self, p):
        t = sch.prk(sch.fe(), p)
        assert max_dev(t, sch.pfe(p)) <= 1e-15

    def test_embedded_outer_gives_embedded_pair(self):
        t = sch.prk(sch.embedded_heun_fe(), K=2, lam=0.1)
        assert isinstance(t, EmbeddedTableau)
        ref = sch.ephpfe(0.1)
        assert np.max(np.abs(t.b_tilde_arr - ref.b_tilde_arr)) <= 1e-15

    def test_stage_count(self):
        assert sch.prk(sch.rk4_38(), K=3, lam=0.1).s == 16

    def test_rejects_inconsistent_outer(self):
        bad = sch.heun().with_weights((0.5, 0.6))
        with pytest.raises(ParameterError, match="consistent"):
            sch.prk(bad, K=1, lam=0.1)

    def test_rejects_zero_node_after_first(self):
        from projrk.tableau import Tableau
        t = Tableau("zero-node", (0.0, 0.0), ((0.0, 0.0), (0.0, 0.0)), (0.5, 0.5))
        with pytest.raises(ParameterError, match="c > 0"):
            sch.prk(t, K=1, lam=0.1)

    def test_limit_weights_rk4_38_K1(self):
        _, _, b = prk_limit_tableau(sch.rk4_38(), 1)
        assert tuple(b) == (0, 1 / 8, 0, 3 / 8, 0, 3 / 8, 0, 1 / 8)

    def test_limit_weights_are_approached(self):
        t = sch.prk(sch.rk4_38(), K=1, lam=1e-9)
        assert np.allclose(t.b_arr, [0, 1 / 8, 0, 3 / 8, 0, 3 / 8, 0, 1 / 8], atol=1e-8)


class TestPrk4k2Printed:
    def test_printed_sign_breaks_consistency(self):
        rep = validate(sch.prk4k2(0.1, as_printed=True))
        assert rep.flags == ("consistency[6]", "consistency[7]", "consistency[8]")
        assert rep.consistency_residuals[6:9] == pytest.approx([5 * 0.1] * 3, abs=1e-14)

    def test_corrected_entry_is_consistent(self):
        assert validate(sch.prk4k2(0.1)).ok


class TestTelescopic:
    def test_example(self):
        t = sch.tpfe(sch.TelescopicParams(1, 2, 1, 2, 1 / 16))
        assert t.b == pytest.approx((1 / 16, 3 / 16, 3 / 16, 9 / 16), abs=1e-16)
        assert t.c == pytest.approx((0, 1 / 16, 4 / 16, 5 / 16), abs=1e-16)
        assert sum(t.b) == pytest.approx(1.0, abs=1e-15)

    def test_degenerate_is_fe(self):
        t = sch.tpfe(sch.TelescopicParams(0, 0, 0, 0, 1.0))
        assert (t.s, t.b) == (1, (1.0,))

    def test_untiled_is_rejected(self):
        with pytest.raises(ParameterError, match="tile"):
            sch.TelescopicParams(1, 2, 1, 2, 0.1)

    def test_lam1(self):
        assert sch.TelescopicParams.tiled(1, 2, 1, 2).lam1 == pytest.approx(0.25)

    @given(st.integers(0, 4), st.integers(0, 5), st.integers(0, 4), st.integers(0, 5))
    def test_consistent(self, K0, M0, K1, M1):
        assert validate(sch.tpfe(sch.TelescopicParams.tiled(K0, M0, K1, M1))).ok


class TestEmbedded:
    def test_ephpfe_weights(self):
        t = sch.ephpfe(0.1)
        assert t.b == pytest.approx((0.1, 0.1, 0.45, 0, 0, 0.35), abs=1e-16)
        assert t.b_tilde == pytest.approx((0.1, 0.1, 0.8, 0, 0, 0), abs=1e-16)

    def test_ephpfe_small_lam(self):
        t = sch.ephpfe(1e-12)
        assert np.allclose(t.b_arr, [0, 0, 0.5, 0, 0, 0.5], atol=1e-11)
        assert np.allclose(t.b_tilde_arr, [0, 0, 1, 0, 0, 0], atol=1e-11)

    def test_posv(self):
        assert sch.posv(0.1).b == pytest.approx((0.1, 0.1, 0, 0, 0, 0.8), abs=1e-16)
        lam = 0.05
        assert sch.posv(lam).c == pytest.approx((0, lam, 2 * lam, 0.5, 0.5 + lam, 0.5 + 2 * lam), abs=1e-16)

    def test_pisv(self):
        assert sch.pisv(0.2).b == pytest.approx((0.2, 0, 0.8), abs=1e-16)
        assert sch.pisv_embedded(0.2).A[2][1] == pytest.approx(0.1, abs=1e-16)

    @pytest.mark.parametrize("f", [sch.ephpfe, sch.posv_embedded, sch.pisv_embedded])
    @pytest.mark.parametrize("lam", [0.3, 0.01])
    def test_both_weight_sets_consistent(self, f, lam):
        assert all(r.ok for r in validate_all_(f(lam)))

    @pytest.mark.parametrize("f, hi", [(sch.ephpfe, 1 / 3), (sch.posv, 1 / 3), (sch.pisv, 0.5),
                                       (sch.prk4k1, 0.5), (sch.prk4k2, 1 / 3)])
    def test_lam_range(self, f, hi):
        f(hi)
        with pytest.raises(ParameterError):
            f(hi * 1.01)
        with pytest.raises(ParameterError):
            f(0.0)


def validate_all_(t):
    from projrk.tableau import validate_all
    return validate_all(t).values()


class TestPartitioned:
    def test_safe_normalized(self):
        t = sch.safe(4)
        assert t.left.b == (0.25, 0.25, 0.25, 0.25, 0.0)
        assert validate(t.left).ok

    @pytest.mark.parametrize("M", [1, 2, 4, 7])
    def test_safe_as_printed(self, M):
        rep = validate(sch.safe(M, normalize=False).left)
        assert rep.flags == ("order1",)
        assert rep.order1_residual == pytest.approx(1 / M, abs=1e-14)

    @pytest.mark.parametrize("normalize", [True, False])
    def test_safe_right(self, normalize):
        assert sch.safe(3, normalize).right.b == (1.0, 0.0, 0.0, 0.0)

    def test_sapfe_right_consistent(self):
        rep = validate(sch.sapfe(K=3, lam=0.1).right)
        assert rep.consistency_residuals == (0.0, 0.0, 0.0, 0.0)

    def test_sappfe_ordering(self):
        with pytest.raises(ParameterError):
            sch.sappfe(0.06, 0.1)
        with pytest.raises(ParameterError):
            sch.sappfe(0.01, 0.6)
        assert isinstance(sch.sappfe(0.01, 0.1), PartitionedTableau)


class TestSchemeIds:
    @pytest.mark.parametrize("text", [
        "pfe:K=2,lam=0.1", "prk:outer=rk4_38,K=1,lam=0.05", "tpfe:K0=1,M0=2,K1=1,M1=2,lam0=0.0625",
        "ephpfe:lam=0.1", "safe:M=4,normalize=1", "sappfe:lamL=0.01,lamR=0.1", "prk4k2:lam=0.1,as_printed=1",
        "fe", "embedded_heun_fe", "sapfe:K=1,lam=0.2",
    ])
    def test_examples_parse(self, text):
        sch.parse_scheme(text)

    def test_values_match_builder(self):
        assert sch.parse_scheme("pfe:K=2,lam=0.1") == sch.pfe(K=2, lam=0.1)
        assert sch.parse_scheme(" prk : outer=heun , K=2, lam=0.3".replace(" : ", ":")) == sch.prk(sch.heun(), K=2, lam=0.3)

    def test_unknown_key_lists_valid(self):
        with pytest.raises(ParameterError, match="valid keys: K, lam"):
            sch.parse_scheme("pfe:K=1,lam=0.1,mu=3")

    def test_unknown_name_shows_grammar(self):
        with pytest.raises(ParameterError, match="grammar"):
            sch.parse_scheme("rk45")

    @pytest.mark.parametrize("text", ["pfe:K=1", "pfe:K=1.5,lam=0.1", "pfe:K=x,lam=0.1", "pfe:K=1;lam=0.1",
                                      "prk:outer=rk45,K=1,lam=0.1", "safe:M=2,normalize=maybe"])
    def test_bad_values(self, text):
        with pytest.raises(ParameterError):
            sch.parse_scheme(text)

    def test_family(self):
        build = sch.scheme_family("pfe:K=1")
        assert build.takes_lam
        assert build(0.2) == sch.pfe(K=1, lam=0.2)
        fixed = sch.scheme_family("heun")
        assert not fixed.takes_lam and fixed(0.3) == sch.heun()

    def test_family_must_leave_lam_open(self):
        with pytest.raises(ParameterError):
            sch.scheme_family("pfe:K=1,lam=0.1")
        with pytest.raises(ParameterError):
            sch.scheme_family("pfe:K=1,foo=1")
