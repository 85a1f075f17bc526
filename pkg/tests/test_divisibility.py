import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvlab import divisibility as D
from curvlab import series as S
from curvlab.kernels import (Contract, DetBall2, Diagonal, DomainError, DruryArveson, Power, SzegoDisc,
                             taylor_expand)
from curvlab.points import sample_points

NONDIV = SzegoDisc() * Diagonal((1.0, 1.0, 0.25), 1.0)  # 1 + 2x + sum (n + 1/4) x^n


class TestPowers:
    def test_szego_divisible(self):
        rep = D.divisibility_check(SzegoDisc())
        assert rep.divisible and rep.overall == "divisible-up-to-order"
        assert "order 8" in rep.note

    def test_drury_arveson_divisible(self):
        assert D.divisibility_check(DruryArveson(2), (0.1, 0.5)).divisible

    def test_factor_power_coefficients(self):
        fs = taylor_expand(Contract(NONDIV), 0.0, 8)
        for t in (0.25, 0.5, 0.75, 1.0):
            c = S.real_power(fs, t).diagonal_coefficients().real
            # (1 + x + x^2/4 + ...)^t: x^2 coefficient t/4 + t(t-1)/2 = t(2t-1)/4
            assert c[2] == pytest.approx(t * (2 * t - 1) / 4, abs=1e-12)

    def test_nondivisible_factor(self):
        rep = D.divisibility_check(Contract(NONDIV), (0.25, 0.5, 0.75, 1.0))
        assert not rep.divisible and rep.witness_t == 0.25
        assert rep.verdict_at(0.5).ok and rep.verdict_at(1.0).ok

    def test_detball_not_divisible_at_half(self):
        pts = sample_points(DetBall2().domain, 8, 0, radius=0.6)
        rep = D.divisibility_check(DetBall2(), (0.5, 1.0), order=6, points=pts)
        assert rep.witness_t == 0.5
        assert rep.verdict_at(1.0).ok

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            D.divisibility_check(SzegoDisc(), (0.0, 1.0))

    def test_report_dict(self):
        d = D.divisibility_check(SzegoDisc(), (0.5,)).to_dict()
        assert d["per_t"][0]["t"] == 0.5 and d["witness_t"] is None


class TestLogKernel:
    def test_szego_log_cpd(self):
        rep = D.log_kernel_cpd_check(SzegoDisc(), seed=3)
        assert rep.ok

    def test_detball_log_not_cpd(self):
        pts = sample_points(DetBall2().domain, 30, 42, radius=0.6)
        rep = D.log_kernel_cpd_check(DetBall2(), pts)
        assert not rep.cpd.ok and not rep.shifted.ok

    def test_branch_guard(self):
        # 1 - x has Re K <= 0 away from the center for |x| near 1
        k = Diagonal((1.0, -1.5))
        with pytest.raises(D.BranchError):
            D.log_kernel_cpd_check(k, [[0.9], [-0.9]])

    def test_branch_safe_points(self):
        pts = D.branch_safe_points(SzegoDisc(), 5, 0, np.zeros(1), 0.9)
        assert pts.shape == (5, 1)


class TestReconstruction:
    def test_szego_roundtrip(self):
        logs = S.log(taylor_expand(SzegoDisc(), 0.0, 8))
        res = D.reconstruct(logs)
        assert res.diagonal_error < 1e-9
        assert res.k0_verdict.ok and res.divisible
        assert res.kernel.allclose(taylor_expand(SzegoDisc(), 0.0, 8), atol=1e-10)
        assert S.diagonal_eval(res.kernel, 0.3) == pytest.approx(1 / (1 - 0.09), abs=1e-6)

    def test_split(self):
        logs = S.log(taylor_expand(Diagonal((2.0, 1.0), 0.5), 0.2, 5))
        k0, psi = D.split_log_series(logs)
        assert k0.coeffs[0, 0] == 0 and not k0.coeffs[0, 1:].any()
        back = psi + k0 + psi.conj_transpose()
        assert back.allclose(logs, atol=1e-14)

    def test_split_rejects_non_hermitian(self):
        a = np.zeros((3, 3), complex)
        a[1, 0] = 1.0
        with pytest.raises(S.SeriesError):
            D.split_log_series(S.Series(1, 2, a))

    def test_indefinite_k0_detected(self):
        logs = S.HermitianSeries(1, 4, np.diag([0.0, 1.0, -0.5, 0.0, 0.0]))
        res = D.reconstruct(logs, (0.5, 1.0))
        assert not res.k0_verdict.ok


class TestDivisibleContraction:
    def test_routes_agree_on_examples(self):
        for k, want in [(SzegoDisc(), True), (NONDIV, False), (Power(SzegoDisc(), 2.0), True)]:
            rep = D.divisible_contraction_check(k, (0.25, 0.5, 1.0))
            assert rep.routes_agree
            assert rep.divisible_contraction == want

    def test_matrix_ball_rejected(self):
        with pytest.raises(DomainError):
            D.divisible_contraction_check(DetBall2())


@settings(max_examples=20)
@given(st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3), st.floats(0.2, 3.0), st.integers(0, 2**31))
def test_exp_of_positive_series_is_divisible(b, p, seed):
    logs = S.HermitianSeries(1, 6, np.diag([0.0] + b + [0.0] * 3)) + p * S.log(S.Series.diagonal([1.0] * 7, 6))
    res = D.reconstruct(logs, (0.1, 0.5, 1.0))
    assert res.diagonal_error < 1e-9
    assert res.divisible
    # the first coefficient of exp(log K) is b_1 + p
    assert res.kernel.coeff((1,), (1,)).real == pytest.approx(b[0] + p, abs=1e-12)
    assert math.isfinite(res.diagonal_error)
