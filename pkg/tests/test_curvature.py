import numpy as np
import pytest
from hypothesis import given, settings

from curvlab import curvature as C
from curvlab.kernels import (DetBall2, Diagonal, DomainError, DruryArveson, Power, SzegoDisc, SzegoPolydisc,
                             taylor_expand)
from curvlab.points import radial_grid

from conftest import kernel_and_point
from oracles import fd_curvature


class TestClosedForms:
    @pytest.mark.parametrize("r", [0.0, 0.3, 0.5, 0.8])
    def test_szego(self, r):
        assert C.curvature_scalar(SzegoDisc(), r) == pytest.approx(-1 / (1 - r * r) ** 2, rel=1e-12)

    def test_szego_at_half(self):
        assert C.curvature_scalar(SzegoDisc(), 0.5) == pytest.approx(-16 / 9, rel=1e-12)

    def test_agler_at_zero(self):
        assert C.curvature_scalar(Diagonal((8, 16), 15), 0.0) == pytest.approx(-2.0)

    def test_drury_arveson_at_zero(self):
        assert np.allclose(C.curvature_matrix(DruryArveson(2), [0, 0]).entries, -np.eye(2))

    def test_power_scales_curvature(self):
        w = 0.4 - 0.2j
        assert C.curvature_scalar(Power(SzegoDisc(), 2.5), w) == pytest.approx(2.5 * C.curvature_scalar(SzegoDisc(), w))

    def test_polydisc_diagonal(self):
        w = np.array([0.3, 0.5j])
        cm = C.curvature_matrix(SzegoPolydisc(2), w)
        assert np.allclose(cm.entries, np.diag(-1 / (1 - np.abs(w) ** 2) ** 2))

    def test_scalar_requires_one_variable(self):
        with pytest.raises(DomainError):
            C.curvature_scalar(DruryArveson(2), [0, 0])


class TestFiniteDifferences:
    @pytest.mark.parametrize("k,w", [
        (Diagonal((8, 16), 15), 0.3 + 0.4j),
        (DruryArveson(3), np.array([0.2, -0.1j, 0.3])),
        (DetBall2(), np.array([0.1, 0.2j, -0.1, 0.15])),
        (SzegoPolydisc(2) * SzegoPolydisc(2) ** 0.5, np.array([0.3, 0.4 + 0.1j])),
    ])
    def test_against_central_differences(self, k, w):
        an = C.curvature_matrix(k, w).entries
        fd = fd_curvature(k, w)
        assert np.max(np.abs(an - fd)) <= 1e-6 * np.max(np.abs(an))


class TestGramIdentity:
    @pytest.mark.parametrize("k,w", [
        (SzegoDisc(), 0.6),
        (DruryArveson(2), [0.3, 0.4j]),
        (DetBall2(), [0.2, 0.1, 0.0, -0.3j]),
    ])
    def test_deviation_small(self, k, w):
        assert C.curvature_gram_check(k, w) < 1e-8


class TestSeries:
    def test_curvature_at_center_matches_pointwise(self):
        k = DruryArveson(2)
        w = np.array([0.2, 0.3j])
        entries = C.curvature_series(taylor_expand(k, w, 4))
        assert np.allclose(C.curvature_at_center(entries), C.curvature_matrix(k, w).entries, atol=1e-12)


class TestCompare:
    def test_agler_dominated_by_szego(self):
        v = C.curvature_compare(Diagonal((8, 16), 15), SzegoDisc(), "pointwise")
        assert v.ok
        assert v.witness["differences"][0] == pytest.approx(1.0)

    def test_reverse_fails(self):
        assert not C.curvature_compare(SzegoDisc(), Diagonal((8, 16), 15), "pointwise").ok

    def test_function_order_szego_vs_itself_power(self):
        # dd-bar log(szego^2 / szego) = dd-bar log szego is positive definite
        assert C.curvature_compare(Power(SzegoDisc(), 2.0), SzegoDisc(), "function_order").ok
        assert not C.curvature_compare(SzegoDisc(), Power(SzegoDisc(), 2.0), "function_order").ok

    def test_function_order_ball(self):
        assert C.curvature_compare(Power(DruryArveson(2), 2.0), DruryArveson(2), "function_order",
                                   points=[[0.1, 0.0], [0.0, 0.2j]]).ok

    def test_bad_mode_and_domains(self):
        with pytest.raises(ValueError):
            C.curvature_compare(SzegoDisc(), SzegoDisc(), "sideways")
        with pytest.raises(DomainError):
            C.curvature_compare(SzegoDisc(), DruryArveson(2))

    def test_default_grid(self):
        assert len(C.default_points(SzegoDisc())) == 80
        assert np.allclose(radial_grid([0.5], 4)[:, 0], 0.5 * np.array([1, 1j, -1, -1j]))


@settings(max_examples=40)
@given(kernel_and_point())
def test_curvature_negative_definite(kp):
    k, w = kp
    cm = C.curvature_matrix(k, w)
    assert cm.eigenvalues.max() <= 1e-9
    assert C.curvature_gram_check(k, w) <= 1e-8
