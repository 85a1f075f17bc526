import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvlab import series as S
from curvlab.kernels import (DISC, MATRIX2, Constant, Contract, DetBall2, Diagonal, DomainError, DruryArveson, Power,
                             Product, SeriesKernel, SzegoDisc, SzegoPolydisc, ball, derivatives,
                             diagonal_coefficients, normalize_at, polydisc, taylor_expand, to_dsl)

from conftest import kernel_and_point


def small_point(rng, m, r):
    v = rng.normal(size=m) + 1j * rng.normal(size=m)
    return r * v / np.linalg.norm(v)


CLOSED_FORMS = [
    (SzegoDisc(), lambda z, w: 1 / (1 - z[0] * np.conj(w[0]))),
    (SzegoPolydisc(3), lambda z, w: np.prod(1 / (1 - z * np.conj(w)))),
    (DruryArveson(2), lambda z, w: 1 / (1 - np.vdot(w, z))),
    (DetBall2(), lambda z, w: 1 / np.linalg.det(np.eye(2) - z.reshape(2, 2) @ w.reshape(2, 2).conj().T)),
    (Diagonal((8, 16), 15), lambda z, w: 8 + 16 * (u := z[0] * np.conj(w[0])) + 15 * u**2 / (1 - u)),
    (Contract(SzegoDisc()), lambda z, w: 1.0 + 0j),
    (Contract(DruryArveson(2)), lambda z, w: 1.0 + 0j),
    (Power(DruryArveson(2), 0.5), lambda z, w: (1 - np.vdot(w, z)) ** -0.5),
]


class TestValues:
    @pytest.mark.parametrize("k,f", CLOSED_FORMS, ids=lambda x: to_dsl(x) if hasattr(x, "domain") else "")
    def test_value_matches_closed_form(self, rng, k, f):
        for _ in range(5):
            z, w = small_point(rng, k.domain.m, 0.6), small_point(rng, k.domain.m, 0.6)
            assert abs(k.value(z, w) - f(z, w)) < 1e-12

    @pytest.mark.parametrize("k,f", CLOSED_FORMS, ids=lambda x: to_dsl(x) if hasattr(x, "domain") else "")
    def test_series_matches_closed_form_near_center(self, rng, k, f):
        m = k.domain.m
        order = 12 if m <= 2 else 6
        s = taylor_expand(k, np.zeros(m), order)
        for _ in range(3):
            z, w = small_point(rng, m, 0.1), small_point(rng, m, 0.1)
            assert abs(S.evaluate(s, z, w) - f(z, w)) < 1e-8

    @pytest.mark.parametrize("k,f", CLOSED_FORMS[:5], ids=lambda x: to_dsl(x) if hasattr(x, "domain") else "")
    def test_expansion_about_interior_point(self, rng, k, f):
        m = k.domain.m
        c = small_point(rng, m, 0.3)
        s = taylor_expand(k, c, 10 if m <= 2 else 5)
        z, w = c + small_point(rng, m, 0.05), c + small_point(rng, m, 0.05)
        assert abs(S.evaluate(s, z, w) - f(z, w)) < 1e-7

    def test_hermitian_symmetry(self, rng):
        k = DetBall2()
        z, w = small_point(rng, 4, 0.5), small_point(rng, 4, 0.5)
        assert abs(k.value(z, w) - np.conj(k.value(w, z))) < 1e-13

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            SzegoDisc().value(1.0, 0.0)
        with pytest.raises(DomainError):
            DruryArveson(2).value([0.8, 0.8], [0, 0])
        with pytest.raises(DomainError):
            SzegoDisc().value([0.1, 0.2], 0)
        with pytest.raises(DomainError):
            taylor_expand(SzegoDisc(), 1.2, 2)

    def test_product_domain_mismatch(self):
        with pytest.raises(DomainError):
            Product(SzegoDisc(), DruryArveson(2))
        assert Product(Constant(2.0), DruryArveson(2)).domain == ball(2)

    def test_domain_helpers(self):
        assert polydisc(1) == DISC and ball(1) == DISC
        assert MATRIX2.radius(np.array([0.5, 0, 0, 0.5])) == pytest.approx(0.5)
        assert str(ball(3)) == "ball(3)"

    def test_da1_is_szego(self, rng):
        s1 = taylor_expand(DruryArveson(1), 0.2, 6)
        s2 = taylor_expand(SzegoDisc(), 0.2, 6)
        assert s1.allclose(s2, atol=1e-12)

    def test_log_value_consistent(self, rng):
        k = Power(Diagonal((1, 2), 1.0), 0.5)
        z = w = np.array([0.3 + 0.4j])
        assert abs(cmath.exp(k.log_value(z, w)) - k.value(z, w)) < 1e-12


class TestExpansions:
    def test_detball_log_series_matches_trace_expansion(self):
        """Brute-force oracle: log det(I - ZW*)^-1 = sum_k tr((ZW*)^k) / k, expanded symbolically."""
        order = 4
        logs = S.log(taylor_expand(DetBall2(), np.zeros(4), order))

        def var(i, side):
            e = [0, 0, 0, 0]
            e[i] = 1
            key = (tuple(e), (0,) * 4) if side == "z" else ((0,) * 4, tuple(e))
            return {key: 1.0}

        def pmul(p, q):
            out = {}
            for (I1, J1), a in p.items():
                for (I2, J2), b in q.items():
                    key = (tuple(x + y for x, y in zip(I1, I2)), tuple(x + y for x, y in zip(J1, J2)))
                    out[key] = out.get(key, 0) + a * b
            return out

        def padd(p, q, c=1.0):
            out = dict(p)
            for key, v in q.items():
                out[key] = out.get(key, 0) + c * v
            return out

        zm = [[var(0, "z"), var(1, "z")], [var(2, "z"), var(3, "z")]]
        wm = [[var(0, "w"), var(1, "w")], [var(2, "w"), var(3, "w")]]
        a = [[padd(pmul(zm[i][0], wm[j][0]), pmul(zm[i][1], wm[j][1])) for j in range(2)] for i in range(2)]
        oracle, power = {}, a
        for k in range(1, order + 1):
            trace = padd(power[0][0], power[1][1])
            oracle = padd(oracle, trace, 1.0 / k)
            power = [[padd(pmul(power[i][0], a[0][j]), pmul(power[i][1], a[1][j])) for j in range(2)]
                     for i in range(2)]
        want = S.Series.from_dict(4, order, oracle)
        assert logs.allclose(want, atol=1e-12)
        assert logs.coeff((1, 0, 0, 1), (0, 1, 1, 0)) == pytest.approx(1.0)
        assert logs.coeff((1, 0, 0, 3), (1, 0, 0, 3)) == pytest.approx(oracle.get(((1, 0, 0, 3), (1, 0, 0, 3)), 0.0))

    def test_diagonal_kernel_coefficients(self):
        k = Diagonal((8, 16), 15)
        assert np.allclose(diagonal_coefficients(k, 5), [8, 16, 15, 15, 15, 15])
        assert np.allclose(diagonal_coefficients(Contract(k), 4), [8, 8, -1, 0, 0])
        assert diagonal_coefficients(DruryArveson(2), 3) is None

    def test_da_coefficients_multinomial(self):
        s = taylor_expand(DruryArveson(2), [0, 0], 4)
        assert s.coeff((2, 1), (2, 1)) == pytest.approx(3.0)
        assert s.coeff((2, 1), (1, 2)) == 0

    def test_normalize_at(self, rng):
        k = DruryArveson(2)
        w0 = small_point(rng, 2, 0.4)
        n = normalize_at(k, w0, 5)
        assert n.coeffs[0, 0] == 1
        assert np.allclose(n.coeffs[1:, 0], 0) and np.allclose(n.coeffs[0, 1:], 0)
        # the curvature at w0 is unchanged by normalization
        from curvlab.curvature import curvature_matrix
        d = n.coeffs[1:3, 1:3]
        assert np.allclose(-d, curvature_matrix(k, w0).entries, atol=1e-12)

    def test_derivatives_finite_difference(self, rng):
        k = Diagonal((1, 3, 2), 1.5)
        w = 0.3 + 0.2j
        value, grad, hess = derivatives(k, w)
        f = lambda x: k.value(x, x).real  # noqa: E731
        h = 1e-4
        dx = (f(w + h) - f(w - h)) / (2 * h)
        dy = (f(w + 1j * h) - f(w - 1j * h)) / (2 * h)
        assert abs(grad[0] - 0.5 * (dx - 1j * dy)) < 1e-7
        lap = (f(w + h) + f(w - h) + f(w + 1j * h) + f(w - 1j * h) - 4 * f(w)) / h**2
        assert abs(hess[0, 0] - lap / 4) < 1e-5
        assert value == pytest.approx(f(w))

    def test_series_kernel(self, rng):
        s = taylor_expand(SzegoDisc(), 0.0, 10)
        k = SeriesKernel(s)
        assert abs(k.value(0.1, 0.2) - 1 / (1 - 0.02)) < 1e-10
        with pytest.raises(DomainError):
            k.expand((0.1,), 3)

    def test_power_and_product_consistency(self):
        k = Diagonal((1, 2), 1.0)
        a = taylor_expand(Power(k, 2.0), 0.1, 6)
        b = taylor_expand(Product(k, k), 0.1, 6)
        assert a.allclose(b, atol=1e-12)


@given(kernel_and_point())
def test_expansion_agrees_with_values(kp):
    k, w = kp
    m = k.domain.m
    s = taylor_expand(k, w, 3 if m > 2 else 6)
    assert s.coeffs[0, 0].real == pytest.approx(k.value(w, w).real, rel=1e-10)
    assert s.hermitian_defect() == 0.0


@given(st.lists(st.floats(0.1, 10), min_size=1, max_size=5), st.floats(0, 10))
def test_dsl_pretty_printer_is_parseable(cs, tail):
    from curvlab.dsl import parse_kernel
    k = Diagonal(tuple(cs), tail)
    assert parse_kernel(to_dsl(k)) == k
