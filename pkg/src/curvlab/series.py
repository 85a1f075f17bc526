"""Truncated power series in ``z`` and ``conj(w)``.

A series of order ``N`` in ``m`` variables stores the coefficients
``a[I, J]`` of ``(z - c)^I conj(w - c)^J`` for all multi-indices with
``|I| <= N`` and ``|J| <= N``.  Coefficients live in a dense complex matrix
whose rows are indexed by ``I`` and columns by ``J``; monomials are sorted by
total degree, so the basis of order ``N`` is a prefix of the basis of any
higher order.  A Hermitian series (``a[I, J] == conj(a[J, I])``) is then a
Hermitian matrix.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.signal import convolve2d

MultiIndex = tuple[int, ...]

HERMITIAN_RTOL = 1e-12
GUARD_RADIUS = 0.95
MAX_ORDER = 12


class SeriesError(ValueError):
    pass


# ---------------------------------------------------------------------------
# multi-indices
# ---------------------------------------------------------------------------


def colex_key(index: Sequence[int]) -> tuple[int, ...]:
    """Sort key for the colexicographic order (last exponent most significant)."""
    return tuple(reversed(index))


def colex_leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return colex_key(a) <= colex_key(b)


def support(index: Sequence[int]) -> tuple[int, ...]:
    """Positions carrying a non-zero exponent; ``len(support(I))`` is c(I)."""
    return tuple(k for k, e in enumerate(index) if e != 0)


def unit(m: int, i: int) -> MultiIndex:
    return tuple(1 if k == i else 0 for k in range(m))


def indices_below(delta: Sequence[int]) -> list[MultiIndex]:
    """All ``alpha <= delta`` (componentwise), in colexicographic order."""
    ranges = [range(d + 1) for d in delta]
    return sorted(itertools.product(*ranges), key=colex_key)


def factorial(index: Sequence[int]) -> int:
    return math.prod(math.factorial(e) for e in index)


@lru_cache(maxsize=None)
def degree_monomials(m: int, degree: int) -> tuple[MultiIndex, ...]:
    out = []
    for combo in itertools.combinations_with_replacement(range(m), degree):
        exps = [0] * m
        for k in combo:
            exps[k] += 1
        out.append(tuple(exps))
    return tuple(out)


@lru_cache(maxsize=None)
def monomials(m: int, order: int) -> tuple[MultiIndex, ...]:
    return tuple(itertools.chain.from_iterable(degree_monomials(m, d) for d in range(order + 1)))


@lru_cache(maxsize=None)
def monomial_index(m: int, order: int) -> dict[MultiIndex, int]:
    return {mono: k for k, mono in enumerate(monomials(m, order))}


@lru_cache(maxsize=None)
def degree_offsets(m: int, order: int) -> tuple[int, ...]:
    offs = [0]
    for d in range(order + 1):
        offs.append(offs[-1] + len(degree_monomials(m, d)))
    return tuple(offs)


@lru_cache(maxsize=None)
def exponent_array(m: int, order: int) -> np.ndarray:
    arr = np.array(monomials(m, order), dtype=int).reshape(-1, m)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _scatter(m: int, a: int, b: int) -> sp.csr_matrix:
    """0/1 matrix sending kron index ``p * d_b + q`` to the index of
    ``mono_a[p] + mono_b[q]`` within degree ``a + b``."""
    left, right = degree_monomials(m, a), degree_monomials(m, b)
    target = {mono: k for k, mono in enumerate(degree_monomials(m, a + b))}
    rows = [target[tuple(x + y for x, y in zip(p, q))] for p in left for q in right]
    cols = np.arange(len(rows))
    data = np.ones(len(rows))
    return sp.csr_matrix((data, (rows, cols)), shape=(len(target), len(rows)))


@lru_cache(maxsize=None)
def _shift_maps(m: int, order: int, i: int) -> tuple[np.ndarray, np.ndarray]:
    """For each monomial I of order-1 basis: index of I + e_i and factor I_i + 1."""
    idx = monomial_index(m, order)
    basis = monomials(m, order - 1)
    pos = np.array([idx[tuple(e + (k == i) for k, e in enumerate(mono))] for mono in basis])
    fac = np.array([mono[i] + 1 for mono in basis], dtype=float)
    return pos, fac


# ---------------------------------------------------------------------------
# series types
# ---------------------------------------------------------------------------


def _as_center(center, m: int) -> tuple[complex, ...]:
    if center is None:
        return (0j,) * m
    c = tuple(complex(x) for x in np.ravel(center))
    if len(c) != m:
        raise SeriesError(f"center has {len(c)} coordinates, expected {m}")
    return c


class Series:
    """Truncated series, not necessarily Hermitian.

    Instances are immutable; the coefficient matrix is read-only.
    """

    __slots__ = ("m", "order", "center", "coeffs")

    def __init__(self, m: int, order: int, coeffs=None, center=None):
        if m < 1:
            raise SeriesError("m must be positive")
        if not 0 <= order <= MAX_ORDER:
            raise SeriesError(f"order must lie in [0, {MAX_ORDER}], got {order}")
        size = len(monomials(m, order))
        if coeffs is None:
            arr = np.zeros((size, size), dtype=complex)
        else:
            arr = np.array(coeffs, dtype=complex)
            if arr.shape != (size, size):
                raise SeriesError(f"coefficient matrix must be {size}x{size}, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "center", _as_center(center, m))
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("series are immutable")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_dict(cls, m: int, order: int, terms: Mapping[tuple[MultiIndex, MultiIndex], complex], center=None):
        idx = monomial_index(m, order)
        arr = np.zeros((len(idx), len(idx)), dtype=complex)
        for (I, J), value in terms.items():
            I, J = tuple(I), tuple(J)
            if len(I) != m or len(J) != m or min(I + J) < 0:
                raise SeriesError(f"bad multi-index pair {(I, J)}")
            if sum(I) > order or sum(J) > order:
                continue
            arr[idx[I], idx[J]] += value
        return cls(m, order, arr, center)

    @classmethod
    def constant(cls, m: int, order: int, value: complex, center=None):
        arr = np.zeros((len(monomials(m, order)),) * 2, dtype=complex)
        arr[0, 0] = value
        return cls(m, order, arr, center)

    @classmethod
    def diagonal(cls, coeffs: Sequence[float], order: int, center=None):
        """One-variable series ``sum_n coeffs[n] (z w^*)^n``."""
        arr = np.zeros((order + 1, order + 1), dtype=complex)
        n = min(len(coeffs), order + 1)
        arr[np.arange(n), np.arange(n)] = np.asarray(coeffs[:n], dtype=complex)
        return cls(1, order, arr, center)

    def like(self, coeffs) -> Series:
        return Series(self.m, self.order, coeffs, self.center)

    # -- access --------------------------------------------------------------

    @property
    def size(self) -> int:
        return self.coeffs.shape[0]

    def coeff(self, I: Sequence[int], J: Sequence[int]) -> complex:
        I, J = tuple(I), tuple(J)
        if sum(I) > self.order or sum(J) > self.order:
            return 0j
        idx = monomial_index(self.m, self.order)
        return complex(self.coeffs[idx[I], idx[J]])

    def terms(self, atol: float = 0.0) -> dict[tuple[MultiIndex, MultiIndex], complex]:
        basis = monomials(self.m, self.order)
        rows, cols = np.nonzero(np.abs(self.coeffs) > atol)
        return {(basis[r], basis[c]): complex(self.coeffs[r, c]) for r, c in zip(rows, cols)}

    def holomorphic_part(self) -> np.ndarray:
        """Coefficients a[I, 0] in basis order."""
        return self.coeffs[:, 0].copy()

    def diagonal_coefficients(self) -> np.ndarray:
        """``a[n, n]`` for a one-variable series."""
        if self.m != 1:
            raise SeriesError("diagonal coefficients are defined for m = 1")
        return np.diag(self.coeffs).copy()

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def is_diagonal(self, atol: float = 0.0) -> bool:
        off = self.coeffs - np.diag(np.diag(self.coeffs))
        return bool(np.all(np.abs(off) <= atol))

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.coeffs - self.coeffs.conj().T), initial=0.0))

    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.coeffs), initial=0.0)))

    def conj_transpose(self) -> Series:
        """The series of ``conj(s(w, z))``."""
        return self.like(self.coeffs.conj().T)

    def truncate(self, order: int) -> Series:
        if order > self.order:
            raise SeriesError(f"cannot raise order {self.order} to {order}")
        n = len(monomials(self.m, order))
        return type(self)._rebuild(self, Series(self.m, order, self.coeffs[:n, :n], self.center))

    def allclose(self, other: Series, atol: float = 1e-10, rtol: float = 0.0) -> bool:
        _check_compatible(self, other)
        order = min(self.order, other.order)
        n = len(monomials(self.m, order))
        return bool(np.allclose(self.coeffs[:n, :n], other.coeffs[:n, :n], atol=atol, rtol=rtol))

    @staticmethod
    def _rebuild(template: Series, result: Series) -> Series:
        return result

    def __repr__(self):
        shown = ", ".join(f"{I}{J}: {v:.6g}" for (I, J), v in list(self.terms(1e-15).items())[:6])
        return f"{type(self).__name__}(m={self.m}, order={self.order}, {{{shown}{', ...' if len(self.terms(1e-15)) > 6 else ''}}})"

    # -- arithmetic sugar ------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Series):
            return add(self, other)
        return _scalar_shift(self, other)

    __radd__ = __add__

    def __neg__(self):
        return _wrap(self.like(-self.coeffs), self)

    def __sub__(self, other):
        if isinstance(other, Series):
            return add(self, -other)
        return _scalar_shift(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Series):
            return mul(self, other)
        other = complex(other)
        out = self.like(self.coeffs * other)
        return _wrap(out, self) if other.imag == 0 else out

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Series):
            return mul(self, invert(other))
        other = complex(other)
        return self * (1.0 / other.real if other.imag == 0 else 1.0 / other)


class HermitianSeries(Series):
    """Series with ``a[I, J] == conj(a[J, I])``.

    Symmetry is validated on construction: a defect above ``HERMITIAN_RTOL``
    (relative to the largest coefficient) raises, anything smaller is removed
    by averaging.
    """

    __slots__ = ()

    def __init__(self, m: int, order: int, coeffs=None, center=None):
        if coeffs is not None:
            arr = np.array(coeffs, dtype=complex)
            scale = max(1.0, float(np.max(np.abs(arr), initial=0.0)))
            defect = float(np.max(np.abs(arr - arr.conj().T), initial=0.0)) if arr.ndim == 2 and arr.shape[0] == arr.shape[1] else 0.0
            if defect > HERMITIAN_RTOL * scale:
                raise SeriesError(f"coefficients are not Hermitian (defect {defect:.3e})")
            if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
                arr = 0.5 * (arr + arr.conj().T)
            coeffs = arr
        super().__init__(m, order, coeffs, center)

    @classmethod
    def of(cls, s: Series) -> HermitianSeries:
        if isinstance(s, HermitianSeries):
            return s
        return cls(s.m, s.order, s.coeffs, s.center)

    def like(self, coeffs) -> Series:
        return Series(self.m, self.order, coeffs, self.center)

    @staticmethod
    def _rebuild(template, result):
        return HermitianSeries.of(result)


def _wrap(result: Series, *inputs: Series) -> Series:
    if inputs and all(isinstance(s, HermitianSeries) for s in inputs):
        return HermitianSeries.of(result)
    return result


def _scalar_shift(s: Series, value) -> Series:
    value = complex(value)
    arr = s.coeffs.copy()
    arr[0, 0] += value
    out = s.like(arr)
    return _wrap(out, s) if value.imag == 0 else out


def _check_compatible(s: Series, t: Series) -> None:
    if s.m != t.m:
        raise SeriesError(f"variable count mismatch: {s.m} vs {t.m}")
    if not np.allclose(s.center, t.center, rtol=0, atol=1e-14):
        raise SeriesError(f"center mismatch: {s.center} vs {t.center}")


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------


def add(s: Series, t: Series) -> Series:
    _check_compatible(s, t)
    order = min(s.order, t.order)
    n = len(monomials(s.m, order))
    out = Series(s.m, order, s.coeffs[:n, :n] + t.coeffs[:n, :n], s.center)
    return _wrap(out, s, t)


def _nonzero_blocks(arr: np.ndarray, m: int, order: int):
    offs = degree_offsets(m, order)
    out = []
    for a in range(order + 1):
        for b in range(order + 1):
            block = arr[offs[a]:offs[a + 1], offs[b]:offs[b + 1]]
            if block.any():
                out.append((a, b, block))
    return out


def _mul_coeffs(x: np.ndarray, y: np.ndarray, m: int, order: int) -> np.ndarray:
    if m == 1:
        return convolve2d(x, y)[: order + 1, : order + 1]
    offs = degree_offsets(m, order)
    out = np.zeros_like(x)
    right = _nonzero_blocks(y, m, order)
    for a, b, xb in _nonzero_blocks(x, m, order):
        for c, d, yb in right:
            if a + c > order or b + d > order:
                continue
            prod = np.kron(xb, yb)
            prod = _scatter(m, a, c) @ prod
            prod = (_scatter(m, b, d) @ prod.T).T
            out[offs[a + c]:offs[a + c + 1], offs[b + d]:offs[b + d + 1]] += prod
    return out


def mul(s: Series, t: Series) -> Series:
    """Cauchy product truncated to the smaller order."""
    _check_compatible(s, t)
    order = min(s.order, t.order)
    n = len(monomials(s.m, order))
    arr = _mul_coeffs(s.coeffs[:n, :n], t.coeffs[:n, :n], s.m, order)
    return _wrap(Series(s.m, order, arr, s.center), s, t)


def _power_sum(x: Series, weights: Iterable[complex]) -> Series:
    """``sum_k weights[k] * x^k`` for ``x`` without constant term.

    Every factor of ``x`` raises ``|I| + |J|`` by at least one, so powers
    beyond ``2 * order`` vanish identically.
    """
    total = np.zeros_like(x.coeffs)
    power = np.zeros_like(x.coeffs)
    power[0, 0] = 1.0
    for k, w in enumerate(weights):
        if k > 0:
            power = _mul_coeffs(power, x.coeffs, x.m, x.order)
            if not power.any():
                break
        if w != 0:
            total = total + w * power
    return x.like(total)


def _without_constant(s: Series, a00: complex) -> Series:
    arr = s.coeffs / a00
    arr[0, 0] = 0.0
    return s.like(arr)


def invert(s: Series) -> Series:
    """Multiplicative inverse ``t`` with ``s * t = 1`` up to the order cap."""
    a00 = complex(s.coeffs[0, 0])
    if abs(a00) <= 1e-12:
        raise SeriesError("cannot invert a series with vanishing constant term")
    x = _without_constant(s, a00)
    out = _power_sum(x, ((-1) ** k for k in range(2 * s.order + 1)))
    return _wrap(out.like(out.coeffs / a00), s)


def _positive_constant(s: Series, what: str) -> float:
    a00 = complex(s.coeffs[0, 0])
    if abs(a00.imag) > 1e-12 * max(1.0, abs(a00)) or a00.real <= 0:
        raise SeriesError(f"{what} needs a positive real constant term, got {a00}")
    return a00.real


def log(s: Series) -> Series:
    """Logarithm, ``log a00 + sum_k (-1)^(k+1) x^k / k`` with ``x = s/a00 - 1``."""
    a00 = _positive_constant(s, "log")
    x = _without_constant(s, a00)
    weights = [0.0] + [(-1) ** (k + 1) / k for k in range(1, 2 * s.order + 1)]
    out = _power_sum(x, weights)
    arr = out.coeffs.copy()
    arr[0, 0] += math.log(a00)
    return _wrap(s.like(arr), s)


def exp(s: Series) -> Series:
    a00 = complex(s.coeffs[0, 0])
    arr = s.coeffs.copy()
    arr[0, 0] = 0.0
    x = s.like(arr)
    weights = [1.0 / math.factorial(k) for k in range(2 * s.order + 1)]
    out = _power_sum(x, weights)
    factor = math.exp(a00.real) if a00.imag == 0 else np.exp(a00)
    return _wrap(s.like(out.coeffs * factor), s)


def binomial_coefficients(t: float, count: int) -> list[float]:
    """Generalized binomial coefficients ``binom(t, k)`` for ``k < count``."""
    out = [1.0]
    for k in range(1, count):
        out.append(out[-1] * (t - k + 1) / k)
    return out


def real_power(s: Series, t: float) -> Series:
    """``s ** t`` on the principal branch, i.e. ``exp(t * log(s))``.

    Computed from the binomial series ``a00^t sum_k binom(t, k) x^k``,
    which is exact for non-negative integer ``t``.
    """
    a00 = _positive_constant(s, "real_power")
    t = float(t)
    x = _without_constant(s, a00)
    out = _power_sum(x, binomial_coefficients(t, 2 * s.order + 1))
    return _wrap(s.like(out.coeffs * a00**t), s)


def mixed_derivative(s: Series, i: int, j: int) -> Series:
    """Series of ``d/dz_i d/dconj(w_j) s``; indices are 0-based.

    The coefficient at ``(I, J)`` is ``(I_i + 1)(J_j + 1) a[I + e_i, J + e_j]``
    and the order drops by one.
    """
    if not (0 <= i < s.m and 0 <= j < s.m):
        raise SeriesError(f"derivative index out of range for m = {s.m}")
    if s.order == 0:
        raise SeriesError("an order-0 series has no mixed derivative")
    rows, rfac = _shift_maps(s.m, s.order, i)
    cols, cfac = _shift_maps(s.m, s.order, j)
    arr = s.coeffs[np.ix_(rows, cols)] * rfac[:, None] * cfac[None, :]
    out = Series(s.m, s.order - 1, arr, s.center)
    return HermitianSeries.of(out) if i == j and isinstance(s, HermitianSeries) else out


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _points(p, m: int) -> np.ndarray:
    arr = np.asarray(p, dtype=complex)
    if m == 1:
        return arr.reshape(-1, 1)
    arr = arr.reshape(1, -1) if arr.ndim == 1 else arr.reshape(arr.shape[0], -1)
    if arr.shape[1] != m:
        raise SeriesError(f"points must have {m} coordinates, got {arr.shape[1]}")
    return arr


def monomial_values(s: Series, points) -> np.ndarray:
    """Matrix of ``(p - c)^I`` with one row per point."""
    pts = _points(points, s.m) - np.asarray(s.center)
    exps = exponent_array(s.m, s.order)
    return np.prod(pts[:, None, :] ** exps[None, :, :], axis=2)


def _guard(s: Series, points, radius: float) -> None:
    pts = _points(points, s.m) - np.asarray(s.center)
    if np.max(np.abs(pts), initial=0.0) > radius:
        raise SeriesError(f"point outside guard radius {radius} of the expansion center")


def evaluate(s: Series, z, w, radius: float = GUARD_RADIUS) -> complex:
    """``s(z, w) = sum a[I, J] (z - c)^I conj(w - c)^J``."""
    return complex(gram(s, [z], [w], radius)[0, 0])


def gram(s: Series, zs, ws=None, radius: float = GUARD_RADIUS) -> np.ndarray:
    """Matrix ``[s(z_i, w_j)]``; ``ws`` defaults to ``zs``."""
    zs = _points(zs, s.m)
    ws = zs if ws is None else _points(ws, s.m)
    _guard(s, zs, radius)
    _guard(s, ws, radius)
    uz = monomial_values(s, zs)
    uw = monomial_values(s, ws)
    return uz @ s.coeffs @ uw.conj().T


def diagonal_eval(s: Series, w, radius: float = GUARD_RADIUS):
    """``s(w, w)``; real for Hermitian series."""
    value = evaluate(s, w, w, radius)
    if isinstance(s, HermitianSeries):
        if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
            raise SeriesError(f"diagonal value of a Hermitian series is not real: {value}")
        return value.real
    return value
