"""Kernel families, combinators and their Taylor expansions.

Every kernel is an immutable expression tree.  Leaves are closed-form
families (Szego kernels of the disc and polydisc, the Drury-Arveson kernel,
the determinant kernel of the 2x2 matrix ball, diagonal kernels
``sum a_n (z conj w)^n`` with an eventually constant tail, constants and
explicit series); inner nodes are products, real powers and multiplication by
the domain's ``(1 - z conj w)``-type factor.

Points are complex vectors of length ``m``.  Points of the matrix ball are
2x2 matrices flattened row-major: ``(Z11, Z12, Z21, Z22)``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from curvlab import series as S
from curvlab.series import HermitianSeries, Series


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    kind: str  # "disc", "polydisc", "ball" or "matrix2"
    m: int

    def contains(self, p, margin: float = 0.0) -> bool:
        return self.radius(p) < 1.0 - margin

    def radius(self, p) -> float:
        """Domain-specific size of ``p``; the domain is ``radius < 1``."""
        v = as_point(p, self)
        if self.kind in ("disc", "polydisc"):
            return float(np.max(np.abs(v)))
        if self.kind == "ball":
            return float(np.linalg.norm(v))
        return float(np.linalg.norm(v.reshape(2, 2), 2))

    def __str__(self):
        return self.kind if self.kind in ("disc", "matrix2") else f"{self.kind}({self.m})"


DISC = Domain("disc", 1)
MATRIX2 = Domain("matrix2", 4)


def polydisc(m: int) -> Domain:
    return DISC if m == 1 else Domain("polydisc", m)


def ball(m: int) -> Domain:
    return DISC if m == 1 else Domain("ball", m)


def as_point(p, domain: Domain) -> np.ndarray:
    v = np.asarray(p, dtype=complex).ravel()
    if v.size != domain.m:
        raise DomainError(f"point {p!r} has {v.size} coordinates; {domain} needs {domain.m}")
    return v


def _check(domain: Domain, *points) -> list[np.ndarray]:
    out = []
    for p in points:
        if not domain.contains(p):
            raise DomainError(f"point {p!r} is not inside the {domain}")
        out.append(as_point(p, domain))
    return out


def _inner(z: np.ndarray, w: np.ndarray) -> complex:
    return complex(np.sum(z * np.conj(w)))


# ---------------------------------------------------------------------------
# coordinate series
# ---------------------------------------------------------------------------


def _z(m: int, order: int, center, i: int) -> Series:
    """``z_i = c_i + (z - c)_i`` as a holomorphic series."""
    e = S.unit(m, i)
    zero = (0,) * m
    return Series.from_dict(m, order, {(zero, zero): center[i], (e, zero): 1.0}, center)


def _inner_series(m: int, order: int, center, idx: Sequence[int] | None = None) -> HermitianSeries:
    """Series of ``sum_i z_i conj(w_i)`` (over ``idx``) about ``center``."""
    zero = (0,) * m
    terms: dict = {}
    for i in range(m) if idx is None else idx:
        e = S.unit(m, i)
        c = complex(center[i])
        for key, val in (((zero, zero), c * c.conjugate()), ((e, zero), c.conjugate()),
                         ((zero, e), c), ((e, e), 1.0)):
            terms[key] = terms.get(key, 0) + val
    return HermitianSeries.from_dict(m, order, terms, center)


def contraction_factor_series(domain: Domain, order: int, center) -> HermitianSeries:
    """Series of ``1 - <z, w>`` (disc, ball) or ``prod (1 - z_i conj w_i)`` (polydisc)."""
    if domain.kind in ("disc", "ball"):
        return 1.0 - _inner_series(domain.m, order, center)
    if domain.kind == "polydisc":
        out = Series.constant(domain.m, order, 1.0, center)
        out = HermitianSeries.of(out)
        for i in range(domain.m):
            out = out * (1.0 - _inner_series(domain.m, order, center, [i]))
        return out
    raise DomainError(f"no (1 - z w*)-type factor for the {domain}")


def contraction_factor_value(domain: Domain, z: np.ndarray, w: np.ndarray) -> complex:
    if domain.kind in ("disc", "ball"):
        return 1.0 - _inner(z, w)
    if domain.kind == "polydisc":
        return complex(np.prod(1.0 - z * np.conj(w)))
    raise DomainError(f"no (1 - z w*)-type factor for the {domain}")


def contraction_factor_log(domain: Domain, z: np.ndarray, w: np.ndarray) -> complex:
    if domain.kind in ("disc", "ball"):
        return cmath.log(1.0 - _inner(z, w))
    if domain.kind == "polydisc":
        return complex(np.sum(np.log(1.0 - z * np.conj(w))))
    raise DomainError(f"no (1 - z w*)-type factor for the {domain}")


# ---------------------------------------------------------------------------
# kernel tree
# ---------------------------------------------------------------------------


class Kernel:
    """Base class for kernel expressions."""

    domain: Domain

    def value(self, z, w) -> complex:
        """Kernel value ``K(z, w)``; holomorphic in ``z``, anti-holomorphic in ``w``."""
        z, w = _check(self.domain, z, w)
        return self._value(z, w)

    def log_value(self, z, w) -> complex:
        """Logarithm of ``K(z, w)`` continued from the diagonal where possible."""
        z, w = _check(self.domain, z, w)
        return self._log(z, w)

    def expand(self, center, order: int) -> Series:
        raise NotImplementedError

    def _value(self, z, w) -> complex:
        return cmath.exp(self._log(z, w))

    def _log(self, z, w) -> complex:
        v = self._value(z, w)
        if v == 0:
            raise DomainError("kernel vanishes; logarithm undefined")
        return cmath.log(v)

    def __mul__(self, other: Kernel) -> Kernel:
        return Product(self, other)

    def __pow__(self, t: float) -> Kernel:
        return Power(self, float(t))


@dataclass(frozen=True)
class SzegoDisc(Kernel):
    """``1 / (1 - z conj w)`` on the unit disc."""

    @property
    def domain(self):
        return DISC

    def _value(self, z, w):
        return 1.0 / (1.0 - _inner(z, w))

    def _log(self, z, w):
        return -cmath.log(1.0 - _inner(z, w))

    def expand(self, center, order):
        return S.invert(1.0 - _inner_series(1, order, center))


@dataclass(frozen=True)
class SzegoPolydisc(Kernel):
    m: int

    @property
    def domain(self):
        return polydisc(self.m)

    def _value(self, z, w):
        return complex(np.prod(1.0 / (1.0 - z * np.conj(w))))

    def _log(self, z, w):
        return -complex(np.sum(np.log(1.0 - z * np.conj(w))))

    def expand(self, center, order):
        return S.invert(contraction_factor_series(self.domain, order, center))


@dataclass(frozen=True)
class DruryArveson(Kernel):
    """``1 / (1 - <z, w>)`` on the unit ball of ``C^m``."""

    m: int

    @property
    def domain(self):
        return ball(self.m)

    def _value(self, z, w):
        return 1.0 / (1.0 - _inner(z, w))

    def _log(self, z, w):
        return -cmath.log(1.0 - _inner(z, w))

    def expand(self, center, order):
        return S.invert(1.0 - _inner_series(self.m, order, center))


@dataclass(frozen=True)
class Diagonal(Kernel):
    """``sum_n a_n (z conj w)^n`` with ``a_n = tail`` for ``n >= len(coeffs)``."""

    coeffs: tuple[float, ...]
    tail: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        object.__setattr__(self, "tail", float(self.tail))

    @property
    def domain(self):
        return DISC

    def coefficient(self, n: int) -> float:
        return self.coeffs[n] if n < len(self.coeffs) else self.tail

    def _value(self, z, w):
        u = _inner(z, w)
        n = len(self.coeffs)
        poly = sum(c * u**k for k, c in enumerate(self.coeffs))
        return poly + (self.tail * u**n / (1.0 - u) if self.tail else 0.0)

    def expand(self, center, order):
        u = _inner_series(1, order, center)
        out = HermitianSeries.of(Series.constant(1, order, 0.0, center))
        power = HermitianSeries.of(Series.constant(1, order, 1.0, center))
        for c in self.coeffs:
            if c:
                out = out + c * power
            power = power * u
        if self.tail:
            out = out + self.tail * power * S.invert(1.0 - u)
        return out


@dataclass(frozen=True)
class DetBall2(Kernel):
    """``det(I - Z W^*)^{-1}`` on the operator-norm unit ball of 2x2 matrices."""

    @property
    def domain(self):
        return MATRIX2

    @staticmethod
    def _eigs(z, w):
        return np.linalg.eigvals(z.reshape(2, 2) @ w.reshape(2, 2).conj().T)

    def _value(self, z, w):
        return 1.0 / np.linalg.det(np.eye(2) - z.reshape(2, 2) @ w.reshape(2, 2).conj().T)

    def _log(self, z, w):
        # continuous branch: each eigenvalue of Z W^* lies in the open unit disc
        return -complex(np.sum(np.log(1.0 - self._eigs(z, w))))

    def expand(self, center, order):
        z = [_z(4, order, center, i) for i in range(4)]
        zbar = [t.conj_transpose() for t in z]
        det_z = z[0] * z[3] - z[1] * z[2]
        det_w = zbar[0] * zbar[3] - zbar[1] * zbar[2]
        poly = 1.0 - _inner_series(4, order, center) + det_z * det_w
        return S.invert(HermitianSeries.of(poly))


@dataclass(frozen=True)
class Constant(Kernel):
    """Constant kernel; a ``None`` domain adapts to whatever it is combined with."""

    c: float
    dom: Domain | None = None

    @property
    def domain(self):
        return self.dom if self.dom is not None else DISC

    def _value(self, z, w):
        return complex(self.c)

    def _log(self, z, w):
        return cmath.log(self.c)

    def expand(self, center, order):
        return HermitianSeries.constant(self.domain.m, order, self.c, center)


@dataclass(frozen=True, eq=False)
class SeriesKernel(Kernel):
    """A kernel given by a truncated Hermitian series."""

    series: HermitianSeries
    dom: Domain = DISC

    @property
    def domain(self):
        return self.dom

    def value(self, z, w):
        z, w = _check(self.domain, z, w)
        return S.evaluate(self.series, z, w)

    def _value(self, z, w):
        return S.evaluate(self.series, z, w)

    def expand(self, center, order):
        if not np.allclose(np.ravel(center), self.series.center, atol=1e-14):
            raise DomainError("series kernels expand only about their own center")
        return self.series.truncate(min(order, self.series.order))


def _common_domain(a: Kernel, b: Kernel) -> Domain:
    if isinstance(a, Constant) and a.dom is None:
        return b.domain
    if isinstance(b, Constant) and b.dom is None:
        return a.domain
    if a.domain != b.domain:
        raise DomainError(f"cannot combine kernels on {a.domain} and {b.domain}")
    return a.domain


@dataclass(frozen=True)
class Product(Kernel):
    left: Kernel
    right: Kernel

    def __post_init__(self):
        _common_domain(self.left, self.right)

    @property
    def domain(self):
        return _common_domain(self.left, self.right)

    def _value(self, z, w):
        return self.left._value(z, w) * self.right._value(z, w)

    def _log(self, z, w):
        return self.left._log(z, w) + self.right._log(z, w)

    def expand(self, center, order):
        return _expand(self.left, self.domain, center, order) * _expand(self.right, self.domain, center, order)


@dataclass(frozen=True)
class Power(Kernel):
    """``K^t``: evaluated as ``exp(t log K)`` with the continuous branch of ``log K``."""

    base: Kernel
    t: float

    @property
    def domain(self):
        return self.base.domain

    def _log(self, z, w):
        return self.t * self.base._log(z, w)

    def expand(self, center, order):
        return S.real_power(self.base.expand(center, order), self.t)


@dataclass(frozen=True)
class Contract(Kernel):
    """Multiplication by ``1 - z conj w``, ``1 - <z, w>`` or ``prod(1 - z_i conj w_i)``."""

    base: Kernel

    def __post_init__(self):
        if self.base.domain.kind == "matrix2":
            raise DomainError("contract() is not defined on the matrix ball")

    @property
    def domain(self):
        return self.base.domain

    def _value(self, z, w):
        return contraction_factor_value(self.domain, z, w) * self.base._value(z, w)

    def _log(self, z, w):
        return contraction_factor_log(self.domain, z, w) + self.base._log(z, w)

    def expand(self, center, order):
        return contraction_factor_series(self.domain, order, center) * self.base.expand(center, order)


def _expand(k: Kernel, domain: Domain, center, order: int) -> Series:
    if isinstance(k, Constant) and k.dom is None:
        return HermitianSeries.constant(domain.m, order, k.c, center)
    return k.expand(center, order)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def evaluate(k: Kernel, z, w) -> complex:
    return k.value(z, w)


def taylor_expand(k: Kernel, w0, order: int) -> HermitianSeries:
    """Hermitian Taylor series of ``k`` about ``(w0, w0)``."""
    w0 = as_point(w0, k.domain)
    if not k.domain.contains(w0):
        raise DomainError(f"expansion point {w0} is not interior to the {k.domain}")
    return HermitianSeries.of(k.expand(tuple(w0), order))


def normalize_at(k: Kernel, w0, order: int) -> HermitianSeries:
    """Series of ``K(w0,w0) phi(z)^-1 K(z,w) conj(phi(w))^-1`` with ``phi = K(., w0)``.

    The result has ``a00 = 1`` and ``a[I,0] = a[0,J] = 0`` otherwise.
    """
    s = taylor_expand(k, w0, order)
    a00 = s.coeffs[0, 0].real
    if a00 <= 1e-12:
        raise DomainError(f"K(w0, w0) = {a00} is not positive")
    phi = np.zeros_like(s.coeffs)
    phi[:, 0] = s.coeffs[:, 0]
    phi = s.like(phi)
    inv_phi = S.invert(phi)
    out = a00 * S.mul(S.mul(s, inv_phi), inv_phi.conj_transpose())
    arr = out.coeffs.copy()
    arr[0, :] = 0.0
    arr[:, 0] = 0.0
    arr[0, 0] = 1.0
    return HermitianSeries(s.m, s.order, arr, s.center)


class Derivatives(NamedTuple):
    value: float
    grad: np.ndarray  # d/dw_i K(w, w)
    hess: np.ndarray  # d^2/dw_i dconj(w_j) K(w, w)


def derivatives(k: Kernel, w) -> Derivatives:
    """Value, gradient and mixed Hessian of ``K(w, w)``, read off an order-1 expansion."""
    s = taylor_expand(k, w, 1)
    c = s.coeffs
    return Derivatives(float(c[0, 0].real), c[1:, 0].copy(), c[1:, 1:].copy())


def diagonal_coefficients(k: Kernel, order: int, atol: float = 1e-12) -> np.ndarray | None:
    """Coefficients ``a_n`` if ``k`` expands about 0 as ``sum a_n (z conj w)^n``."""
    if k.domain != DISC:
        return None
    s = taylor_expand(k, 0.0, order)
    if not s.is_diagonal(atol * s.scale()):
        return None
    return s.diagonal_coefficients().real


# ---------------------------------------------------------------------------
# pretty printing (inverse of curvlab.dsl.parse_kernel)
# ---------------------------------------------------------------------------


def _num(x: float) -> str:
    return repr(float(x)) if float(x) != int(x) else str(int(x))


def to_dsl(k: Kernel) -> str:
    if isinstance(k, SzegoDisc):
        return "szego"
    if isinstance(k, SzegoPolydisc):
        return f"szego_poly({k.m})"
    if isinstance(k, DruryArveson):
        return f"da({k.m})"
    if isinstance(k, Diagonal):
        body = ",".join(_num(c) for c in k.coeffs)
        return f"diag([{body}]; tail={_num(k.tail)})"
    if isinstance(k, DetBall2):
        return "detball2"
    if isinstance(k, Constant):
        return f"const({_num(k.c)})"
    if isinstance(k, Product):
        return f"{_wrap_dsl(k.left, Product)} * {_wrap_dsl(k.right, Product)}"
    if isinstance(k, Power):
        return f"{_wrap_dsl(k.base, Power)}^{_num(k.t)}"
    if isinstance(k, Contract):
        return f"contract({to_dsl(k.base)})"
    raise TypeError(f"{type(k).__name__} has no DSL form")


def _wrap_dsl(k: Kernel, parent: type) -> str:
    text = to_dsl(k)
    if isinstance(k, Product) or (parent is Power and isinstance(k, Power)):
        return f"({text})"
    return text
