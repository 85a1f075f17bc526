"""Weighted shifts, the local 2x2 operator and contractivity criteria.

A multiplication tuple on the space of a kernel ``K`` is a contraction
(row contraction, tuple of contractions) exactly when ``K`` times the
domain's ``(1 - z conj w)``-type factor is positive definite; the tests here
apply the positivity engine to that factor kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from curvlab import posdef
from curvlab.curvature import curvature_scalar
from curvlab.kernels import (DISC, Contract, Diagonal, DomainError, Kernel, as_point, diagonal_coefficients,
                             taylor_expand)
from curvlab.points import sample_points
from curvlab.posdef import DEFAULT_EPS, PosDefVerdict

DEFAULT_ORDER = 8
LOCAL_SLACK = 1e-12


@dataclass(frozen=True)
class WeightedShift:
    """Weights ``sqrt(a_n / a_{n+1})`` of an eventually constant coefficient sequence.

    ``weights`` lists the leading weights; every later weight is
    ``tail_weight``.
    """

    weights: tuple[float, ...]
    tail_weight: float

    @property
    def norm(self) -> float:
        return max(self.weights + (self.tail_weight,))

    def weight(self, n: int) -> float:
        return self.weights[n] if n < len(self.weights) else self.tail_weight


def shift_from_diagonal(coeffs: Sequence[float] | Diagonal, tail: float | None = None) -> WeightedShift:
    """Weighted shift of the diagonal kernel ``sum a_n (z conj w)^n``.

    ``coeffs`` is either a :class:`Diagonal` kernel or a finite list whose
    last entry repeats forever (``tail`` overrides that).
    """
    if isinstance(coeffs, Diagonal):
        coeffs, tail = coeffs.coeffs, coeffs.tail
    a = [float(c) for c in coeffs]
    if tail is None:
        tail = a[-1]
    a = a + [float(tail)]
    if min(a) <= 0:
        raise ValueError("weighted shifts need strictly positive kernel coefficients")
    weights = tuple(math.sqrt(a[n] / a[n + 1]) for n in range(len(a) - 1))
    return WeightedShift(weights, 1.0)


def _default_points(k: Kernel, seed: int, n: int = 12) -> np.ndarray:
    return sample_points(k.domain, n, seed, radius=0.9)


def factor_kernel_test(k: Kernel, eps: float = DEFAULT_EPS, points=None, delta_list=(None,),
                       order: int = DEFAULT_ORDER, seed: int = 42, check: str = "factor") -> PosDefVerdict:
    """Positivity of ``factor * K`` by coefficient signs (if diagonal), Taylor matrices and Gram samples."""
    factor = Contract(k)
    verdicts = []
    coeffs = diagonal_coefficients(factor, order)
    s = taylor_expand(factor, np.zeros(k.domain.m), order)
    if coeffs is not None:
        verdicts.append(posdef.diag_coeff_psd(coeffs, eps))
    else:
        diag = posdef.diagonal_taylor_psd(s, eps)
        if diag is not None:
            verdicts.append(diag)
    verdicts.extend(posdef.taylor_psd(s, d, eps) for d in delta_list)
    pts = _default_points(k, seed) if points is None else points
    verdicts.append(posdef.gram_psd(factor, pts, eps))
    out = posdef.combine(verdicts, check)
    # coefficients of (z_1 conj w_1)^n: the one-variable profile of ball and polydisc factors
    e1 = [tuple(n if i == 0 else 0 for i in range(k.domain.m)) for n in range(order + 1)]
    profile = [s.coeff(a, a).real for a in e1]
    return PosDefVerdict(out.verdict, out.min_eigenvalue, out.tolerance,
                         {**out.witness, "profile_coefficients": profile}, out.check)


def contraction_test(k: Kernel, eps: float = DEFAULT_EPS, points=None, delta_list=(None,),
                     order: int = DEFAULT_ORDER, seed: int = 42) -> PosDefVerdict:
    """Is ``M_z^*`` a contraction, i.e. is ``(1 - z conj w) K`` positive definite?"""
    if k.domain != DISC:
        raise DomainError(f"contraction_test needs a disc kernel, got {k.domain}")
    return factor_kernel_test(k, eps, points, delta_list, order, seed, "contraction")


def row_contraction_test(k: Kernel, eps: float = DEFAULT_EPS, points=None, delta_list=(None,),
                         order: int = DEFAULT_ORDER, seed: int = 42) -> PosDefVerdict:
    """Is the multiplication tuple a row contraction, i.e. is ``(1 - <z, w>) K`` positive definite?"""
    if k.domain.kind not in ("disc", "ball"):
        raise DomainError(f"row_contraction_test needs a ball kernel, got {k.domain}")
    return factor_kernel_test(k, eps, points, delta_list, order, seed, "row_contraction")


def polydisc_contraction_test(k: Kernel, eps: float = DEFAULT_EPS, points=None, delta_list=(None,),
                              order: int = DEFAULT_ORDER, seed: int = 42) -> PosDefVerdict:
    """Is ``prod (1 - z_i conj w_i) K`` positive definite?"""
    if k.domain.kind not in ("disc", "polydisc"):
        raise DomainError(f"polydisc_contraction_test needs a polydisc kernel, got {k.domain}")
    return factor_kernel_test(k, eps, points, delta_list, order, seed, "polydisc_contraction")


@dataclass(frozen=True)
class LocalOperator:
    """The 2x2 matrix ``[[w, h], [0, w]]`` with ``h = (-curvature)^(-1/2)``."""

    w: complex
    h: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.w, self.h], [0.0, self.w]], dtype=complex)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def local_operator(k: Kernel, w) -> LocalOperator:
    if k.domain.m != 1:
        raise DomainError("the local operator is defined for one-variable kernels")
    curv = curvature_scalar(k, w)
    if curv >= 0:
        raise ValueError(f"curvature {curv} at {w} is not negative")
    return LocalOperator(complex(as_point(w, k.domain)[0]), (-curv) ** -0.5)


def local_contraction_test(op: LocalOperator) -> bool:
    """``[[a, c], [0, b]]`` is a contraction iff ``|a| <= 1`` and ``|c|^2 <= (1-|a|^2)(1-|b|^2)``."""
    r2 = abs(op.w) ** 2
    return abs(op.w) <= 1.0 and op.h**2 <= (1.0 - r2) ** 2 + LOCAL_SLACK
