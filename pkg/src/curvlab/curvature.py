"""Curvature of the line bundle determined by a kernel.

Sign convention: the curvature is ``-d^2 log K(w, w) / dw_i dconj(w_j)``,
negative definite for positive definite kernels.  Comparisons are stated on
curvature values, so ``A <= B`` asks whether ``curv(B) - curv(A)`` is
positive semidefinite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from curvlab import posdef
from curvlab import series as S
from curvlab.kernels import DISC, DomainError, Kernel, as_point, derivatives, taylor_expand
from curvlab.points import radial_grid, sample_points
from curvlab.posdef import DEFAULT_EPS, PosDefVerdict
from curvlab.series import Series, SeriesError

DEFAULT_RADII = tuple(np.round(np.linspace(0.0, 0.9, 10), 10))


@dataclass(frozen=True)
class CurvatureMatrix:
    w: tuple[complex, ...]
    entries: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def curvature_matrix(k: Kernel, w) -> CurvatureMatrix:
    """Entries ``-(K d_i dbar_j K - d_i K dbar_j K) / K^2`` at ``(w, w)``."""
    value, grad, hess = derivatives(k, w)
    if value <= 1e-14:
        raise DomainError(f"K(w, w) = {value} is not positive")
    entries = -(value * hess - np.outer(grad, grad.conj())) / value**2
    entries = 0.5 * (entries + entries.conj().T)
    return CurvatureMatrix(tuple(as_point(w, k.domain)), entries)


def curvature_scalar(k: Kernel, w) -> float:
    if k.domain.m != 1:
        raise DomainError("curvature_scalar is for one-variable kernels; use curvature_matrix")
    return float(curvature_matrix(k, w).entries[0, 0].real)


def curvature_negativity(k: Kernel, w, eps: float = DEFAULT_EPS) -> PosDefVerdict:
    """Verdict on ``-curvature`` (positive means the curvature is negative definite)."""
    cm = curvature_matrix(k, w)
    return posdef.matrix_verdict(-cm.entries, eps, "curvature_negativity", {"point": np.asarray(cm.w)})


def curvature_gram_check(k: Kernel, w) -> float:
    """Largest deviation between ``-curvature`` and ``<e_i, e_j> / (2 K^2)``.

    The vectors ``e_i = K_w (x) dbar_i K_w - dbar_i K_w (x) K_w`` are built
    explicitly in ``C^r (x) C^r`` from a factorization of the Gram matrix of
    ``K_w, dbar_1 K_w, ..., dbar_m K_w`` (the first-order Taylor block).
    """
    s = taylor_expand(k, w, 1)
    block = s.coeffs
    vals, vecs = np.linalg.eigh(block)
    v = vecs * np.sqrt(np.clip(vals, 0.0, None))[None, :]
    g = v.conj()  # g[I] represents dbar^I K_w; <g[I], g[J]> = block[J, I]
    m = s.m
    e = [np.kron(g[0], g[1 + i]) - np.kron(g[1 + i], g[0]) for i in range(m)]
    inner = np.array([[np.vdot(e[j], e[i]) for j in range(m)] for i in range(m)])
    value = block[0, 0].real
    lhs = -curvature_matrix(k, w).entries
    rhs = inner.T / (2.0 * value**2)
    return float(np.max(np.abs(lhs - rhs)))


def curvature_series(s: Series) -> list[list[Series]]:
    """Entries ``d_{z_i} d_{conj w_j} log s``; the curvature at the center is minus the constant terms."""
    try:
        log_s = S.log(s)
    except SeriesError as exc:
        raise SeriesError(f"cannot normalize: {exc}") from exc
    return [[S.mixed_derivative(log_s, i, j) for j in range(s.m)] for i in range(s.m)]


def curvature_at_center(entries: Sequence[Sequence[Series]]) -> np.ndarray:
    return -np.array([[e.coeffs[0, 0] for e in row] for row in entries])


def default_points(k: Kernel, seed: int = 42) -> np.ndarray:
    if k.domain == DISC:
        return radial_grid(DEFAULT_RADII)
    return sample_points(k.domain, 50, seed, radius=0.9)


def curvature_compare(k_a: Kernel, k_b: Kernel, mode: str = "pointwise", points=None,
                      delta_list=(None,), center=None, order: int = 8,
                      eps: float = DEFAULT_EPS) -> PosDefVerdict:
    """Is the curvature of ``k_a`` dominated by that of ``k_b``?

    ``pointwise``: ``curv(k_b, w) - curv(k_a, w)`` is PSD at every point.
    ``function_order``: the polarized series of ``dd-bar log(k_a / k_b)``
    about ``center`` is a positive definite (matrix-valued) function.
    """
    if k_a.domain != k_b.domain:
        raise DomainError(f"domain mismatch: {k_a.domain} vs {k_b.domain}")
    if mode == "pointwise":
        pts = default_points(k_a) if points is None else np.asarray(points)
        verdicts, diffs = [], []
        for p in pts:
            d = curvature_matrix(k_b, p).entries - curvature_matrix(k_a, p).entries
            diffs.append(d[0, 0].real if d.shape == (1, 1) else float(np.linalg.eigvalsh(d)[0]))
            verdicts.append(posdef.matrix_verdict(d, eps, "curvature_difference", {"point": np.asarray(p)}))
        out = posdef.combine(verdicts, "curvature_compare_pointwise")
        return PosDefVerdict(out.verdict, out.min_eigenvalue, out.tolerance,
                             {**out.witness, "points": np.asarray(pts), "differences": diffs}, out.check)
    if mode == "function_order":
        m = k_a.domain.m
        c = np.zeros(m) if center is None else as_point(center, k_a.domain)
        quotient = S.log(taylor_expand(k_a, c, order)) - S.log(taylor_expand(k_b, c, order))
        entries = [[S.mixed_derivative(quotient, i, j) for j in range(m)] for i in range(m)]
        pts = [] if points is None else list(points)
        if m == 1:
            out = posdef.posdef_function_check(entries[0][0], delta_list, pts, eps)
        else:
            checks = [posdef.block_taylor_psd(entries, eps)]
            if pts:
                checks.append(posdef.block_gram_psd(entries, pts, eps))
            out = posdef.combine(checks)
        return PosDefVerdict(out.verdict, out.min_eigenvalue, out.tolerance, out.witness,
                             "curvature_compare_function_order")
    raise ValueError(f"unknown comparison mode {mode!r}")
