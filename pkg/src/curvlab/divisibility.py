"""Infinite divisibility: checks of ``K^t`` over a grid of exponents, conditional
positivity of ``log K``, and the reconstruction of an infinitely divisible
kernel from a log-kernel series.

Divisibility is only ever certified up to the truncation order and the
exponent grid; reports carry both.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from curvlab import posdef
from curvlab import series as S
from curvlab.curvature import curvature_series
from curvlab.kernels import Contract, DomainError, Kernel, Power, as_point, taylor_expand
from curvlab.points import sample_points
from curvlab.posdef import DEFAULT_EPS, PosDefVerdict
from curvlab.series import HermitianSeries, Series, SeriesError

DEFAULT_T_GRID = (0.1, 0.25, 0.5, 0.75, 1.0)
DEFAULT_ORDER = 8


class BranchError(ValueError):
    pass


@dataclass(frozen=True)
class DivisibilityReport:
    t_grid: tuple[float, ...]
    verdicts: tuple[PosDefVerdict, ...]
    order: int
    center: tuple[complex, ...]
    points: np.ndarray | None = None

    @property
    def witness_t(self) -> float | None:
        for t, v in zip(self.t_grid, self.verdicts):
            if not v.ok:
                return t
        return None

    @property
    def divisible(self) -> bool:
        return self.witness_t is None

    @property
    def overall(self) -> str:
        return "divisible-up-to-order" if self.divisible else "not-divisible"

    def verdict_at(self, t: float) -> PosDefVerdict:
        return self.verdicts[self.t_grid.index(t)]

    @property
    def note(self) -> str:
        return f"certified only up to order {self.order} on the t-grid {list(self.t_grid)}"

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "witness_t": self.witness_t,
            "note": self.note,
            "per_t": [{"t": t, **v.to_dict()} for t, v in zip(self.t_grid, self.verdicts)],
        }


def _gram_points(k: Kernel, seed: int, n: int = 12) -> np.ndarray:
    radius = 0.6 if k.domain.kind == "matrix2" else 0.9
    return sample_points(k.domain, n, seed, radius=radius)


def power_verdict(s: Series, k: Kernel | None, t: float, points, eps: float = DEFAULT_EPS) -> PosDefVerdict:
    """Positivity of ``K^t``: coefficient signs when diagonal, full Taylor matrix, Gram samples."""
    st = S.real_power(s, t)
    verdicts = []
    if st.m == 1 and st.is_diagonal(1e-12 * st.scale()):
        verdicts.append(posdef.diag_coeff_psd(st.diagonal_coefficients().real, eps))
    else:
        diag = posdef.diagonal_taylor_psd(st, eps)
        if diag is not None:
            verdicts.append(diag)
    verdicts.append(posdef.taylor_psd(st, None, eps))
    if k is not None and points is not None and len(points):
        verdicts.append(posdef.gram_psd(Power(k, t), points, eps))
    return posdef.combine(verdicts, f"power t={t:g}")


def divisibility_check(k: Kernel, t_grid: Sequence[float] = DEFAULT_T_GRID, w0=None, order: int = DEFAULT_ORDER,
                       eps: float = DEFAULT_EPS, points=None, seed: int = 42) -> DivisibilityReport:
    """Check ``K^t`` for each ``t`` via Taylor coefficients about ``w0`` and sampled Gram matrices."""
    t_grid = tuple(float(t) for t in t_grid)
    if any(t <= 0 for t in t_grid):
        raise ValueError("exponents must be positive")
    c = np.zeros(k.domain.m) if w0 is None else as_point(w0, k.domain)
    s = taylor_expand(k, c, order)
    if s.coeffs[0, 0].real <= 0:
        raise DomainError("K(w0, w0) must be positive")
    pts = _gram_points(k, seed) if points is None else np.asarray(points)
    verdicts = tuple(power_verdict(s, k, t, pts, eps) for t in t_grid)
    return DivisibilityReport(t_grid, verdicts, order, tuple(c), pts)


# ---------------------------------------------------------------------------
# conditional positivity of log K
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogKernelReport:
    cpd: PosDefVerdict
    shifted: PosDefVerdict
    points: np.ndarray
    center: tuple[complex, ...]

    @property
    def ok(self) -> bool:
        return self.cpd.ok and self.shifted.ok


def _branch_ok(k: Kernel, p, q) -> bool:
    return k.value(p, q).real > 0


def branch_safe_points(k: Kernel, n: int, seed: int, w0, radius: float, max_draws: int = 2000) -> np.ndarray:
    """Draw points greedily, rejecting any whose kernel values leave ``Re K > 0``."""
    accepted: list[np.ndarray] = []
    draws = sample_points(k.domain, max_draws, seed, radius=radius)
    for p in draws:
        if len(accepted) == n:
            break
        if all(_branch_ok(k, p, q) for q in accepted + [p, w0]):
            accepted.append(p)
    if len(accepted) < n:
        raise BranchError(f"only {len(accepted)} of {n} points satisfy Re K > 0")
    return np.asarray(accepted)


def log_kernel_cpd_check(k: Kernel, points=None, w0=None, eps: float = DEFAULT_EPS, seed: int = 42,
                         n: int = 16) -> LogKernelReport:
    """Conditional positivity of ``[log K(p_i, p_j)]`` and positivity of

    ``L(z, w) = log K(z, w) - log K(z, w0) - log K(w0, w) + log K(w0, w0)``.
    """
    c = np.zeros(k.domain.m, dtype=complex) if w0 is None else as_point(w0, k.domain)
    if points is None:
        radius = 0.6 if k.domain.kind == "matrix2" else 0.9
        pts = branch_safe_points(k, n, seed, c, radius)
    else:
        pts = np.asarray(points, dtype=complex).reshape(len(points), -1)
        for p in pts:
            for q in list(pts) + [c]:
                if not _branch_ok(k, p, q):
                    raise BranchError(f"Re K <= 0 at the pair ({p}, {q}); principal log unusable")
    g = np.array([[k.log_value(p, q) for q in pts] for p in pts])
    col = np.array([k.log_value(p, c) for p in pts])
    row = np.array([k.log_value(c, q) for q in pts])
    shifted = g - col[:, None] - row[None, :] + k.log_value(c, c)
    cpd = posdef.cpd_check(g, eps)
    shifted_v = posdef.matrix_verdict(shifted, eps, "shifted_log_gram", {"points": pts, "center": c})
    cpd = posdef.PosDefVerdict(cpd.verdict, cpd.min_eigenvalue, cpd.tolerance, {"points": pts}, "log_cpd")
    return LogKernelReport(cpd, shifted_v, pts, tuple(c))


# ---------------------------------------------------------------------------
# reconstruction from log K
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReconstructionResult:
    k0: HermitianSeries
    psi: Series
    kernel: HermitianSeries
    diagonal_error: float
    k0_verdict: PosDefVerdict
    t_grid: tuple[float, ...]
    verdicts: tuple[PosDefVerdict, ...] = field(default=())

    @property
    def divisible(self) -> bool:
        return all(v.ok for v in self.verdicts)


def split_log_series(logdiag: Series) -> tuple[HermitianSeries, Series]:
    """Split a log-kernel series into its mixed part ``K0`` and ``psi = a00/2 + sum a[I,0] z^I``.

    The input is ``psi + K0 + conj-transpose(psi)``.
    """
    a = logdiag.coeffs
    col, row = a[:, 0], a[0, :]
    if np.max(np.abs(col - row.conj())) > 1e-10 * logdiag.scale():
        raise SeriesError("a[I, 0] and conj(a[0, I]) disagree; the series is not a polarized real function")
    mixed = a.copy()
    mixed[0, :] = 0.0
    mixed[:, 0] = 0.0
    psi = np.zeros_like(a)
    psi[:, 0] = col
    psi[0, 0] = 0.5 * a[0, 0].real
    return (HermitianSeries(logdiag.m, logdiag.order, mixed, logdiag.center),
            Series(logdiag.m, logdiag.order, psi, logdiag.center))


def assemble(k0: Series, psi: Series, t: float = 1.0) -> HermitianSeries:
    """``exp(t psi(z)) exp(t K0(z, w)) exp(t conj(psi(w)))``."""
    return HermitianSeries.of(S.exp(t * psi) * S.exp(t * k0) * S.exp(t * psi.conj_transpose()))


def _diagonal_grid(s: Series, radius: float, n_radii: int = 5, n_angles: int = 8) -> np.ndarray:
    rng = np.random.default_rng(7)
    c = np.asarray(s.center)
    pts = []
    for r in np.linspace(0.0, radius, n_radii):
        for k in range(n_angles):
            d = rng.normal(size=s.m) + 1j * rng.normal(size=s.m)
            pts.append(c + r * d / np.max(np.abs(d)) * np.exp(2j * np.pi * k / n_angles))
    return np.asarray(pts)


def reconstruct(logdiag: Series, t_grid: Sequence[float] = DEFAULT_T_GRID, eps: float = DEFAULT_EPS,
                radius: float = 0.5) -> ReconstructionResult:
    """Rebuild a kernel from the series of ``log K`` at a point.

    The mixed part ``K0`` carries the curvature; the holomorphic part ``psi``
    restores the diagonal.  If ``K0`` is positive definite every ``K^t`` is
    (checked on ``t_grid``).
    """
    k0, psi = split_log_series(logdiag)
    kernel = assemble(k0, psi)
    target = S.exp(logdiag)
    grid = _diagonal_grid(logdiag, radius)
    err = max(abs(S.diagonal_eval(target, p) - S.diagonal_eval(kernel, p)) for p in grid)
    k0_verdict = posdef.taylor_psd(k0, None, eps)
    t_grid = tuple(float(t) for t in t_grid)
    verdicts = tuple(posdef.taylor_psd(assemble(k0, psi, t), None, eps) for t in t_grid)
    return ReconstructionResult(k0, psi, kernel, float(err), k0_verdict, t_grid, verdicts)


# ---------------------------------------------------------------------------
# infinitely divisible contractions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DivisibleContractionReport:
    factor_report: DivisibilityReport
    curvature_route: PosDefVerdict

    @property
    def routes_agree(self) -> bool:
        return self.factor_report.divisible == self.curvature_route.ok

    @property
    def divisible_contraction(self) -> bool:
        return self.factor_report.divisible


def divisible_contraction_check(k: Kernel, t_grid: Sequence[float] = DEFAULT_T_GRID, order: int = DEFAULT_ORDER,
                                eps: float = DEFAULT_EPS, points=None, seed: int = 42) -> DivisibleContractionReport:
    """Is the adjoint multiplication tuple an infinitely divisible (row) contraction?

    Route one checks ``(factor K)^t`` on ``t_grid``; route two checks that
    ``dd-bar log(factor K)`` is a positive definite function.
    """
    if k.domain.kind == "matrix2":
        raise DomainError("no contraction factor on the matrix ball")
    factor = Contract(k)
    report = divisibility_check(factor, t_grid, None, order, eps, points, seed)
    entries = curvature_series(taylor_expand(factor, np.zeros(k.domain.m), order))
    if k.domain.m == 1:
        route = posdef.posdef_function_check(entries[0][0], (None,), (), eps)
    else:
        route = posdef.block_taylor_psd(entries, eps)
    return DivisibleContractionReport(report, route)
