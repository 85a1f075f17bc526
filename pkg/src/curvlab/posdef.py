"""Positivity tests: sampled Gram matrices, Taylor-coefficient matrices,
diagonal coefficient signs and conditional positive definiteness.

Every test returns a :class:`PosDefVerdict`.  The threshold applied to the
smallest eigenvalue is ``max(eps, 8 n u) * max(1, lambda_max)`` with ``u``
the unit roundoff, and is recorded in the verdict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from curvlab import series as S
from curvlab.kernels import Kernel
from curvlab.series import Series, SeriesError

DEFAULT_EPS = 1e-9
_ROUNDOFF = np.finfo(float).eps


class Verdict(str, enum.Enum):
    POSITIVE = "positive"
    INDEFINITE = "indefinite"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class PosDefVerdict:
    verdict: Verdict
    min_eigenvalue: float
    tolerance: float
    witness: dict = field(default_factory=dict)
    check: str = ""

    @property
    def ok(self) -> bool:
        """True unless the form was found indefinite."""
        return self.verdict is not Verdict.INDEFINITE

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "verdict": self.verdict.value,
            "min_eigenvalue": float(self.min_eigenvalue),
            "tolerance": float(self.tolerance),
            "witness": jsonable(self.witness),
        }


def jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)] if obj.imag else float(obj.real)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def classify(eigenvalues: np.ndarray, eps: float = DEFAULT_EPS) -> tuple[Verdict, float, float]:
    """Verdict, smallest eigenvalue and effective threshold."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.size == 0:
        return Verdict.POSITIVE, 0.0, eps
    lo, hi = float(eigenvalues.min()), float(eigenvalues.max())
    thr = max(eps, 8 * eigenvalues.size * _ROUNDOFF) * max(1.0, hi)
    if lo > thr:
        return Verdict.POSITIVE, lo, thr
    if lo < -thr:
        return Verdict.INDEFINITE, lo, thr
    return Verdict.DEGENERATE, lo, thr


def _hermitian(a: np.ndarray, what: str, rtol: float = 1e-9) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be square, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    defect = float(np.max(np.abs(a - a.conj().T), initial=0.0))
    if defect > rtol * scale:
        raise ValueError(f"{what} is not Hermitian (defect {defect:.3e})")
    return 0.5 * (a + a.conj().T)


def matrix_verdict(a: np.ndarray, eps: float = DEFAULT_EPS, check: str = "", witness: dict | None = None,
                   labels: Sequence | None = None) -> PosDefVerdict:
    """Verdict for a Hermitian matrix; ``labels`` name rows for the witness."""
    a = _hermitian(a, check or "matrix")
    vals, vecs = np.linalg.eigh(a)
    verdict, lo, thr = classify(vals, eps)
    witness = dict(witness or {})
    if labels is not None and vals.size and verdict is not Verdict.POSITIVE:
        witness["dominant_index"] = labels[int(np.argmax(np.abs(vecs[:, 0])))]
    return PosDefVerdict(verdict, lo, thr, witness, check)


def combine(verdicts: Iterable[PosDefVerdict], check: str = "") -> PosDefVerdict:
    """Worst of several verdicts: the first indefinite one, else the first degenerate one."""
    verdicts = list(verdicts)
    if not verdicts:
        raise ValueError("nothing to combine")
    for kind in (Verdict.INDEFINITE, Verdict.DEGENERATE):
        for v in verdicts:
            if v.verdict is kind:
                return PosDefVerdict(v.verdict, v.min_eigenvalue, v.tolerance,
                                     {**v.witness, "failing_check": v.check}, check or v.check)
    best = min(verdicts, key=lambda v: v.min_eigenvalue)
    return PosDefVerdict(Verdict.POSITIVE, best.min_eigenvalue, best.tolerance, best.witness, check or best.check)


# ---------------------------------------------------------------------------
# Gram matrices
# ---------------------------------------------------------------------------


def kernel_gram(k: Kernel | Series, points, others=None) -> np.ndarray:
    """``[K(p_i, q_j)]``; ``others`` defaults to ``points``."""
    if isinstance(k, Series):
        return S.gram(k, points, others)
    pts = list(points)
    qts = pts if others is None else list(others)
    return np.array([[k.value(p, q) for q in qts] for p in pts], dtype=complex)


def gram_psd(k: Kernel | Series, points, eps: float = DEFAULT_EPS) -> PosDefVerdict:
    """Positivity of ``[K(w_i, w_j)]`` over the given points."""
    pts = list(points)
    if not pts:
        raise ValueError("gram_psd needs at least one point")
    g = kernel_gram(k, pts)
    return matrix_verdict(g, eps, "gram", {"points": np.asarray(pts)}, labels=list(range(len(pts))))


# ---------------------------------------------------------------------------
# Taylor matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaylorMatrix:
    """Coefficients ``a[alpha, beta]`` for ``alpha, beta <= delta`` in colex order.

    ``delta is None`` means every multi-index of degree at most the order.
    """

    delta: tuple[int, ...] | None
    indices: tuple[tuple[int, ...], ...]
    entries: np.ndarray
    center: tuple[complex, ...]

    @property
    def size(self) -> int:
        return len(self.indices)


def taylor_matrix(s: Series, delta: Sequence[int] | None = None) -> TaylorMatrix:
    if delta is None:
        indices = sorted(S.monomials(s.m, s.order), key=S.colex_key)
    else:
        delta = tuple(int(d) for d in delta)
        if len(delta) != s.m or min(delta) < 0:
            raise SeriesError(f"delta {delta} does not fit m = {s.m}")
        if sum(delta) > s.order:
            raise SeriesError(f"delta {delta} exceeds the truncation order {s.order}")
        indices = S.indices_below(delta)
    idx = S.monomial_index(s.m, s.order)
    pos = [idx[a] for a in indices]
    return TaylorMatrix(delta, tuple(indices), s.coeffs[np.ix_(pos, pos)].copy(), s.center)


def _diagonal_witness(entries: np.ndarray, labels: Sequence) -> dict:
    diag = np.real(np.diag(entries))
    k = int(np.argmin(diag))
    negatives = {labels[i]: float(diag[i]) for i in np.nonzero(diag < 0)[0]}
    return {"index": (labels[k], labels[k]), "coefficient": float(diag[k]), "negative_coefficients": negatives}


def taylor_psd(s: Series, delta: Sequence[int] | None = None, eps: float = DEFAULT_EPS) -> PosDefVerdict:
    """Positivity of the Taylor-coefficient matrix ``H_delta`` of ``s`` at its center.

    Entries are the stored coefficients themselves (already divided by
    ``alpha! beta!``).  When ``H_delta`` is diagonal the witness names the
    most negative coefficient.
    """
    tm = taylor_matrix(s, delta)
    witness: dict = {"delta": tm.delta if tm.delta is not None else f"all |alpha| <= {s.order}"}
    a = tm.entries
    if np.allclose(a - np.diag(np.diag(a)), 0.0, atol=0.0):
        witness.update(_diagonal_witness(a, tm.indices))
        verdict = matrix_verdict(a, eps, "taylor", witness)
    else:
        verdict = matrix_verdict(a, eps, "taylor", witness, labels=list(tm.indices))
    return verdict


def diagonal_taylor_psd(s: Series, eps: float = DEFAULT_EPS) -> PosDefVerdict | None:
    """Coefficient-sign test for a series with only ``z^I conj(w)^I`` terms.

    Returns ``None`` for series with off-diagonal terms.
    """
    if not s.is_diagonal(1e-12 * s.scale()):
        return None
    diag = np.real(np.diag(s.coeffs))
    labels = S.monomials(s.m, s.order)
    verdict = diag_coeff_psd(diag, eps)
    witness = _diagonal_witness(np.diag(diag), labels)
    return PosDefVerdict(verdict.verdict, verdict.min_eigenvalue, verdict.tolerance, witness, "diagonal_coefficients")


def diag_coeff_psd(coeffs: Sequence[float], eps: float = DEFAULT_EPS) -> PosDefVerdict:
    """Sign test for a one-variable diagonal kernel ``sum a_n (z conj w)^n``.

    Positive iff every coefficient is at least ``-eps`` (scaled by the largest
    coefficient); the witness is the most negative coefficient.
    """
    c = np.real(np.asarray(coeffs, dtype=complex))
    if c.size == 0:
        return PosDefVerdict(Verdict.POSITIVE, 0.0, eps, {}, "diagonal_coefficients")
    thr = eps * max(1.0, float(np.max(np.abs(c))))
    k = int(np.argmin(c))
    witness = {
        "index": k,
        "coefficient": float(c[k]),
        "negative_coefficients": {int(i): float(c[i]) for i in np.nonzero(c < -thr)[0]},
    }
    verdict = Verdict.POSITIVE if c[k] >= -thr else Verdict.INDEFINITE
    return PosDefVerdict(verdict, float(c[k]), thr, witness, "diagonal_coefficients")


# ---------------------------------------------------------------------------
# conditional positivity
# ---------------------------------------------------------------------------


def _sum_zero_basis(n: int) -> np.ndarray:
    """Orthonormal basis (n x n-1) of vectors with vanishing coordinate sum."""
    p = np.eye(n) - np.full((n, n), 1.0 / n)
    q, _ = np.linalg.qr(p[:, : n - 1])
    return q


def cpd_check(gram: np.ndarray, eps: float = DEFAULT_EPS) -> PosDefVerdict:
    """Conditional positive definiteness: ``sum a_i conj(a_j) G_ij >= 0`` when ``sum a_i = 0``.

    The form is compressed to the sum-zero subspace, which is the range of
    ``P G P`` with ``P = I - 11^T / n``.
    """
    g = _hermitian(gram, "cpd gram")
    n = g.shape[0]
    if n < 2:
        return PosDefVerdict(Verdict.DEGENERATE, 0.0, eps, {"reason": "fewer than two points"}, "cpd")
    q = _sum_zero_basis(n)
    return matrix_verdict(q.T @ g @ q, eps, "cpd")


# ---------------------------------------------------------------------------
# positive definite functions and matrix-valued kernels
# ---------------------------------------------------------------------------


def posdef_function_check(s: Series, delta_list: Iterable[Sequence[int] | None] = (None,), points=(),
                          eps: float = DEFAULT_EPS) -> PosDefVerdict:
    """Positive definiteness of a real-analytic function given by its polarization ``s``.

    Combines ``taylor_psd`` for every ``delta`` with ``gram_psd`` of ``s``
    over ``points`` (which must lie near the center).
    """
    verdicts = [taylor_psd(s, d, eps) for d in delta_list]
    pts = list(points)
    if pts:
        verdicts.append(gram_psd(s, pts, eps))
    return combine(verdicts, "posdef_function")


def block_taylor_matrix(entries: Sequence[Sequence[Series]], order: int | None = None) -> tuple[np.ndarray, list]:
    """Taylor matrix of an ``m x m`` matrix-valued series, rows indexed by ``(i, alpha)``."""
    m = len(entries)
    first = entries[0][0]
    order = first.order if order is None else order
    n = len(S.monomials(first.m, order))
    blocks = [[entries[i][j].coeffs[:n, :n] for j in range(m)] for i in range(m)]
    labels = [(i, a) for i in range(m) for a in S.monomials(first.m, order)]
    return np.block(blocks), labels


def block_taylor_psd(entries: Sequence[Sequence[Series]], eps: float = DEFAULT_EPS) -> PosDefVerdict:
    a, labels = block_taylor_matrix(entries)
    return matrix_verdict(a, eps, "block_taylor", {}, labels)


def block_gram_psd(entries: Sequence[Sequence[Series]], points, eps: float = DEFAULT_EPS) -> PosDefVerdict:
    """Positivity of ``[F_ij(p_a, p_b)]`` for a matrix-valued series kernel ``F``."""
    m = len(entries)
    pts = list(points)
    blocks = [[S.gram(entries[i][j], pts) for j in range(m)] for i in range(m)]
    # reorder rows to (point, component)
    g = np.block(blocks)
    n = len(pts)
    perm = np.array([i * n + a for a in range(n) for i in range(m)])
    return matrix_verdict(g[np.ix_(perm, perm)], eps, "block_gram", {"points": np.asarray(pts)})
