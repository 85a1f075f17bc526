"""Check suites, fixed scenarios and their reports."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from curvlab import curvature as C
from curvlab import divisibility as D
from curvlab import operators as O
from curvlab import posdef
from curvlab import series as S
from curvlab.dsl import parse_kernel
from curvlab.kernels import (DISC, MATRIX2, Contract, DetBall2, DruryArveson, Kernel, SzegoDisc, SzegoPolydisc,
                             taylor_expand)
from curvlab.points import sample_points
from curvlab.posdef import DEFAULT_EPS, PosDefVerdict, Verdict, jsonable

SEED_ENV = "CURVLAB_SEED"
CHECK_ORDER = ("posdef", "curvature", "contraction", "row_contraction", "polydisc_contraction",
               "divisible", "reconstruct")
SCENARIOS = ("agler_counterexample", "nondivisible_contraction", "detball_logk", "szego_baseline")


class ConfigError(ValueError):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


@dataclass(frozen=True)
class RunConfig:
    kernel: str
    checks: tuple[str, ...] = ("all",)
    order: int = 8
    t_grid: tuple[float, ...] = D.DEFAULT_T_GRID
    seed: int = 42
    eps: float = DEFAULT_EPS
    n_points: int = 12
    format: str = "text"

    def validate(self) -> None:
        if not 1 <= self.order <= S.MAX_ORDER:
            raise ConfigError(f"order must lie in [1, {S.MAX_ORDER}], got {self.order}")
        if not self.t_grid or any(t <= 0 for t in self.t_grid):
            raise ConfigError("t_grid values must be positive")
        unknown = set(self.checks) - set(CHECK_ORDER) - {"all"}
        if unknown:
            raise ConfigError(f"unknown checks {sorted(unknown)}; choose from {list(CHECK_ORDER)}")
        if self.eps <= 0:
            raise ConfigError("tolerance must be positive")
        if self.n_points < 1:
            raise ConfigError("points must be at least 1")
        if self.format not in ("text", "json"):
            raise ConfigError(f"format must be text or json, got {self.format!r}")


def _split_list(value: str) -> list[str]:
    return [v.strip() for v in value.strip().strip("[]").split(",") if v.strip()]


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip() if not raw.strip().startswith("kernel") else raw.strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        values[key] = value
    if "kernel" not in values:
        raise ConfigError("config needs a kernel entry")
    kw: dict[str, Any] = {"kernel": values.pop("kernel"), "seed": default_seed()}
    try:
        for key, value in values.items():
            if key == "checks":
                names = _split_list(value)
                kw["checks"] = tuple(names)
            elif key == "order":
                kw["order"] = int(value)
            elif key == "t_grid":
                kw["t_grid"] = tuple(float(v) for v in _split_list(value))
            elif key == "seed":
                kw["seed"] = int(value)
            elif key in ("eps", "tolerance"):
                kw["eps"] = float(value)
            elif key == "points":
                kw["n_points"] = int(value)
            elif key == "format":
                kw["format"] = value
            else:
                raise ConfigError(f"unknown config key {key!r}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    cfg = RunConfig(**kw)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class CheckRow:
    name: str
    verdict: str
    witness: Any
    tolerance: float | None
    passed: bool


@dataclass
class ExpectedRow:
    label: str
    expected: Any
    actual: Any
    tol: float | None
    passed: bool


@dataclass
class ScenarioReport:
    scenario: str
    checks: list[CheckRow] = field(default_factory=list)
    expected: list[ExpectedRow] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and all(e.passed for e in self.expected)

    def add_check(self, name: str, v: PosDefVerdict, want_ok: bool = True) -> None:
        self.checks.append(CheckRow(name, v.verdict.value, v.witness, v.tolerance, v.ok == want_ok))

    def add_flag(self, name: str, ok: bool, witness: Any = None, verdict: str | None = None) -> None:
        self.checks.append(CheckRow(name, verdict or ("pass" if ok else "fail"), witness, None, ok))

    def expect(self, label: str, expected: Any, actual: Any, tol: float | None = None) -> bool:
        if tol is None:
            ok = expected == actual
        else:
            ok = actual is not None and math.isfinite(actual) and abs(actual - expected) <= tol
        self.expected.append(ExpectedRow(label, expected, actual, tol, bool(ok)))
        return bool(ok)

    def to_dict(self) -> dict:
        return jsonable({
            "scenario": self.scenario,
            "passed": self.passed,
            "checks": [vars(c) for c in self.checks],
            "expected": [{"label": e.label, "expected": e.expected, "actual": e.actual, "tol": e.tol,
                          "pass": e.passed} for e in self.expected],
            "info": self.info,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"scenario: {self.scenario}  [{'PASS' if self.passed else 'FAIL'}]"]
        for c in self.checks:
            tol = "" if c.tolerance is None else f" (tol {c.tolerance:.1e})"
            lines.append(f"  check {c.name:<28} {c.verdict:<11} {'ok' if c.passed else 'FAILED'}{tol}")
        for e in self.expected:
            tol = "" if e.tol is None else f" +- {e.tol:.0e}"
            lines.append(f"  {'ok  ' if e.passed else 'MISS'} {e.label}: expected {_fmt(e.expected)}{tol}, "
                         f"got {_fmt(e.actual)}")
        for key, value in self.info.items():
            lines.append(f"  {key}:")
            lines.extend(f"    {line}" for line in _fmt_info(value))
        return "\n".join(lines)


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _fmt_info(value: Any) -> list[str]:
    if isinstance(value, np.ndarray) and value.ndim == 2:
        if np.iscomplexobj(value) and np.any(np.abs(value.imag) > 1e-14):
            return ["  ".join(f"{v.real:8.4f}{v.imag:+8.4f}j" for v in row) for row in value]
        return [" ".join(f"{v.real:8.4f}" for v in row) for row in value]
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [str(value)]


# ---------------------------------------------------------------------------
# check suites
# ---------------------------------------------------------------------------


def baseline_kernel(k: Kernel) -> Kernel | None:
    """The shift model kernel of the domain (Szego, Drury-Arveson, polydisc Szego)."""
    kind, m = k.domain.kind, k.domain.m
    return {"disc": SzegoDisc(), "ball": DruryArveson(m), "polydisc": SzegoPolydisc(m)}.get(kind)


def _points(k: Kernel, cfg: RunConfig) -> np.ndarray:
    radius = 0.6 if k.domain == MATRIX2 else 0.9
    return sample_points(k.domain, cfg.n_points, cfg.seed, radius=radius)


def applicable_checks(k: Kernel) -> tuple[str, ...]:
    kind = k.domain.kind
    skip = {"disc": (), "ball": ("contraction", "polydisc_contraction"),
            "polydisc": ("contraction", "row_contraction"),
            "matrix2": ("contraction", "row_contraction", "polydisc_contraction")}[kind]
    return tuple(c for c in CHECK_ORDER if c not in skip)


def run_checks(cfg: RunConfig) -> ScenarioReport:
    """Run the configured checks in dependency order; raises ConfigError on invalid input."""
    cfg.validate()
    k = parse_kernel(cfg.kernel)
    report = ScenarioReport(f"check {cfg.kernel}")
    pts = _points(k, cfg)
    report.info["points"] = pts
    center = np.zeros(k.domain.m)
    wanted = applicable_checks(k) if "all" in cfg.checks else cfg.checks
    selected = [c for c in CHECK_ORDER if c in wanted]
    for name in selected:
        if name == "posdef":
            s = taylor_expand(k, center, cfg.order)
            v = posdef.combine([posdef.taylor_psd(s, None, cfg.eps), posdef.gram_psd(k, pts, cfg.eps)], "posdef")
            report.add_check("posdef", v)
        elif name == "curvature":
            neg = posdef.combine([C.curvature_negativity(k, p, cfg.eps) for p in pts], "curvature_negativity")
            report.add_check("curvature_negativity", neg)
            base = baseline_kernel(k)
            if base is not None:
                report.add_check(f"curvature_compare_vs_{type(base).__name__}",
                                 C.curvature_compare(k, base, "pointwise", pts, eps=cfg.eps))
        elif name == "contraction":
            if k.domain != DISC:
                raise ConfigError(f"contraction needs a disc kernel, got {k.domain}")
            report.add_check("contraction", O.contraction_test(k, cfg.eps, pts, order=cfg.order))
        elif name == "row_contraction":
            if k.domain.kind not in ("disc", "ball"):
                raise ConfigError(f"row_contraction needs a ball kernel, got {k.domain}")
            report.add_check("row_contraction", O.row_contraction_test(k, cfg.eps, pts, order=cfg.order))
        elif name == "polydisc_contraction":
            if k.domain.kind not in ("disc", "polydisc"):
                raise ConfigError(f"polydisc_contraction needs a polydisc kernel, got {k.domain}")
            report.add_check("polydisc_contraction", O.polydisc_contraction_test(k, cfg.eps, pts, order=cfg.order))
        elif name == "divisible":
            rep = D.divisibility_check(k, cfg.t_grid, center, cfg.order, cfg.eps, pts, cfg.seed)
            report.add_flag("divisible", rep.divisible, rep.to_dict(), rep.overall)
        elif name == "reconstruct":
            logs = S.log(taylor_expand(k, center, cfg.order))
            res = D.reconstruct(logs, cfg.t_grid, cfg.eps)
            ok = res.diagonal_error <= 1e-9 and (not res.k0_verdict.ok or res.divisible)
            report.add_flag("reconstruct", ok, {"diagonal_error": res.diagonal_error,
                                                "k0": res.k0_verdict.verdict.value,
                                                "per_t": [v.verdict.value for v in res.verdicts]})
    return report


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

AGLER = "diag([8,16]; tail=15)"
NONDIVISIBLE = "szego * diag([1,1,1/4]; tail=1)"


def agler_counterexample(seed: int = 42) -> ScenarioReport:
    """Not a contraction, yet its curvature is dominated by the Szego curvature."""
    k = parse_kernel(AGLER)
    rep = ScenarioReport("agler_counterexample")
    shift = O.shift_from_diagonal(k)
    for n, want in enumerate([math.sqrt(0.5), math.sqrt(16 / 15), 1.0, 1.0]):
        rep.expect(f"weight {n}", want, shift.weight(n), 1e-12)
    rep.expect("shift norm", math.sqrt(16 / 15), shift.norm, 1e-12)
    rep.expect("shift norm exceeds 1", True, shift.norm > 1)
    contraction = O.contraction_test(k, seed=seed)
    rep.add_check("contraction", contraction, want_ok=False)
    rep.expect("K-dagger witness index", 2, contraction.witness.get("index"))
    rep.expect("K-dagger witness coefficient", -1.0, contraction.witness.get("coefficient"), 1e-12)
    radii_sq = np.round(np.arange(10) * 0.1, 10)
    pts = np.sqrt(radii_sq)[:, None].astype(complex)
    compare = C.curvature_compare(k, SzegoDisc(), "pointwise", pts)
    rep.add_check("curvature_compare_vs_szego", compare)
    for r, diff in zip(radii_sq, compare.witness["differences"]):
        closed = 8 * (8 - 4 * r - r * r) / (8 + 8 * r - r * r) ** 2
        rep.expect(f"curvature difference at |w|^2={r:.1f}", closed, diff, 1e-9)
    rep.expect("curvature of M* at 0", -2.0, C.curvature_scalar(k, 0.0), 1e-12)
    rep.expect("curvature of S* at 0", -1.0, C.curvature_scalar(SzegoDisc(), 0.0), 1e-12)
    return rep


def nondivisible_contraction(seed: int = 42) -> ScenarioReport:
    """A contraction whose factor kernel is not infinitely divisible."""
    k = parse_kernel(NONDIVISIBLE)
    rep = ScenarioReport("nondivisible_contraction")
    coeffs = taylor_expand(k, 0.0, 8).diagonal_coefficients().real
    for n in range(6):
        rep.expect(f"K coefficient {n}", [1.0, 2.0][n] if n < 2 else n + 0.25, coeffs[n], 1e-12)
    factor = taylor_expand(Contract(k), 0.0, 8).diagonal_coefficients().real
    for n, want in enumerate([1.0, 1.0, 0.25, 1.0, 1.0]):
        rep.expect(f"K-dagger coefficient {n}", want, factor[n], 1e-12)
    rep.add_check("contraction", O.contraction_test(k, seed=seed))
    grid = (0.25, 0.5, 0.75, 1.0)
    div = D.divisibility_check(Contract(k), grid, seed=seed)
    rep.add_flag("factor_divisible", not div.divisible, div.to_dict(), div.overall)
    rep.expect("witness t", 0.25, div.witness_t)
    fs = taylor_expand(Contract(k), 0.0, 8)
    quarter = S.real_power(fs, 0.25).diagonal_coefficients().real
    rep.expect("z^2 w^2 coefficient of (K-dagger)^0.25", -1 / 32, float(quarter[2]), 1e-12)
    rep.expect("most negative coefficient index at t=0.25", 2, int(np.argmin(quarter)))
    for t in (0.5, 0.75, 1.0):
        cs = S.real_power(fs, t).diagonal_coefficients().real
        rep.expect(f"coefficients of (K-dagger)^{t} nonnegative", True, bool(cs.min() >= -1e-12))
    routes = D.divisible_contraction_check(k, grid, seed=seed)
    rep.add_check("curvature_route", routes.curvature_route, want_ok=False)
    rep.expect("routes agree", True, routes.routes_agree)
    return rep


def detball_taylor_info(order: int = 8) -> dict:
    logs = S.log(taylor_expand(DetBall2(), np.zeros(4), order))
    tm = posdef.taylor_matrix(logs, (1, 0, 0, 3))
    block = posdef.taylor_matrix(logs, (1, 1, 1, 1))
    return {"log_series": logs, "H_(1,0,0,3)": tm, "H_(1,1,1,1)": block}


def detball_logk(seed: int = 42) -> ScenarioReport:
    """log det(I - Z W^*)^-1 is not positive definite, so the kernel is not infinitely divisible."""
    rep = ScenarioReport("detball_logk")
    info = detball_taylor_info(8)
    logs = info["log_series"]
    full = posdef.taylor_psd(logs, None)
    rep.add_check("log_K_taylor", full, want_ok=False)
    rep.expect("log K Taylor matrix indefinite", True, full.min_eigenvalue < -1e-8)
    small = posdef.taylor_psd(logs, (1, 1, 1, 1))
    rep.add_check("log_K_taylor_delta_(1,1,1,1)", small, want_ok=False)
    pts = sample_points(MATRIX2, 30, seed, radius=0.6)
    logk = D.log_kernel_cpd_check(DetBall2(), pts, eps=DEFAULT_EPS)
    rep.add_check("log_K_cpd_gram", logk.cpd, want_ok=False)
    rep.add_check("shifted_log_K_gram", logk.shifted, want_ok=False)
    div = D.divisibility_check(DetBall2(), (0.5,), order=8, points=pts, seed=seed)
    rep.expect("divisibility at t=0.5", "not-divisible", div.overall)
    tm = info["H_(1,0,0,3)"]
    rep.info["H_(1,0,0,3) indices (colex)"] = [str(a) for a in tm.indices]
    rep.info["H_(1,0,0,3) entries"] = tm.entries
    rep.info["entry (1,0,0,3),(1,0,0,3)"] = tm.entries[-1, -1].real
    block = info["H_(1,1,1,1)"]
    i14, i23 = block.indices.index((1, 0, 0, 1)), block.indices.index((0, 1, 1, 0))
    rep.info["H_(1,1,1,1) block on z1z4, z2z3"] = block.entries[np.ix_([i14, i23], [i14, i23])]
    return rep


def szego_baseline(seed: int = 42) -> ScenarioReport:
    k = SzegoDisc()
    rep = ScenarioReport("szego_baseline")
    pts = sample_points(DISC, 50, seed, radius=0.95)
    curv_err = h_err = 0.0
    local_ok = True
    for p in pts:
        r2 = abs(p[0]) ** 2
        curv_err = max(curv_err, abs(C.curvature_scalar(k, p) + 1.0 / (1.0 - r2) ** 2) * (1.0 - r2) ** 2)
        op = O.local_operator(k, p)
        h_err = max(h_err, abs(op.h - (1.0 - r2)))
        local_ok &= O.local_contraction_test(op)
    rep.expect("curvature relative error vs -1/(1-|w|^2)^2", 0.0, curv_err, 1e-10)
    rep.expect("h_T(w) vs 1-|w|^2", 0.0, h_err, 1e-10)
    rep.expect("local operator contractive at every point", True, bool(local_ok))
    rep.expect("curvature at 0", -1.0, C.curvature_scalar(k, 0.0), 1e-12)
    rep.add_check("contraction", O.contraction_test(k, seed=seed))
    div = D.divisibility_check(k, seed=seed)
    rep.add_flag("divisible", div.divisible, div.to_dict(), div.overall)
    return rep


_SCENARIOS: dict[str, Callable[[int], ScenarioReport]] = {
    "agler_counterexample": agler_counterexample,
    "nondivisible_contraction": nondivisible_contraction,
    "detball_logk": detball_logk,
    "szego_baseline": szego_baseline,
}


def run_scenario(name: str, seed: int | None = None) -> ScenarioReport:
    if name not in _SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {list(_SCENARIOS)}")
    return _SCENARIOS[name](default_seed() if seed is None else seed)
