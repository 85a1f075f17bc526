"""``curvlab`` command line.  Exit codes: 0 all checks pass, 1 a check fails, 2 invalid input."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from curvlab import curvature as C
from curvlab.dsl import DSLError, parse_kernel
from curvlab.kernels import DomainError, as_point, taylor_expand
from curvlab.posdef import jsonable
from curvlab.runner import SCENARIOS, SEED_ENV, ConfigError, parse_config, run_checks, run_scenario
from curvlab.series import MAX_ORDER, SeriesError

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def parse_point(text: str) -> list[complex]:
    """``0.3`` or ``0.1+0.2j,0.3`` (comma separated complex numbers)."""
    try:
        return [complex(p.strip().replace(" ", "")) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse point {text!r}") from exc


def _num(v: complex) -> str:
    v = complex(v)
    return f"{v.real:.12g}" if abs(v.imag) <= 1e-14 else f"{v.real:.12g}{v.imag:+.12g}j"


def _point(p) -> str:
    return "(" + ", ".join(_num(x) for x in p) + ")"


def _emit(obj, as_json: bool, text: str) -> None:
    print(json.dumps(jsonable(obj), sort_keys=True, indent=2) if as_json else text)


def cmd_check(args) -> int:
    try:
        cfg = parse_config(Path(args.config).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    report = run_checks(cfg)
    as_json = args.json or cfg.format == "json"
    print(report.to_json() if as_json else report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_scenario(args) -> int:
    report = run_scenario(args.id, args.seed)
    print(report.to_json() if args.json else report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


def _check_order(order: int) -> None:
    if not 1 <= order <= MAX_ORDER:
        raise ConfigError(f"order must lie in [1, {MAX_ORDER}], got {order}")


def cmd_expand(args) -> int:
    _check_order(args.order)
    k = parse_kernel(args.kernel)
    center = as_point(parse_point(args.center) if args.center else np.zeros(k.domain.m), k.domain)
    s = taylor_expand(k, center, args.order)
    terms = [{"I": list(i), "J": list(j), "coeff": c} for (i, j), c in s.terms(args.threshold).items()]
    lines = [f"{k.domain} kernel expanded about {_point(center)} to order {args.order}:"]
    lines += [f"  z^{tuple(t['I'])} conj(w)^{tuple(t['J'])}: {_num(t['coeff'])}" for t in terms]
    _emit({"kernel": args.kernel, "order": args.order, "center": center, "terms": terms}, args.json,
          "\n".join(lines))
    return EXIT_OK


def cmd_curvature(args) -> int:
    k = parse_kernel(args.kernel)
    w = parse_point(args.at)
    cm = C.curvature_matrix(k, w)
    neg = C.curvature_negativity(k, w)
    text = f"curvature at {_point(cm.w)}:\n" + "\n".join(
        "  " + "  ".join(f"{_num(v):>24}" for v in row) for row in cm.entries)
    text += f"\nnegative definite: {neg.verdict.value}"
    _emit({"point": cm.w, "curvature": cm.entries, "eigenvalues": cm.eigenvalues,
           "negativity": neg.to_dict()}, args.json, text)
    return EXIT_OK if neg.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="curvlab", description=__doc__,
                epilog=f"{SEED_ENV} overrides the default seed (42).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="run the checks listed in a config file")
    c.add_argument("--config", required=True)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("scenario", help="run a fixed scenario with its expected-value table")
    s.add_argument("id", choices=SCENARIOS)
    s.add_argument("--json", action="store_true")
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(func=cmd_scenario)

    e = sub.add_parser("expand", help="print the Taylor coefficients of a kernel")
    e.add_argument("--kernel", required=True)
    e.add_argument("--order", type=int, default=8)
    e.add_argument("--center", default=None, help="comma separated coordinates, default the origin")
    e.add_argument("--threshold", type=float, default=1e-14, help="hide coefficients at or below this size")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_expand)

    k = sub.add_parser("curvature", help="curvature matrix of a kernel at a point")
    k.add_argument("--kernel", required=True)
    k.add_argument("--at", required=True)
    k.add_argument("--json", action="store_true")
    k.set_defaults(func=cmd_curvature)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DSLError, DomainError, SeriesError, ValueError) as exc:
        print(f"curvlab: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
