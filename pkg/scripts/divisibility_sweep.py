"""Sweep t over a fine grid and report the positivity of (K-dagger)^t.

For the contraction szego * diag([1,1,1/4]; tail=1), the z^2 conj(w)^2
coefficient of (K-dagger)^t is t(2t-1)/4, negative exactly for 0 < t < 1/2.

    python scripts/divisibility_sweep.py [--kernel DSL] [--order 8] [--steps 20]
"""

import argparse
from dataclasses import dataclass

import numpy as np

from curvlab import series as S
from curvlab.divisibility import power_verdict
from curvlab.dsl import parse_kernel
from curvlab.kernels import Contract, taylor_expand


@dataclass(frozen=True)
class SweepConfig:
    kernel: str = "szego * diag([1,1,1/4]; tail=1)"
    order: int = 8
    steps: int = 20
    t_max: float = 1.0


def sweep(cfg: SweepConfig) -> list[tuple[float, str, float]]:
    k = Contract(parse_kernel(cfg.kernel))
    s = taylor_expand(k, np.zeros(k.domain.m), cfg.order)
    rows = []
    for t in np.linspace(cfg.t_max / cfg.steps, cfg.t_max, cfg.steps):
        v = power_verdict(s, None, float(t), points=None)
        rows.append((float(t), v.verdict.value, v.min_eigenvalue))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kernel", default=SweepConfig.kernel)
    ap.add_argument("--order", type=int, default=SweepConfig.order)
    ap.add_argument("--steps", type=int, default=SweepConfig.steps)
    args = ap.parse_args()
    cfg = SweepConfig(args.kernel, args.order, args.steps)
    print(f"(contract({cfg.kernel}))^t, order {cfg.order}")
    k = Contract(parse_kernel(cfg.kernel))
    one_var = k.domain.m == 1
    for t, verdict, lo in sweep(cfg):
        extra = ""
        if one_var:
            c2 = S.real_power(taylor_expand(k, 0.0, cfg.order), t).coeff((2,), (2,)).real
            extra = f"  z^2w^2 coeff {c2:+.6f} (closed form {t * (2 * t - 1) / 4:+.6f})"
        print(f"  t={t:5.3f}  {verdict:<11} min {lo:+.3e}{extra}")


if __name__ == "__main__":
    main()
