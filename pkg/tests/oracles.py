"""Independent reference computations used by the tests."""

import math

import numpy as np

from curvlab.kernels import Diagonal, DetBall2, DruryArveson, Power, Product, SzegoDisc, SzegoPolydisc


def fd_curvature(k, w, h=1e-4):
    """-d_i dbar_j log K(w, w) by central differences in real coordinates."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    m = w.size
    f = lambda p: np.log(k.value(p, p).real)  # noqa: E731
    e = np.eye(m)
    out = np.zeros((m, m), complex)

    def d2(u, v):
        return (f(w + h * u + h * v) - f(w + h * u - h * v) - f(w - h * u + h * v) + f(w - h * u - h * v)) / (
            4 * h * h)

    for i in range(m):
        for j in range(m):
            xx, yy = d2(e[i], e[j]), d2(1j * e[i], 1j * e[j])
            xy, yx = d2(e[i], 1j * e[j]), d2(1j * e[i], e[j])
            out[i, j] = 0.25 * (xx + yy + 1j * (xy - yx))
    return -out


def exp_times_szego_power(b, p, n_terms):
    """Coefficients of exp(sum_n b_n x^n) (1 - x)^-p via n f_n = sum_k k g_k f_{n-k}."""
    g = [0.0] + list(b) + [0.0] * n_terms
    f = [1.0]
    for n in range(1, n_terms):
        f.append(sum(k * g[k] * f[n - k] for k in range(1, n + 1)) / n)
    s = [math.gamma(n + p) / (math.gamma(p) * math.factorial(n)) for n in range(n_terms)]
    return [sum(f[k] * s[n - k] for k in range(n + 1)) for n in range(n_terms)]


RANDOM_DOMAINS = [("disc", 1), ("ball", 2), ("ball", 3), ("polydisc", 2), ("polydisc", 3), ("matrix2", 4)]


def random_atom(rng, kind, m):
    if kind == "disc":
        if rng.uniform() < 0.4:
            return SzegoDisc()
        n = int(rng.integers(1, 4))
        return Diagonal(tuple(rng.uniform(0.2, 5.0, n)), float(rng.uniform(0.2, 5.0)))
    if kind == "ball":
        return DruryArveson(m)
    if kind == "polydisc":
        return SzegoPolydisc(m)
    return DetBall2()


def random_kernel_and_point(rng):
    """A product of 1-3 atoms, each raised to a random positive power, and an interior point."""
    kind, m = RANDOM_DOMAINS[int(rng.integers(len(RANDOM_DOMAINS)))]
    k = None
    for _ in range(int(rng.integers(1, 4))):
        atom = random_atom(rng, kind, m)
        if rng.uniform() < 0.5:
            atom = Power(atom, float(rng.uniform(0.25, 3.0)))
        k = atom if k is None else Product(k, atom)
    v = rng.normal(size=m) + 1j * rng.normal(size=m)
    if kind == "matrix2":
        v = v / np.linalg.norm(v.reshape(2, 2), 2) * rng.uniform(0, 0.6)
    elif kind == "polydisc":
        v = v / np.max(np.abs(v)) * rng.uniform(0, 0.8)
    else:
        v = v / np.linalg.norm(v) * rng.uniform(0, 0.8)
    return k, v
