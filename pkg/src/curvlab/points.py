"""Seeded point generators for the supported domains."""

from __future__ import annotations

import numpy as np

from curvlab.kernels import Domain

DEFAULT_SEED = 42
DEFAULT_RADIUS = 0.95


def sample_points(domain: Domain, n: int, seed: int = DEFAULT_SEED, radius: float = DEFAULT_RADIUS,
                  center=None) -> np.ndarray:
    """``n`` points of ``domain`` with radius at most ``radius``, shape ``(n, m)``.

    Radii are uniform in ``[0, radius]``; directions are uniform.  Matrix-ball
    points are Gaussian matrices rescaled to operator norm ``radius * U``, so
    non-normal matrices are the typical case.  With ``center`` the points are
    ``center + radius * direction`` instead (the caller keeps them inside).
    """
    rng = np.random.default_rng(seed)
    m = domain.m
    r = radius * rng.uniform(0.0, 1.0, size=n)
    if domain.kind == "disc":
        pts = (r * np.exp(2j * np.pi * rng.uniform(size=n)))[:, None]
    elif domain.kind == "polydisc":
        pts = radius * rng.uniform(size=(n, m)) * np.exp(2j * np.pi * rng.uniform(size=(n, m)))
    elif domain.kind == "ball":
        g = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
        pts = g / np.linalg.norm(g, axis=1, keepdims=True) * r[:, None]
    elif domain.kind == "matrix2":
        g = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
        norms = np.linalg.norm(g, ord=2, axis=(1, 2))
        pts = (g / norms[:, None, None] * r[:, None, None]).reshape(n, 4)
    else:
        raise ValueError(f"unknown domain {domain}")
    if center is not None:
        pts = pts + np.ravel(np.asarray(center, dtype=complex))[None, :]
    return pts


def radial_grid(radii, n_angles: int = 8) -> np.ndarray:
    """Disc points ``r * exp(2 pi i k / n_angles)``, shape ``(len(radii) * n_angles, 1)``."""
    radii = np.asarray(radii, dtype=float)
    angles = np.exp(2j * np.pi * np.arange(n_angles) / n_angles)
    return (radii[:, None] * angles[None, :]).reshape(-1, 1)
