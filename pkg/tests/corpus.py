"""Seeded random codes shared by the property and acceptance suites."""

from __future__ import annotations

import numpy as np

from convmds.gf import GF
from convmds.polymat import PolyMatrix, derive_params, rank, structural_checks

FIELDS = (3, 5, 7)


def random_code(rng: np.random.Generator, n=None, k=None, delta=None, q=None) -> PolyMatrix:
    """A random row-reduced code with generic row degrees and full-rank G0."""
    q = q or int(rng.choice(FIELDS))
    n = n or int(rng.integers(2, 5))
    k = k or int(rng.integers(1, min(2, n - 1) + 1))
    delta = int(rng.integers(1, 3)) if delta is None else delta
    F = GF(q)
    p = derive_params(n, k, delta)
    while True:
        coeffs = rng.integers(0, q, size=(p.mu + 1, k, n))
        coeffs[p.mu, p.t :, :] = 0
        G = PolyMatrix(F, coeffs, delta)
        if rank(F, coeffs[0]) < k:
            continue
        rep = structural_checks(G)
        if rep.is_row_reduced and rep.has_generic_row_degrees and rep.degree == delta:
            return G


def corpus(size: int = 240, seed: int = 2024) -> list[PolyMatrix]:
    rng = np.random.default_rng(seed)
    return [random_code(rng) for _ in range(size)]
