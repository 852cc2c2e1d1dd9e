"""Shared random-matrix helpers for the test suite.

Everything is seeded through numpy Generators so failures reproduce.
"""

from __future__ import annotations

import numpy as np

from physborn.linalg import projector_from_span
from physborn.model import Model, PhysicalFamily, TimeGrid


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-ish unitary via QR of a complex Ginibre matrix."""
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_projector(rng: np.random.Generator, d: int, rank: int) -> np.ndarray:
    u = random_unitary(rng, d)
    return u[:, :rank] @ u[:, :rank].conj().T


def random_nested_family(rng: np.random.Generator, d: int,
                         n_indices: int) -> PhysicalFamily:
    """Random family satisfying the nesting law by construction: later
    projectors span everything earlier ones do, plus fresh directions."""
    u = random_unitary(rng, d)
    rank = int(rng.integers(1, d))
    projs = []
    for _ in range(n_indices):
        projs.append(u[:, :rank] @ u[:, :rank].conj().T)
        if rank < d and rng.random() < 0.6:
            rank += int(rng.integers(1, d - rank + 1))
    return PhysicalFamily(tuple(projs))


def random_model(rng: np.random.Generator, d1: int, d2: int,
                 n_indices: int = 3) -> Model:
    steps = tuple(random_unitary(rng, d1 * d2) for _ in range(n_indices - 1))
    return Model(d1, d2, TimeGrid(tuple(float(t) for t in range(n_indices))), steps)


def identity_family(d: int, n_indices: int) -> PhysicalFamily:
    return PhysicalFamily((np.eye(d, dtype=complex),) * n_indices)


def random_span_projector(rng: np.random.Generator, d: int, n_vecs: int) -> np.ndarray:
    vecs = [rng.standard_normal(d) + 1j * rng.standard_normal(d) for _ in range(n_vecs)]
    return projector_from_span(vecs)
