"""Brute-force product-state minimisation on an angle grid (small L only)."""

from __future__ import annotations

import numpy as np

from ..tensor import PAULIS, kron_all, num_qubits
from .seesaw import seesaw

MAX_GRID_QUBITS = 3


def pauli_tensor(H: np.ndarray) -> np.ndarray:
    """Coefficients ``c[a1..aL] = Tr(H σ_a1 ⊗ ... ⊗ σ_aL) / 2**L``."""
    L = num_qubits(H.shape[0])
    T = np.empty((4,) * L)
    for a in np.ndindex(*T.shape):
        P = kron_all([PAULIS[i] for i in a])
        T[a] = np.real(np.trace(P @ H)) / 2**L
    return T


def _grid_bloch(g: int) -> tuple[np.ndarray, np.ndarray]:
    theta = np.linspace(0.0, np.pi, g)
    phi = 2 * np.pi * np.arange(g) / g
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    th, ph = th.ravel(), ph.ravel()
    n = np.stack([np.ones_like(th), np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)
    return n, np.stack([th, ph], axis=1)


def brute_force_grid(H: np.ndarray, L: int | None = None, grid_per_angle: int = 24,
                     polish: bool = True, chunk: int = 32) -> float:
    """Minimum of the product expectation over a full (θ, φ) grid per qubit.

    The grid minimum is then polished by a see-saw run started from the best
    grid point.  Uses the Pauli expansion of ``H``, so it shares no code with
    the joint-range bounds.
    """
    H = np.asarray(H)
    if L is None:
        L = num_qubits(H.shape[0])
    if L > MAX_GRID_QUBITS:
        raise ValueError(f"grid oracle supports at most {MAX_GRID_QUBITS} qubits, got {L}")
    if grid_per_angle < 24:
        raise ValueError("grid_per_angle must be at least 24")
    T = pauli_tensor(H)
    n, ang = _grid_bloch(grid_per_angle)
    P = len(n)
    if L == 1:
        vals = n @ T
        best_val = float(vals.min())
        best = [int(vals.argmin())]
    elif L == 2:
        vals = n @ T @ n.T
        best_val = float(vals.min())
        best = list(np.unravel_index(int(vals.argmin()), vals.shape))
    else:
        Y = np.einsum("pa,abc->pbc", n, T)
        best_val, best = np.inf, None
        for start in range(0, P, chunk):
            Z = np.einsum("pbc,qb->pqc", Y[start:start + chunk], n) @ n.T
            k = int(Z.argmin())
            if Z.flat[k] < best_val:
                i, j, l = np.unravel_index(k, Z.shape)
                best_val, best = float(Z.flat[k]), [start + i, j, l]
    if not polish:
        return best_val
    init = np.array([ang[i] for i in best])
    sw = seesaw(H, L, restarts=1, init=init, tol=1e-13, max_sweeps=2000)
    return min(best_val, sw.energy)
