"""Alternating single-qubit minimisation over product states."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from ..hamiltonians import goe_rng
from ..tensor import ProductState, bloch_vector_angles, num_qubits, product_expectation, qubit_vector
from .local import site_frames


@dataclass
class SeesawResult:
    energy: float
    state: ProductState
    converged: bool
    sweeps: int
    history: list[float] = field(default_factory=list)  # best energy after each sweep
    restart_energies: np.ndarray | None = None
    restart_histories: list[list[float]] | None = None


def random_angles(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    theta = np.arccos(rng.uniform(-1.0, 1.0, size=shape))
    phi = rng.uniform(0.0, 2 * np.pi, size=shape)
    return np.stack([theta, phi], axis=-1)


def _fast_operator(H: np.ndarray, max_density: float = 0.05):
    """CSR copy of ``H`` when it is large and sparse (model chains), else ``H`` itself."""
    if H.shape[0] < 64:
        return H
    nnz = np.count_nonzero(H)
    if nnz > max_density * H.size:
        return H
    return scipy.sparse.csr_matrix(H)


def seesaw(H: np.ndarray, L: int | None = None, restarts: int = 16, tol: float = 1e-10,
           max_sweeps: int = 500, seed: int = 0, init: np.ndarray | None = None,
           degenerate_tol: float = 1e-14) -> SeesawResult:
    """Best product state found by cyclic single-qubit updates from random starts.

    Every restart is advanced in lock step so that one ``H @ V`` product per
    site serves all of them.  A restart stops once a full sweep lowers its
    energy by less than ``tol``.  ``init`` (shape ``(L, 2)`` or ``(R, L, 2)``)
    replaces the first random starting points.
    """
    H = np.asarray(H)
    if L is None:
        L = num_qubits(H.shape[0])
    if H.shape[0] != 2**L:
        raise ValueError(f"operator dimension {H.shape[0]} does not match L={L}")
    if restarts < 1 or tol <= 0:
        raise ValueError("restarts must be >= 1 and tol > 0")

    angles = random_angles(goe_rng(seed, 0x5EE5A3, L), (restarts, L))
    if init is not None:
        init = np.asarray(init, dtype=float).reshape(-1, L, 2)[:restarts]
        angles[: len(init)] = init
    vecs = qubit_vector(angles[..., 0], angles[..., 1])
    N = H.shape[0]
    real = not np.iscomplexobj(H)
    op = _fast_operator(H)

    energies = np.full(restarts, np.inf)
    histories: list[list[float]] = [[] for _ in range(restarts)]
    active = np.ones(restarts, dtype=bool)
    sweeps = 0
    while active.any() and sweeps < max_sweeps:
        sweeps += 1
        idx = np.flatnonzero(active)
        for site in range(L):
            V = site_frames(vecs[idx], site)  # (r, 2, N)
            W = V.reshape(-1, N).T
            if real:
                HV = (op @ W.real + 1j * (op @ W.imag)).T.reshape(V.shape)
            else:
                HV = (op @ W).T.reshape(V.shape)
            M = np.einsum("rai,rbi->rab", V.conj(), HV)
            M = 0.5 * (M + M.conj().transpose(0, 2, 1))
            x0 = np.real(M[:, 0, 0] + M[:, 1, 1])
            xv = np.stack([2 * M[:, 1, 0].real, 2 * M[:, 1, 0].imag, np.real(M[:, 0, 0] - M[:, 1, 1])], axis=1)
            r = np.linalg.norm(xv, axis=1)
            value = 0.5 * (x0 - r)
            for k, ridx in enumerate(idx):
                if r[k] > degenerate_tol * max(1.0, abs(x0[k])):
                    th, ph = bloch_vector_angles(-xv[k])
                    angles[ridx, site] = (th, ph)
                    vecs[ridx, site] = qubit_vector(th, ph)
            new = value
        for k, ridx in enumerate(idx):
            histories[ridx].append(float(new[k]))
            if energies[ridx] - new[k] < tol:
                active[ridx] = False
            energies[ridx] = min(energies[ridx], new[k])

    # lowest energy wins, ties broken by restart index
    best = int(np.argmin(energies))
    state = ProductState(angles[best])
    energy = product_expectation(H, state)
    longest = max(len(h) for h in histories)
    history = [float(min(h[min(i, len(h) - 1)] for h in histories)) for i in range(longest)]
    return SeesawResult(energy, state, not active.any(), sweeps, history, energies, histories)
