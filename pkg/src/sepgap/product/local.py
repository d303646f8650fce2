"""Single-qubit reductions: Pauli components and effective 2x2 problems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError
from ..tensor import PAULIS, ProductState, bloch_vector_angles, num_qubits


@dataclass(frozen=True)
class PauliReduction:
    """Operators ``H_i = Tr_A[H (σ_i ⊗ 1)]`` on the remaining qubits.

    With this normalisation ``H = ½ Σ_i σ_i ⊗ H_i`` holds exactly, where the
    peeled qubit has been moved to the front.
    """

    ops: np.ndarray  # shape (4, d, d)
    site: int = 0

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    def combine(self, directions: np.ndarray) -> np.ndarray:
        """``Σ_i c_i H_i`` for every row ``c`` of ``directions``; returns ``(k, d, d)``."""
        return np.tensordot(np.atleast_2d(directions), self.ops, axes=(1, 0))

    def reconstruct(self) -> np.ndarray:
        return 0.5 * sum(np.kron(PAULIS[i], self.ops[i]) for i in range(4))


def move_site_to_front(H: np.ndarray, site: int) -> np.ndarray:
    L = num_qubits(H.shape[0])
    if not 0 <= site < L:
        raise DimensionError(f"site {site} out of range for {L} qubits")
    if site == 0:
        return H
    order = [site] + [q for q in range(L) if q != site]
    t = H.reshape([2] * (2 * L)).transpose(order + [L + q for q in order])
    return t.reshape(H.shape)


def pauli_reduce(H: np.ndarray, site: int = 0) -> PauliReduction:
    H = np.asarray(H)
    L = num_qubits(H.shape[0])
    if L < 1:
        raise DimensionError("need at least one qubit to peel")
    d = H.shape[0] // 2
    blocks = move_site_to_front(H, site).reshape(2, d, 2, d)
    # H_i = Σ_ab (σ_i)_ba H[a, :, b, :]
    ops = np.einsum("iba,axby->ixy", PAULIS, blocks)
    return PauliReduction(ops, site)


def two_level_min(x) -> float:
    """Smallest eigenvalue of ``½ Σ x_i σ_i``, i.e. ``x0/2 - |x⃗|/2``; concave in ``x``."""
    x = np.asarray(x, dtype=float)
    return 0.5 * x[..., 0] - 0.5 * np.linalg.norm(x[..., 1:], axis=-1)


def pauli_components(M: np.ndarray) -> np.ndarray:
    """``x_i = Tr(M σ_i)`` so that ``M = ½ Σ x_i σ_i``."""
    return np.real(np.einsum("ij,kji->k", M, PAULIS))


def min_qubit_expectation(H_eff: np.ndarray, current: tuple[float, float] | None = None,
                          degenerate_tol: float = 1e-14) -> tuple[float, tuple[float, float]]:
    """Minimal expectation of a 2x2 Hermitian matrix and Bloch angles of a minimiser.

    When the spectrum is degenerate every state is optimal and ``current``
    (or ``(0, 0)``) is returned unchanged.
    """
    H_eff = np.asarray(H_eff)
    tr = np.real(H_eff[0, 0] + H_eff[1, 1])
    det = np.real(H_eff[0, 0] * H_eff[1, 1] - H_eff[0, 1] * H_eff[1, 0])
    value = tr / 2 - np.sqrt(max((tr / 2) ** 2 - det, 0.0))
    x = pauli_components(H_eff)
    r = np.linalg.norm(x[1:])
    if r <= degenerate_tol * max(1.0, abs(x[0])):
        return float(value), (current if current is not None else (0.0, 0.0))
    return float(value), bloch_vector_angles(-x[1:])


def effective_local_hamiltonian(H: np.ndarray, s: ProductState, site: int) -> np.ndarray:
    """2x2 matrix ``M`` with ``<α|M|α>`` equal to ``H`` evaluated on ``s`` with qubit ``site`` set to ``α``."""
    H = np.asarray(H)
    L = s.L
    if H.shape[0] != 2**L:
        raise DimensionError(f"{L}-qubit product state vs operator of dimension {H.shape[0]}")
    if not 0 <= site < L:
        raise DimensionError(f"site {site} out of range for {L} qubits")
    V = site_frames(s.vectors()[None], site)[0]
    return V.conj() @ H @ V.T


def site_frames(vecs: np.ndarray, site: int) -> np.ndarray:
    """For qubit vectors of shape ``(R, L, 2)``, return ``(R, 2, 2**L)``.

    Row ``a`` of batch ``r`` is the product state ``r`` with qubit ``site``
    replaced by the basis state ``|a>``.
    """
    R, L, _ = vecs.shape
    left = np.ones((R, 1), dtype=complex)
    for q in range(site):
        left = np.einsum("ri,rj->rij", left, vecs[:, q]).reshape(R, -1)
    right = np.ones((R, 1), dtype=complex)
    for q in range(site + 1, L):
        right = np.einsum("ri,rj->rij", right, vecs[:, q]).reshape(R, -1)
    eye = np.eye(2)
    out = np.einsum("ri,ab,rj->raibj", left, eye, right)
    return out.reshape(R, 2, -1)
