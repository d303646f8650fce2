"""Dense linear algebra on qubit registers.

Operators are plain ``numpy`` arrays.  Site 0 is the most significant tensor
factor, i.e. the leftmost one in ``A0 ⊗ A1 ⊗ ... ⊗ A(L-1)``, so the basis
index of ``|b0 b1 ... b(L-1)>`` is ``b0 * 2**(L-1) + ... + b(L-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DimensionError

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = np.stack([I2, SX, SY, SZ])

HERMITIAN_TOL = 1e-12
DENSE_MAX_DIM = 2**12
ITERATIVE_MIN_DIM = 2**10


def num_qubits(dim: int) -> int:
    L = int(dim).bit_length() - 1
    if L < 0 or 2**L != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return L


def is_hermitian(A: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0) <= tol * scale)


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.kron(A, B)


def kron_all(ops: Iterable[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, ops)


def embed_local(op2: np.ndarray, site: int, L: int) -> np.ndarray:
    """``1 ⊗ ... ⊗ op2 ⊗ ... ⊗ 1`` with ``op2`` acting on ``site``."""
    op2 = np.asarray(op2)
    if op2.shape != (2, 2):
        raise DimensionError("embed_local expects a 2x2 operator")
    if not 0 <= site < L:
        raise DimensionError(f"site {site} out of range for {L} qubits")
    left = np.eye(2**site, dtype=op2.dtype)
    right = np.eye(2 ** (L - site - 1), dtype=op2.dtype)
    return np.kron(np.kron(left, op2), right)


def _as_state(psi: np.ndarray, dim: int) -> np.ndarray:
    psi = np.asarray(psi)
    if psi.shape[0] != dim:
        raise DimensionError(f"state of dimension {psi.shape[0]} vs operator of dimension {dim}")
    return psi


def expectation(H: np.ndarray, psi: np.ndarray, imag_tol: float = 1e-10) -> float:
    """Real expectation value of Hermitian ``H`` in a state vector or density matrix."""
    H = np.asarray(H)
    psi = _as_state(psi, H.shape[0])
    if psi.ndim == 1:
        value = np.vdot(psi, H @ psi)
    elif psi.ndim == 2 and psi.shape == H.shape:
        value = np.trace(psi @ H)
    else:
        raise DimensionError(f"cannot interpret array of shape {psi.shape} as a state")
    scale = max(1.0, abs(value.real))
    if abs(value.imag) > imag_tol * scale:
        raise ValueError(f"expectation has imaginary part {value.imag:.3e}; operator not Hermitian?")
    return float(value.real)


def qubit_vector(theta, phi) -> np.ndarray:
    """Bloch parametrisation ``(cos θ/2, e^{iφ} sin θ/2)``; broadcasts over leading axes."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def bloch_angles(vec: np.ndarray) -> tuple[float, float]:
    """Inverse of :func:`qubit_vector` up to a global phase."""
    a, b = complex(vec[0]), complex(vec[1])
    theta = 2.0 * np.arctan2(abs(b), abs(a))
    if abs(b) < 1e-15 or abs(a) < 1e-15:
        phi = 0.0 if abs(b) < 1e-15 else float(np.angle(b))
    else:
        phi = float(np.angle(b) - np.angle(a))
    return float(theta), float(np.mod(phi, 2 * np.pi))


def bloch_vector_angles(n: np.ndarray) -> tuple[float, float]:
    n = np.asarray(n, dtype=float)
    norm = np.linalg.norm(n)
    z = np.clip(n[2] / norm, -1.0, 1.0) if norm > 0 else 1.0
    return float(np.arccos(z)), float(np.mod(np.arctan2(n[1], n[0]), 2 * np.pi))


@dataclass(frozen=True)
class ProductState:
    """``⊗_i (cos θ_i/2, e^{iφ_i} sin θ_i/2)``; ``angles`` has shape ``(L, 2)``."""

    angles: np.ndarray

    def __post_init__(self):
        a = np.array(self.angles, dtype=float).reshape(-1, 2)
        a[:, 1] = np.mod(a[:, 1], 2 * np.pi)
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    @classmethod
    def from_vectors(cls, vectors: Sequence[np.ndarray]) -> "ProductState":
        return cls([bloch_angles(v) for v in vectors])

    @property
    def L(self) -> int:
        return self.angles.shape[0]

    def vectors(self) -> np.ndarray:
        return qubit_vector(self.angles[:, 0], self.angles[:, 1])

    def bloch_vectors(self) -> np.ndarray:
        th, ph = self.angles[:, 0], self.angles[:, 1]
        return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)

    def materialize(self) -> np.ndarray:
        return kron_all(self.vectors())

    def with_site(self, site: int, theta: float, phi: float) -> "ProductState":
        a = self.angles.copy()
        a[site] = (theta, phi)
        return ProductState(a)

    def to_list(self) -> list[list[float]]:
        return self.angles.tolist()


def product_expectation(H: np.ndarray, s: ProductState) -> float:
    H = np.asarray(H)
    if H.shape[0] != 2**s.L:
        raise DimensionError(f"{s.L}-qubit product state vs operator of dimension {H.shape[0]}")
    return expectation(H, s.materialize())


def partial_trace(rho: np.ndarray, keep: Iterable[int], dims: Sequence[int]) -> np.ndarray:
    """Trace out every factor of ``dims`` not listed in ``keep``.

    Kept factors stay in their original order.  ``rho`` may be a state
    vector, which is promoted to a projector.
    """
    dims = [int(d) for d in dims]
    rho = np.asarray(rho)
    total = int(np.prod(dims))
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    if rho.shape != (total, total):
        raise DimensionError(f"operator of shape {rho.shape} does not match factor dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep={keep} is not a subset of factors 0..{len(dims) - 1}")
    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    t = rho.reshape(dims + dims)
    # move kept row axes, kept col axes, then traced (row, col) pairs last
    perm = keep + [n + k for k in keep] + traced + [n + k for k in traced]
    t = t.transpose(perm)
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    dt = int(np.prod([dims[k] for k in traced])) if traced else 1
    t = t.reshape(dk, dk, dt, dt)
    return np.einsum("abii->ab", t)


def eigen_sym(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All eigenpairs of a Hermitian matrix, eigenvalues ascending."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {H.shape}")
    if H.shape[0] > DENSE_MAX_DIM:
        raise DimensionError(f"dimension {H.shape[0]} exceeds the dense budget {DENSE_MAX_DIM}")
    try:
        w, v = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc
    return w, v


def min_eig(H: np.ndarray) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and a normalised eigenvector."""
    H = np.asarray(H)
    n = H.shape[0]
    if n <= ITERATIVE_MIN_DIM:
        w, v = eigen_sym(H)
        return float(w[0]), v[:, 0]
    if n > DENSE_MAX_DIM:
        raise DimensionError(f"dimension {n} exceeds the dense budget {DENSE_MAX_DIM}")
    try:
        w, v = scipy.linalg.eigh(H, subset_by_index=[0, 0], driver="evr")
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc
    return float(w[0]), v[:, 0]


def max_eigvals(ops: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of each Hermitian matrix in a ``(k, d, d)`` stack."""
    try:
        return np.linalg.eigvalsh(ops)[..., -1]
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc
