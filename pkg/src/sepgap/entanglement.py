"""Meyer-Wallach measures, GOE bounds for product minima, witnesses and the LDEC test."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Literal

import numpy as np

from .errors import DimensionError
from .hamiltonians import goe_rng
from .product.seesaw import random_angles
from .tensor import ProductState, num_qubits

Convention = Literal["paper", "rescaled"]
CONVENTIONS: tuple[Convention, ...] = ("paper", "rescaled")


def _as_density(state: np.ndarray) -> np.ndarray:
    if isinstance(state, ProductState):
        state = state.materialize()
    state = np.asarray(state)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def linear_entropy(rho: np.ndarray, tol: float = 1e-9) -> float:
    """``1 - Tr ρ²`` of a density matrix (state vectors are promoted)."""
    rho = _as_density(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"not a density matrix: shape {rho.shape}")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError("density matrix must have unit trace")
    if np.max(np.abs(rho - rho.conj().T)) > tol or np.linalg.eigvalsh(rho)[0] < -tol:
        raise ValueError("density matrix must be Hermitian and positive semidefinite")
    return float(1.0 - np.real(np.vdot(rho, rho)))


def reduced_purity(psi: np.ndarray, L: int, subset: tuple[int, ...]) -> float:
    """``Tr ρ_X²`` for the reduction of a pure ``L``-qubit state to ``subset``."""
    t = np.asarray(psi).reshape((2,) * L)
    rest = [q for q in range(L) if q not in subset]
    M = t.transpose(list(subset) + rest).reshape(2 ** len(subset), -1)
    rho = M @ M.conj().T
    return float(np.real(np.vdot(rho, rho)))


def meyer_wallach_qk(psi: np.ndarray, L: int | None = None, k: int = 1) -> float:
    """Average linear entropy of all ``k``-qubit reductions, rescaled to [0, 1]."""
    if isinstance(psi, ProductState):
        psi = psi.materialize()
    psi = np.asarray(psi)
    if L is None:
        L = num_qubits(psi.shape[0])
    if psi.shape != (2**L,):
        raise DimensionError(f"expected a state vector of dimension {2**L}")
    if not 1 <= k <= L:
        raise ValueError(f"k must be in 1..{L}, got {k}")
    if k == L:
        warnings.warn("Q_k with k = L is the linear entropy of a pure state and always 0",
                      RuntimeWarning, stacklevel=2)
        return 0.0
    norm = np.vdot(psi, psi).real
    total = sum(1.0 - reduced_purity(psi, L, X) / norm**2 for X in combinations(range(L), k))
    return float(2**k / (2**k - 1) * total / math.comb(L, k))


def goe_bounds(N: int, J: float) -> tuple[float, float]:
    """``(-2J/√N, -√(4 ln N / N))`` bracketing λ⊗min of a GOE matrix with ⟨Tr H²⟩ = N."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return -2.0 * J / math.sqrt(N), -math.sqrt(4.0 * math.log(N) / N)


def parties(N: int, M: int) -> float:
    """``log_M N``; non-integer values are allowed (e.g. odd L with M = 4)."""
    return math.log(N) / math.log(M)


def goe_ratio(N: int, M: int) -> float:
    """Typical ratio ``<λ⊗min> / E0 = log_M N / √N``."""
    return parties(N, M) / math.sqrt(N)


@dataclass(frozen=True)
class WitnessPair:
    c_plus: float
    c_minus: float
    A: np.ndarray
    J: float

    def evaluate(self, rho: np.ndarray) -> tuple[float, float]:
        """``(Tr ρW+, Tr ρW-)`` with ``W± = 1 ± c± A``."""
        a = _expect(self.A, rho)
        return 1.0 + self.c_plus * a, 1.0 - self.c_minus * a


def _expect(A: np.ndarray, state) -> float:
    if isinstance(state, ProductState):
        state = state.materialize()
    state = np.asarray(state)
    if state.shape[0] != A.shape[0]:
        raise DimensionError(f"state of dimension {state.shape[0]} vs observable of dimension {A.shape[0]}")
    if state.ndim == 1:
        return float(np.real(np.vdot(state, A @ state)))
    return float(np.real(np.trace(state @ A)))


def witness_pair(A: np.ndarray, J: float, convention: Convention = "paper") -> WitnessPair:
    """``W± = 1 ± c± A`` with ``c± = N / (κ J √(Tr A²) ∓ Tr A)``.

    ``κ = 1`` for ``paper``; ``κ = 2`` for ``rescaled``, which makes
    ``Tr ρW± >= 0`` equivalent to the rescaled LDEC bound.  Raises if a
    denominator is not positive (the witness is then undefined).
    """
    A = np.asarray(A)
    N = A.shape[0]
    kappa = {"paper": 1.0, "rescaled": 2.0}.get(convention)
    if kappa is None:
        raise ValueError(f"unknown convention {convention!r}")
    trA = float(np.real(np.trace(A)))
    trA2 = float(np.real(np.vdot(A, A)))
    root = kappa * J * math.sqrt(trA2)
    den_plus, den_minus = root - trA, root + trA
    if den_plus <= 0 or den_minus <= 0:
        raise ValueError(f"witness undefined: denominators {den_plus:.3g}, {den_minus:.3g} must be positive")
    return WitnessPair(N / den_plus, N / den_minus, A, J)


def ldec_threshold(A: np.ndarray, J: float, convention: Convention = "rescaled") -> float:
    """Deviation beyond which a state is flagged entangled.

    ``paper``: ``2J √(Tr A²) / N²``; ``rescaled``: ``2J √(Tr A²) / N``, which
    for ``Tr A² ≈ N`` equals the magnitude of the GOE lower bound ``2J/√N``.
    """
    A = np.asarray(A)
    N = A.shape[0]
    root = 2.0 * J * math.sqrt(float(np.real(np.vdot(A, A))))
    if convention == "paper":
        return root / N**2
    if convention == "rescaled":
        return root / N
    raise ValueError(f"unknown convention {convention!r}")


@dataclass(frozen=True)
class LdecVerdict:
    deviation: float
    threshold: float
    entangled_flag: bool
    convention: Convention


def ldec_check(state, A: np.ndarray, J: float, convention: Convention = "rescaled") -> LdecVerdict:
    A = np.asarray(A)
    N = A.shape[0]
    dev = abs(_expect(A, state) - float(np.real(np.trace(A))) / N)
    thr = ldec_threshold(A, J, convention)
    return LdecVerdict(dev, thr, dev > thr, convention)


def random_haar_state(N: int, seed: int, *stream: int) -> np.ndarray:
    """Unitarily invariant random pure state (normalised complex Gaussian vector)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    rng = goe_rng(seed, 0x4AA5, N, *stream)
    v = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return v / np.linalg.norm(v)


def random_product_state(L: int, seed: int, *stream: int) -> ProductState:
    """Product state with every qubit uniform on the Bloch sphere."""
    if L < 1:
        raise ValueError("L must be at least 1")
    return ProductState(random_angles(goe_rng(seed, 0x960D, L, *stream), (L,)))


def random_product_vectors(L: int, count: int, seed: int, *stream: int) -> np.ndarray:
    """``count`` materialised random product states as rows of a ``(count, 2**L)`` array."""
    ang = random_angles(goe_rng(seed, 0x960E, L, *stream), (count, L))
    th, ph = ang[..., 0], ang[..., 1]
    q = np.stack([np.cos(th / 2) + 0j, np.exp(1j * ph) * np.sin(th / 2)], axis=-1)
    out = q[:, 0]
    for i in range(1, L):
        out = np.einsum("ri,rj->rij", out, q[:, i]).reshape(count, -1)
    return out
