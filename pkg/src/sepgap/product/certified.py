"""Certified brackets ``lower <= λ⊗min <= upper`` by recursive joint-range relaxation.

Peeling qubit 0 writes ``H = ½ Σ σ_i ⊗ H_i``.  For a product state
``α ⊗ β`` the energy minimised over ``α`` is ``x0/2 - |x⃗|/2`` with
``x_i = <β|H_i|β>``, a concave function of ``x``.  Its minimum over any
polytope containing the product joint range of ``(H_0..H_3)`` is a lower
bound, attained at a vertex.  The polytope's support values are upper
bounds on ``λ⊗max(Σ c_i H_i)`` for the remaining qubits, computed either
exactly (largest eigenvalue, a relaxation over all states of the
remaining block) or by recursing on ``-Σ c_i H_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..tensor import ProductState, max_eigvals, min_eig, num_qubits
from .jointrange import direction_sequence, joint_range_outer, vertex_enum_4d
from .local import pauli_reduce, two_level_min
from .seesaw import seesaw


@dataclass
class BoundsResult:
    lower: float
    upper: float
    witness: ProductState
    direction_budget: int
    depth: int
    e0: float | None = None
    vertices: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.upper + self.lower)


@dataclass(frozen=True)
class _Options:
    budget: int
    terminal_dim: int
    restarts: int
    inner_restarts: int
    tol: float
    max_sweeps: int
    seed: int


def _exact_ground(H: np.ndarray) -> tuple[float, ProductState]:
    w, v = np.linalg.eigh(H)
    return float(w[0]), ProductState.from_vectors([v[:, 0]])


def _lower(H: np.ndarray, depth_left: float, opts: _Options, top: bool) -> tuple[float, object, int, int]:
    """Returns ``(lower, seesaw-or-None, polytope levels used, vertex count)``."""
    L = num_qubits(H.shape[0])
    if L == 1:
        e, _ = _exact_ground(H)
        return e, None, 0, 0

    restarts = opts.restarts if top else opts.inner_restarts
    sw = seesaw(H, L, restarts=restarts, tol=opts.tol, max_sweeps=opts.max_sweeps, seed=opts.seed)
    red = pauli_reduce(H, 0)
    # optimal cone direction: u = x⃗/|x⃗| = minus the Bloch vector of qubit 0
    focus = -sw.state.bloch_vectors()[0]
    dirs = direction_sequence(opts.budget, focus)

    d = H.shape[0] // 2
    exact = d <= opts.terminal_dim or depth_left <= 1
    levels = 1
    if exact:
        bound = max_eigvals
    else:
        sub_levels = [0]

        def bound(stack: np.ndarray) -> np.ndarray:
            out = np.empty(len(stack))
            for k, op in enumerate(stack):
                lo, _, lv, _ = _lower(-op, depth_left - 1, opts, top=False)
                out[k] = -lo
                sub_levels[0] = max(sub_levels[0], lv)
            return out

    outer = joint_range_outer(red, bound, dirs)
    if not exact:
        levels += sub_levels[0]
    verts = vertex_enum_4d(outer, dedupe=False)
    lower = float(np.min(two_level_min(verts)))
    # the ground energy is itself a valid lower bound on the product minimum
    e0, _ = min_eig(H)
    lower = max(lower, e0)
    lower = min(lower, sw.energy)
    return lower, sw, levels, len(verts)


def certified_lambda_min(H: np.ndarray, L: int | None = None, direction_budget: int = 200, *,
                         terminal_dim: int = 16, max_depth: int | None = None, restarts: int = 16,
                         inner_restarts: int = 3, tol: float = 1e-10, max_sweeps: int = 500,
                         seed: int = 0) -> BoundsResult:
    """Bracket the minimal product-state expectation of ``H``.

    The recursion peels qubits while the remaining block is larger than
    ``terminal_dim`` and fewer than ``max_depth`` levels have been used;
    ``terminal_dim=2`` recurses down to single qubits, which is exact in
    the limit of many directions but costs ``direction_budget**(L-1)``
    small problems.  The upper bound is the best see-saw product state.
    """
    H = np.asarray(H)
    if L is None:
        L = num_qubits(H.shape[0])
    if H.shape[0] != 2**L:
        raise ValueError(f"operator dimension {H.shape[0]} does not match L={L}")
    opts = _Options(direction_budget, terminal_dim, restarts, inner_restarts, tol, max_sweeps, seed)
    depth = float("inf") if max_depth is None else max_depth
    if depth < 1:
        raise ValueError("max_depth must be at least 1")
    e0, _ = min_eig(H)
    if L == 1:
        e, st = _exact_ground(H)
        return BoundsResult(e, e, st, direction_budget, 0, e0)
    lower, sw, levels, nverts = _lower(H, depth, opts, top=True)
    return BoundsResult(lower, sw.energy, sw.state, direction_budget, levels, e0, nverts)


def certified_lambda_max_upper(H: np.ndarray, L: int | None = None, direction_budget: int = 200,
                               **kwargs) -> float:
    """Certified upper bound on the maximal product expectation, via ``-λ⊗min(-H)``."""
    return -certified_lambda_min(-np.asarray(H), L, direction_budget, **kwargs).lower
