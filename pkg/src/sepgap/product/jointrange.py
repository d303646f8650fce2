"""Outer (halfspace) and inner (point) approximations of joint numerical ranges in R^4."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from ..errors import UnboundedPolytopeError
from ..tensor import ProductState
from .local import PauliReduction

AXES = np.vstack([np.eye(4), -np.eye(4)])
PIVOT_TOL = 1e-9
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class JointRangeOuter:
    """Polytope ``{x : c_k · x <= s_k}``.

    ``center``/``basis`` optionally pin the affine hull of the target set
    (``x = center + basis @ y``); vertex enumeration then works in that
    subspace, which keeps flat ranges (e.g. a vanishing σy component) exact.
    """

    directions: np.ndarray
    supports: np.ndarray
    center: np.ndarray | None = None
    basis: np.ndarray | None = None

    @property
    def halfspaces(self) -> list[tuple[np.ndarray, float]]:
        return list(zip(self.directions, self.supports))

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return bool(np.all(self.directions @ np.asarray(x) <= self.supports + tol))


@dataclass(frozen=True)
class JointRangeInner:
    """Achievable points with their witnessing states."""

    points: np.ndarray
    states: list


def halton(i: int, base: int) -> float:
    f, r = 1.0, 0.0
    i += 1
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def sphere_point(i: int) -> np.ndarray:
    """``i``-th point of an area-preserving Halton sequence on S^2 (prefix-stable)."""
    z = 1.0 - 2.0 * halton(i, 2)
    phi = 2.0 * np.pi * halton(i, 3)
    s = np.sqrt(max(0.0, 1.0 - z * z))
    return np.array([s * np.cos(phi), s * np.sin(phi), z])


def _frame(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.eye(3)[int(np.argmin(np.abs(u)))]
    e1 = np.cross(u, a)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(u, e1)


def direction_sequence(budget: int, focus: np.ndarray | None = None, *, ring_size: int = 6,
                       rings: int = 7, first_ring: float = 0.45, ring_ratio: float = 0.5) -> np.ndarray:
    """Deterministic unit directions for outer approximations of the joint range.

    Starts with the eight axis directions ±e_i.  The rest lie on the cone
    ``(-1, u)/√2``, ``u`` on the unit sphere, which are the only directions
    that matter when minimising ``x0/2 - |x⃗|/2``: rings of shrinking radius
    around ``focus`` interleaved with a Halton sequence.  The sequence does
    not depend on ``budget`` beyond truncation, so a larger budget always
    yields a superset of directions.
    """
    if budget < len(AXES):
        raise ValueError(f"direction budget must be at least {len(AXES)}")
    us: list[np.ndarray] = []
    halton_i = 0

    def take_halton(n: int):
        nonlocal halton_i
        for _ in range(n):
            us.append(sphere_point(halton_i))
            halton_i += 1

    need = budget - len(AXES)
    if focus is not None and np.linalg.norm(focus) > 0:
        f = np.asarray(focus, dtype=float) / np.linalg.norm(focus)
        e1, e2 = _frame(f)
        us.append(f)
        for j in range(rings):
            if len(us) >= need:
                break
            radius = first_ring * ring_ratio**j
            offset = 2 * np.pi * _GOLDEN * j
            for m in range(ring_size):
                a = offset + 2 * np.pi * m / ring_size
                us.append(np.cos(radius) * f + np.sin(radius) * (np.cos(a) * e1 + np.sin(a) * e2))
            take_halton(ring_size)
    if len(us) < need:
        take_halton(need - len(us))
    cone = np.array([np.concatenate([[-1.0], u]) / np.sqrt(2.0) for u in us[:need]]).reshape(-1, 4)
    return np.vstack([AXES, cone])


def affine_hull(ops: np.ndarray, rank_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Centre and orthonormal basis of the affine hull of ``{(<A_i>)_i}`` over all states.

    The centre is the value at the maximally mixed state, which lies in the
    relative interior of both the full and the product joint range.
    """
    k, d, _ = ops.shape
    center = np.real(np.trace(ops, axis1=1, axis2=2)) / d
    traceless = ops - center[:, None, None] * np.eye(d)
    flat = traceless.reshape(k, -1)
    T = np.hstack([flat.real, flat.imag])
    U, s, _ = np.linalg.svd(T, full_matrices=False)
    scale = max(s[0] if s.size else 0.0, 1e-300)
    r = int(np.sum(s > rank_tol * max(scale, 1.0)))
    return center, U[:, :r]


def joint_range_outer(ops: PauliReduction | np.ndarray,
                      lambda_max_bound: Callable[[np.ndarray], np.ndarray],
                      directions: np.ndarray, slack: float = 1e-12) -> JointRangeOuter:
    """Halfspaces ``c · x <= s(c)`` with ``s(c)`` an upper bound on ``λmax(Σ c_i A_i)``.

    ``lambda_max_bound`` receives the ``(k, d, d)`` stack of combined
    operators and returns ``k`` upper bounds; exact largest eigenvalues
    give the full range W, certified product bounds give W⊗.
    """
    A = ops.ops if isinstance(ops, PauliReduction) else np.asarray(ops)
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    if directions.shape[0] < 5 or np.linalg.matrix_rank(directions) < 4:
        raise ValueError("directions must contain at least 5 vectors spanning R^4")
    for ax in AXES:
        if not np.any(np.all(np.abs(directions - ax) < 1e-12, axis=1)):
            raise ValueError("directions must include every axis direction ±e_i")
    combined = np.tensordot(directions, A, axes=(1, 0))
    supports = np.asarray(lambda_max_bound(combined), dtype=float)
    supports = supports + slack * (1.0 + np.abs(supports))
    center, basis = affine_hull(A)
    return JointRangeOuter(directions, supports, center, basis)


def joint_range_inner(ops: PauliReduction | np.ndarray, states: Sequence) -> JointRangeInner:
    """Exact points ``(<A_0>, ..., <A_3>)`` for product states or state vectors."""
    A = ops.ops if isinstance(ops, PauliReduction) else np.asarray(ops)
    pts = []
    for st in states:
        psi = st.materialize() if isinstance(st, ProductState) else np.asarray(st)
        pts.append([np.real(np.vdot(psi, Ai @ psi)) for Ai in A])
    return JointRangeInner(np.array(pts), list(states))


def _check_bounded(normals: np.ndarray) -> None:
    r = normals.shape[1]
    if r == 1:
        if not (np.any(normals[:, 0] > 0) and np.any(normals[:, 0] < 0)):
            raise UnboundedPolytopeError("halfspaces do not bound the line")
        return
    try:
        hull = ConvexHull(np.vstack([normals, np.zeros(r)]))
    except QhullError as exc:
        raise UnboundedPolytopeError("halfspace normals do not span the space") from exc
    # the origin must lie strictly inside the hull of the normals
    if np.any(hull.equations[:, -1] >= -1e-12):
        raise UnboundedPolytopeError("halfspace normals do not positively span the space")


def _interior_point(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    if np.min(b) > PIVOT_TOL * max(1.0, np.max(np.abs(b))):
        return np.zeros(A.shape[1]), float(np.min(b))
    # Chebyshev centre
    r = A.shape[1]
    c = np.zeros(r + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, np.ones((A.shape[0], 1))])
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * r + [(0, None)], method="highs")
    if res.status != 0:
        raise UnboundedPolytopeError(f"cannot find an interior point: {res.message}")
    return res.x[:r], float(res.x[-1])


def _dedupe(points: np.ndarray, tol: float) -> np.ndarray:
    out: list[np.ndarray] = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in out):
            out.append(p)
    return np.array(out)


def vertex_enum_4d(outer: JointRangeOuter, dedupe: bool = True) -> np.ndarray:
    """All vertices of the bounded polytope described by ``outer``."""
    C = np.asarray(outer.directions, dtype=float)
    s = np.asarray(outer.supports, dtype=float)
    dim = C.shape[1]
    center = np.zeros(dim) if outer.center is None else np.asarray(outer.center, dtype=float)
    basis = np.eye(dim) if outer.basis is None else np.asarray(outer.basis, dtype=float)
    r = basis.shape[1]
    if r == 0:
        if np.any(C @ center > s + PIVOT_TOL * (1 + np.abs(s))):
            raise ValueError("empty polytope")
        return center[None, :]

    A = C @ basis
    b = s - C @ center
    norms = np.linalg.norm(A, axis=1)
    keep = norms > 1e-12
    if np.any(b[~keep] < -PIVOT_TOL * (1 + np.abs(s[~keep]))):
        raise ValueError("empty polytope")
    A, b = A[keep] / norms[keep, None], b[keep] / norms[keep]
    _check_bounded(A)

    if r == 1:
        hi = np.min(b[A[:, 0] > 0] / A[A[:, 0] > 0, 0])
        lo = np.max(b[A[:, 0] < 0] / A[A[:, 0] < 0, 0])
        ys = np.array([[lo], [hi]]) if hi - lo > PIVOT_TOL else np.array([[0.5 * (lo + hi)]])
    else:
        y0, radius = _interior_point(A, b)
        if radius <= 1e-13:
            b = b + 1e-12 * (1 + np.abs(b))
            y0, radius = _interior_point(A, b)
        hs = HalfspaceIntersection(np.hstack([A, -b[:, None]]), y0)
        ys = hs.intersections
        if not np.all(np.isfinite(ys)):
            raise UnboundedPolytopeError("vertex enumeration produced points at infinity")
    verts = center + ys @ basis.T
    if dedupe:
        verts = _dedupe(verts, PIVOT_TOL * max(1.0, float(np.max(np.abs(verts)))))
    return verts
