from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from sepgap.errors import UnboundedPolytopeError
from sepgap.hamiltonians import all_to_all, antidiag_two_qubit, goe_sample, heisenberg_xz
from sepgap.product import (
    JointRangeOuter, brute_force_grid, certified_lambda_max_upper, certified_lambda_min,
    direction_sequence, effective_local_hamiltonian, joint_range_inner, joint_range_outer,
    min_qubit_expectation, pauli_reduce, seesaw, two_level_min, vertex_enum_4d,
)
from sepgap.product.jointrange import AXES
from sepgap.product.local import pauli_components
from sepgap.tensor import I2, SX, SZ, ProductState, kron, max_eigvals, min_eig, product_expectation

floats = st.floats(-5, 5, allow_nan=False)


# --- local reductions ---

def test_pauli_reduce_examples(rng):
    red = pauli_reduce(kron(SZ, SZ), 0)
    assert np.allclose(red.ops[3], 2 * SZ) and np.allclose(red.ops[:3], 0)
    B = random_hermitian(rng, 4)
    red = pauli_reduce(kron(I2, B), 0)
    assert np.allclose(red.ops[0], 2 * B) and np.allclose(red.ops[1:], 0)


@pytest.mark.parametrize("site", [0, 1, 2])
def test_pauli_reduce_reconstruction(rng, site):
    H = random_hermitian(rng, 8)
    red = pauli_reduce(H, site)
    from sepgap.product.local import move_site_to_front
    assert np.allclose(red.reconstruct(), move_site_to_front(H, site), atol=1e-12)
    for op in red.ops:
        assert np.allclose(op, op.conj().T)


def test_two_level_min_examples(rng):
    assert two_level_min([2, 0, 0, 0]) == 1.0
    assert two_level_min([0, 0, 0, 2]) == -1.0
    for _ in range(20):
        M = random_hermitian(rng, 2)
        assert two_level_min(pauli_components(M)) == pytest.approx(np.linalg.eigvalsh(M)[0], abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(floats, min_size=4, max_size=4), st.lists(floats, min_size=4, max_size=4), st.floats(0, 1))
def test_two_level_min_concave(x, y, t):
    x, y = np.array(x), np.array(y)
    assert two_level_min(t * x + (1 - t) * y) >= t * two_level_min(x) + (1 - t) * two_level_min(y) - 1e-12


def test_min_qubit_expectation_examples(rng):
    value, (theta, _) = min_qubit_expectation(np.diag([-1.0, 1.0]))
    # ground state |0> sits at the north pole, θ = 0
    assert value == -1.0 and theta == pytest.approx(0.0, abs=1e-12)
    value, ang = min_qubit_expectation(np.eye(2), current=(0.3, 1.1))
    assert value == 1.0 and ang == (0.3, 1.1)
    for _ in range(20):
        M = random_hermitian(rng, 2)
        value, ang = min_qubit_expectation(M)
        assert value == pytest.approx(np.linalg.eigvalsh(M)[0], abs=1e-12)
        s = ProductState(np.array([ang]))
        assert product_expectation(M, s) == pytest.approx(value, abs=1e-12)


def test_effective_local_hamiltonian_examples(rng):
    s = ProductState(np.zeros((2, 2)))
    assert np.allclose(effective_local_hamiltonian(kron(SZ, SZ), s, 0), SZ)
    assert np.allclose(effective_local_hamiltonian(np.eye(8), ProductState(np.ones((3, 2))), 1), I2)
    s = ProductState(np.array([[0.0, 0.0], [np.pi / 2, 0.0]]))  # partner along +x
    M = effective_local_hamiltonian(heisenberg_xz(2, 0.0), s, 0)
    assert np.linalg.eigvalsh(M)[0] == pytest.approx(-1.0, abs=1e-12)


def test_effective_local_hamiltonian_consistency(rng):
    H = random_hermitian(rng, 16)
    s = ProductState(np.column_stack([rng.uniform(0, np.pi, 4), rng.uniform(0, 2 * np.pi, 4)]))
    M = effective_local_hamiltonian(H, s, 2)
    assert product_expectation(M, ProductState(s.angles[2:3])) == pytest.approx(product_expectation(H, s), abs=1e-12)


# --- see-saw ---

@pytest.mark.parametrize("L", range(2, 9))
def test_seesaw_heisenberg(L):
    assert seesaw(heisenberg_xz(L, 0.0), restarts=32).energy == pytest.approx(1 - L, abs=1e-6)


def test_seesaw_toy_models():
    assert seesaw(antidiag_two_qubit(0.5), restarts=8).energy == pytest.approx(-0.75, abs=1e-8)
    assert seesaw(all_to_all(4)).energy == pytest.approx(-0.125, abs=1e-8)


def test_seesaw_monotone_and_witness(rng):
    for seed in range(5):
        H = goe_sample(32, seed)
        r = seesaw(H, restarts=6, seed=seed)
        for hist in r.restart_histories:
            assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))
        assert product_expectation(H, r.state) == pytest.approx(r.energy, abs=1e-12)
        assert r.energy >= min_eig(H)[0] - 1e-9


def test_seesaw_deterministic():
    H = goe_sample(16, 3)
    a, b = seesaw(H, seed=11), seesaw(H, seed=11)
    assert a.energy == b.energy and np.array_equal(a.state.angles, b.state.angles)


def test_seesaw_init_is_used():
    r = seesaw(heisenberg_xz(3, 0.0), restarts=1, init=np.array([[np.pi / 2, 0.0]] * 3))
    # one sweep to settle, one to detect convergence
    assert r.energy == pytest.approx(-2.0, abs=1e-12) and r.sweeps == 2


# --- joint ranges and vertices ---

def test_direction_sequence_prefix_stable():
    f = np.array([0.3, -0.2, 0.9])
    big, small = direction_sequence(200, f), direction_sequence(64, f)
    assert np.array_equal(big[:64], small)
    assert np.allclose(np.linalg.norm(big, axis=1), 1.0)
    assert np.array_equal(big[:8], AXES)


def test_outer_identity_supports():
    red = pauli_reduce(np.eye(4))
    dirs = direction_sequence(40)
    outer = joint_range_outer(red, max_eigvals, dirs, slack=0.0)
    assert np.allclose(outer.supports, dirs @ np.array([2.0, 0, 0, 0]), atol=1e-12)


def test_outer_base_mode_against_eigensolver(rng):
    H = random_hermitian(rng, 8)
    red = pauli_reduce(H)
    outer = joint_range_outer(red, max_eigvals, direction_sequence(16), slack=0.0)
    k = int(np.flatnonzero(np.all(outer.directions == [-1, 0, 0, 0], axis=1))[0])
    assert outer.supports[k] == pytest.approx(-np.linalg.eigvalsh(red.ops[0])[0], abs=1e-12)


def test_outer_rejects_bad_directions(rng):
    red = pauli_reduce(random_hermitian(rng, 4))
    with pytest.raises(ValueError):
        joint_range_outer(red, max_eigvals, np.eye(4))


def test_recursive_supports_dominate_product_samples(rng):
    H = goe_sample(8, 4)
    red = pauli_reduce(H)
    dirs = direction_sequence(24)

    def recursive(stack):
        return np.array([-certified_lambda_min(-op, terminal_dim=2, restarts=4).lower for op in stack])

    outer = joint_range_outer(red, recursive, dirs)
    n = 100_000
    th = np.arccos(rng.uniform(-1, 1, (n, 2)))
    ph = rng.uniform(0, 2 * np.pi, (n, 2))
    q = np.stack([np.cos(th / 2) + 0j, np.exp(1j * ph) * np.sin(th / 2)], axis=-1)
    psi = np.einsum("ri,rj->rij", q[:, 0], q[:, 1]).reshape(n, 4)
    pts = np.real(np.einsum("ri,kij,rj->rk", psi.conj(), red.ops, psi))
    assert np.all(pts @ dirs.T <= outer.supports + 1e-9)
    inner = joint_range_inner(red, [ProductState(np.column_stack([th[i], ph[i]])) for i in range(5)])
    assert np.allclose(inner.points, pts[:5], atol=1e-10)


def test_vertex_enum_hypercube():
    outer = JointRangeOuter(AXES, np.ones(8))
    v = vertex_enum_4d(outer)
    assert len(v) == 16
    assert {tuple(np.round(p).astype(int)) for p in v} == {tuple(p) for p in np.array(
        np.meshgrid(*[[-1, 1]] * 4, indexing="ij")).reshape(4, -1).T}


def test_vertex_enum_simplex():
    C = np.vstack([np.eye(4) * -1, np.ones((1, 4)) / 2])
    outer = JointRangeOuter(C, np.array([0, 0, 0, 0, 1.0]))
    v = vertex_enum_4d(outer)
    expect = np.vstack([np.zeros(4), 2 * np.eye(4)])
    assert len(v) == 5
    assert all(np.min(np.abs(v - e).max(axis=1)) < 1e-9 for e in expect)


def _brute_vertices(C, s):
    out = []
    for idx in combinations(range(len(C)), 4):
        A = C[list(idx)]
        if abs(np.linalg.det(A)) < 1e-10:
            continue
        x = np.linalg.solve(A, s[list(idx)])
        if np.all(C @ x <= s + 1e-9) and not any(np.max(np.abs(x - y)) < 1e-7 for y in out):
            out.append(x)
    return np.array(out)


def test_vertex_enum_matches_subset_oracle(rng):
    for _ in range(5):
        D = rng.standard_normal((10, 4))
        C = np.vstack([AXES, D / np.linalg.norm(D, axis=1, keepdims=True)])
        s = rng.uniform(0.5, 1.5, len(C))
        got, ref = vertex_enum_4d(JointRangeOuter(C, s)), _brute_vertices(C, s)
        assert len(got) == len(ref)
        for p in ref:
            assert np.min(np.abs(got - p).max(axis=1)) < 1e-7


def test_vertex_enum_redundant_halfspace():
    base = JointRangeOuter(AXES, np.ones(8))
    C = np.vstack([AXES, np.ones((1, 4)) / 2])
    more = JointRangeOuter(C, np.array([*np.ones(8), 5.0]))
    a, b = vertex_enum_4d(base), vertex_enum_4d(more)
    assert len(a) == len(b)
    assert all(np.min(np.abs(b - p).max(axis=1)) < 1e-9 for p in a)


def test_vertex_enum_unbounded():
    with pytest.raises(UnboundedPolytopeError):
        vertex_enum_4d(JointRangeOuter(np.vstack([np.eye(4), -np.eye(4)[:3]]), np.ones(7)))


# --- certified bounds ---

@pytest.mark.parametrize("a", [0.0, 0.3, 1.0])
def test_certified_h2(a):
    b = certified_lambda_min(antidiag_two_qubit(a), direction_budget=200, terminal_dim=2)
    assert b.lower <= -(1 + a) / 2 + 1e-12 <= b.upper + 2e-12
    assert b.width <= 1e-3


def test_certified_heisenberg_three():
    b = certified_lambda_min(heisenberg_xz(3, 0.0), terminal_dim=2)
    assert b.lower <= -2.0 <= b.upper + 1e-9


def test_certified_base_mode_not_below_ground(rng):
    for seed in range(4):
        for L in (2, 3):
            H = goe_sample(2**L, seed)
            b = certified_lambda_min(H, max_depth=1, direction_budget=64)
            assert b.lower >= min_eig(H)[0] - 1e-9


def test_certified_chain_and_witness():
    for seed in range(4):
        H = goe_sample(16, seed + 100)
        b = certified_lambda_min(H, direction_budget=64, seed=seed)
        assert b.lower <= b.upper + 1e-9 <= np.min(np.diag(H)) + 2e-9
        assert product_expectation(H, b.witness) == pytest.approx(b.upper, abs=1e-9)
        assert b.upper >= b.e0 - 1e-9


@pytest.mark.parametrize("L", [2, 3])
def test_certified_budget_monotone(L):
    for seed in range(3):
        H = goe_sample(2**L, 50 + seed)
        lows = [certified_lambda_min(H, direction_budget=d, terminal_dim=2, seed=seed).lower for d in (16, 64, 200)]
        assert lows[0] <= lows[1] + 1e-12 and lows[1] <= lows[2] + 1e-12


@pytest.mark.parametrize("L", [2, 3])
def test_certified_midpoint_near_grid(L):
    for seed in range(3):
        H = goe_sample(2**L, 200 + seed)
        b = certified_lambda_min(H, terminal_dim=2)
        assert abs(b.midpoint - brute_force_grid(H)) <= b.width / 2 + 2e-4


def test_certified_max_upper():
    H = goe_sample(8, 9)
    lo = certified_lambda_min(-H, direction_budget=32).lower
    assert certified_lambda_max_upper(H, direction_budget=32) == pytest.approx(-lo, abs=1e-12)
    assert certified_lambda_max_upper(all_to_all(3), terminal_dim=2) >= 0.25 - 1e-12
    assert certified_lambda_max_upper(np.eye(8)) == 1.0


# --- grid oracle ---

def test_grid_examples():
    assert brute_force_grid(antidiag_two_qubit(0.7)) == pytest.approx(-0.85, abs=1e-4)
    assert brute_force_grid(all_to_all(2)) == pytest.approx(-0.5, abs=1e-8)
    assert brute_force_grid(heisenberg_xz(3, 0.0)) == pytest.approx(-2.0, abs=1e-4)


def test_grid_limits():
    with pytest.raises(ValueError):
        brute_force_grid(np.eye(16))
    with pytest.raises(ValueError):
        brute_force_grid(np.eye(4), grid_per_angle=10)
