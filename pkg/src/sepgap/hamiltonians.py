"""Model Hamiltonians, GOE sampling and closed-form reference values."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from types import SimpleNamespace
from typing import Sequence

import numpy as np

from .errors import DimensionError


def _spins(L: int) -> np.ndarray:
    """``(2**L, L)`` array of σz eigenvalues ±1, site 0 most significant."""
    idx = np.arange(2**L)
    bits = (idx[:, None] >> (L - 1 - np.arange(L))[None, :]) & 1
    return 1 - 2 * bits


@dataclass
class IsingInstance:
    L: int
    couplings: dict[tuple[int, int], float] = field(default_factory=dict)
    fields: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.L < 1:
            raise DimensionError("an Ising instance needs at least one spin")
        norm: dict[tuple[int, int], float] = {}
        for (i, j), J in self.couplings.items():
            i, j = int(i), int(j)
            if i == j:
                raise DimensionError(f"self-coupling ({i}, {j}) is not allowed")
            key = (min(i, j), max(i, j))
            norm[key] = norm.get(key, 0.0) + float(J)
        for (i, j) in norm:
            if not (0 <= i < self.L and 0 <= j < self.L):
                raise DimensionError(f"edge ({i}, {j}) out of range for L={self.L}")
        for i in self.fields:
            if not 0 <= int(i) < self.L:
                raise DimensionError(f"field index {i} out of range for L={self.L}")
        self.couplings = norm
        self.fields = {int(i): float(h) for i, h in self.fields.items()}

    @classmethod
    def from_text(cls, text: str, L: int | None = None) -> "IsingInstance":
        """Parse ``i j J_ij`` edge lines and ``i h_i`` field lines; ``#`` starts a comment."""
        couplings: dict[tuple[int, int], float] = {}
        fields: dict[int, float] = {}
        top = -1
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if len(parts) == 3:
                    i, j, J = int(parts[0]), int(parts[1]), float(parts[2])
                    key = (min(i, j), max(i, j))
                    couplings[key] = couplings.get(key, 0.0) + J
                    top = max(top, i, j)
                elif len(parts) == 2:
                    i, h = int(parts[0]), float(parts[1])
                    fields[i] = fields.get(i, 0.0) + h
                    top = max(top, i)
                else:
                    raise ValueError
            except ValueError:
                raise ValueError(f"line {lineno}: cannot parse {raw!r}") from None
        return cls(L if L is not None else top + 1, couplings, fields)

    @classmethod
    def from_file(cls, path: str | Path, L: int | None = None) -> "IsingInstance":
        return cls.from_text(Path(path).read_text(encoding="utf-8"), L)


def ising_chain(inst: IsingInstance) -> np.ndarray:
    """``-Σ J_ij σz_i σz_j - Σ h_i σz_i`` as a dense diagonal matrix."""
    s = _spins(inst.L)
    diag = np.zeros(2**inst.L)
    for (i, j), J in inst.couplings.items():
        diag -= J * s[:, i] * s[:, j]
    for i, h in inst.fields.items():
        diag -= h * s[:, i]
    return np.diag(diag)


def heisenberg_xz(L: int, h: float = 0.0) -> np.ndarray:
    """Open XZ chain ``-Σ (σz σz + σx σx) - h Σ σz`` as a real symmetric matrix."""
    if L < 2:
        raise DimensionError("the XZ chain needs L >= 2")
    N = 2**L
    s = _spins(L)
    diag = -np.sum(s[:, :-1] * s[:, 1:], axis=1) - h * np.sum(s, axis=1)
    H = np.diag(diag.astype(float))
    idx = np.arange(N)
    for i in range(L - 1):
        mask = (1 << (L - 1 - i)) | (1 << (L - 2 - i))
        H[idx, idx ^ mask] -= 1.0
    return H


def antidiag(x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.fliplr(np.diag(x))


def antidiag_two_qubit(a: float) -> np.ndarray:
    """``A(1, a, a, 1)``; spectrum ``(-1, -a, a, 1)`` for ``a`` in [0, 1]."""
    if not 0.0 <= a <= 1.0:
        warnings.warn(f"a={a} lies outside [0, 1]; closed-form references assume 0 <= a <= 1",
                      RuntimeWarning, stacklevel=2)
    return antidiag([1.0, a, a, 1.0])


def antidiag_family(a: Sequence[float]) -> np.ndarray:
    """Real symmetric antidiagonal matrix with ``a_k`` at ``(k, N-1-k)`` and ``(N-1-k, k)``."""
    a = [float(v) for v in a]
    L = len(a)
    if L < 1:
        raise DimensionError("need at least one coefficient")
    N = 2**L
    H = np.zeros((N, N))
    for k, ak in enumerate(a):
        H[k, N - 1 - k] = ak
        H[N - 1 - k, k] = ak
    return H


def all_to_all(L: int) -> np.ndarray:
    """``σ+^{⊗L} + σ-^{⊗L}``: ones in the two antidiagonal corners."""
    if L < 2:
        raise DimensionError("all_to_all needs L >= 2")
    return antidiag_family([1.0] + [0.0] * (L - 1))


@dataclass(frozen=True)
class GoeSpec:
    N: int
    seed: int = 0


def goe_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 stream keyed by ``(seed, *stream)``; independent of call order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), *map(int, stream)]))


def goe_sample(spec: GoeSpec | int, seed: int | None = None) -> np.ndarray:
    """Real symmetric GOE matrix with off-diagonal variance ``1/N`` and diagonal variance ``2/N``."""
    if not isinstance(spec, GoeSpec):
        spec = GoeSpec(int(spec), 0 if seed is None else int(seed))
    N = spec.N
    if N < 2:
        raise DimensionError("GOE dimension must be at least 2")
    G = goe_rng(spec.seed, N).standard_normal((N, N))
    return (G + G.T) / math.sqrt(2 * N)


def _heisenberg_lambda_min(L: int, h: float = 0.0) -> float:
    if h != 0.0:
        raise ValueError("the closed form is only known for h = 0")
    return 1.0 - L


def _h2_lambda_min(a: float) -> float:
    return -(1.0 + a) / 2.0


def _antidiag_family_lambda_min(a: Sequence[float]) -> float:
    return -(2.0 ** (1 - len(a))) * float(np.sum(np.abs(a)))


_REFS = SimpleNamespace(
    gap_slope=4.0 / math.pi - 1.0,
    chain_e0_per_site_limit=-4.0 / math.pi,
    chain_fit_slope=0.63,
    chain_fit_intercept=-1.27,
    neel_minimum_field=2.0 * math.sqrt(2.0),
    goe_e0_limit=-2.0,
    heisenberg_lambda_min=_heisenberg_lambda_min,
    h2_spectrum=lambda a: (-1.0, -a, a, 1.0),
    h2_lambda_min=_h2_lambda_min,
    h2_gap=lambda a: (1.0 - a) / 2.0,
    all_to_all_lambda_min=lambda L: -(2.0 ** (1 - L)),
    antidiag_family_lambda_min=_antidiag_family_lambda_min,
)


def analytic_refs() -> SimpleNamespace:
    """Closed-form constants and formulas used by tests and figure annotations."""
    return _REFS
