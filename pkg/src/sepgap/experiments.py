"""Figure and table drivers: configuration, seeding, CSV/JSON emission and fits."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, NamedTuple, Sequence

import numpy as np
import scipy
import scipy.stats

from . import __version__
from .entanglement import (
    CONVENTIONS,
    goe_bounds,
    ldec_threshold,
    meyer_wallach_qk,
    random_haar_state,
    random_product_state,
    random_product_vectors,
)
from .errors import ConfigError
from .hamiltonians import (
    IsingInstance,
    all_to_all,
    analytic_refs,
    antidiag_family,
    antidiag_two_qubit,
    goe_rng,
    goe_sample,
    heisenberg_xz,
    ising_chain,
)
from .plot import Figure, Series, write_svg
from .product import certified_lambda_min, seesaw
from .tensor import eigen_sym, min_eig

COMMANDS = ("fig1a", "fig1b", "fig2", "fig3", "gap", "validate-ldec")
MODELS = ("heisenberg", "h2", "all_to_all", "antidiag", "goe", "ising")
MAX_CHAIN_L = 12
MAX_GOE_L = 8
THREADS_ENV = "SEPGAP_THREADS"


@dataclass
class RunConfig:
    command: str
    ls: list[int] = field(default_factory=list)
    hs: list[float] = field(default_factory=list)
    samples: int = 100
    seed: int = 0
    restarts: int = 16
    dirs: int = 200
    depth: int = 1
    terminal_dim: int = 16
    tol: float = 1e-10
    max_sweeps: int = 500
    out: str | None = None
    svg: bool = False
    convention: str = "auto"
    ldec_report: str | None = None
    n_pure: int = 10
    n_prod: int = 10
    n_scatter: int = 10_000
    n_products: int = 10_000
    bins: int = 20
    fit_range: tuple[int, int] = (6, 12)
    model: str | None = None
    a: list[float] = field(default_factory=list)
    instance: str | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.samples < 1 or self.restarts < 1 or self.n_products < 1:
            raise ConfigError("samples, restarts and product counts must be at least 1")
        if self.dirs < 8:
            raise ConfigError("direction budget must be at least 8")
        if self.depth < 1 or self.terminal_dim < 2:
            raise ConfigError("depth must be >= 1 and terminal_dim >= 2")
        if self.convention not in (*CONVENTIONS, "auto"):
            raise ConfigError(f"unknown convention {self.convention!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        budget = MAX_GOE_L if self.command in ("fig2", "fig3", "validate-ldec") else MAX_CHAIN_L
        if self.command == "gap" and self.model == "goe":
            budget = MAX_GOE_L
        for L in self.ls:
            if not 2 <= L <= budget:
                raise ConfigError(f"L={L} outside the dense budget 2..{budget} for {self.command}")
        return self


@dataclass
class RunRecord:
    config: RunConfig
    header: list[str]
    rows: list[list[Any]]
    summary: dict[str, Any] = field(default_factory=dict)
    convention: str | None = None
    wall_time: float = 0.0
    figure: Figure | None = None

    def csv_text(self) -> str:
        return rows_to_csv(self.header, self.rows)

    def manifest(self) -> dict[str, Any]:
        return {
            "command": self.config.command,
            "config": asdict(self.config),
            "seed": self.config.seed,
            "versions": versions(),
            "rows": len(self.rows),
            "ldec_convention": self.convention,
            "summary": _jsonable(self.summary),
            "wall_time_s": self.wall_time,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }


class LinearFit(NamedTuple):
    slope: float
    intercept: float
    stderr: tuple[float, float]  # (slope, intercept)


def fit_linear(xs: Sequence[float], ys: Sequence[float]) -> LinearFit:
    """Ordinary least squares ``y = slope x + intercept`` with standard errors."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-d sequences of equal length")
    if len(xs) < 3:
        raise ValueError("need at least 3 points")
    if np.ptp(xs) == 0:
        raise ValueError("degenerate xs: all values are equal")
    r = scipy.stats.linregress(xs, ys)
    se = (float(r.stderr), float(r.intercept_stderr))
    se = tuple(0.0 if not np.isfinite(v) else v for v in se)
    return LinearFit(float(r.slope), float(r.intercept), se)


def versions() -> dict[str, str]:
    return {"sepgap": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be at least 1")
    return n


def parallel_map(fn: Callable, items: Sequence, threads: int | None = None) -> list:
    """``[fn(x) for x in items]`` on a thread pool; results stay in input order."""
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def task_seed(seed: int, *keys: int) -> int:
    """Per-task 63-bit seed derived from the run seed and the task's index keys."""
    return int(goe_rng(seed, 0x7A5C, *keys).integers(0, 2**63))


def _fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def rows_to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_outputs(record: RunRecord, out: str | Path) -> dict[str, Path]:
    """Write ``<out>.csv``, ``<out>.manifest.json`` and optionally ``<out>.svg``."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    paths = {"csv": out.with_name(out.name + ".csv"),
             "manifest": out.with_name(out.name + ".manifest.json")}
    paths["csv"].write_text(record.csv_text(), encoding="utf-8")
    paths["manifest"].write_text(json.dumps(record.manifest(), indent=2) + "\n", encoding="utf-8")
    if record.config.svg and record.figure is not None:
        paths["svg"] = write_svg(record.figure, out.with_name(out.name + ".svg"))
    return paths


# --- LDEC convention ------------------------------------------------------

def _product_deviations(A: np.ndarray, L: int, count: int, seed: int, *stream: int) -> np.ndarray:
    N = A.shape[0]
    bary = float(np.trace(A)) / N
    out = np.empty(count)
    chunk = 2048
    for start in range(0, count, chunk):
        n = min(chunk, count - start)
        P = random_product_vectors(L, n, seed, *stream, start)
        vals = np.real(np.einsum("ri,ri->r", P.conj(), P @ A.T))
        out[start:start + n] = np.abs(vals - bary)
    return out


def validate_ldec(ls: Sequence[int], samples: int = 20, n_products: int = 10_000, seed: int = 0,
                  restarts: int = 8, threads: int | None = None) -> dict[str, Any]:
    """Empirical soundness of each LDEC convention on GOE observables with ``J = L``.

    A convention is sound when no sampled product state, nor the see-saw
    extremes of ``⟨A⟩``, deviates from ``Tr A / N`` by more than its
    threshold.  The sound convention with the smallest threshold is selected.
    """
    tasks = [(L, i) for L in ls for i in range(samples)]

    def run(task):
        L, i = task
        N = 2**L
        A = goe_sample(N, task_seed(seed, L, i))
        bary = float(np.trace(A)) / N
        dev = _product_deviations(A, L, n_products, seed, 0xD1, L, i)
        lo = seesaw(A, L, restarts=restarts, seed=task_seed(seed, L, i, 1)).energy
        hi = -seesaw(-A, L, restarts=restarts, seed=task_seed(seed, L, i, 2)).energy
        extreme = max(abs(lo - bary), abs(hi - bary))
        e0, v0 = min_eig(A)
        ground_dev = abs(e0 - bary)
        thr = {c: ldec_threshold(A, L, c) for c in CONVENTIONS}
        return {"L": L, "sample": i, "max_random_deviation": float(dev.max()),
                "seesaw_extreme_deviation": float(extreme), "ground_deviation": float(ground_dev),
                "scale": math.sqrt(float(np.vdot(A, A).real)) / N, "thresholds": thr}

    per = parallel_map(run, tasks, threads)
    report: dict[str, Any] = {"L": list(ls), "samples": samples, "n_products": n_products, "seed": seed,
                              "J": "L", "conventions": {}, "per_sample": per}
    for c in CONVENTIONS:
        ratio_rand = max(p["max_random_deviation"] / p["thresholds"][c] for p in per)
        ratio_all = max(max(p["max_random_deviation"], p["seesaw_extreme_deviation"]) / p["thresholds"][c]
                        for p in per)
        flagged = float(np.mean([p["ground_deviation"] > p["thresholds"][c] for p in per]))
        report["conventions"][c] = {"max_ratio_random": ratio_rand, "max_ratio_with_seesaw": ratio_all,
                                    "sound": bool(ratio_all <= 1.0), "ground_flagged_fraction": flagged}
    sound = [c for c in CONVENTIONS if report["conventions"][c]["sound"]]
    # thresholds scale as paper = rescaled / N, so "paper" is the tighter one when sound
    order = {"paper": 0, "rescaled": 1}
    report["selected"] = min(sound, key=order.__getitem__) if sound else None
    return report


def resolve_convention(cfg: RunConfig, L: int) -> str:
    if cfg.ldec_report:
        with open(cfg.ldec_report, encoding="utf-8") as fh:
            chosen = json.load(fh).get("selected")
        if chosen not in CONVENTIONS:
            raise ConfigError(f"LDEC report {cfg.ldec_report} selects no sound convention")
        return chosen
    if cfg.convention != "auto":
        return cfg.convention
    rep = validate_ldec([L], samples=5, n_products=cfg.n_products, seed=cfg.seed)
    if rep["selected"] is None:
        raise ConfigError("inline LDEC validation found no sound convention")
    return rep["selected"]


# --- commands -------------------------------------------------------------

def _chain_point(L: int, h: float, cfg: RunConfig) -> tuple[float, float]:
    H = heisenberg_xz(L, h)
    e0, _ = min_eig(H)
    sw = seesaw(H, L, restarts=cfg.restarts, tol=cfg.tol, max_sweeps=cfg.max_sweeps,
                seed=task_seed(cfg.seed, L, int(round(h * 1e6))))
    return e0, sw.energy


def cmd_fig1a(cfg: RunConfig) -> RunRecord:
    cfg.validate()
    ls = cfg.ls or list(range(2, 13))
    h = cfg.hs[0] if cfg.hs else 0.0
    t0 = time.perf_counter()
    res = parallel_map(lambda L: _chain_point(L, h, cfg), ls)
    rows = []
    for L, (e0, lam) in zip(ls, res):
        rows.append([L, e0 / L, lam / L, (lam - e0) / L])
    summary: dict[str, Any] = {"h": h}
    lo, hi = cfg.fit_range
    fit_pts = [(L, r[1]) for L, r in zip(ls, rows) if lo <= L <= hi]
    if len(fit_pts) >= 3:
        f = fit_linear([1.0 / L for L, _ in fit_pts], [y for _, y in fit_pts])
        summary["fit"] = {"model": "E0/L = b/L + c", "L": [L for L, _ in fit_pts], "b": f.slope,
                          "c": f.intercept, "b_stderr": f.stderr[0], "c_stderr": f.stderr[1]}
    refs = analytic_refs()
    summary["gap_slope_reference"] = refs.gap_slope
    fig = Figure("Energies per site, XZ chain", "L", "energy per site",
                 [Series("E0/L", ls, [r[1] for r in rows]), Series("lambda_sep/L", ls, [r[2] for r in rows]),
                  Series("gap/L", ls, [r[3] for r in rows])],
                 hlines=[(refs.gap_slope, "4/pi-1"), (refs.chain_e0_per_site_limit, "-4/pi")])
    return RunRecord(cfg, ["L", "E0_per_site", "lambda_sep_per_site", "gap_per_site"], rows, summary,
                     None, time.perf_counter() - t0, fig)


def default_field_grid() -> list[float]:
    return [round(0.1 * k, 10) for k in range(41)] + [50.0]


def cmd_fig1b(cfg: RunConfig) -> RunRecord:
    cfg.validate()
    L = cfg.ls[0] if cfg.ls else 8
    hs = cfg.hs or default_field_grid()
    t0 = time.perf_counter()
    res = parallel_map(lambda h: _chain_point(L, h, cfg), hs)
    gaps = [(lam - e0) / L for e0, lam in res]
    rows = [[h, g] for h, g in zip(hs, gaps)]
    summary: dict[str, Any] = {"L": L}
    if len(hs) >= 3:
        order = np.argsort(hs)
        g_sorted = np.asarray(gaps)[order]
        h_sorted = np.asarray(hs)[order]
        k = 1 + int(np.argmin(g_sorted[1:-1]))
        summary["interior_argmin_h"] = float(h_sorted[k])
        summary["interior_min_gap_per_site"] = float(g_sorted[k])
        summary["is_local_minimum"] = bool(g_sorted[k] < g_sorted[k - 1] and g_sorted[k] < g_sorted[k + 1])
        summary["argmax_h"] = float(h_sorted[int(np.argmax(g_sorted))])
    refs = analytic_refs()
    fig = Figure(f"Separability gap per site, L={L}", "h", "gap / L", [Series("gap/L", hs, gaps)],
                 vlines=[(refs.neel_minimum_field, "2*sqrt(2)")])
    return RunRecord(cfg, ["h", "gap_per_site"], rows, summary, None, time.perf_counter() - t0, fig)


def _goe_task(L: int, i: int, cfg: RunConfig) -> list[Any]:
    N = 2**L
    H = goe_sample(N, task_seed(cfg.seed, L, i))
    e0, _ = min_eig(H)
    b = certified_lambda_min(H, L, cfg.dirs, terminal_dim=cfg.terminal_dim, max_depth=cfg.depth,
                             restarts=cfg.restarts, tol=cfg.tol, max_sweeps=cfg.max_sweeps,
                             seed=task_seed(cfg.seed, L, i, 1))
    return [L, i, b.upper, b.lower, e0, float(np.min(np.diag(H)))]


def cmd_fig2(cfg: RunConfig) -> RunRecord:
    cfg.validate()
    ls = cfg.ls or list(range(3, 9))
    t0 = time.perf_counter()
    tasks = [(L, i) for L in ls for i in range(cfg.samples)]
    rows = parallel_map(lambda t: _goe_task(t[0], t[1], cfg), tasks)
    summary: dict[str, Any] = {"histograms": {}, "J": "L/2 (M = 4)"}
    upper = np.array([r[2] for r in rows])
    edges = np.histogram_bin_edges(upper, bins=cfg.bins)
    series, lo_marks, hi_marks = [], [], []
    for L in ls:
        sel = [r for r in rows if r[0] == L]
        vals = np.array([r[2] for r in sel])
        counts, _ = np.histogram(vals, bins=edges)
        glo, ghi = goe_bounds(2**L, L / 2)
        viol = sum(1 for r in sel if not (r[3] <= r[2] + 1e-12 and r[2] <= r[5] + 1e-12))
        summary["histograms"][str(L)] = {
            "counts": counts.tolist(), "mean_lambda_sep": float(vals.mean()),
            "mean_E0": float(np.mean([r[4] for r in sel])),
            "mean_min_diag": float(np.mean([r[5] for r in sel])),
            "goe_lower": glo, "goe_upper": ghi,
            "below_goe_lower": int(sum(1 for r in sel if r[3] < glo)),
            "chain_violations": viol,
        }
        series.append(Series(f"L={L}", 0.5 * (edges[1:] + edges[:-1]), counts / max(1, len(sel))))
        lo_marks.append(glo)
        hi_marks.append(ghi)
    summary["bin_edges"] = edges.tolist()
    fig = Figure("Distribution of lambda_sep for GOE samples", "lambda_sep", "fraction", series,
                 vlines=[(v, f"lo L={L}") for v, L in zip(lo_marks, ls)] + [(v, f"up L={L}") for v, L in zip(hi_marks, ls)])
    header = ["L", "sample_id", "lambda_sep_upper", "lambda_cert_lower", "E0", "min_diag"]
    return RunRecord(cfg, header, rows, summary, None, time.perf_counter() - t0, fig)


def cmd_fig3(cfg: RunConfig) -> RunRecord:
    cfg.validate()
    L = cfg.ls[0] if cfg.ls else 7
    N = 2**L
    t0 = time.perf_counter()
    convention = resolve_convention(cfg, L)
    A = goe_sample(N, task_seed(cfg.seed, L, 0))
    w, V = eigen_sym(A)
    bary = float(np.trace(A)) / N
    thr = ldec_threshold(A, L, convention)

    def q2(v):
        return meyer_wallach_qk(v, L, 2)

    def expect(v):
        return float(np.real(np.vdot(v, A @ v)))

    states: list[tuple[str, np.ndarray]] = [("eigenstate", V[:, k]) for k in range(N)]
    states += [("pure", random_haar_state(N, cfg.seed, 1, k)) for k in range(cfg.n_pure)]
    states += [("product", random_product_state(L, cfg.seed, 2, k).materialize()) for k in range(cfg.n_prod)]
    states += [("haar_scatter", random_haar_state(N, cfg.seed, 3, k)) for k in range(cfg.n_scatter)]
    rows = parallel_map(lambda s: [s[0], expect(s[1]), q2(s[1])], states)
    prod_dev = [abs(r[1] - bary) for r in rows if r[0] == "product"]
    summary = {"L": L, "barycenter": bary, "threshold": thr, "J": L,
               "product_violations": int(sum(d > thr for d in prod_dev)),
               "eigenstates_flagged": int(sum(abs(x - bary) > thr for x in w))}
    groups = {}
    for r in rows:
        groups.setdefault(r[0], ([], []))
        groups[r[0]][0].append(r[1])
        groups[r[0]][1].append(r[2])
    order = ["haar_scatter", "eigenstate", "pure", "product"]
    colors = {"haar_scatter": "#f4a6a6", "eigenstate": "#000000", "pure": "#e6b800", "product": "#2ca02c"}
    fig = Figure(f"<A> versus Q2, L={L}", "<A>", "Q2",
                 [Series(k, *groups[k], kind="points", color=colors[k]) for k in order if k in groups],
                 vlines=[(bary - thr, "-bound"), (bary + thr, "+bound")])
    return RunRecord(cfg, ["state_kind", "expectation", "Q2"], rows, summary, convention,
                     time.perf_counter() - t0, fig)


def build_model(cfg: RunConfig) -> np.ndarray:
    m = cfg.model
    if m == "heisenberg":
        return heisenberg_xz(cfg.ls[0] if cfg.ls else 8, cfg.hs[0] if cfg.hs else 0.0)
    if m == "h2":
        return antidiag_two_qubit(cfg.a[0] if cfg.a else 0.0)
    if m == "all_to_all":
        return all_to_all(cfg.ls[0] if cfg.ls else 5)
    if m == "antidiag":
        if not cfg.a:
            raise ConfigError("antidiag needs coefficients via --a")
        return antidiag_family(cfg.a)
    if m == "goe":
        L = cfg.ls[0] if cfg.ls else 4
        return goe_sample(2**L, cfg.seed)
    if m == "ising":
        if not cfg.instance:
            raise ConfigError("ising needs an instance file via --instance")
        try:
            inst = IsingInstance.from_file(cfg.instance)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read instance {cfg.instance}: {exc}") from exc
        if inst.L > MAX_CHAIN_L:
            raise ConfigError(f"instance has {inst.L} spins, budget is {MAX_CHAIN_L}")
        return ising_chain(inst)
    raise ConfigError(f"unknown model {m!r}; choose from {', '.join(MODELS)}")


def cmd_gap(cfg: RunConfig) -> dict[str, Any]:
    cfg.validate()
    H = build_model(cfg)
    t0 = time.perf_counter()
    b = certified_lambda_min(H, None, cfg.dirs, terminal_dim=cfg.terminal_dim, max_depth=cfg.depth,
                             restarts=cfg.restarts, tol=cfg.tol, max_sweeps=cfg.max_sweeps, seed=cfg.seed)
    e0 = float(b.e0)
    return {"model": cfg.model, "L": b.witness.L, "E0": e0, "lambda_sep_lower": b.lower,
            "lambda_sep_upper": b.upper, "gap_interval": [b.lower - e0, b.upper - e0],
            "direction_budget": b.direction_budget, "depth": b.depth, "vertices": b.vertices,
            "witness_angles": b.witness.to_list(), "wall_time_s": time.perf_counter() - t0,
            "versions": versions()}


RUNNERS: dict[str, Callable[[RunConfig], RunRecord]] = {
    "fig1a": cmd_fig1a, "fig1b": cmd_fig1b, "fig2": cmd_fig2, "fig3": cmd_fig3,
}


def cmd_validate_ldec(cfg: RunConfig) -> dict[str, Any]:
    cfg.validate()
    t0 = time.perf_counter()
    rep = validate_ldec(cfg.ls or [4, 5, 6, 7], cfg.samples, cfg.n_products, cfg.seed,
                        restarts=min(cfg.restarts, 8))
    rep["wall_time_s"] = time.perf_counter() - t0
    rep["versions"] = versions()
    return rep
