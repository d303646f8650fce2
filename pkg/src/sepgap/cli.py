"""``sepgap`` command-line entry point."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, ConvergenceError, UnboundedPolytopeError
from .experiments import (
    COMMANDS,
    MODELS,
    RUNNERS,
    RunConfig,
    _jsonable,
    cmd_gap,
    cmd_validate_ldec,
    write_outputs,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

# per-command defaults for --samples
_SAMPLES = {"fig2": 100, "validate-ldec": 20}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    """``8``, ``2,4,6`` or an inclusive range ``2:10``."""
    if ":" in text:
        lo, hi = (int(v) for v in text.split(":"))
        return list(range(lo, hi + 1))
    return [int(v) for v in text.split(",") if v]


def _float_list(text: str) -> list[float]:
    """``0.5``, ``0,1,2`` or ``start:stop:step`` (stop included)."""
    if ":" in text:
        parts = [float(v) for v in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError("range must be start:stop:step with step > 0")
        lo, hi, step = parts
        n = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + k * step, 12) for k in range(n)]
    return [float(v) for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sepgap", description="Separability gap experiments for qubit Hamiltonians.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--l", type=_int_list, default=None, help="L value, list a,b,c or range lo:hi")
    p.add_argument("--lmax", type=int, default=None, help="upper end of the L range")
    p.add_argument("--h", type=_float_list, default=None, help="field value, list or start:stop:step")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--dirs", type=int, default=200, help="direction budget for certified bounds")
    p.add_argument("--depth", type=int, default=1, help="recursion levels of the certified lower bound")
    p.add_argument("--terminal-dim", type=int, default=16)
    p.add_argument("--out", default=None, help="output prefix; writes <out>.csv and <out>.manifest.json")
    p.add_argument("--svg", action="store_true")
    p.add_argument("--convention", choices=("paper", "rescaled", "auto"), default="auto")
    p.add_argument("--ldec-report", default=None, help="JSON written by validate-ldec")
    p.add_argument("--products", type=int, default=10_000, help="product samples for validate-ldec")
    p.add_argument("--scatter", type=int, default=10_000, help="dense Haar scatter size for fig3")
    p.add_argument("--model", choices=MODELS, default=None, help="model for the gap command")
    p.add_argument("--a", type=_float_list, default=None, help="antidiagonal coefficients")
    p.add_argument("--instance", default=None, help="Ising instance file for the gap command")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    ls = args.l or []
    if args.lmax is not None:
        lo = ls[0] if ls else {"fig1a": 2, "fig2": 3, "validate-ldec": 4}.get(args.command, 2)
        ls = list(range(lo, args.lmax + 1))
    if args.command == "gap" and args.model is None:
        raise ConfigError("gap needs --model")
    return RunConfig(
        command=args.command, ls=ls, hs=args.h or [],
        samples=args.samples if args.samples is not None else _SAMPLES.get(args.command, 100),
        seed=args.seed, restarts=args.restarts, dirs=args.dirs, depth=args.depth,
        terminal_dim=args.terminal_dim, out=args.out, svg=args.svg, convention=args.convention,
        ldec_report=args.ldec_report, n_products=args.products, n_scatter=args.scatter,
        model=args.model, a=args.a or [], instance=args.instance,
    ).validate()


def _emit_json(obj, out: str | None) -> None:
    text = json.dumps(_jsonable(obj), indent=2) + "\n"
    if out:
        path = Path(out)
        path = path if path.suffix == ".json" else path.with_name(path.name + ".json")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.command == "gap":
            _emit_json(cmd_gap(cfg), cfg.out)
        elif cfg.command == "validate-ldec":
            _emit_json(cmd_validate_ldec(cfg), cfg.out)
        else:
            rec = RUNNERS[cfg.command](cfg)
            if cfg.out:
                for path in write_outputs(rec, cfg.out).values():
                    print(f"wrote {path}")
            else:
                sys.stdout.write(rec.csv_text())
            if rec.summary:
                print(json.dumps(_jsonable(rec.summary), indent=2), file=sys.stderr)
    except (ConvergenceError, UnboundedPolytopeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"sepgap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, OSError) as exc:
        print(f"sepgap: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
