"""Command line front end: sweep, validate, compare.

Exit status: 0 success, 1 a validation check failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, default_config_path, load_config
from .params import SpecValidationError
from .sweep import (GridMismatchError, compare_rows, fits_to_csv, read_csv, read_json, run_sweep, to_csv,
                    to_json)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="semijost", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", type=Path, default=None, help="JSON config (default: shipped config)")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        sp.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--regime-threshold", type=float, default=None, help="nu boundary between regimes")

    sw = sub.add_parser("sweep", help="run a parameter sweep")
    common(sw)
    sw.add_argument("--pipeline", choices=("oracle", "perturbative_converged", "perturbative_leading",
                                           "closed_form"), default=None)
    sw.add_argument("--report", action="store_true", help="write PNG figures next to --out")

    va = sub.add_parser("validate", help="run the invariant suite")
    common(va)

    co = sub.add_parser("compare", help="diff two sweeps (configs or result files)")
    co.add_argument("a", type=Path)
    co.add_argument("b", type=Path)
    co.add_argument("--out", type=Path, default=None)
    co.add_argument("--jobs", type=int, default=1)
    co.add_argument("--regime-threshold", type=float, default=None)
    return p


def _config(args):
    cfg = load_config(args.config or default_config_path())
    over = {}
    if getattr(args, "format", None):
        over["format"] = args.format
    if getattr(args, "regime_threshold", None) is not None:
        over["regime_threshold"] = args.regime_threshold
    if getattr(args, "pipeline", None):
        over["pipeline"] = args.pipeline
    cfg = cfg.with_overrides(**over) if over else cfg
    cfg.build_potential()
    return cfg


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_bytes(text.encode("utf-8"))


def _sweep(args) -> int:
    cfg = _config(args)
    table = run_sweep(cfg, jobs=max(1, args.jobs))
    text = to_json(table) if cfg.format == "json" else to_csv(table.rows)
    _emit(text, args.out)
    if table.fits and cfg.format == "csv" and args.out is not None:
        args.out.with_suffix(".fits.csv").write_bytes(fits_to_csv(table.fits).encode("utf-8"))
    if (args.report or cfg.figures) and args.out is not None:
        from .report import render_figures

        for path in render_figures(table.rows, args.out.with_suffix("")):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def _validate(args) -> int:
    from .validation import run_validation

    cfg = _config(args)
    checks = run_validation(cfg)
    failed = [c for c in checks if not c.passed]
    if cfg.format == "json":
        doc = {"passed": not failed,
               "checks": [{"name": c.name, "measured": c.measured, "threshold": c.threshold,
                           "relation": c.relation, "passed": c.passed, "detail": c.detail} for c in checks]}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        text = "".join(c.line() + "\n" for c in checks)
        text += f"{len(checks) - len(failed)}/{len(checks)} checks passed\n"
    _emit(text, args.out)
    return EXIT_FAIL if failed else EXIT_OK


def _rows_from(path: Path, args):
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".csv":
        return read_csv(text)
    doc = json.loads(text)
    if "rows" in doc and "metadata" in doc:
        return read_json(text)
    args.config = path
    return run_sweep(_config(args), jobs=max(1, args.jobs)).rows


def _compare(args) -> int:
    rows_a = _rows_from(args.a, args)
    rows_b = _rows_from(args.b, args)
    diff = compare_rows(rows_a, rows_b)
    _emit(json.dumps(diff, indent=1) + "\n", args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return {"sweep": _sweep, "validate": _validate, "compare": _compare}[args.verb](args)
    except (ConfigError, SpecValidationError, GridMismatchError, OSError, ValueError) as exc:
        print(f"semijost: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
