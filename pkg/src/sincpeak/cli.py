"""Command-line front end.

Exit codes: 0 success, 1 invalid input or usage, 2 I/O failure, 3 selfcheck
failure. Every command echoes its resolved settings to stderr as a
``# config:`` JSON line before computing; results go to stdout.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import discrete, experiments, selfcheck, signals, supbound
from .ensembles import parse_ensemble, sample
from .errors import ValidationError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_SELFCHECK = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None):
    sys.stdout.write(text)
    if out:
        try:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _echo_config(**settings):
    sys.stderr.write("# config: " + json.dumps(settings) + "\n")


def read_coefficients(path) -> np.ndarray:
    """Floats separated by whitespace or commas; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    tokens = []
    for line in text.splitlines():
        tokens += line.split("#", 1)[0].replace(",", " ").split()
    try:
        vals = np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    if vals.size == 0:
        raise ValidationError(f"{path}: no coefficients found")
    return vals


def _add_source(p):
    p.add_argument("--coeffs-file", help="text file of coefficients")
    p.add_argument("--ensemble", help="e.g. gaussian:sigma=1, rademacher, bounded:M=1,m=0.5,shape=uniform")
    p.add_argument("--n", type=int, help="number of coefficients to sample")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")


def _coefficients(args) -> tuple[np.ndarray, dict]:
    if args.coeffs_file:
        if args.ensemble or args.n is not None:
            raise ValidationError("give either --coeffs-file or --ensemble/--n, not both")
        return read_coefficients(args.coeffs_file), {"coeffs_file": args.coeffs_file}
    if not args.ensemble or args.n is None:
        raise ValidationError("need --coeffs-file or both --ensemble and --n")
    ens = parse_ensemble(args.ensemble)
    coeffs = sample(ens, args.n, args.seed)
    return coeffs.values, {"ensemble": ens.spec, "n": args.n, "seed": args.seed}


def cmd_sample(args) -> int:
    ens = parse_ensemble(args.ensemble)
    _echo_config(ensemble=ens.spec, n=args.n, seed=args.seed)
    coeffs = sample(ens, args.n, args.seed)
    _emit("".join(format(x, ".17g") + "\n" for x in coeffs.values), args.out)
    return EXIT_OK


def cmd_sup(args) -> int:
    a, source = _coefficients(args)
    settings = dict(source, method=args.method)
    if args.method == "certified":
        eps = args.epsilon if args.epsilon is not None else supbound.DEFAULT_RELATIVE_EPSILON * max(
            1.0, float(np.max(np.abs(a)))
        )
        settings.update(epsilon=eps, cell_budget=args.cell_budget)
        _echo_config(**settings)
        est = supbound.certified_supremum(signals.SincSeries(a), eps, args.cell_budget)
    else:
        settings.update(points_per_unit=args.points_per_unit)
        _echo_config(**settings)
        est = supbound.heuristic_supremum(signals.SincSeries(a), args.points_per_unit)
    _emit(_dumps(est.as_dict()), args.out)
    return EXIT_OK


def cmd_proxy(args) -> int:
    a, source = _coefficients(args)
    _echo_config(**source)
    pv = discrete.proxy(a)
    lines = ["k,X,Y,Z"]
    for k in range(a.size):
        lines.append(f"{k + 1},{pv.X[k]:.17g},{pv.Y[k]:.17g},{pv.Z[k]:.17g}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = experiments.load_config(args.config)
    if args.out:
        cfg = dataclasses.replace(cfg, output_path=Path(args.out))
    if cfg.output_path is None:
        raise ValidationError("sweep needs output_path in the config or --out")
    threads = args.threads or os.cpu_count() or 1
    _echo_config(**cfg.describe(), output_path=str(cfg.output_path), threads=threads)
    records = experiments.run_sweep(cfg, threads=threads, resume=not args.fresh)
    fits = experiments.sweep_fits(records)
    summary = {
        "records": len(records),
        "records_csv": str(cfg.output_path / experiments.RECORDS_CSV),
        "sweep_json": str(cfg.output_path / experiments.SWEEP_JSON),
        "fits": [f.as_dict() for f in fits],
        "selected": experiments.select_model(fits).model if len(fits) >= 2 else None,
    }
    sys.stdout.write(_dumps(summary))
    return EXIT_OK


def cmd_fit(args) -> int:
    records = experiments.read_records(args.records)
    _echo_config(records=args.records, model=args.model, field=args.field)
    curve = experiments.mean_curve(records, args.field)
    points = [(n, m) for n, m, _ in curve]
    if args.model == "all":
        fits = experiments.fit_all(points)
        doc = {"fits": [f.as_dict() for f in fits], "selected": experiments.select_model(fits).model}
    else:
        doc = experiments.fit_scaling(points, args.model).as_dict()
    _emit(_dumps(doc), args.out)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    _echo_config(suites=[s.__name__ for s in selfcheck.SUITES])
    results = selfcheck.run_all()
    doc = {"passed": all(r.passed for r in results), "checks": [vars(r) for r in results]}
    _emit(_dumps(doc), args.out)
    return EXIT_OK if doc["passed"] else EXIT_SELFCHECK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sincpeak", description="Suprema of random sinc series.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="print sampled coefficients, one per line")
    p.add_argument("--ensemble", default="gaussian:sigma=1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("sup", help="supremum enclosure as JSON")
    _add_source(p)
    p.add_argument("--method", choices=("certified", "heuristic"), default="certified")
    p.add_argument("--epsilon", type=float, help="target gap (default 1e-4 * max(1, max|a|))")
    p.add_argument("--cell-budget", type=int, default=supbound.DEFAULT_CELL_BUDGET)
    p.add_argument("--points-per-unit", type=int, help="heuristic grid density (default adaptive)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sup)

    p = sub.add_parser("proxy", help="discrete proxy X, Y, Z as CSV")
    _add_source(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_proxy)

    p = sub.add_parser("sweep", help="run a Monte Carlo sweep from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--threads", type=int, help="worker threads (default: available CPUs)")
    p.add_argument("--out", help="output directory (overrides output_path)")
    p.add_argument("--fresh", action="store_true", help="ignore a partial run in the output directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit growth laws to the per-n means of a record file")
    p.add_argument("--records", required=True, help="records.csv or sweep.json")
    p.add_argument("--model", choices=experiments.MODELS + ("all",), default="all")
    p.add_argument("--field", choices=("sup_lower", "sup_upper", "max_abs_coeff", "proxy_max"), default="sup_lower")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("selfcheck", help="run the built-in oracle checks")
    p.add_argument("--out")
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValidationError as exc:
        sys.stderr.write(f"sincpeak: error: {exc}\n")
        return EXIT_INVALID
    except OSError as exc:
        sys.stderr.write(f"sincpeak: I/O error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
