"""Command-line interface.

Results go to stdout as JSON (or CSV with ``--format csv``); diagnostics go
to stderr. Exit status: 0 success, 2 invalid input or configuration,
3 a quantity that had to be finite was not.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import logging
import math
import sys as _sys
from pathlib import Path

import numpy as np

from . import __version__
from .accuracy import accuracy_cost, per_time_diagnostics
from .computation import CompCostModel
from .corpus import NAMES, build_example
from .errors import ConfigurationError, NumericalError, SSCError
from .io import (
    FileFormatError,
    dumps,
    format_float,
    load_system,
    load_triple,
    system_to_dict,
    triple_to_dict,
)
from .measures import compression_complexity, info_flow_cond_ent, info_flow_mi
from .model import ObjectiveConfig, validate_system, validate_triple
from .montecarlo import SampleConfig, estimate_cost, sample_paths, within_tolerance
from .optimize import OptimizerConfig, objective_K, optimize, pareto_sweep

log = logging.getLogger("ssc")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

ACC_FLAGS = {
    "expected": "expected",
    "expected-worst": "expected_worst_case",
    "avg-mi": "avg_mi",
    "mi-of-avg": "mi_of_avg",
    "cond-ent": "cond_entropy",
    "kl": "kl",
}
COMP_FLAGS = {
    "cardinality": "cardinality",
    "sparsity": "sparsity",
    "init-entropy": "init_entropy_plus_sparsity",
}


class _InvalidInput(Exception):
    def __init__(self, report):
        self.report = report


# -- argument helpers ------------------------------------------------------------


def _add_format(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_cost_flags(p, default_acc="cond-ent"):
    p.add_argument("--acc", choices=tuple(ACC_FLAGS), default=default_acc, help="accuracy cost")
    p.add_argument("--comp", choices=tuple(COMP_FLAGS), default="cardinality", help="computation cost proxy")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--kl-smoothing", type=float, default=0.0)
    p.add_argument("--negate-kl", action="store_true", help="report KL with a leading minus sign")
    p.add_argument("--argmin-rho", action="store_true",
                   help="induced triples predict the least-cost observable instead of the posterior")
    p.add_argument("--nnz-threshold", type=float, default=1e-12)


def _add_opt_flags(p):
    p.add_argument("--method", choices=("exhaustive", "anneal"), default="exhaustive")
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--anneal-iters", type=int, default=20000)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--cooling", type=float, default=0.995)
    p.add_argument("--ref-dist", choices=("w_averaged_occupancy", "stationary", "uniform"),
                   default="w_averaged_occupancy")


def _objective(args, kappa=None, alpha=None) -> tuple[ObjectiveConfig, CompCostModel]:
    cfg = ObjectiveConfig(
        accuracy_kind=ACC_FLAGS[args.acc],
        comp_model=COMP_FLAGS[args.comp],
        kappa=args.kappa if kappa is None else kappa,
        alpha=args.alpha if alpha is None else alpha,
        kl_smoothing=args.kl_smoothing,
        kl_negate=args.negate_kl,
        argmin_rho=args.argmin_rho,
    )
    return cfg, CompCostModel(COMP_FLAGS[args.comp], args.nnz_threshold)


def _optimizer(args) -> OptimizerConfig:
    return OptimizerConfig(method=args.method, k_max=args.k_max, anneal_iters=args.anneal_iters,
                           t0=args.t0, cooling=args.cooling, seed=args.seed, ref_dist=args.ref_dist)


def _system(path):
    sf = load_system(path)
    report = validate_system(sf.system, sf.observable)
    if sf.declared_states != sf.system.n:
        report.add("dimension", "states", f"states={sf.declared_states} but transition is {sf.system.n}x{sf.system.n}")
    if sf.declared_space != sf.observable.m:
        report.add("dimension", "observable.space",
                   f"space={sf.declared_space} but channel has {sf.observable.m} columns")
    return sf, report


def _valid_system(path):
    sf, report = _system(path)
    if not report.valid:
        raise _InvalidInput(report)
    return sf


def _valid_triple(path, sf):
    triple = load_triple(path, sf)
    report = validate_triple(triple, sf.system, sf.observable)
    if not report.valid:
        raise _InvalidInput(report)
    return triple


def _weight_info(w):
    return {"kind": w.kind, "gamma": w.gamma, "horizon": w.horizon, "include_t0": w.include_t0,
            "truncation_bound": w.truncation_bound()}


def _partition_info(part):
    return {"assignment": list(part.assignment), "blocks": part.blocks(), "k": part.k}


def _result_info(res):
    return {
        "method": res.method,
        "search_class": "induced_partitions",
        "partition": _partition_info(res.best_partition),
        "K": res.k_value,
        "accuracy": res.accuracy_component,
        "computation": res.computation_component,
        "evaluations": res.evaluations,
        "triple": triple_to_dict(res.best_triple),
    }


def _emit(args, payload, rows=None, header=None):
    if args.format == "csv" and rows is not None:
        buf = _stdio.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v).strip('"') if isinstance(v, float) else v for v in row])
        _sys.stdout.write(buf.getvalue())
    else:
        _sys.stdout.write(dumps(payload) + "\n")


def _scalar_rows(payload, keys):
    return [(k, payload[k]) for k in keys]


def _require_finite(*values, what="result"):
    for v in values:
        if v is None or math.isnan(v) or math.isinf(v):
            raise NumericalError(f"{what} is not finite ({v!r})")


# -- commands --------------------------------------------------------------------


def cmd_validate(args) -> int:
    sf, report = _system(args.system)
    if args.triple and report.valid:
        triple = load_triple(args.triple, sf)
        tr = validate_triple(triple, sf.system, sf.observable)
        report.violations.extend(tr.violations)
    _sys.stdout.write(dumps(report.as_dict()) + "\n")
    return EXIT_OK if report.valid else EXIT_CONFIG


def cmd_eval(args) -> int:
    sf = _valid_system(args.system)
    triple = _valid_triple(args.triple, sf)
    cfg, model = _objective(args)
    value = objective_K(sf.system, sf.observable, triple, sf.weight, cfg, model)
    per_time = per_time_diagnostics(cfg.accuracy_kind, sf.system, sf.observable, triple, sf.weight,
                                    smoothing=cfg.kl_smoothing)
    if any(math.isnan(v) for v in value):
        raise NumericalError("objective evaluated to NaN")
    payload = {
        "K": value.K,
        "accuracy": value.accuracy,
        "computation": value.computation,
        "finite": bool(math.isfinite(value.K)),
        "accuracy_kind": cfg.accuracy_kind,
        "computation_model": model.kind,
        "kappa": cfg.kappa,
        "alpha": cfg.alpha,
        "weight": _weight_info(sf.weight),
        "per_time": per_time,
    }
    rows = [("K", "", "", value.K), ("accuracy", "", "", value.accuracy), ("computation", "", "", value.computation)]
    rows += [("accuracy_term", r["t"], r["weight"], r["value"]) for r in per_time]
    _emit(args, payload, rows, ("quantity", "t", "weight", "value"))
    return EXIT_OK


def cmd_optimize(args) -> int:
    sf = _valid_system(args.system)
    cfg, model = _objective(args)
    res = optimize(sf.system, sf.observable, sf.weight, cfg, model, _optimizer(args))
    if math.isnan(res.k_value):
        raise NumericalError("optimal K is NaN")
    payload = _result_info(res)
    payload.update({"accuracy_kind": cfg.accuracy_kind, "computation_model": model.kind,
                    "kappa": cfg.kappa, "alpha": cfg.alpha, "seed": args.seed})
    rows = [(x, b) for x, b in enumerate(res.best_partition.assignment)]
    _emit(args, payload, rows, ("state", "block"))
    return EXIT_OK


def cmd_complexity(args) -> int:
    sf = _valid_system(args.system)
    cfg, model = _objective(args)
    c = compression_complexity(sf.system, sf.observable, sf.weight, cfg, model, _optimizer(args),
                               normalized=not args.unnormalized)
    _require_finite(c.value, c.identity_K, what="compression complexity")
    payload = {
        "complexity": c.value,
        "normalized": c.normalized,
        "min_K": c.min_K,
        "identity_K": c.identity_K,
        "search_class": c.search_class,
        "best": _result_info(c.best),
        "accuracy_kind": cfg.accuracy_kind,
        "computation_model": model.kind,
        "kappa": cfg.kappa,
        "alpha": cfg.alpha,
    }
    rows = _scalar_rows(payload, ("complexity", "min_K", "identity_K"))
    _emit(args, payload, rows, ("quantity", "value"))
    return EXIT_OK


def cmd_infoflow(args) -> int:
    sf = _valid_system(args.system)
    triple = _valid_triple(args.triple, sf)
    if args.measure == "cond-ent":
        value = info_flow_cond_ent(sf.system, sf.observable, triple, sf.weight, lag=args.lag)
    else:
        value = info_flow_mi(sf.system, sf.observable, triple, sf.weight)
    _require_finite(value, what="information flow")
    payload = {"measure": args.measure, "lag": args.lag if args.measure == "cond-ent" else None,
               "value": value, "units": "bits"}
    _emit(args, payload, [("value", value)], ("quantity", "value"))
    return EXIT_OK


def cmd_pareto(args) -> int:
    sf = _valid_system(args.system)
    try:
        alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
    except ValueError:
        raise ConfigurationError(f"--alphas must be comma-separated numbers, got {args.alphas!r}") from None
    cfg, model = _objective(args, kappa=1.0, alpha=1.0)
    sweep = pareto_sweep(sf.system, sf.observable, sf.weight, cfg, model, alphas, _optimizer(args))
    on_front = set(sweep.front)
    runs = []
    for i, (a, res) in enumerate(sweep.runs):
        info = _result_info(res)
        info.pop("triple")
        info.update({"alpha": a, "on_front": i in on_front})
        runs.append(info)
    front = [{"computation": c, "accuracy": a} for c, a in sweep.front_points()]
    payload = {"kappa": 1.0, "accuracy_kind": cfg.accuracy_kind, "computation_model": model.kind,
               "runs": runs, "front": front}
    front_rows = [(c, a) for c, a in sweep.front_points()]
    if args.front_csv:
        buf = _stdio.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("computation", "accuracy"))
        for c, a in front_rows:
            writer.writerow((format_float(c).strip('"'), format_float(a).strip('"')))
        Path(args.front_csv).write_text(buf.getvalue())
    _emit(args, payload, front_rows, ("computation", "accuracy"))
    return EXIT_OK


def cmd_example(args) -> int:
    ex = build_example(args.name)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    stem = ex.name
    (out / f"{stem}.system.json").write_text(dumps(system_to_dict(ex.system, ex.observable, ex.weight)) + "\n")
    written.append(f"{stem}.system.json")
    if ex.reference is not None:
        (out / f"{stem}.triple.json").write_text(dumps(triple_to_dict(ex.reference)) + "\n")
        written.append(f"{stem}.triple.json")
    if ex.partition is not None:
        doc = {"partition": list(ex.partition.assignment), "induce": {"ref_dist": "w_averaged_occupancy"}}
        (out / f"{stem}.partition.json").write_text(dumps(doc) + "\n")
        written.append(f"{stem}.partition.json")
    _sys.stdout.write(dumps({"example": ex.name, "directory": str(out), "files": written}) + "\n")
    return EXIT_OK


def cmd_mc_check(args) -> int:
    sf = _valid_system(args.system)
    triple = _valid_triple(args.triple, sf)
    kind = ACC_FLAGS[args.acc]
    exact = accuracy_cost(kind, sf.system, sf.observable, triple, sf.weight)
    cfg = SampleConfig(n_paths=args.paths, horizon=max(sf.weight.horizon, 1), seed=args.seed,
                       estimator=args.estimator)
    paths = sample_paths(sf.system, sf.observable, triple, cfg, workers=args.workers)
    est, se = estimate_cost(paths, kind, sf.weight, sf.observable.cost_matrix)
    if math.isnan(est) or math.isnan(exact):
        raise NumericalError("Monte Carlo check produced NaN")
    ok = within_tolerance(exact, est, se)
    payload = {"accuracy_kind": kind, "exact": exact, "estimate": est, "stderr": se,
               "tolerance": max(3 * se, 0.02) if math.isfinite(se) else se,
               "paths": args.paths, "seed": args.seed, "estimator": args.estimator, "pass": ok}
    rows = _scalar_rows(payload, ("exact", "estimate", "stderr", "pass"))
    _emit(args, payload, rows, ("quantity", "value"))
    return EXIT_OK


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssc", description="Evaluate and optimize state space compressions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a system file (and optionally a triple)")
    p.add_argument("system")
    p.add_argument("--triple")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="objective K of one triple")
    p.add_argument("system")
    p.add_argument("triple")
    _add_cost_flags(p)
    _add_format(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("optimize", help="best induced triple over partitions")
    p.add_argument("system")
    _add_cost_flags(p)
    _add_opt_flags(p)
    _add_format(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("complexity", help="compression complexity min K / K(identity)")
    p.add_argument("system")
    _add_cost_flags(p)
    _add_opt_flags(p)
    p.add_argument("--unnormalized", action="store_true", help="report min K instead of the ratio")
    _add_format(p)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("infoflow", help="information flow from predictions to the observable")
    p.add_argument("system")
    p.add_argument("triple")
    p.add_argument("--measure", choices=("cond-ent", "mi"), default="cond-ent")
    p.add_argument("--lag", type=int, default=1)
    _add_format(p)
    p.set_defaults(func=cmd_infoflow)

    p = sub.add_parser("pareto", help="sweep alpha with kappa=1 and report the non-dominated set")
    p.add_argument("system")
    p.add_argument("--alphas", required=True, help="comma-separated list, e.g. 0.1,1,10")
    p.add_argument("--front-csv", help="also write the (computation, accuracy) front to this CSV file")
    _add_cost_flags(p)
    _add_opt_flags(p)
    _add_format(p)
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("example", help="write a corpus system (and reference triple) as JSON")
    p.add_argument("name", choices=NAMES)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("mc-check", help="compare an exact accuracy cost with a Monte Carlo estimate")
    p.add_argument("system")
    p.add_argument("triple")
    p.add_argument("--acc", choices=tuple(ACC_FLAGS), default="expected")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--estimator", choices=("plugin", "plugin_miller_madow"), default="plugin")
    p.add_argument("--workers", type=int, default=1)
    _add_format(p)
    p.set_defaults(func=cmd_mc_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=_sys.stderr)
    try:
        with np.errstate(all="ignore"):
            return args.func(args)
    except _InvalidInput as exc:
        _sys.stdout.write(dumps(exc.report.as_dict()) + "\n")
        print("error: input failed validation", file=_sys.stderr)
        return EXIT_CONFIG
    except FileFormatError as exc:
        _sys.stdout.write(dumps({"valid": False, "parse_error": str(exc)}) + "\n")
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=_sys.stderr)
        return EXIT_NUMERIC
    except (ConfigurationError, SSCError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    _sys.exit(main())
