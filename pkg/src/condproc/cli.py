"""Command-line entry point: ``condproc <subcommand> [options]``.

Exit codes: 0 all checks pass, 1 a check failed, 2 bad configuration or a
numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

from .config import ExperimentConfig, load_config
from .errors import CondProcError, ConfigError
from .experiments import CRITERIA, SUITES, default_config, last_exit_ensemble, run, shared_ensemble_config

DESCRIPTIONS = {
    "ctmc-verify": "exact kernel identities and the lambda -> 0 ladder for the walk",
    "ctmc-mc": "Monte Carlo checks of the walk: visits to 0, holds, conditioned sampler",
    "bm-thm12": "last-exit paths vs local-time-clock killed bang-bang paths, and near-point conditioning",
    "bm-resolvent": "bang-bang resolvent symmetry, resolvent equation and excursion integral",
    "ou-h": "hitting probability of 0 for the repelled OU process",
    "logistic-drift": "conditioned logistic drift in both conventions, with path comparison",
    "fd-validate": "finite-volume generator: convergence orders and semigroup vs paths",
    "localtime-cond": "conditioning on local time exceeding an exponential level",
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="condproc", description="Validation experiments for conditioned diffusions.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUITES:
        crit = ", ".join(str(k) for k, v in CRITERIA.items() if v == name)
        p = sub.add_parser(name, help=DESCRIPTIONS[name] + (f" (criteria {crit})" if crit else ""))
        p.add_argument("--config", help="flat TOML file of ExperimentConfig fields")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--out", help="output directory (default: results/<subcommand>)")
        p.add_argument("--paths", type=int, help="Monte Carlo paths per ensemble")
        p.add_argument("--quick", action="store_true", help="cap ensembles at a few thousand paths")
        p.add_argument("--ensemble-csv", action="store_true", help="also write per-path CSV where available")
    return ap


def build_config(args) -> ExperimentConfig:
    overrides = load_config(args.config) if args.config else {}
    overrides.pop("experiment_id", None)
    overrides.update({k: v for k, v in {"master_seed": args.seed, "n_paths": args.paths}.items() if v is not None})
    if args.quick:
        overrides["quick"] = True
    if args.out:
        overrides["out_dir"] = args.out
    return default_config(args.command, **overrides)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = build_config(args)
    except (ConfigError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    out = cfg.out_dir if args.out else os.path.join(cfg.out_dir, cfg.experiment_id)
    os.makedirs(out, exist_ok=True)
    t0 = time.perf_counter()
    try:
        report = run(cfg.experiment_id, cfg)
    except CondProcError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    with open(os.path.join(out, "report.csv"), "w", encoding="utf-8") as fh:
        fh.write(report.to_csv())
    if args.ensemble_csv and cfg.experiment_id in ("bm-thm12", "fd-validate"):
        mc_cfg = cfg if cfg.experiment_id == "bm-thm12" else shared_ensemble_config(cfg)
        last_exit_ensemble(mc_cfg).to_csv(os.path.join(out, "last_exit_ensemble.csv"))
    for row in report.rows:
        verdict = "" if row.passed is None else ("PASS" if row.passed else "FAIL")
        tag = f"[{row.criterion}] " if row.criterion else ""
        print(f"{tag}{row.name:48s} {row.value!s:>24}  {row.tolerance:28s} {verdict}")
    print(f"{cfg.experiment_id}: {'PASS' if report.passed else 'FAIL'} in {time.perf_counter() - t0:.1f} s -> {out}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
