"""Run every validation suite at full size and summarize criteria 1-10.

    python3 scripts/run_acceptance.py [--out results] [--quick]
"""
import argparse
import os
import time

from condproc.experiments import CRITERIA, SUITES, default_config, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()
    reports = {}
    for name in SUITES:
        t0 = time.perf_counter()
        rep = run(name, default_config(name, quick=args.quick or None, master_seed=args.seed))
        reports[name] = rep
        os.makedirs(os.path.join(args.out, name), exist_ok=True)
        with open(os.path.join(args.out, name, "report.json"), "w") as fh:
            fh.write(rep.to_json())
        with open(os.path.join(args.out, name, "report.csv"), "w") as fh:
            fh.write(rep.to_csv())
        print(f"{name:16s} {'PASS' if rep.passed else 'FAIL'}  {time.perf_counter() - t0:7.1f} s")
    print()
    for k, name in sorted(CRITERIA.items()):
        rows = reports[name].criterion_rows(k)
        ok = all(r.passed for r in rows)
        print(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  " + ", ".join(f"{r.name}={r.value:.4g}" for r in rows))


if __name__ == "__main__":
    main()
