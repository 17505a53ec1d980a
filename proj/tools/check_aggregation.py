#!/usr/bin/env python3
"""Recompute curves.csv from trials/*.json and compare within 1e-12.

usage: check_aggregation.py RUN_DIR
       check_aggregation.py --run LAICA_LAB CONFIG OUT_DIR
"""
import csv
import glob
import json
import math
import os
import subprocess
import sys

import numpy as np

TOL = 1e-12


def running_mean(x, w):
    c = np.cumsum(np.asarray(x, dtype=float))
    out = np.empty(len(x))
    for t in range(len(x)):
        lo = t - w
        out[t] = (c[t] - (c[lo] if lo >= 0 else 0.0)) / min(t + 1, w)
    return out


def expected(run_dir):
    manifest = json.load(open(os.path.join(run_dir, "manifest.json")))
    w = manifest["running_mean_window"]
    trials = [json.load(open(p)) for p in sorted(glob.glob(os.path.join(run_dir, "trials", "*.json")))]
    out = {}
    for alg in manifest["config"]["algorithms"]:
        ok = [t for t in trials if t["algorithm"] == alg and t["fault"] is None]
        if not ok:
            continue
        m = np.array([running_mean(t["returns"], w) for t in ok])
        mean = m.mean(axis=0)
        se = m.std(axis=0, ddof=1) / math.sqrt(len(ok)) if len(ok) > 1 else np.zeros(m.shape[1])
        markers = {e for t in ok for e in t["change_episodes"] if e > 0}
        out[alg] = (mean, se, markers)
    return out


def check(run_dir):
    exp = expected(run_dir)
    rows = list(csv.DictReader(open(os.path.join(run_dir, "curves.csv"))))
    seen = {a: 0 for a in exp}
    worst = 0.0
    for r in rows:
        alg, ep = r["algorithm"], int(r["episode"])
        mean, se, markers = exp[alg]
        worst = max(worst, abs(float(r["mean_return"]) - mean[ep]), abs(float(r["std_error"]) - se[ep]))
        if int(r["is_change_marker"]) != (ep in markers):
            print(f"marker mismatch {alg} episode {ep}")
            return 1
        seen[alg] += 1
    for alg, (mean, _, _) in exp.items():
        if seen[alg] != len(mean):
            print(f"{alg}: {seen[alg]} rows, expected {len(mean)}")
            return 1
    print(f"{len(rows)} rows, max abs deviation {worst:.3g}")
    return 0 if worst <= TOL else 1


def main(argv):
    if len(argv) == 5 and argv[1] == "--run":
        lab, cfg, out = argv[2:]
        subprocess.run([lab, "run", "--config", cfg, "--out", out, "--quiet"], check=True)
        return check(out)
    if len(argv) == 2:
        return check(argv[1])
    print(__doc__)
    return 2


if __name__ == "__main__":
    sys.exit(main(sys.argv))
