#!/usr/bin/env python3
"""Grid tuning of a WMR controller across the four delay profiles.

Each candidate is simulated under s1..s4; a candidate that diverges under any
profile is rejected, the rest are ranked by the summed AE-x + AE-y.

  tools/tune_wmr.py build/tools/arolc arolc '{"controller.alpha": [2, 10, 30], ...}'
"""

import argparse
import itertools
import json
import subprocess
import sys
import tempfile
from pathlib import Path

PROFILES = ("s1", "s2", "s3", "s4")


def evaluate(cli, scenario, overrides, extra, out):
    args = [cli, "simulate", str(scenario), "--out", out, "--quiet", *extra]
    for key, value in overrides.items():
        args += ["--set", f"{key}={value}"]
    if subprocess.run(args, capture_output=True).returncode != 0:
        return None
    metrics = json.loads((Path(out) / "metrics.json").read_text())
    return sum(metrics["ae_per_dim"]), metrics["tv"]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("cli")
    parser.add_argument("controller", choices=["arolc", "pcon", "pconf"])
    parser.add_argument("grid", help="JSON object: scenario key -> list of values")
    parser.add_argument("--scenarios", default=Path(__file__).resolve().parent.parent / "scenarios", type=Path)
    parser.add_argument("--seed", default="1")
    parser.add_argument("--dt", default="1e-3")
    args = parser.parse_args()

    grid = json.loads(args.grid)
    extra = ["--seed", args.seed, "--dt", args.dt]
    ranked = []
    with tempfile.TemporaryDirectory() as out:
        for values in itertools.product(*grid.values()):
            overrides = dict(zip(grid, values))
            results = []
            for profile in PROFILES:
                scenario = args.scenarios / f"wmr_{profile}_{args.controller}.ini"
                results.append(evaluate(args.cli, scenario, overrides, extra, out))
                if results[-1] is None:
                    break
            if results[-1] is None:
                print(values, "diverged under", PROFILES[len(results) - 1], flush=True)
                continue
            ae = sum(r[0] for r in results)
            ranked.append((ae, values))
            print(values, "AE %.2f" % ae, "TV " + " ".join("%.1f" % r[1] for r in results), flush=True)
    if not ranked:
        sys.exit("no candidate is stable under every profile")
    ae, values = min(ranked)
    print("best:", dict(zip(grid, values)), "AE %.2f" % ae)


if __name__ == "__main__":
    main()
