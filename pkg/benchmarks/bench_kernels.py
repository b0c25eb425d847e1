"""Benchmark the hot Monte Carlo kernels: numba JIT vs pure-numpy fallback.

The fallback path is selected with URLLCSIM_NO_NUMBA=1; randomness is
drawn outside the kernels, so both paths must produce identical error
counts.  Run from the repository root:

    python3 benchmarks/bench_kernels.py [--trials N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def measure(trials: int) -> dict:
    from urllcsim._jit import USING_NUMBA
    from urllcsim.linksim import LinkCampaign, run_link_campaign

    out = {"numba": USING_NUMBA, "results": {}}
    for codec, snr in (("svc", 8.0), ("cc", 11.0), ("polar", 10.0)):
        campaign = LinkCampaign(
            codec=codec,
            snr_grid_db=(snr,),
            max_trials=trials,
            target_errors=trials,
            block_size=min(1000, trials),
            seed=42,
        )
        run_link_campaign(campaign)  # warm-up / JIT compile
        t0 = time.perf_counter()
        curve = run_link_campaign(campaign)
        dt = time.perf_counter() - t0
        point = curve.points[0]
        out["results"][codec] = {
            "us_per_trial": dt / point.trials * 1e6,
            "trials": point.trials,
            "errors": point.errors,
        }
    return out


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=20_000)
    parser.add_argument("--emit-json", action="store_true", help="print raw JSON only")
    args = parser.parse_args()

    if args.emit_json:
        print(json.dumps(measure(args.trials)))
        return 0

    fast = measure(args.trials)
    env = dict(os.environ, URLLCSIM_NO_NUMBA="1")
    fallback_trials = max(200, args.trials // 100)  # the fallback is slow
    proc = subprocess.run(
        [sys.executable, __file__, "--trials", str(fallback_trials), "--emit-json"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    slow = json.loads(proc.stdout.strip().splitlines()[-1])

    check = subprocess.run(
        [sys.executable, __file__, "--trials", str(fallback_trials), "--emit-json"],
        capture_output=True,
        text=True,
        check=True,
    )
    fast_small = json.loads(check.stdout.strip().splitlines()[-1])

    print(f"{'kernel':<8} {'numba us/trial':>15} {'numpy us/trial':>15} {'speedup':>9}  identical")
    for codec in ("svc", "cc", "polar"):
        a = fast["results"][codec]["us_per_trial"]
        b = slow["results"][codec]["us_per_trial"]
        same = (
            slow["results"][codec]["errors"] == fast_small["results"][codec]["errors"]
            and slow["results"][codec]["trials"] == fast_small["results"][codec]["trials"]
        )
        print(f"{codec:<8} {a:>15.1f} {b:>15.1f} {b / a:>8.1f}x  {same}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
