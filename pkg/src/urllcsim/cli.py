"""Command line entry points.

`urllcsim` carries the campaign verbs (run / validate / calibrate /
report); `link-sim` and `system-sim` expose the two simulators directly.
Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import config as cfgmod
from . import report as reportmod

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _load(path_or_preset: str | None, scenario: str | None):
    if path_or_preset:
        return cfgmod.load_config(path_or_preset)
    if scenario and scenario != "custom":
        return cfgmod.load_preset(scenario)
    raise cfgmod.ConfigValidationError([("<cli>", "provide --config or --scenario")])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="urllcsim", description="URLLC downlink physical-layer simulation suite"
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run a campaign and write result CSVs")
    p_run.add_argument("--config", help="campaign YAML file")
    p_run.add_argument("--scenario", choices=("fig4a", "fig4b", "fig4c"), help="shipped preset")
    p_run.add_argument("--out-dir", default=None, help=f"output dir (default ${cfgmod.OUTPUT_DIR_ENV} or ./results)")
    p_run.add_argument("--workers", type=int, default=1)

    p_val = sub.add_parser("validate", help="validate a campaign config")
    p_val.add_argument("--config", required=True)

    p_cal = sub.add_parser("calibrate", help="regenerate the effective-SNR -> BLER table")
    p_cal.add_argument("--out", required=True)
    p_cal.add_argument("--trials", type=int, default=50_000)
    p_cal.add_argument("--seed", type=int, default=12345)

    p_rep = sub.add_parser("report", help="recompute summaries from result CSVs")
    p_rep.add_argument("inputs", nargs="+", help="result CSV files")

    args = parser.parse_args(argv)

    if args.verb == "validate":
        try:
            cfgmod.load_config(args.config)
        except cfgmod.ConfigValidationError as exc:
            for path, msg in exc.diagnostics:
                print(f"invalid: {path}: {msg}", file=sys.stderr)
            return EXIT_CONFIG
        except OSError as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print("config ok")
        return EXIT_OK

    if args.verb == "run":
        try:
            cfg = _load(args.config, args.scenario)
        except cfgmod.ConfigValidationError as exc:
            for path, msg in exc.diagnostics:
                print(f"invalid: {path}: {msg}", file=sys.stderr)
            return EXIT_CONFIG
        except OSError as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            artifacts = reportmod.run_scenario(cfg, out_dir=args.out_dir, workers=args.workers)
        except OSError as exc:
            print(f"cannot write results: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        except Exception as exc:  # simulation failure
            print(f"runtime error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        with open(artifacts["summary"], "r", encoding="utf-8") as fh:
            print(fh.read().rstrip())
        for name, path in artifacts.items():
            print(f"{name}: {path}")
        return EXIT_OK

    if args.verb == "calibrate":
        from .channel import BlerTable
        from .linksim import MCS_TABLE, SVC_MCS, calibrate_bler_table

        try:
            table = calibrate_bler_table(
                mcs_list=list(MCS_TABLE) + [SVC_MCS],
                cb_lens=(96, 144, 192, 288, 384, 576, 864),
                snr_grid_db=[float(s) for s in range(-2, 26, 2)],
                trials=args.trials,
                seed=args.seed,
            )
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(table.to_csv())
        except OSError as exc:
            print(f"cannot write table: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        print(f"wrote {args.out}")
        return EXIT_OK

    if args.verb == "report":
        code = EXIT_OK
        for path in args.inputs:
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    text = fh.read()
                print(f"== {path}")
                print(reportmod.summarize_csv_text(text))
            except OSError as exc:
                print(f"cannot read {path}: {exc}", file=sys.stderr)
                code = EXIT_RUNTIME
            except reportmod.ReportError as exc:
                print(f"{path}: {exc}", file=sys.stderr)
                code = EXIT_RUNTIME
        return code

    return EXIT_RUNTIME  # pragma: no cover


def link_sim_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="link-sim", description="PER-vs-SNR link campaigns")
    parser.add_argument("--config", required=True, help="campaign YAML with a link section")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        cfg = cfgmod.load_config(args.config)
        if cfg.link is None:
            raise cfgmod.ConfigValidationError([("link", "config has no link section")])
    except cfgmod.ConfigValidationError as exc:
        for path, msg in exc.diagnostics:
            print(f"invalid: {path}: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    seed = cfg.seed if args.seed is None else args.seed
    from .linksim import LINK_SCHEMA, run_link_campaign

    try:
        rows = [f"# schema: {LINK_SCHEMA}", "codec,snr_db,trials,errors,per,ci_halfwidth"]
        for i, codec in enumerate(cfg.link.codecs):
            curve = run_link_campaign(cfg.link.campaign(codec, seed=seed + i), workers=args.workers)
            rows.extend(curve.to_csv().splitlines()[2:])
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(rows) + "\n")
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {args.out}")
    return EXIT_OK


def system_sim_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="system-sim", description="slot-level eMBB/URLLC campaigns")
    parser.add_argument("--config", required=True, help="campaign YAML with a system section")
    parser.add_argument("--slots", type=int, default=None, help="override slots per run")
    parser.add_argument("--seeds", default=None, help="comma-separated seed list override")
    parser.add_argument("--out", required=True, help="output CSV path")
    args = parser.parse_args(argv)
    try:
        cfg = cfgmod.load_config(args.config)
        if cfg.system is None:
            raise cfgmod.ConfigValidationError([("system", "config has no system section")])
    except cfgmod.ConfigValidationError as exc:
        for path, msg in exc.diagnostics:
            print(f"invalid: {path}: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    from .systemsim import results_to_csv, run_system_campaign

    section = cfg.system
    slots = args.slots if args.slots is not None else section.slots
    seeds = (
        tuple(int(s) for s in args.seeds.split(",")) if args.seeds else section.seeds
    )
    try:
        table = reportmod.load_bler_table(section.bler_table)
        results = []
        for scheme in section.schemes:
            for policy in section.policies:
                sys_cfg = section.system_config(scheme, policy)
                results.extend(run_system_campaign(sys_cfg, table, seeds, slots))
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(results_to_csv(results))
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {args.out}")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
