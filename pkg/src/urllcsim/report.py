"""Scenario orchestration and result summaries.

`run_scenario` executes a campaign config, writes the versioned result
CSVs, and emits a human-readable summary with the orderings and gaps
the scenario is about.  `report` recomputes summaries from existing
CSVs.
"""

from __future__ import annotations

import importlib.resources
import math
import os
from dataclasses import dataclass

import numpy as np

from .channel import BlerTable
from .config import CampaignConfig
from .linksim import LINK_SCHEMA, PerCurve, PerPoint, run_link_campaign, snr_at_per
from .systemsim import SYSTEM_SCHEMA, results_to_csv, run_system_campaign


class ReportError(ValueError):
    pass


def default_bler_table() -> BlerTable:
    ref = importlib.resources.files("urllcsim").joinpath("data/bler_table.csv")
    return BlerTable.from_csv(ref.read_text(encoding="utf-8"))


def load_bler_table(spec: str) -> BlerTable:
    if spec == "default":
        return default_bler_table()
    with open(spec, "r", encoding="utf-8") as fh:
        return BlerTable.from_csv(fh.read())


# ---------------------------------------------------------------------------
# CSV parsing (the inverse of the writers)
# ---------------------------------------------------------------------------


def read_schema(text: str) -> str:
    first = text.splitlines()[0] if text.strip() else ""
    if not first.startswith("# schema: "):
        raise ReportError("missing schema header line")
    return first.removeprefix("# schema: ").strip()


def parse_link_csv(text: str) -> dict[str, PerCurve]:
    if read_schema(text) != LINK_SCHEMA:
        raise ReportError(f"expected schema {LINK_SCHEMA}")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if lines[0] != "codec,snr_db,trials,errors,per,ci_halfwidth":
        raise ReportError("unexpected link csv columns")
    curves: dict[str, list[PerPoint]] = {}
    for ln in lines[1:]:
        codec, snr_db, trials, errors, _per, _ci = ln.split(",")
        curves.setdefault(codec, []).append(PerPoint(float(snr_db), int(trials), int(errors)))
    return {codec: PerCurve(codec, pts) for codec, pts in curves.items()}


def parse_system_csv(text: str) -> list[dict]:
    if read_schema(text) != SYSTEM_SCHEMA:
        raise ReportError(f"expected schema {SYSTEM_SCHEMA}")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        row: dict = dict(zip(header, parts))
        for key in header[3:]:
            row[key] = float(row[key])
        row["seed"] = int(row["seed"])
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# summaries
# ---------------------------------------------------------------------------


def summarize_link(curves: dict[str, PerCurve], target_per: float = 1e-3) -> str:
    out = []
    crossings = {}
    for codec in sorted(curves):
        curve = curves[codec]
        mono = np.all(np.diff(curve.monotone_per()) <= 0)
        try:
            x = snr_at_per(curve, target_per)
            crossings[codec] = x
            xs = f"{x:.2f} dB"
        except Exception:
            xs = "not bracketed"
        out.append(f"{codec}: snr@PER={target_per:g} = {xs} (monotone fit: {bool(mono)})")
    if len(crossings) >= 2:
        ranked = sorted(crossings, key=crossings.get)
        out.append("ordering best-to-worst at PER=%g: %s" % (target_per, " < ".join(ranked)))
        if "svc" in crossings and "cc" in crossings:
            out.append(f"svc-vs-cc gap: {crossings['cc'] - crossings['svc']:.2f} dB")
    return "\n".join(out)


def summarize_system(rows: list[dict]) -> str:
    groups: dict[tuple[str, str], list[dict]] = {}
    for row in rows:
        groups.setdefault((row["scheme"], row["policy"]), []).append(row)
    out = []
    means = {}
    for key in groups:
        g = groups[key]
        thr = float(np.mean([r["embb_throughput_bps"] for r in g]))
        lat_vals = [r["urllc_mean_latency_us"] for r in g if not math.isnan(r["urllc_mean_latency_us"])]
        lat = float(np.mean(lat_vals)) if lat_vals else math.nan
        per = float(np.mean([r["urllc_per"] for r in g]))
        means[key] = (thr, lat)
        out.append(
            f"{key[0]}/{key[1]}: eMBB {thr / 1e6:.2f} Mbps, URLLC mean latency "
            f"{lat:.1f} us, URLLC PER {per:.2e}"
        )
    baseline = [v for k, v in means.items() if k[0] == "baseline"]
    if baseline:
        base_thr = baseline[0][0]
        for key, (thr, _lat) in means.items():
            if key[0] != "baseline" and base_thr > 0:
                out.append(f"throughput ratio {key[0]}/{key[1]} vs baseline: {thr / base_thr:.3f}")
    return "\n".join(out)


def summarize_csv_text(text: str) -> str:
    schema = read_schema(text)
    if schema == LINK_SCHEMA:
        return summarize_link(parse_link_csv(text))
    if schema == SYSTEM_SCHEMA:
        return summarize_system(parse_system_csv(text))
    raise ReportError(f"no summary for schema {schema!r}")


# ---------------------------------------------------------------------------
# scenario runner
# ---------------------------------------------------------------------------


def run_scenario(
    cfg: CampaignConfig, out_dir: str | None = None, workers: int = 1
) -> dict[str, str]:
    """Execute a campaign and write its result files.

    Returns a mapping of artifact names to paths.  Identical config and
    seed produce byte-identical files regardless of `workers`.
    """
    target = cfg.resolved_output_dir(out_dir)
    os.makedirs(target, exist_ok=True)
    artifacts: dict[str, str] = {}
    summary_parts: list[str] = []

    if cfg.link is not None:
        rows = [f"# schema: {LINK_SCHEMA}", "codec,snr_db,trials,errors,per,ci_halfwidth"]
        curves = {}
        for i, codec in enumerate(cfg.link.codecs):
            campaign = cfg.link.campaign(codec, seed=cfg.seed + i)
            curve = run_link_campaign(campaign, workers=workers)
            curves[codec] = curve
            for line in curve.to_csv().splitlines()[2:]:
                rows.append(line)
            undersampled = curve.undersampled(campaign.target_errors)
            if undersampled:
                summary_parts.append(
                    f"{codec}: under-sampled points (fewer than {campaign.target_errors} "
                    f"errors) at {undersampled}"
                )
        path = os.path.join(target, f"{cfg.scenario}_per_curves.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(rows) + "\n")
        artifacts["per_curves"] = path
        summary_parts.append(summarize_link(curves))

    if cfg.system is not None:
        table = load_bler_table(cfg.system.bler_table)
        results = []
        for scheme in cfg.system.schemes:
            for policy in cfg.system.policies:
                sys_cfg = cfg.system.system_config(scheme, policy)
                results.extend(
                    run_system_campaign(
                        sys_cfg, table, cfg.system.seeds, cfg.system.slots, workers=workers
                    )
                )
        csv_text = results_to_csv(results)
        path = os.path.join(target, f"{cfg.scenario}_system.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        artifacts["system"] = path
        summary_parts.append(summarize_system(parse_system_csv(csv_text)))

    summary = "\n".join(p for p in summary_parts if p)
    path = os.path.join(target, f"{cfg.scenario}_summary.txt")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(summary + "\n")
    artifacts["summary"] = path
    return artifacts
