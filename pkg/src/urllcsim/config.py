"""Campaign configuration: YAML schema, validation diagnostics, and the
three shipped scenario presets."""

from __future__ import annotations

import importlib.resources
import os
from dataclasses import dataclass, field, replace

import yaml

from .codecs.svc import SvcParams
from .linksim import CODECS, LinkCampaign
from .systemsim import (
    POLICIES,
    SCHEMES,
    CoexistencePolicy,
    GeometryConfig,
    SchedulerConfig,
    SystemConfig,
    TrafficModel,
)

SCENARIOS = ("fig4a", "fig4b", "fig4c", "custom")

OUTPUT_DIR_ENV = "URLLCSIM_OUT"


class ConfigValidationError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(f"{p}: {m}" for p, m in self.diagnostics))


@dataclass(frozen=True)
class LinkSection:
    codecs: tuple[str, ...] = ("svc", "cc", "polar")
    snr_grid_db: tuple[float, ...] = tuple(float(s) for s in range(2, 16))
    max_trials: int = 200_000
    target_errors: int = 200
    block_size: int = 2_000
    n_rbs: int = 100
    coherence_bandwidth_rbs: float = 25.0
    normalize_channel_power: bool = False
    dmrs_density: int = 12
    estimator: str = "mmse"
    svc: SvcParams = field(default_factory=SvcParams)
    cc_rate_matched_bits: int = 144
    cc_crs_pilots: int = 25
    polar_list_size: int = 8
    polar_design_snr_db: float = -5.0

    def campaign(self, codec: str, seed: int) -> LinkCampaign:
        return LinkCampaign(
            codec=codec,
            snr_grid_db=self.snr_grid_db,
            max_trials=self.max_trials,
            target_errors=self.target_errors,
            seed=seed,
            block_size=self.block_size,
            n_rbs=self.n_rbs,
            coherence_bandwidth_rbs=self.coherence_bandwidth_rbs,
            normalize_channel_power=self.normalize_channel_power,
            dmrs_density=self.dmrs_density,
            estimator=self.estimator,
            svc=self.svc,
            cc_rate_matched_bits=self.cc_rate_matched_bits,
            cc_crs_pilots=self.cc_crs_pilots,
            polar_list_size=self.polar_list_size,
            polar_design_snr_db=self.polar_design_snr_db,
        )


@dataclass(frozen=True)
class SystemSection:
    slots: int = 10_000
    seeds: tuple[int, ...] = tuple(range(1, 21))
    schemes: tuple[str, ...] = ("instant",)
    policies: tuple[str, ...] = ("lte_retx",)
    baseline_embb_only: bool = True
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    traffic: TrafficModel = field(default_factory=TrafficModel)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    corruption_severity: float = float("inf")
    robustness_rate_factor: float = 0.85
    n_rbs: int = 100
    symbols_per_slot: int = 14
    coherence_bandwidth_rbs: float = 25.0
    n_codeblocks_per_tb: int = 3
    t_prop_us: float = 3.0
    t_sig_us: float = 0.0
    bler_table: str = "default"

    def policy_config(self, policy: str) -> CoexistencePolicy:
        common = dict(
            corruption_severity=self.corruption_severity,
            robustness_rate_factor=self.robustness_rate_factor,
        )
        if policy == "robustness":
            return CoexistencePolicy(
                mode=policy, embb_bler_target=1e-3, retx_unit="transport_block", **common
            )
        if policy == "codeblock_retx":
            return CoexistencePolicy(mode=policy, retx_unit="codeblock", **common)
        return CoexistencePolicy(mode=policy, **common)

    def system_config(self, scheme: str, policy: str) -> SystemConfig:
        scheduler = replace(self.scheduler, scheme=scheme)
        traffic = self.traffic
        if scheme == "baseline" and self.baseline_embb_only:
            traffic = replace(traffic, urllc_rate_per_ms=0.0)
        return SystemConfig(
            scheduler=scheduler,
            policy=self.policy_config(policy),
            traffic=traffic,
            geometry=self.geometry,
            n_rbs=self.n_rbs,
            symbols_per_slot=self.symbols_per_slot,
            coherence_bandwidth_rbs=self.coherence_bandwidth_rbs,
            n_codeblocks_per_tb=self.n_codeblocks_per_tb,
            t_prop_us=self.t_prop_us,
            t_sig_us=self.t_sig_us,
        )


@dataclass(frozen=True)
class CampaignConfig:
    scenario: str = "custom"
    seed: int = 12345
    output_dir: str | None = None
    link: LinkSection | None = None
    system: SystemSection | None = None

    def resolved_output_dir(self, override: str | None = None) -> str:
        if override:
            return override
        if self.output_dir:
            return self.output_dir
        return os.environ.get(OUTPUT_DIR_ENV, "results")


def _expect_mapping(raw, path, diags):
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        diags.append((path, f"expected a mapping, got {type(raw).__name__}"))
        return {}
    return raw


def _take(raw: dict, key: str, default, path, diags, typ=None, choices=None):
    value = raw.pop(key, default)
    if value is None:
        return default
    if typ is not None:
        try:
            if typ is bool and not isinstance(value, bool):
                raise TypeError
            value = typ(value)
        except (TypeError, ValueError):
            diags.append((f"{path}.{key}", f"expected {typ.__name__}, got {value!r}"))
            return default
    if choices is not None and value not in choices:
        diags.append((f"{path}.{key}", f"must be one of {sorted(choices)}, got {value!r}"))
        return default
    return value


def _take_seq(raw: dict, key: str, default, path, diags, typ=float):
    value = raw.pop(key, None)
    if value is None:
        return default
    if not isinstance(value, (list, tuple)):
        diags.append((f"{path}.{key}", "expected a list"))
        return default
    try:
        return tuple(typ(v) for v in value)
    except (TypeError, ValueError):
        diags.append((f"{path}.{key}", f"list entries must be {typ.__name__}"))
        return default


def _warn_unknown(raw: dict, path, diags):
    for key in raw:
        diags.append((f"{path}.{key}", "unknown key"))


def parse_config(text: str) -> CampaignConfig:
    """Parse and validate a YAML campaign config.

    Raises :class:`ConfigValidationError` carrying one (path, message)
    diagnostic per violated constraint.
    """
    diags: list[tuple[str, str]] = []
    try:
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark else "unknown location"
        raise ConfigValidationError([(where, f"YAML parse error: {exc}")]) from exc
    if not isinstance(raw, dict):
        raise ConfigValidationError([("<root>", "config must be a mapping")])

    scenario = _take(raw, "scenario", "custom", "", diags, str, SCENARIOS)
    seed = _take(raw, "seed", 12345, "", diags, int)
    output_dir = raw.pop("output_dir", None)

    link = None
    if "link" in raw:
        lraw = _expect_mapping(raw.pop("link"), "link", diags)
        codecs = _take_seq(lraw, "codecs", ("svc", "cc", "polar"), "link", diags, str)
        for c in codecs:
            if c not in CODECS:
                diags.append(("link.codecs", f"unknown codec {c!r}"))
        svcraw = _expect_mapping(lraw.pop("svc", None), "link.svc", diags)
        svc_kwargs = {}
        for name, typ in (("n", int), ("m", int), ("k", int), ("spreading_seed", int)):
            if name in svcraw:
                svc_kwargs[name] = _take(svcraw, name, None, "link.svc", diags, typ)
        _warn_unknown(svcraw, "link.svc", diags)
        try:
            svc = SvcParams(**{k: v for k, v in svc_kwargs.items() if v is not None})
        except ValueError as exc:
            diags.append(("link.svc", str(exc)))
            svc = SvcParams()
        grid = _take_seq(lraw, "snr_grid_db", LinkSection.snr_grid_db, "link", diags, float)
        if len(grid) < 2 or any(b <= a for a, b in zip(grid, grid[1:])):
            diags.append(("link.snr_grid_db", "must be strictly increasing with >= 2 points"))
        max_trials = _take(lraw, "max_trials", 200_000, "link", diags, int)
        target_errors = _take(lraw, "target_errors", 200, "link", diags, int)
        if max_trials < target_errors:
            diags.append(("link.max_trials", "must be >= link.target_errors"))
        link = LinkSection(
            codecs=tuple(codecs),
            snr_grid_db=grid,
            max_trials=max_trials,
            target_errors=target_errors,
            block_size=_take(lraw, "block_size", 2_000, "link", diags, int),
            n_rbs=_take(lraw, "n_rbs", 100, "link", diags, int),
            coherence_bandwidth_rbs=_take(lraw, "coherence_bandwidth_rbs", 25.0, "link", diags, float),
            normalize_channel_power=_take(lraw, "normalize_channel_power", False, "link", diags, bool),
            dmrs_density=_take(lraw, "dmrs_density", 12, "link", diags, int, (12, 24)),
            estimator=_take(lraw, "estimator", "mmse", "link", diags, str, ("mmse", "genie")),
            svc=svc,
            cc_rate_matched_bits=_take(lraw, "cc_rate_matched_bits", 144, "link", diags, int),
            cc_crs_pilots=_take(lraw, "cc_crs_pilots", 25, "link", diags, int),
            polar_list_size=_take(lraw, "polar_list_size", 8, "link", diags, int),
            polar_design_snr_db=_take(lraw, "polar_design_snr_db", -5.0, "link", diags, float),
        )
        _warn_unknown(lraw, "link", diags)

    system = None
    if "system" in raw:
        sraw = _expect_mapping(raw.pop("system"), "system", diags)
        symbols_per_slot = _take(sraw, "symbols_per_slot", 14, "system", diags, int)
        schedraw = _expect_mapping(sraw.pop("scheduler", None), "system.scheduler", diags)
        sched_kwargs = {}
        for name in (
            "reserved_symbols",
            "dynamic_headroom",
            "dynamic_reserved_min",
            "dynamic_reserved_max",
            "dynamic_overhead_cells",
            "embb_subband_rbs",
            "urllc_bandwidth_rbs",
            "urllc_tti_symbols",
            "urllc_max_retx",
            "embb_max_retx",
        ):
            if name in schedraw:
                sched_kwargs[name] = _take(schedraw, name, None, "system.scheduler", diags, int)
        _warn_unknown(schedraw, "system.scheduler", diags)
        if sched_kwargs.get("reserved_symbols") is not None:
            if sched_kwargs["reserved_symbols"] > symbols_per_slot - 2:
                diags.append(
                    (
                        "system.scheduler.reserved_symbols",
                        f"must be <= data symbols per slot ({symbols_per_slot - 2})",
                    )
                )
                sched_kwargs.pop("reserved_symbols")
        try:
            scheduler = SchedulerConfig(**{k: v for k, v in sched_kwargs.items() if v is not None})
        except ValueError as exc:
            diags.append(("system.scheduler", str(exc)))
            scheduler = SchedulerConfig()

        traw = _expect_mapping(sraw.pop("traffic", None), "system.traffic", diags)
        try:
            traffic = TrafficModel(
                urllc_rate_per_ms=_take(traw, "urllc_rate_per_ms", 1.0, "system.traffic", diags, float),
                urllc_payload_bits=_take(traw, "urllc_payload_bits", 32, "system.traffic", diags, int),
                embb_full_buffer=_take(traw, "embb_full_buffer", True, "system.traffic", diags, bool),
            )
        except ValueError as exc:
            diags.append(("system.traffic", str(exc)))
            traffic = TrafficModel()
        _warn_unknown(traw, "system.traffic", diags)

        graw = _expect_mapping(sraw.pop("geometry", None), "system.geometry", diags)
        try:
            geometry = GeometryConfig(
                n_users=_take(graw, "n_users", 10, "system.geometry", diags, int),
                snr_min_db=_take(graw, "snr_min_db", 5.0, "system.geometry", diags, float),
                snr_max_db=_take(graw, "snr_max_db", 20.0, "system.geometry", diags, float),
                urllc_snr_db=_take(graw, "urllc_snr_db", 5.0, "system.geometry", diags, float),
            )
        except ValueError as exc:
            diags.append(("system.geometry", str(exc)))
            geometry = GeometryConfig()
        _warn_unknown(graw, "system.geometry", diags)

        schemes = _take_seq(sraw, "schemes", ("instant",), "system", diags, str)
        for s in schemes:
            if s not in SCHEMES:
                diags.append(("system.schemes", f"unknown scheme {s!r}"))
        policies = _take_seq(sraw, "policies", ("lte_retx",), "system", diags, str)
        for p in policies:
            if p not in POLICIES:
                diags.append(("system.policies", f"unknown policy {p!r}"))

        system = SystemSection(
            slots=_take(sraw, "slots", 10_000, "system", diags, int),
            seeds=_take_seq(sraw, "seeds", tuple(range(1, 21)), "system", diags, int),
            schemes=tuple(schemes),
            policies=tuple(policies),
            baseline_embb_only=_take(sraw, "baseline_embb_only", True, "system", diags, bool),
            scheduler=scheduler,
            traffic=traffic,
            geometry=geometry,
            corruption_severity=_take(
                sraw, "corruption_severity", float("inf"), "system", diags, float
            ),
            robustness_rate_factor=_take(sraw, "robustness_rate_factor", 0.85, "system", diags, float),
            n_rbs=_take(sraw, "n_rbs", 100, "system", diags, int),
            symbols_per_slot=symbols_per_slot,
            coherence_bandwidth_rbs=_take(sraw, "coherence_bandwidth_rbs", 25.0, "system", diags, float),
            n_codeblocks_per_tb=_take(sraw, "n_codeblocks_per_tb", 3, "system", diags, int),
            t_prop_us=_take(sraw, "t_prop_us", 3.0, "system", diags, float),
            t_sig_us=_take(sraw, "t_sig_us", 0.0, "system", diags, float),
            bler_table=_take(sraw, "bler_table", "default", "system", diags, str),
        )
        _warn_unknown(sraw, "system", diags)

    _warn_unknown(raw, "<root>", diags)
    if diags:
        raise ConfigValidationError(diags)
    return CampaignConfig(scenario=scenario, seed=seed, output_dir=output_dir, link=link, system=system)


def load_config(path: str) -> CampaignConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def preset_text(name: str) -> str:
    if name not in ("fig4a", "fig4b", "fig4c"):
        raise ValueError(f"no preset named {name!r}")
    ref = importlib.resources.files("urllcsim").joinpath(f"presets/{name}.yaml")
    return ref.read_text(encoding="utf-8")


def load_preset(name: str) -> CampaignConfig:
    return parse_config(preset_text(name))


def config_to_yaml(cfg: CampaignConfig) -> str:
    """Serialize a config back to YAML (round-trips through parse_config)."""
    doc: dict = {"scenario": cfg.scenario, "seed": cfg.seed}
    if cfg.output_dir:
        doc["output_dir"] = cfg.output_dir
    if cfg.link is not None:
        l = cfg.link
        doc["link"] = {
            "codecs": list(l.codecs),
            "snr_grid_db": [float(s) for s in l.snr_grid_db],
            "max_trials": l.max_trials,
            "target_errors": l.target_errors,
            "block_size": l.block_size,
            "n_rbs": l.n_rbs,
            "coherence_bandwidth_rbs": l.coherence_bandwidth_rbs,
            "normalize_channel_power": l.normalize_channel_power,
            "dmrs_density": l.dmrs_density,
            "estimator": l.estimator,
            "svc": {
                "n": l.svc.n,
                "m": l.svc.m,
                "k": l.svc.k,
                "spreading_seed": l.svc.spreading_seed,
            },
            "cc_rate_matched_bits": l.cc_rate_matched_bits,
            "cc_crs_pilots": l.cc_crs_pilots,
            "polar_list_size": l.polar_list_size,
            "polar_design_snr_db": l.polar_design_snr_db,
        }
    if cfg.system is not None:
        s = cfg.system
        doc["system"] = {
            "slots": s.slots,
            "seeds": list(s.seeds),
            "schemes": list(s.schemes),
            "policies": list(s.policies),
            "baseline_embb_only": s.baseline_embb_only,
            "scheduler": {
                "reserved_symbols": s.scheduler.reserved_symbols,
                "dynamic_headroom": s.scheduler.dynamic_headroom,
                "dynamic_reserved_min": s.scheduler.dynamic_reserved_min,
                "dynamic_reserved_max": s.scheduler.dynamic_reserved_max,
                "dynamic_overhead_cells": s.scheduler.dynamic_overhead_cells,
                "embb_subband_rbs": s.scheduler.embb_subband_rbs,
                "urllc_bandwidth_rbs": s.scheduler.urllc_bandwidth_rbs,
                "urllc_tti_symbols": s.scheduler.urllc_tti_symbols,
                "urllc_max_retx": s.scheduler.urllc_max_retx,
                "embb_max_retx": s.scheduler.embb_max_retx,
            },
            "traffic": {
                "urllc_rate_per_ms": s.traffic.urllc_rate_per_ms,
                "urllc_payload_bits": s.traffic.urllc_payload_bits,
                "embb_full_buffer": s.traffic.embb_full_buffer,
            },
            "geometry": {
                "n_users": s.geometry.n_users,
                "snr_min_db": s.geometry.snr_min_db,
                "snr_max_db": s.geometry.snr_max_db,
                "urllc_snr_db": s.geometry.urllc_snr_db,
            },
            "corruption_severity": s.corruption_severity,
            "robustness_rate_factor": s.robustness_rate_factor,
            "n_rbs": s.n_rbs,
            "symbols_per_slot": s.symbols_per_slot,
            "coherence_bandwidth_rbs": s.coherence_bandwidth_rbs,
            "n_codeblocks_per_tb": s.n_codeblocks_per_tb,
            "t_prop_us": s.t_prop_us,
            "t_sig_us": s.t_sig_us,
            "bler_table": s.bler_table,
        }
    return yaml.safe_dump(doc, sort_keys=False)
