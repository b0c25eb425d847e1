"""Slot-driven downlink simulator multiplexing eMBB and URLLC.

One slot = 14 symbols (numerology 15 kHz): symbol 0 carries control,
symbol 1 DMRS, symbols 2..13 data.  Full-buffer eMBB users share 6-RB
subbands under proportional-fair scheduling with chase-combining HARQ;
URLLC packets arrive as a Poisson stream and are served by one of four
schemes (baseline slot-boundary scheduling, instant preemption, or
semi-static/dynamic symbol reservation).  Coexistence policies decide
how punctured eMBB transport blocks are recovered.

Block error outcomes come from the calibrated effective-SNR -> BLER
tables; per-slot fading, MCS choice, HARQ soft buffers, latency and
resource accounting are simulated explicitly.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import frame
from .channel import BlerTable
from .latency import LatencyRecorder
from .linksim import SVC_MCS, mcs_bits_per_re

SYSTEM_SCHEMA = "system-sim-v1"

SCHEMES = ("baseline", "instant", "semi_static_reservation", "dynamic_reservation")
POLICIES = ("lte_retx", "preemption_indicator", "codeblock_retx", "robustness")

MCS_ORDER = ("qpsk13", "qpsk23", "qam16_12", "qam16_34")


class SystemConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TrafficModel:
    urllc_rate_per_ms: float = 1.0
    urllc_payload_bits: int = 32
    embb_full_buffer: bool = True

    def __post_init__(self):
        if self.urllc_rate_per_ms < 0:
            raise SystemConfigError("urllc_rate_per_ms must be >= 0")
        if self.urllc_payload_bits < 1:
            raise SystemConfigError("urllc_payload_bits must be >= 1")


@dataclass(frozen=True)
class SchedulerConfig:
    scheme: str = "instant"
    reserved_symbols: int = 4
    dynamic_headroom: int = 4
    dynamic_reserved_min: int = 1
    dynamic_reserved_max: int = 6
    dynamic_overhead_cells: int = 1
    embb_subband_rbs: int = 6
    urllc_bandwidth_rbs: int = 100
    urllc_tti_symbols: int = 1
    urllc_max_retx: int = 2
    embb_max_retx: int = 4

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise SystemConfigError(f"unknown scheme {self.scheme!r}; options {SCHEMES}")
        if not 1 <= self.reserved_symbols <= 12:
            raise SystemConfigError("reserved_symbols must stay within the data symbols")
        if not 1 <= self.dynamic_reserved_min <= self.dynamic_reserved_max <= 12:
            raise SystemConfigError("dynamic reservation bounds must satisfy 1 <= min <= max <= 12")


@dataclass(frozen=True)
class CoexistencePolicy:
    mode: str = "lte_retx"
    embb_bler_target: float = 1e-2
    retx_unit: str = "transport_block"
    # interference weight of unindicated punctures; inf means a punctured
    # attempt cannot be soft-combined at all (no flush-out indicator)
    corruption_severity: float = math.inf
    # share of the nominal transport block kept as data under robustness
    # (the rest becomes parity that lifts the operating point to the target)
    robustness_rate_factor: float = 0.85

    def __post_init__(self):
        if self.mode not in POLICIES:
            raise SystemConfigError(f"unknown policy {self.mode!r}; options {POLICIES}")
        if self.mode == "robustness":
            if self.embb_bler_target != 1e-3 or self.retx_unit != "transport_block":
                raise SystemConfigError(
                    "robustness implies embb_bler_target=1e-3 and transport_block retransmission"
                )
        elif self.mode == "codeblock_retx":
            if self.retx_unit != "codeblock":
                raise SystemConfigError("codeblock_retx implies retx_unit='codeblock'")
        elif self.retx_unit != "transport_block":
            raise SystemConfigError(f"{self.mode} implies transport_block retransmission")
        if not 0 < self.embb_bler_target < 1:
            raise SystemConfigError("embb_bler_target must be in (0, 1)")
        if not 0 < self.robustness_rate_factor <= 1:
            raise SystemConfigError("robustness_rate_factor must be in (0, 1]")

    @property
    def mcs_selection_target(self) -> float:
        """Robustness keeps the nominal MCS grid and reaches its BLER
        target through added parity rather than MCS down-selection."""
        return 1e-2 if self.mode == "robustness" else self.embb_bler_target


@dataclass(frozen=True)
class GeometryConfig:
    n_users: int = 10
    snr_min_db: float = 5.0
    snr_max_db: float = 20.0
    urllc_snr_db: float = 5.0

    def __post_init__(self):
        if self.n_users < 1:
            raise SystemConfigError("need at least one eMBB user")
        if self.snr_max_db < self.snr_min_db:
            raise SystemConfigError("snr_max_db must be >= snr_min_db")


@dataclass(frozen=True)
class SystemConfig:
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    policy: CoexistencePolicy = field(default_factory=CoexistencePolicy)
    traffic: TrafficModel = field(default_factory=TrafficModel)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    n_rbs: int = 100
    symbols_per_slot: int = 14
    coherence_bandwidth_rbs: float = 25.0
    n_codeblocks_per_tb: int = 3
    t_prop_us: float = 3.0
    t_sig_us: float = 0.0
    pf_window_slots: int = 50

    @property
    def n_tiles(self) -> int:
        return max(1, math.ceil(self.n_rbs / self.coherence_bandwidth_rbs))


@dataclass
class HarqProcess:
    """Retransmission state of one eMBB transport block."""

    tb_id: int
    user: int
    subband: int
    mcs: str
    tb_bits: int
    cb_bits: list[int]
    attempt: int = 0
    soft_snr: list[float] = field(default_factory=list)  # per codeblock, linear
    cb_passed: list[bool] = field(default_factory=list)
    flagged_low_mcs: bool = False

    def __post_init__(self):
        if not self.soft_snr:
            self.soft_snr = [0.0] * len(self.cb_bits)
        if not self.cb_passed:
            self.cb_passed = [False] * len(self.cb_bits)


@dataclass
class UrllcPacket:
    packet_id: int
    arrival_us: float
    attempt: int = 0
    soft_snr: float = 0.0
    ready_us: float = 0.0

    def __post_init__(self):
        if self.ready_us < self.arrival_us:
            self.ready_us = self.arrival_us


@dataclass
class PreemptionRecord:
    slot: int
    symbol: int
    packet_id: int
    affected_codeblocks: list[tuple[int, int]]  # (tb_id, codeblock index)


@dataclass
class SystemResult:
    scheme: str
    policy: str
    seed: int
    n_slots: int
    embb_bits_delivered: float
    urllc: LatencyRecorder
    preemption_count: int
    reserved_cells: int
    reserved_wasted_cells: int
    max_embb_attempts: int
    max_urllc_attempts: int

    @property
    def embb_throughput_bps(self) -> float:
        return self.embb_bits_delivered / (self.n_slots * 1e-3)

    @property
    def wasted_reserved_fraction(self) -> float:
        if self.reserved_cells == 0:
            return 0.0
        return self.reserved_wasted_cells / self.reserved_cells

    def csv_row(self) -> str:
        mean = self.urllc.mean_us()
        p99 = self.urllc.percentile_us(99)
        return (
            f"{self.scheme},{self.policy},{self.seed},{self.embb_throughput_bps!r},"
            f"{mean!r},{p99!r},{self.urllc.error_rate!r},"
            f"{self.wasted_reserved_fraction!r},{self.preemption_count}"
        )


SYSTEM_CSV_HEADER = (
    "scheme,policy,seed,embb_throughput_bps,urllc_mean_latency_us,"
    "urllc_p99_latency_us,urllc_per,wasted_reserved_fraction,preemption_count"
)


def results_to_csv(results) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {SYSTEM_SCHEMA}\n")
    buf.write(SYSTEM_CSV_HEADER + "\n")
    for r in results:
        buf.write(r.csv_row() + "\n")
    return buf.getvalue()


def puncture_snr_penalty(
    snr_linear: float,
    punctured_fraction: float,
    indicator_known: bool,
    severity: float = math.inf,
) -> float:
    """Effective SNR of a codeblock attempt that lost `punctured_fraction`
    of its cells to a URLLC burst.

    With a preemption indicator the receiver excises the lost cells, so
    only their share of the energy is gone.  Without one the corrupted
    cells pollute the attempt in proportion to the interference weight;
    at the default (infinite) severity an unindicated punctured attempt
    contributes nothing to soft combining.
    """
    if punctured_fraction < 0:
        raise SystemConfigError("punctured_fraction must be >= 0")
    f = min(punctured_fraction, 1.0)
    if f == 0.0:
        return snr_linear
    if f >= 1.0:
        return 0.0
    if indicator_known:
        return snr_linear * (1.0 - f)
    if math.isinf(severity):
        return 0.0
    return snr_linear * (1.0 - f) / (1.0 + severity * f * snr_linear)


# redundancy cost of correcting unindicated corrupted cells as errors,
# relative to indicator-aided erasure filling (1.0 = erasure-equivalent,
# 2.0 = hard-decision worst case; soft decoders sit near the low end)
ROBUST_ERROR_COST = 1.2


def robust_puncture_snr(snr_linear: float, punctured_fraction: float) -> float:
    """Effective SNR under the robustness policy: the extra parity
    corrects the corrupted cells as errors rather than erasures."""
    f = min(max(punctured_fraction, 0.0), 1.0)
    return snr_linear * max(1.0 - ROBUST_ERROR_COST * f, 0.0)


class SystemSimulator:
    """One deterministic single-cell simulation run."""

    def __init__(self, config: SystemConfig, bler_table: BlerTable, seed: int):
        self.cfg = config
        self.table = bler_table
        self.seed = seed
        streams = np.random.SeedSequence(entropy=seed, spawn_key=(917,)).spawn(4)
        self.rng_geometry = np.random.default_rng(streams[0])
        self.rng_fades = np.random.default_rng(streams[1])
        self.rng_traffic = np.random.default_rng(streams[2])
        self.rng_bler = np.random.default_rng(streams[3])

        geo = config.geometry
        self.user_snr_db = self.rng_geometry.uniform(geo.snr_min_db, geo.snr_max_db, geo.n_users)
        self.user_snr_lin = 10.0 ** (self.user_snr_db / 10.0)
        self.urllc_snr_lin = 10.0 ** (geo.urllc_snr_db / 10.0)

        sched = config.scheduler
        self.n_subbands = config.n_rbs // sched.embb_subband_rbs
        self.subband_tile = np.array(
            [
                min(
                    config.n_tiles - 1,
                    int(sb * sched.embb_subband_rbs // config.coherence_bandwidth_rbs),
                )
                for sb in range(self.n_subbands)
            ]
        )
        self.data_symbols = list(range(2, config.symbols_per_slot))
        self.symbol_us = 1000.0 / config.symbols_per_slot
        self.bits_per_re = np.array([mcs_bits_per_re(m) for m in MCS_ORDER])

        # URLLC spreading: the payload splits into 12-bit short codewords;
        # the packet stretches over the full bandwidth of its symbol.
        self.urllc_codewords = -(-config.traffic.urllc_payload_bits // 12)
        packet_res = config.n_rbs * 12 * sched.urllc_tti_symbols
        self.urllc_rep_gain = packet_res / (42.0 * self.urllc_codewords)

        self.avg_thr = np.full(geo.n_users, 1.0)
        self.harq: list[HarqProcess] = []
        self.urllc_queue: list[UrllcPacket] = []
        self.prev_slot_arrivals = 0
        self.next_tb_id = 0
        self.next_packet_id = 0

        self.urllc_stats = LatencyRecorder()
        self.embb_bits_delivered = 0.0
        self.preemption_count = 0
        self.reserved_cells = 0
        self.reserved_wasted_cells = 0
        self.max_embb_attempts = 0
        self.max_urllc_attempts = 0
        self.event_log: list[PreemptionRecord] = []
        self._thresholds: dict[tuple[int, float], np.ndarray] = {}
        self._boost_cache: dict[tuple[str, int], float] = {}
        # per-slot work buffers
        self.n_tiles = config.n_tiles
        self._grid = frame.slot_grid(config.symbols_per_slot, config.n_rbs)
        self._head_tag = self._grid.tag.copy()
        self._sb_cols = [
            np.arange(sb * sched.embb_subband_rbs, (sb + 1) * sched.embb_subband_rbs)
            for sb in range(self.n_subbands)
        ]
        self._owner_row = np.empty(config.n_rbs, dtype=np.int32)
        self._tb_row = np.empty(config.n_rbs, dtype=np.int32)
        self._span_cache: dict[int, list[tuple[int, int]]] = {}

    # -- helpers ---------------------------------------------------------

    def _cb_bits(self, tb_bits: int) -> list[int]:
        n_cb = self.cfg.n_codeblocks_per_tb
        base, extra = divmod(tb_bits, n_cb)
        return [base + (1 if i < extra else 0) for i in range(n_cb)]

    def _cb_symbol_spans(self, n_data_syms: int) -> list[tuple[int, int]]:
        """Codeblock ranges over the TB's data symbols: sequential in
        time, shares proportional to the coded length."""
        got = self._span_cache.get(n_data_syms)
        if got is not None:
            return got
        n_cb = self.cfg.n_codeblocks_per_tb
        spans = []
        start = 0
        for i in range(n_cb):
            stop = round((i + 1) * n_data_syms / n_cb)
            spans.append((start, stop))
            start = stop
        self._span_cache[n_data_syms] = spans
        return spans

    def _snr_threshold(self, mcs: str, cb_len: int, target: float) -> float:
        lo, hi = -10.0, 45.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if self.table.bler(mid, mcs, cb_len) > target:
                lo = mid
            else:
                hi = mid
        return hi

    def _mcs_thresholds(self, n_data_syms: int, target: float) -> np.ndarray:
        """Per-MCS minimum SNR (dB) meeting the BLER target for the
        codeblock lengths this symbol budget produces."""
        key = (n_data_syms, target)
        got = self._thresholds.get(key)
        if got is not None:
            return got
        res = self.cfg.scheduler.embb_subband_rbs * 12 * n_data_syms
        out = np.empty(len(MCS_ORDER))
        for i, mcs in enumerate(MCS_ORDER):
            cb_len = max(1, int(res * mcs_bits_per_re(mcs)) // self.cfg.n_codeblocks_per_tb)
            out[i] = self._snr_threshold(mcs, cb_len, target)
        self._thresholds[key] = out
        return out

    def _parity_boost_db(self, mcs: str, cb_len: int) -> float:
        """Decode-margin equivalent of the robustness parity: the SNR
        distance between the nominal and the robust BLER targets."""
        key = (mcs, cb_len)
        got = self._boost_cache.get(key)
        if got is not None:
            return got
        boost = self._snr_threshold(mcs, cb_len, self.cfg.policy.embb_bler_target) - self._snr_threshold(
            mcs, cb_len, self.cfg.policy.mcs_selection_target
        )
        boost = max(boost, 0.0)
        self._boost_cache[key] = boost
        return boost

    def _reserved_positions(self, count: int) -> list[int]:
        data = self.data_symbols
        n = len(data)
        count = min(count, n)
        return [data[(j * n) // count] for j in range(count)]

    # -- slot step -------------------------------------------------------

    def step_slot(self, slot: int) -> dict:
        cfg = self.cfg
        sched = cfg.scheduler
        policy = cfg.policy
        slot_t0 = slot * 1000.0
        sym_us = self.symbol_us
        grid = self._grid
        grid.tag[:] = self._head_tag
        grid.owner.fill(-1)
        grid.cb.fill(-1)

        # 1. reservation pattern
        if sched.scheme == "semi_static_reservation":
            reserved = self._reserved_positions(sched.reserved_symbols)
        elif sched.scheme == "dynamic_reservation":
            count = min(
                max(self.prev_slot_arrivals + sched.dynamic_headroom, sched.dynamic_reserved_min),
                sched.dynamic_reserved_max,
            )
            reserved = self._reserved_positions(count)
        else:
            reserved = []
        grid.mark_reserved(reserved)
        overhead_cells = (
            sched.dynamic_overhead_cells if sched.scheme == "dynamic_reservation" else 0
        )

        # 2. baseline URLLC claims the head of the slot (next-slot-boundary
        # scheduling: only packets signalled before the slot started)
        baseline_served: list[tuple[int, UrllcPacket]] = []
        if sched.scheme == "baseline":
            for pkt in list(self.urllc_queue):
                if pkt.ready_us + cfg.t_sig_us > slot_t0:
                    continue
                taken = {s for s, _ in baseline_served}
                sym = next((s for s in self.data_symbols if s not in taken), None)
                if sym is None:
                    break
                baseline_served.append((sym, pkt))
                self.urllc_queue.remove(pkt)

        blocked = set(reserved) | {s for s, _ in baseline_served}
        embb_syms = [s for s in self.data_symbols if s not in blocked]
        n_data_syms = len(embb_syms)

        # 3. fading and effective SNR per (user, subband)
        fades = self.rng_fades.exponential(1.0, (cfg.geometry.n_users, self.n_tiles))
        snr_lin = self.user_snr_lin[:, None] * fades[:, self.subband_tile]
        snr_db = 10.0 * np.log10(np.maximum(snr_lin, 1e-12))

        # 4. HARQ retransmissions occupy their subband first
        retx_by_subband: dict[int, HarqProcess] = {}
        if n_data_syms > 0 and cfg.traffic.embb_full_buffer:
            for proc in self.harq:
                if proc.subband not in retx_by_subband:
                    retx_by_subband[proc.subband] = proc
            self.harq = [p for p in self.harq if retx_by_subband.get(p.subband) is not p]

        # 5. proportional-fair assignment, one TB per subband
        transmissions: list[tuple[HarqProcess, list[int], bool]] = []
        scheduled_bits = np.zeros(cfg.geometry.n_users)
        if n_data_syms > 0 and cfg.traffic.embb_full_buffer:
            thr = self._mcs_thresholds(n_data_syms, policy.mcs_selection_target)
            ok = snr_db[:, :, None] >= thr[None, None, :]
            mcs_idx = np.where(ok.any(axis=2), ok.shape[2] - 1 - ok[:, :, ::-1].argmax(axis=2), 0)
            flagged = ~ok.any(axis=2)
            rates = self.bits_per_re[mcs_idx]
            metric = rates / np.maximum(self.avg_thr, 1e-9)[:, None]
            res_per_tb = sched.embb_subband_rbs * 12 * n_data_syms
            data_share = policy.robustness_rate_factor if policy.mode == "robustness" else 1.0
            for sb in range(self.n_subbands):
                retx = retx_by_subband.get(sb)
                if retx is not None:
                    retx.attempt += 1
                    cbs = (
                        [i for i, passed in enumerate(retx.cb_passed) if not passed]
                        if policy.retx_unit == "codeblock"
                        else list(range(len(retx.cb_bits)))
                    )
                    transmissions.append((retx, cbs, True))
                    continue
                u = int(np.argmax(metric[:, sb]))
                mcs = MCS_ORDER[int(mcs_idx[u, sb])]
                tb_bits = int(res_per_tb * mcs_bits_per_re(mcs) * data_share)
                if tb_bits <= 0:
                    continue
                proc = HarqProcess(
                    tb_id=self.next_tb_id,
                    user=u,
                    subband=sb,
                    mcs=mcs,
                    tb_bits=tb_bits,
                    cb_bits=self._cb_bits(tb_bits),
                    attempt=1,
                    flagged_low_mcs=bool(flagged[u, sb]),
                )
                self.next_tb_id += 1
                transmissions.append((proc, list(range(len(proc.cb_bits))), False))
                scheduled_bits[u] += tb_bits
        w = 1.0 / cfg.pf_window_slots
        self.avg_thr = (1.0 - w) * self.avg_thr + w * scheduled_bits

        # 6. tag eMBB cells (one fancy-index write for the full-TB bulk)
        spans = self._cb_symbol_spans(n_data_syms)
        full_cols: list[np.ndarray] = []
        owner_row = self._owner_row
        tb_row = self._tb_row
        for proc, cbs, is_retx in transmissions:
            rb0 = proc.subband * sched.embb_subband_rbs
            rb1 = rb0 + sched.embb_subband_rbs
            if is_retx and policy.retx_unit == "codeblock":
                sym_ids = sorted(
                    {embb_syms[i] for c in cbs for i in range(spans[c][0], spans[c][1])}
                )
                idx = np.ix_(sym_ids, self._sb_cols[proc.subband])
                grid.tag[idx] = frame.EMBB
                grid.owner[idx] = proc.user
                grid.cb[idx] = proc.tb_id
            else:
                full_cols.append(self._sb_cols[proc.subband])
                owner_row[rb0:rb1] = proc.user
                tb_row[rb0:rb1] = proc.tb_id
        if full_cols and embb_syms:
            cols = np.concatenate(full_cols)
            idx = np.ix_(embb_syms, cols)
            grid.tag[idx] = frame.EMBB
            grid.owner[idx] = owner_row[cols][None, :]
            grid.cb[idx] = tb_row[cols][None, :]  # slot-unique block id

        # 7. URLLC arrivals of this slot
        n_arr = int(self.rng_traffic.poisson(cfg.traffic.urllc_rate_per_ms))
        if n_arr:
            times = np.sort(self.rng_traffic.uniform(0.0, 1000.0, n_arr)) + slot_t0
            for t_us in times:
                self.urllc_queue.append(UrllcPacket(self.next_packet_id, float(t_us)))
                self.next_packet_id += 1
        self.prev_slot_arrivals = n_arr

        # 8. serve the queue according to the scheme
        punctured: list[tuple[int, UrllcPacket]] = []
        served_reserved: list[tuple[int, UrllcPacket]] = []
        if sched.scheme == "instant":
            for pkt in sorted(self.urllc_queue, key=lambda p: (p.ready_us, p.packet_id)):
                taken = {s for s, _ in punctured}
                sym = next(
                    (
                        s
                        for s in self.data_symbols
                        if s not in taken and slot_t0 + s * sym_us >= pkt.ready_us
                    ),
                    None,
                )
                if sym is None:
                    continue
                punctured.append((sym, pkt))
                self.urllc_queue.remove(pkt)
        elif sched.scheme in ("semi_static_reservation", "dynamic_reservation"):
            for pkt in sorted(self.urllc_queue, key=lambda p: (p.ready_us, p.packet_id)):
                taken = {s for s, _ in served_reserved}
                sym = next(
                    (
                        s
                        for s in sorted(reserved)
                        if s not in taken and slot_t0 + s * sym_us >= pkt.ready_us
                    ),
                    None,
                )
                if sym is None:
                    continue
                served_reserved.append((sym, pkt))
                self.urllc_queue.remove(pkt)

        # 9. apply punctures; find affected codeblocks per transport block
        affected_by_tb: dict[int, dict[int, float]] = {}
        for sym, pkt in punctured:
            frame.puncture(grid, [sym], packet_id=pkt.packet_id)
            affected: list[tuple[int, int]] = []
            if sym in embb_syms:
                di = embb_syms.index(sym)
                for proc, cbs, is_retx in transmissions:
                    for ci, (lo, hi) in enumerate(spans):
                        if lo <= di < hi and hi > lo:
                            affected_by_tb.setdefault(proc.tb_id, {}).setdefault(ci, 0.0)
                            affected_by_tb[proc.tb_id][ci] += 1.0 / (hi - lo)
                            affected.append((proc.tb_id, ci))
            self.preemption_count += 1
            self.event_log.append(PreemptionRecord(slot, sym, pkt.packet_id, affected))
        for sym, pkt in served_reserved:
            grid.assign_urllc(sym, pkt.packet_id)
        for sym, pkt in baseline_served:
            grid.assign_urllc(sym, pkt.packet_id)

        # 10. URLLC decode attempts in time order
        for sym, pkt in sorted(
            punctured + served_reserved + baseline_served, key=lambda x: (x[0], x[1].packet_id)
        ):
            self._urllc_attempt(pkt, slot_t0 + sym * sym_us)

        # 11. eMBB decode outcomes (soft-buffer update, grouped BLER lookup,
        # then one uniform draw per evaluated codeblock in a fixed order)
        indicator = policy.mode in ("preemption_indicator", "codeblock_retx")
        robust = policy.mode == "robustness"
        evaluations: list[tuple[HarqProcess, int]] = []
        eff_db_list: list[float] = []
        for proc, cbs, is_retx in transmissions:
            hit = affected_by_tb.get(proc.tb_id, {})
            sb_snr = float(snr_lin[proc.user, proc.subband])
            for ci in cbs:
                if proc.cb_passed[ci]:
                    continue
                frac = min(hit.get(ci, 0.0), 1.0)
                if robust:
                    attempt_snr = robust_puncture_snr(sb_snr, frac)
                    boost = self._parity_boost_db(proc.mcs, max(1, proc.cb_bits[ci]))
                else:
                    attempt_snr = puncture_snr_penalty(
                        sb_snr, frac, indicator, policy.corruption_severity
                    )
                    boost = 0.0
                proc.soft_snr[ci] += attempt_snr
                evaluations.append((proc, ci))
                eff_db_list.append(10.0 * math.log10(max(proc.soft_snr[ci], 1e-30)) + boost)
        if evaluations:
            eff_db = np.asarray(eff_db_list)
            p_err = np.empty(len(evaluations))
            groups: dict[tuple[str, int], list[int]] = {}
            for i, (proc, ci) in enumerate(evaluations):
                groups.setdefault((proc.mcs, max(1, proc.cb_bits[ci])), []).append(i)
            for (mcs, cb_len), idx in groups.items():
                p_err[idx] = self.table.bler_many(eff_db[idx], mcs, cb_len)
            draws = self.rng_bler.random(len(evaluations))
            for i, (proc, ci) in enumerate(evaluations):
                if draws[i] >= p_err[i]:
                    proc.cb_passed[ci] = True
        for proc, cbs, is_retx in transmissions:
            self.max_embb_attempts = max(self.max_embb_attempts, proc.attempt)
            if all(proc.cb_passed):
                self.embb_bits_delivered += proc.tb_bits
            elif proc.attempt <= sched.embb_max_retx:
                self.harq.append(proc)
            # else: dropped after exhausting the HARQ budget

        # 12. accounting and conservation
        counts = grid.tag_counts()
        assert sum(counts.values()) == grid.n_cells, "grid tag conservation violated"
        self.reserved_cells += len(reserved) * cfg.n_rbs
        self.reserved_wasted_cells += counts["reserved"]
        counts["dynamic_overhead"] = overhead_cells
        return counts

    # -- internals -------------------------------------------------------

    def _urllc_attempt(self, pkt: UrllcPacket, tx_start_us: float) -> None:
        cfg = self.cfg
        pkt.attempt += 1
        self.max_urllc_attempts = max(self.max_urllc_attempts, pkt.attempt)
        fade = float(self.rng_fades.exponential(1.0))
        pkt.soft_snr += self.urllc_snr_lin * fade * self.urllc_rep_gain
        eff_db = 10.0 * math.log10(max(pkt.soft_snr, 1e-12))
        p_cw = self.table.bler(eff_db, SVC_MCS, 12)
        ok = True
        for _ in range(self.urllc_codewords):
            if self.rng_bler.random() < p_cw:
                ok = False
        tx_end = tx_start_us + cfg.scheduler.urllc_tti_symbols * self.symbol_us
        if ok:
            # one symbol of decode processing plus propagation
            done = tx_end + self.symbol_us + cfg.t_prop_us
            self.urllc_stats.record_success(pkt.arrival_us, done)
        elif pkt.attempt > cfg.scheduler.urllc_max_retx:
            self.urllc_stats.record_failure()
        else:
            # NACK lands one mini-slot after reception; rejoin the queue
            pkt.ready_us = tx_end + self.symbol_us
            self.urllc_queue.append(pkt)

    def run(self, n_slots: int) -> SystemResult:
        for slot in range(n_slots):
            self.step_slot(slot)
        return SystemResult(
            scheme=self.cfg.scheduler.scheme,
            policy=self.cfg.policy.mode,
            seed=self.seed,
            n_slots=n_slots,
            embb_bits_delivered=self.embb_bits_delivered,
            urllc=self.urllc_stats,
            preemption_count=self.preemption_count,
            reserved_cells=self.reserved_cells,
            reserved_wasted_cells=self.reserved_wasted_cells,
            max_embb_attempts=self.max_embb_attempts,
            max_urllc_attempts=self.max_urllc_attempts,
        )


def _campaign_worker(args) -> SystemResult:
    config, table, seed, n_slots = args
    return SystemSimulator(config, table, seed).run(n_slots)


def run_system_campaign(
    config: SystemConfig, bler_table: BlerTable, seeds, n_slots: int, workers: int = 1
) -> list[SystemResult]:
    """Independent deterministic runs, one per seed; results are merged in
    seed-list order, so the worker count cannot change the output."""
    if workers <= 1:
        return [SystemSimulator(config, bler_table, int(s)).run(n_slots) for s in seeds]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_campaign_worker, (config, bler_table, int(s), n_slots)) for s in seeds
        ]
        return [f.result() for f in futures]
