"""Time-frequency resource model.

Numerologies and TTIs give the timing backbone (symbol durations in the
15/30/60/120 kHz doubling family), while :class:`ResourceGrid` tracks
per-(symbol, RB) occupancy of one slot: eMBB codeblocks, URLLC packets,
reservations, control and DMRS cells.  URLLC bursts overwrite whole
symbols across the full bandwidth via :func:`puncture`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SUPPORTED_SPACINGS_KHZ = (15.0, 30.0, 60.0, 120.0)

# cell occupancy tags
EMPTY = 0
EMBB = 1
URLLC = 2
RESERVED = 3
DMRS = 4
CONTROL = 5

TAG_NAMES = {
    EMPTY: "empty",
    EMBB: "embb",
    URLLC: "urllc",
    RESERVED: "reserved",
    DMRS: "dmrs",
    CONTROL: "control",
}


class ConfigurationError(ValueError):
    """Invalid numerology / frame configuration."""


class SchedulingError(ValueError):
    """Allocation cannot hold the requested transport block."""


@dataclass(frozen=True)
class Numerology:
    """OFDM numerology with CP overhead folded into a uniform symbol length."""

    subcarrier_spacing_khz: float = 15.0
    symbols_per_slot: int = 14

    def __post_init__(self):
        if self.subcarrier_spacing_khz not in SUPPORTED_SPACINGS_KHZ:
            raise ConfigurationError(
                f"unsupported subcarrier spacing {self.subcarrier_spacing_khz} kHz; "
                f"supported: {SUPPORTED_SPACINGS_KHZ}"
            )
        if self.symbols_per_slot < 1:
            raise ConfigurationError("symbols_per_slot must be >= 1")

    @property
    def slot_duration_us(self) -> float:
        # one slot is 1 ms at 15 kHz and halves with each doubling of spacing
        return 1000.0 * 15.0 / self.subcarrier_spacing_khz

    @property
    def symbol_duration_us(self) -> float:
        return self.slot_duration_us / self.symbols_per_slot


def symbol_duration(numerology: Numerology) -> float:
    """Symbol duration in microseconds; doubling the spacing halves it."""
    return numerology.symbol_duration_us


@dataclass(frozen=True)
class TtiSpec:
    """A transmission time interval of `n_symbols` contiguous symbols."""

    numerology: Numerology
    n_symbols: int

    def __post_init__(self):
        if self.n_symbols < 1:
            raise ConfigurationError("n_symbols must be >= 1")


def t_ttt(spec: TtiSpec) -> float:
    """Time-to-transmit of one TTI in microseconds."""
    return spec.n_symbols * symbol_duration(spec.numerology)


@dataclass
class Allocation:
    """Scheduled cells for one transport block, ordered time-first."""

    user: int
    cells: list[tuple[int, int]]


@dataclass
class CodeBlockMap:
    transport_block_id: int
    codeblock_index: int
    cells: list[tuple[int, int]]


@dataclass
class PunctureMask:
    """Prior owners of cells overwritten by a URLLC burst."""

    symbols: np.ndarray
    rbs: np.ndarray
    prev_tag: np.ndarray
    prev_owner: np.ndarray
    prev_cb: np.ndarray

    def __len__(self) -> int:
        return int(self.symbols.size)


class ResourceGrid:
    """One slot of (symbol x RB) cells, each carrying exactly one tag.

    Disjointness is structural: a cell is a single entry of the tag array.
    `owner` holds the user id for eMBB cells or the packet id for URLLC
    cells; `cb` holds the slot-unique codeblock id for eMBB data cells.
    """

    def __init__(self, n_symbols: int = 14, n_rbs: int = 100):
        if n_symbols < 1 or n_rbs < 1:
            raise ConfigurationError("grid dimensions must be positive")
        self.n_symbols = n_symbols
        self.n_rbs = n_rbs
        self.tag = np.full((n_symbols, n_rbs), EMPTY, dtype=np.int8)
        self.owner = np.full((n_symbols, n_rbs), -1, dtype=np.int32)
        self.cb = np.full((n_symbols, n_rbs), -1, dtype=np.int32)

    @property
    def n_cells(self) -> int:
        return self.n_symbols * self.n_rbs

    def tag_counts(self) -> dict[str, int]:
        binned = np.bincount(self.tag.ravel(), minlength=len(TAG_NAMES))
        counts = {name: int(binned[t]) for t, name in TAG_NAMES.items()}
        assert sum(counts.values()) == self.n_cells
        return counts

    def mark_control(self, symbol: int) -> None:
        self._check_symbol(symbol)
        self.tag[symbol, :] = CONTROL

    def mark_dmrs(self, symbol: int) -> None:
        self._check_symbol(symbol)
        self.tag[symbol, :] = DMRS

    def mark_reserved(self, symbols) -> None:
        for s in symbols:
            self._check_symbol(s)
            self.tag[s, :] = RESERVED

    def assign_urllc(self, symbol: int, packet_id: int) -> None:
        """Place a URLLC packet on a reserved or empty symbol (no puncture)."""
        self._check_symbol(symbol)
        row = self.tag[symbol, :]
        if np.any((row != RESERVED) & (row != EMPTY)):
            raise SchedulingError(f"symbol {symbol} is not free for URLLC")
        self.tag[symbol, :] = URLLC
        self.owner[symbol, :] = packet_id

    def _check_symbol(self, symbol: int) -> None:
        if not 0 <= symbol < self.n_symbols:
            raise SchedulingError(f"symbol {symbol} outside slot of {self.n_symbols}")


def slot_grid(
    n_symbols: int = 14,
    n_rbs: int = 100,
    n_control_symbols: int = 1,
    n_dmrs_symbols: int = 1,
) -> ResourceGrid:
    """Grid with the front-loaded layout: control, then DMRS, then data."""
    grid = ResourceGrid(n_symbols, n_rbs)
    for s in range(n_control_symbols):
        grid.mark_control(s)
    for s in range(n_control_symbols, n_control_symbols + n_dmrs_symbols):
        grid.mark_dmrs(s)
    return grid


def data_symbols(grid: ResourceGrid) -> list[int]:
    """Symbols with no control/DMRS cells (usable for data or URLLC)."""
    special = (grid.tag == CONTROL) | (grid.tag == DMRS)
    return [s for s in range(grid.n_symbols) if not special[s].any()]


def map_codeblocks(
    tb_size_bits: int,
    grid: ResourceGrid,
    allocation: Allocation,
    bits_per_cell: int = 8,
    transport_block_id: int = 0,
    max_codeblock_bits: int = 2048,
    cb_index_base: int = 0,
) -> list[CodeBlockMap]:
    """Segment a transport block into codeblocks and tag its cells.

    Codeblocks are laid out sequentially over the allocation's time-first
    cell order; each receives a share of cells proportional to its coded
    length.  Raises :class:`SchedulingError` if the allocation is too small.
    """
    if tb_size_bits < 0:
        raise SchedulingError("tb_size_bits must be >= 0")
    if tb_size_bits == 0:
        return []
    cells = sorted(allocation.cells)
    capacity = len(cells) * bits_per_cell
    if capacity < tb_size_bits:
        raise SchedulingError(
            f"allocation holds {capacity} coded bits < transport block {tb_size_bits}"
        )
    for (s, r) in cells:
        if grid.tag[s, r] != EMPTY:
            raise SchedulingError(f"cell ({s}, {r}) is not empty")

    n_cb = -(-tb_size_bits // max_codeblock_bits)
    base, extra = divmod(tb_size_bits, n_cb)
    cb_bits = [base + (1 if i < extra else 0) for i in range(n_cb)]

    maps: list[CodeBlockMap] = []
    total = len(cells)
    cum_bits = 0
    start = 0
    for i, bits in enumerate(cb_bits):
        cum_bits += bits
        stop = total if i == n_cb - 1 else round(total * cum_bits / tb_size_bits)
        cb_cells = cells[start:stop]
        start = stop
        cb_id = cb_index_base + i
        for (s, r) in cb_cells:
            grid.tag[s, r] = EMBB
            grid.owner[s, r] = allocation.user
            grid.cb[s, r] = cb_id
        maps.append(CodeBlockMap(transport_block_id, cb_id, cb_cells))
    return maps


def puncture(
    grid: ResourceGrid, urllc_symbols, packet_id: int = 0
) -> tuple[PunctureMask, list[int]]:
    """Overwrite whole symbols with a URLLC packet.

    Control and DMRS cells are left untouched; everything else in the
    punctured symbols (eMBB, reserved, empty) is re-tagged URLLC.  Returns
    the mask of prior owners and the list of codeblock ids that lost cells.
    """
    symbols = sorted(set(int(s) for s in urllc_symbols))
    for s in symbols:
        grid._check_symbol(s)
    if not symbols:
        empty = np.empty(0, dtype=np.int32)
        return PunctureMask(empty, empty, empty.astype(np.int8), empty, empty), []

    rb_range = np.arange(grid.n_rbs, dtype=np.int32)
    sym_parts, rb_parts, tag_parts, owner_parts, cb_parts = [], [], [], [], []
    affected: set[int] = set()
    for s in symbols:
        tag_row = grid.tag[s]
        keep = (tag_row != CONTROL) & (tag_row != DMRS)
        rbs = rb_range[keep]
        tags = tag_row[keep]
        owners = grid.owner[s, keep]
        cbs = grid.cb[s, keep]
        sym_parts.append(np.full(rbs.size, s, dtype=np.int32))
        rb_parts.append(rbs)
        tag_parts.append(tags.copy())
        owner_parts.append(owners.copy())
        cb_parts.append(cbs.copy())
        embb_cbs = cbs[tags == EMBB]
        affected.update(np.unique(embb_cbs[embb_cbs >= 0]).tolist())
        grid.tag[s, keep] = URLLC
        grid.owner[s, keep] = packet_id
        grid.cb[s, keep] = -1
    mask = PunctureMask(
        symbols=np.concatenate(sym_parts),
        rbs=np.concatenate(rb_parts),
        prev_tag=np.concatenate(tag_parts),
        prev_owner=np.concatenate(owner_parts),
        prev_cb=np.concatenate(cb_parts),
    )
    return mask, sorted(affected)


def unpuncture(grid: ResourceGrid, mask: PunctureMask) -> None:
    """Restore the grid cells recorded in a puncture mask."""
    grid.tag[mask.symbols, mask.rbs] = mask.prev_tag
    grid.owner[mask.symbols, mask.rbs] = mask.prev_owner
    grid.cb[mask.symbols, mask.rbs] = mask.prev_cb
