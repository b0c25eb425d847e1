import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urllcsim import frame


def test_symbol_duration_15khz_matches_slot_split():
    num = frame.Numerology(15.0, 14)
    assert frame.symbol_duration(num) == pytest.approx(1000.0 / 14.0)
    assert frame.symbol_duration(num) == pytest.approx(71.43, abs=0.01)


def test_symbol_duration_halves_when_spacing_doubles():
    d15 = frame.symbol_duration(frame.Numerology(15.0))
    d30 = frame.symbol_duration(frame.Numerology(30.0))
    d60 = frame.symbol_duration(frame.Numerology(60.0))
    assert d30 == pytest.approx(d15 / 2.0)
    assert d30 == pytest.approx(35.71, abs=0.01)
    assert d15 / d60 == pytest.approx(4.0)


def test_unsupported_spacing_rejected():
    with pytest.raises(frame.ConfigurationError):
        frame.Numerology(20.0)


def test_t_ttt_reference_configurations():
    n15 = frame.Numerology(15.0)
    n30 = frame.Numerology(30.0)
    assert frame.t_ttt(frame.TtiSpec(n15, 14)) == pytest.approx(1000.0)
    assert frame.t_ttt(frame.TtiSpec(n15, 2)) == pytest.approx(142.857, abs=0.01)
    assert frame.t_ttt(frame.TtiSpec(n15, 3)) == pytest.approx(214.286, abs=0.01)
    assert frame.t_ttt(frame.TtiSpec(n30, 14)) == pytest.approx(500.0)


@given(
    st.sampled_from([15.0, 30.0, 60.0, 120.0]),
    st.integers(min_value=1, max_value=13),
)
def test_t_ttt_monotone_in_symbols_and_spacing(scs, n_symbols):
    num = frame.Numerology(scs)
    assert frame.t_ttt(frame.TtiSpec(num, n_symbols + 1)) > frame.t_ttt(
        frame.TtiSpec(num, n_symbols)
    )
    if scs < 120.0:
        denser = frame.Numerology(scs * 2.0)
        assert frame.t_ttt(frame.TtiSpec(denser, n_symbols)) < frame.t_ttt(
            frame.TtiSpec(num, n_symbols)
        )


def _proportional_split_oracle(n_cells: int, cb_bits: list[int]) -> list[int]:
    """Cells per codeblock by cumulative rounding (independent of the
    implementation's loop)."""
    total_bits = sum(cb_bits)
    bounds = [0]
    cum = 0
    for i, b in enumerate(cb_bits):
        cum += b
        bounds.append(n_cells if i == len(cb_bits) - 1 else round(n_cells * cum / total_bits))
    return [bounds[i + 1] - bounds[i] for i in range(len(cb_bits))]


def _alloc(grid, user=0, symbols=None, rbs=None):
    symbols = symbols if symbols is not None else frame.data_symbols(grid)
    rbs = rbs if rbs is not None else range(grid.n_rbs)
    return frame.Allocation(user, [(s, r) for s in symbols for r in rbs])


def test_map_codeblocks_three_equal_blocks_over_twelve_symbols():
    grid = frame.slot_grid(14, 6)
    alloc = _alloc(grid)  # 12 data symbols x 6 rbs
    maps = frame.map_codeblocks(720, grid, alloc, bits_per_cell=10, max_codeblock_bits=240)
    assert len(maps) == 3
    oracle = _proportional_split_oracle(72, [240, 240, 240])
    assert [len(m.cells) for m in maps] == oracle == [24, 24, 24]
    # sequential in time: each block spans 4 whole symbols
    for m, first_sym in zip(maps, (2, 6, 10)):
        assert sorted({s for s, _ in m.cells}) == list(range(first_sym, first_sym + 4))


def test_map_codeblocks_single_block_fills_allocation():
    grid = frame.slot_grid(14, 4)
    alloc = _alloc(grid)
    maps = frame.map_codeblocks(100, grid, alloc, bits_per_cell=8, max_codeblock_bits=4096)
    assert len(maps) == 1
    assert sorted(maps[0].cells) == sorted(alloc.cells)


def test_map_codeblocks_zero_bits_is_empty():
    grid = frame.slot_grid(14, 4)
    alloc = _alloc(grid)
    assert frame.map_codeblocks(0, grid, alloc) == []
    assert grid.tag_counts()["embb"] == 0


def test_map_codeblocks_overflow_rejected():
    grid = frame.slot_grid(14, 2)
    alloc = _alloc(grid)
    capacity = len(alloc.cells) * 8
    with pytest.raises(frame.SchedulingError):
        frame.map_codeblocks(capacity + 1, grid, alloc, bits_per_cell=8)


@given(st.integers(min_value=1, max_value=5), st.integers(min_value=1, max_value=2000))
@settings(max_examples=50)
def test_map_codeblocks_matches_proportional_oracle(n_cb, tb_bits):
    grid = frame.slot_grid(14, 10)
    alloc = _alloc(grid)
    max_cb = -(-tb_bits // n_cb)
    try:
        maps = frame.map_codeblocks(tb_bits, grid, alloc, bits_per_cell=20, max_codeblock_bits=max_cb)
    except frame.SchedulingError:
        return
    base, extra = divmod(tb_bits, len(maps))
    cb_bits = [base + (1 if i < extra else 0) for i in range(len(maps))]
    assert [len(m.cells) for m in maps] == _proportional_split_oracle(len(alloc.cells), cb_bits)
    # cell lists are disjoint and cover the allocation
    all_cells = [c for m in maps for c in m.cells]
    assert len(all_cells) == len(set(all_cells)) == len(alloc.cells)


def test_puncture_affects_only_overlapping_codeblock():
    grid = frame.slot_grid(14, 6)
    alloc = _alloc(grid)
    maps = frame.map_codeblocks(720, grid, alloc, bits_per_cell=10, max_codeblock_bits=240)
    # third codeblock spans symbols 10..13
    mask, affected = frame.puncture(grid, [11], packet_id=5)
    assert affected == [maps[2].codeblock_index]
    assert len(mask) == grid.n_rbs
    assert grid.tag_counts()["urllc"] == grid.n_rbs


def test_puncture_affected_set_matches_codeblock_map_oracle():
    grid = frame.slot_grid(14, 6)
    alloc = _alloc(grid)
    maps = frame.map_codeblocks(720, grid, alloc, bits_per_cell=10, max_codeblock_bits=240)
    symbols = [6, 10]
    oracle = sorted(
        m.codeblock_index for m in maps if any(s in symbols for s, _ in m.cells)
    )
    _, affected = frame.puncture(grid, symbols)
    assert affected == oracle == [maps[1].codeblock_index, maps[2].codeblock_index]


def test_puncture_empty_set_is_noop():
    grid = frame.slot_grid(14, 6)
    before = grid.tag.copy()
    mask, affected = frame.puncture(grid, [])
    assert affected == [] and len(mask) == 0
    assert np.array_equal(grid.tag, before)


def test_puncture_rejects_control_and_dmrs_cells():
    grid = frame.slot_grid(14, 6)
    mask, affected = frame.puncture(grid, [0, 1, 5])
    # symbols 0 and 1 hold control/DMRS: those cells are left untouched
    assert grid.tag_counts()["control"] == 6
    assert grid.tag_counts()["dmrs"] == 6
    assert grid.tag_counts()["urllc"] == 6
    assert len(mask) == 6


def test_puncture_conservation_and_unpuncture_identity():
    rng = np.random.default_rng(3)
    grid = frame.slot_grid(14, 12)
    alloc = _alloc(grid, user=4)
    frame.map_codeblocks(1000, grid, alloc, bits_per_cell=8, max_codeblock_bits=350)
    tag0, owner0, cb0 = grid.tag.copy(), grid.owner.copy(), grid.cb.copy()
    total = grid.n_cells
    for _ in range(20):
        symbols = rng.choice(14, size=rng.integers(0, 5), replace=False)
        mask, _ = frame.puncture(grid, symbols, packet_id=9)
        counts = grid.tag_counts()
        assert sum(counts.values()) == total
        frame.unpuncture(grid, mask)
        assert np.array_equal(grid.tag, tag0)
        assert np.array_equal(grid.owner, owner0)
        assert np.array_equal(grid.cb, cb0)


def test_urllc_spans_full_frequency_axis():
    grid = frame.slot_grid(14, 100)
    alloc = _alloc(grid)
    frame.map_codeblocks(7000, grid, alloc, bits_per_cell=8, max_codeblock_bits=3000)
    frame.puncture(grid, [7], packet_id=1)
    assert (grid.tag[7, :] == frame.URLLC).all()


def test_assign_urllc_requires_free_symbol():
    grid = frame.slot_grid(14, 8)
    grid.mark_reserved([5])
    grid.assign_urllc(5, packet_id=2)
    assert (grid.tag[5] == frame.URLLC).all()
    alloc = _alloc(grid, symbols=[6])
    frame.map_codeblocks(10, grid, alloc, bits_per_cell=8)
    with pytest.raises(frame.SchedulingError):
        grid.assign_urllc(6, packet_id=3)
