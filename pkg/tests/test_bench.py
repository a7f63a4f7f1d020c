import pytest
from hypothesis import given
from hypothesis import strategies as st

from fannmcu.bench import (LAYER_COLUMNS, SWEEP_COLUMNS, family_hidden_total,
                           family_net, gen_family, hidden_width, layer_sweep,
                           parse_range, rows_to_csv, sweep)
from fannmcu.memplan import BUILTIN_TARGETS, get_target
from fannmcu.model import Fixed

CL = get_target("pulp-cluster")


def test_gen_family_examples():
    assert gen_family(1, 8) == [100, 8, 8]
    assert gen_family(4, 8) == [100, 8, 8, 16, 16, 8]
    assert sum(gen_family(12, 8)[1:-1]) == 336
    assert sum(gen_family(24, 8)[1:-1]) == 1248
    with pytest.raises(ValueError):
        gen_family(0, 8)


@given(L=st.integers(1, 200), d=st.integers(1, 64))
def test_closed_form_matches_summation(L, d):
    assert family_hidden_total(L, d) == sum(hidden_width(l, d) for l in range(1, L + 1))


def test_family_net_is_deterministic_and_fixed():
    a = family_net(gen_family(3, 8))
    b = family_net(gen_family(3, 8))
    assert a.weights == b.weights and isinstance(a.format, Fixed)
    assert not isinstance(family_net(gen_family(3, 8), "float").format, Fixed)


def test_sweep_transitions_on_cluster():
    rows = sweep([CL], range(1, 25))
    strat = {r.L: r.strategy for r in rows}
    assert {strat[L] for L in range(1, 13)} == {"resident"}
    assert {strat[L] for L in range(13, 22)} == {"layer-wise DMA"}
    assert {strat[L] for L in range(22, 25)} == {"neuron-wise DMA"}
    assert [r.hidden_units for r in rows] == [family_hidden_total(L, 8) for L in range(1, 25)]


def test_sweep_speedups():
    rows = sweep([get_target("cortex-m4"), CL], [1, 12])
    by = {(r.L, r.target): r for r in rows}
    assert by[(1, "cortex-m4")].speedup_vs_first == 1.0
    assert by[(1, "cortex-m4")].speedup_vs_1core == 1.0
    assert abs(by[(1, "pulp-cluster")].speedup_vs_1core - 4.5) <= 0.7
    assert by[(12, "pulp-cluster")].speedup_vs_1core > by[(1, "pulp-cluster")].speedup_vs_1core


def test_float_sweep_skips_targets_without_fpu():
    rows = sweep([get_target("cortex-m0"), get_target("cortex-m4")], [1], dtype="float")
    assert [r.target for r in rows] == ["cortex-m4"]


def test_sweep_skips_configs_that_do_not_fit():
    rows = sweep([get_target("cortex-m0")], [1, 24])
    assert [r.L for r in rows] == [1]


def test_layer_sweep_monotone_in_inputs():
    ins = [8, 16, 32, 64, 128]
    rows = layer_sweep(list(BUILTIN_TARGETS.values()), ins, [4, 16, 64])
    groups = {}
    for r in rows:
        groups.setdefault((r["target"], r["outputs"]), []).append((r["inputs"], r["cycles"]))
    assert groups
    for pts in groups.values():
        cycles = [c for _, c in sorted(pts)]
        assert all(a < b for a, b in zip(cycles, cycles[1:]))


def test_csv_byte_reproducible():
    a = rows_to_csv(sweep(list(BUILTIN_TARGETS.values()), range(1, 6), workers=4))
    b = rows_to_csv(sweep(list(BUILTIN_TARGETS.values()), range(1, 6), workers=1))
    assert a == b
    assert a.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    grid = rows_to_csv(layer_sweep([CL], [8], [8]), LAYER_COLUMNS)
    assert grid.splitlines()[0] == ",".join(LAYER_COLUMNS)


def test_parse_range():
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("1,2,5") == [1, 2, 5]
    assert parse_range("7") == [7]
