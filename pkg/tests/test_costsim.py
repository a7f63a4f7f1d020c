from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fannmcu.bench import family_net, gen_family
from fannmcu.costsim import (CSV_COLUMNS, CostReport, format_table,
                             reports_to_csv, simulate, speedup)
from fannmcu.errors import InconsistentPlan
from fannmcu.memplan import Strategy, get_target, plan_placement
from fannmcu.memplan.placement import STRATEGY_ORDER
from fannmcu.model import ActivationKind as K
from fannmcu.model import build_mlp, expected_weight_count
from fannmcu.model.fixtures import APP_A, app_net

from conftest import quantized

M4 = get_target("cortex-m4")
CL = get_target("pulp-cluster")
CL1 = CL.with_cores(1)


def zeros(sizes, fixed=True):
    net = build_mlp(sizes, K.SIGMOID, 0.5, [0.0] * expected_weight_count(sizes))
    return quantized(net) if fixed else net


def per_inf(net, target, include_activation=True, **kw):
    plan = plan_placement(net, target, **kw)
    return simulate(net, target, plan, include_activation=include_activation).per_inference()


@pytest.mark.parametrize("fixed,ratio", [(True, Fraction(7, 5)), (False, Fraction(8, 5))])
def test_single_core_compute_ratio(fixed, ratio):
    net = zeros([100, 64, 32, 8], fixed)
    m4 = per_inf(net, M4)
    pulp = per_inf(net, CL1)
    assert Fraction(m4.compute_cycles, pulp.compute_cycles) == ratio


def test_parts_sum_and_time():
    net = zeros(gen_family(14, 8))
    r = simulate(net, CL, plan_placement(net, CL), 10)
    assert r.total_cycles == r.compute_cycles + r.activation_cycles + r.dma_cycles + r.overhead_cycles
    assert r.time == r.total_cycles / CL.frequency
    with pytest.raises(ValueError):
        CostReport("x", "resident", 1, 1, 1, 1, 1, 1, 5, 1.0, 1.0, 1.0)


def test_speedup_of_report_with_itself():
    r = per_inf(zeros([10, 10]), M4)
    assert speedup(r, r) == 1.0


def test_wide_layer_parallel_speedup():
    net = zeros([100, 128, 8])
    s = speedup(per_inf(net, CL1), per_inf(net, CL))
    assert 7.0 <= s <= 8.0


def test_smallest_family_member_speedup():
    net = zeros(gen_family(1, 8))
    s = speedup(per_inf(net, CL1, False), per_inf(net, CL, False))
    assert abs(s - 4.5) <= 0.7


@settings(max_examples=60, deadline=None)
@given(sizes=st.lists(st.integers(1, 200), min_size=2, max_size=4), cores=st.integers(1, 16),
       act=st.booleans())
def test_speedup_never_exceeds_cores(sizes, cores, act):
    net = zeros(sizes, fixed=False)
    t = CL.with_cores(cores)
    try:
        one = per_inf(net, CL1, act)
        many = per_inf(net, t, act)
    except Exception:
        return  # does not fit
    assert speedup(one, many) <= cores + 1e-12


def test_speedup_monotone_in_resident_family():
    prev = 0.0
    for L in range(1, 13):
        net = family_net(gen_family(L, 8))
        plan = plan_placement(net, CL, 4, 100)
        assert plan.strategy is Strategy.RESIDENT
        s = speedup(simulate(net, CL1, plan, include_activation=False).per_inference(),
                    simulate(net, CL, plan, include_activation=False).per_inference())
        assert s >= prev
        prev = s


@pytest.mark.parametrize("L", [1, 3, 6, 9])
def test_dma_never_helps(L):
    net = zeros(gen_family(L, 8))
    totals = [simulate(net, CL, plan_placement(net, CL, force=s)).total_cycles for s in STRATEGY_ORDER]
    assert totals[0] <= min(totals[1:])


@settings(max_examples=40, deadline=None)
@given(sizes=st.lists(st.integers(1, 60), min_size=2, max_size=4), cores=st.integers(1, 8))
def test_dma_never_helps_property(sizes, cores):
    net = zeros(sizes, fixed=False)
    t = CL.with_cores(cores)
    totals = []
    for s in STRATEGY_ORDER:
        try:
            totals.append(simulate(net, t, plan_placement(net, t, force=s)).total_cycles)
        except Exception:
            return
    assert totals[0] <= min(totals[1:])


def test_energy_affine_in_n():
    net = quantized(app_net(APP_A))
    plan = plan_placement(net, CL)
    e = [simulate(net, CL, plan, n).energy for n in (1, 2, 10, 1000)]
    slope = (e[1] - e[0])
    assert e[2] == pytest.approx(e[0] + 9 * slope, rel=1e-12)
    assert e[3] == pytest.approx(e[0] + 999 * slope, rel=1e-12)
    assert slope == pytest.approx(49.43e-6, rel=0.30)
    overhead = e[0] - slope
    assert overhead == pytest.approx(CL.overhead_power_mw() * 1e-3 * 1.2e-3, rel=1e-9)


def test_overhead_once_per_batch():
    net = zeros([20, 20])
    plan = plan_placement(net, CL)
    r1, r5 = simulate(net, CL, plan, 1), simulate(net, CL, plan, 5)
    assert r1.overhead_cycles == r5.overhead_cycles == CL.cluster_overhead_cycles
    assert simulate(net, M4, plan_placement(net, M4), 3).overhead_cycles == 0


def test_flash_multiplier():
    net = zeros(APP_A)
    flash = per_inf(net, M4)
    assert flash.compute_cycles == round(103800 * 7 * 1.15)


def test_app_a_end_to_end():
    net = quantized(app_net(APP_A))
    m4 = simulate(net, M4, plan_placement(net, M4))
    cl = simulate(net, CL, plan_placement(net, CL))
    assert m4.time == pytest.approx(17.6e-3, rel=0.30)
    assert cl.per_inference().time == pytest.approx(0.8e-3, rel=0.30)
    assert cl.overhead_time == pytest.approx(1.2e-3)
    assert speedup(m4.per_inference(), cl.per_inference()) == pytest.approx(22, rel=0.30)


def test_activation_share_of_example_like_net():
    # activation cost is calibrated to roughly an eighth of the total
    net = build_mlp([5, 100, 100, 3], K.SIGMOID_SYMMETRIC, 0.5, [0.0] * expected_weight_count([5, 100, 100, 3]))
    r = per_inf(net, M4)
    share = r.activation_cycles / r.total_cycles
    assert 0.08 < share < 0.16


def test_inconsistent_plans():
    net = zeros([10, 10])
    with pytest.raises(InconsistentPlan):
        simulate(net, M4, plan_placement(net, CL))
    with pytest.raises(InconsistentPlan):
        simulate(zeros([10, 12]), CL, plan_placement(net, CL))
    with pytest.raises(InconsistentPlan):
        simulate(zeros([10, 10], fixed=False), get_target("cortex-m0"),
                 plan_placement(net, get_target("cortex-m0")))


def test_csv_and_table():
    net = zeros([10, 10])
    reps = [simulate(net, M4, plan_placement(net, M4)), simulate(net, CL, plan_placement(net, CL), 3)]
    text = reports_to_csv(reps)
    lines = text.splitlines()
    assert lines[0].split(",") == CSV_COLUMNS and len(lines) == 3
    table = format_table(reps)
    assert "cortex-m4" in table and "pulp-cluster" in table
