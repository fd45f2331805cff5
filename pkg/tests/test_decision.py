import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import small_scenario
from mosaic_dc.decision import (
    DecisionSpace,
    DistributionPlan,
    WorkloadDemand,
    conservation_check,
    list_order,
    local_schedule,
    schedule_counts,
)
from mosaic_dc.errors import OversubscriptionError
from mosaic_dc.models import NodeType


def plan(shares, premium=(0.0, 0.0)):
    return DistributionPlan(np.array(shares, dtype=float).reshape(len(premium), -1),
                            np.array(premium, dtype=float))


class TestRepair:
    @pytest.mark.parametrize("shares,expected", [
        ((0.2, 0.2), (0.5, 0.5)),
        ((0.0, 0.0), (0.5, 0.5)),
        ((1.0, 0.0), (1.0, 0.0)),
        ((-1.0, 3.0), (0.0, 1.0)),
        ((np.nan, 1.0), (0.0, 1.0)),
    ])
    def test_share_normalization(self, two_dc, shares, expected):
        space = DecisionSpace(two_dc, 0)
        out = space.repair(np.array(list(shares) + [0.0, 0.0]))
        assert out[:2] == pytest.approx(expected, abs=1e-15)

    def test_premium_clamped(self, two_dc):
        space = DecisionSpace(two_dc, 0)
        out = space.repair(np.array([0.5, 0.5, 1e9, 7.0]))
        assert out[2] == space.premium_ub[0]
        assert out[3] == 0.0  # no premium offered at dc1
        assert space.repair(np.array([0.5, 0.5, -3.0, 0.0]))[2] == 0.0
        assert space.repair(np.array([0.5, 0.5, np.inf, 0.0]))[2] == space.premium_ub[0]
        assert space.repair(np.array([0.5, 0.5, np.nan, 0.0]))[2] == 0.0

    def test_premium_floor(self):
        sc = small_scenario(floors={"dc0": 1.5})
        space = DecisionSpace(sc, 0)
        assert space.repair(np.array([0.5, 0.5, 0.0, 0.0]))[2] == 1.5

    def test_capacity_shift(self):
        # dc0 can hold at most 9 of its 10 nodes' worth of work
        sc = small_scenario(gar=300.0)
        space = DecisionSpace(sc, 0)
        out = space.repair(np.array([1.0, 0.0, 0.0, 0.0]))
        assert out[:2].sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(space.utilization(out[:2].reshape(2, 1)) <= space.util_limit + 1e-12)

    def test_oversubscribed_space(self):
        with pytest.raises(OversubscriptionError) as info:
            DecisionSpace(small_scenario(gar=499.0), 0)
        assert info.value.epoch == 0

    def test_gene_names(self, two_dc):
        assert DecisionSpace(two_dc, 0).gene_names() == [
            "share:dc0:wl", "share:dc1:wl", "premium_kwh:dc0", "premium_kwh:dc1"]

    @settings(max_examples=200, deadline=None)
    @given(arrays(np.float64, 4, elements=st.floats(-10, 1e4, allow_nan=False)))
    def test_idempotent_and_conserving(self, x):
        sc = small_scenario(gar=350.0)
        space = DecisionSpace(sc, 0)
        once = space.repair(x)
        assert np.array_equal(space.repair(once), once)
        assert conservation_check(space.to_plan(once), sc.demand, 0)
        assert np.all(once >= space.lower) and np.all(once <= space.upper)


class TestBundledRepair:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(0, 23))
    def test_repaired_plans_schedule(self, bundled, seed, epoch):
        space = DecisionSpace(bundled, epoch)
        rng = np.random.default_rng(seed)
        x = space.repair(rng.exponential(size=space.genome_size) ** 3)
        shares = x[:space.n_share_genes].reshape(space.n_dcs, -1)
        _, residual = schedule_counts(shares * space.gar, space.inventory, space.throughput,
                                      list_order(bundled.node_types, space.workload_types))
        assert np.all(residual == 0.0)
        assert np.array_equal(space.repair(x), x)


class TestLocalSchedule:
    def test_ceiling(self):
        nt = NodeType("a", 4, 10.0, {"w": 20.0}, {"w": 50.0})
        out = local_schedule([nt], {"a": 5}, {"w": 100.0})
        assert out.active_nodes("a") == 2
        assert out.idle_nodes("a") == 3

    def test_partial_node_rounds_up(self):
        nt = NodeType("a", 4, 10.0, {"w": 20.0}, {"w": 50.0})
        assert local_schedule([nt], {"a": 5}, {"w": 101.0}).active_nodes("a") == 3

    def test_zero_arrival(self):
        nt = NodeType("a", 4, 10.0, {"w": 20.0}, {"w": 50.0})
        out = local_schedule([nt], {"a": 5}, {"w": 0.0})
        assert out.active_nodes("a") == 0 and out.idle_nodes("a") == 5

    def test_cheapest_first(self):
        cheap = NodeType("z", 4, 10.0, {"w": 20.0}, {"w": 10.0})   # 2 Wh per job
        dear = NodeType("a", 4, 10.0, {"w": 40.0}, {"w": 10.0})    # 4 Wh per job
        out = local_schedule([dear, cheap], {"a": 5, "z": 5}, {"w": 30.0})
        assert out.active == {("w", "z"): 3}

    def test_spill_to_next_type(self):
        cheap = NodeType("z", 4, 10.0, {"w": 20.0}, {"w": 10.0})
        dear = NodeType("a", 4, 10.0, {"w": 40.0}, {"w": 10.0})
        out = local_schedule([cheap, dear], {"a": 5, "z": 2}, {"w": 45.0})
        assert out.active == {("w", "z"): 2, ("w", "a"): 3}

    def test_tie_broken_by_id(self):
        b = NodeType("b", 4, 10.0, {"w": 20.0}, {"w": 10.0})
        a = NodeType("a", 4, 10.0, {"w": 20.0}, {"w": 10.0})
        assert local_schedule([b, a], {"a": 5, "b": 5}, {"w": 10.0}).active == {("w", "a"): 1}

    def test_oversubscribed(self):
        nt = NodeType("a", 4, 10.0, {"w": 20.0}, {"w": 50.0})
        with pytest.raises(OversubscriptionError):
            local_schedule([nt], {"a": 2}, {"w": 101.0})

    @given(st.permutations([0, 1, 2]), st.floats(0, 300), st.floats(0, 300))
    def test_permutation_invariant(self, perm, a1, a2):
        nts = [NodeType("x", 4, 10.0, {"p": 30.0, "q": 20.0}, {"p": 10.0, "q": 5.0}),
               NodeType("y", 4, 12.0, {"p": 50.0, "q": 25.0}, {"p": 20.0, "q": 10.0}),
               NodeType("z", 4, 15.0, {"p": 90.0, "q": 60.0}, {"p": 40.0, "q": 20.0})]
        inv = {"x": 10, "y": 10, "z": 5}
        arrival = {"p": a1, "q": a2}
        try:
            ref = local_schedule(nts, inv, arrival)
        except OversubscriptionError:
            return
        out = local_schedule([nts[i] for i in perm], inv, arrival)
        assert {k: v for k, v in out.active.items() if v} == {k: v for k, v in ref.active.items() if v}
        for wl, rate in arrival.items():
            served = sum(n * next(nt for nt in nts if nt.id == k).throughput[wl]
                         for (w, k), n in out.active.items() if w == wl)
            # ceil(x - 1e-9) may drop a sliver of at most 1e-9 node
            assert served >= rate - 1e-9 * 40.0


class TestConservation:
    demand = WorkloadDemand(("w",), ((100.0,),))

    def test_exact(self):
        assert conservation_check(plan([0.6, 0.4]), self.demand, 0)

    def test_violated(self):
        assert not conservation_check(plan([0.6, 0.5]), self.demand, 0)

    def test_zero_demand(self):
        assert conservation_check(plan([0.0, 0.0]), WorkloadDemand(("w",), ((0.0,),)), 0)

    def test_relative_tolerance(self):
        assert conservation_check(plan([0.6, 0.4 + 1e-12]), self.demand, 0)
        assert not conservation_check(plan([0.6, 0.4 + 1e-6]), self.demand, 0)

    def test_genome_round_trip(self):
        p = plan([0.25, 0.75], premium=(3.0, 0.0))
        assert DistributionPlan.from_genome(p.genome(), 2, 1) == p
