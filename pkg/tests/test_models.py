import math

import pytest
from hypothesis import given, strategies as st

from mosaic_dc.errors import CapacityError, ConfigError, PlanInfeasibleError
from mosaic_dc.models import (
    FREE_AIR,
    MECHANICAL,
    AnnualContract,
    FreeAirPolicy,
    LocationFactors,
    NodeType,
    PowerBreakdown,
    PriceSchedule,
    carbon_emissions,
    cooling_power,
    datacenter_objectives,
    energy_cost,
    ipcs_power,
    it_power,
    power_breakdown,
    water_usage,
)

REL = 1e-9


def power(total, p_it=None):
    return PowerBreakdown(p_it if p_it is not None else total, 0.0, 0.0, total, total, 0.0)


@pytest.fixture
def nodes():
    return {
        "a": NodeType("a", 4, 50.0, {"wl": 200.0}, {"wl": 10.0}),
        "b": NodeType("b", 8, 80.0, {"wl": 300.0}, {"wl": 30.0}),
    }


class TestItPower:
    def test_active_plus_idle(self, nodes):
        assert it_power({("wl", "a"): 1}, {"a": 2}, nodes) == pytest.approx(0.250, rel=REL)

    def test_empty(self, nodes):
        assert it_power({}, {}, nodes) == 0.0

    def test_all_active(self, nodes):
        assert it_power({("wl", "a"): 2}, {"a": 2}, nodes) == pytest.approx(0.400, rel=REL)

    def test_mixed_types(self, nodes):
        kw = it_power({("wl", "a"): 1, ("wl", "b"): 2}, {"a": 3, "b": 2}, nodes)
        assert kw == pytest.approx((200 + 2 * 50 + 2 * 300) / 1000, rel=REL)

    def test_over_inventory(self, nodes):
        with pytest.raises(CapacityError):
            it_power({("wl", "a"): 3}, {"a": 2}, nodes)

    def test_uninstalled_type(self, nodes):
        with pytest.raises(CapacityError):
            it_power({("wl", "b"): 1}, {"a": 2}, nodes)


class TestCooling:
    def test_mechanical(self):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0)
        assert cooling_power(100.0, f, 0) == pytest.approx(75.0, rel=REL)

    def test_zero_load(self):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0)
        assert cooling_power(0.0, f, 0) == 0.0

    def test_free_air(self):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0, free_air_cooling=True,
                            weather=((20.0, 5.0),) * 24)
        assert f.cooling_mode(3, FreeAirPolicy()) == FREE_AIR
        assert cooling_power(100.0, f, 3) == pytest.approx(3.75, rel=REL)

    @pytest.mark.parametrize("temp,dew", [(27.5, 5.0), (20.0, 15.5), (20.0, -9.5)])
    def test_free_air_envelope(self, temp, dew):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0, free_air_cooling=True,
                            weather=((temp, dew),) * 24)
        assert f.cooling_mode(0, FreeAirPolicy()) == MECHANICAL

    def test_envelope_edges_inclusive(self):
        policy = FreeAirPolicy()
        assert policy.allows(27.0, -9.0)
        assert policy.allows(27.0, 15.0)

    def test_weather_indexed_by_hour(self):
        weather = tuple((30.0, 5.0) if h < 12 else (10.0, 5.0) for h in range(24))
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0, free_air_cooling=True,
                            weather=weather)
        assert f.cooling_mode(6, FreeAirPolicy()) == MECHANICAL
        assert f.cooling_mode(18, FreeAirPolicy()) == FREE_AIR

    @given(st.floats(0, 1e6), st.floats(3.74, 5.73))
    def test_mechanical_is_three_crac(self, p_it, cop):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=cop)
        assert cooling_power(p_it, f, 0) == 3.0 * (p_it / cop)


class TestIpcs:
    @pytest.mark.parametrize("p,expected", [(100.0, 13.0), (0.0, 0.0), (50.0, 6.5)])
    def test_values(self, p, expected):
        assert ipcs_power(p) == pytest.approx(expected, rel=REL)

    def test_breakdown_sums(self):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0)
        pb = power_breakdown(100.0, f, 0)
        assert pb.total == pytest.approx(100.0 + 75.0 + 13.0, rel=REL)


class TestWater:
    def test_evaporative_and_blowdown(self):
        f = LocationFactors(ewif=0.0, carbon_factor=2.0, cop=4.0)
        v_e, v_b, v_s = water_usage(power(66.0), f, 1.0)
        assert v_e == pytest.approx(100.0, rel=REL)
        assert v_b == pytest.approx(25.0, rel=REL)
        assert v_s == 0.0

    def test_source_water(self):
        f = LocationFactors(ewif=1.67, carbon_factor=2.0, cop=4.0)
        _, _, v_s = water_usage(power(100.0), f, 1.0)
        assert v_s == pytest.approx(167.0, rel=REL)

    def test_free_air_has_no_tower_water(self):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0)
        v_e, v_b, v_s = water_usage(power(66.0), f, 1.0, FREE_AIR)
        assert (v_e, v_b) == (0.0, 0.0)
        assert v_s == pytest.approx(66.0)

    def test_bad_cycles(self):
        with pytest.raises(ConfigError):
            LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0, concentration_cycles=1.0)

    @given(st.floats(0, 1e5), st.floats(1.01, 20))
    def test_blowdown_balance(self, p_it, cycles):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0, concentration_cycles=cycles)
        v_e, v_b, _ = water_usage(power(p_it), f, 1.0)
        assert v_b == v_e / (cycles - 1)


class TestCarbon:
    def test_electricity(self):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0)
        m_el, _ = carbon_emissions(100.0, 0.0, 0.0, f)
        assert m_el == pytest.approx(50.0, rel=REL)

    def test_water_treatment(self):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0)
        _, m_w = carbon_emissions(0.0, 100.0, 25.0, f)
        # (125 * 550e-6 + 25 * 640e-6) / 2
        assert m_w == pytest.approx(0.042375, rel=REL)

    def test_zero(self):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0)
        assert carbon_emissions(0.0, 0.0, 0.0, f) == (0.0, 0.0)


class TestCost:
    def test_tou_with_premium(self):
        sched = PriceSchedule((0.10,) * 24, clean_premium=0.05)
        cost, brown = energy_cost(power(100.0), sched, 0, 40.0)
        assert cost == pytest.approx(12.00, rel=REL)
        assert brown == pytest.approx(60.0, rel=REL)

    def test_contract(self):
        sched = PriceSchedule((0.10,) * 24, annual_contract=AnnualContract(0.15, 100.0))
        cost, brown = energy_cost(power(100.0), sched, 0, 0.0)
        assert cost == pytest.approx(15.00, rel=REL)
        assert brown == 0.0

    def test_contract_partial(self):
        sched = PriceSchedule((0.10,) * 24, annual_contract=AnnualContract(0.15, 40.0))
        cost, brown = energy_cost(power(100.0), sched, 0, 0.0)
        assert cost == pytest.approx(40 * 0.15 + 60 * 0.10, rel=REL)
        assert brown == pytest.approx(60.0, rel=REL)

    def test_zero_energy(self):
        sched = PriceSchedule((0.10,) * 24, clean_premium=0.05)
        assert energy_cost(power(0.0), sched, 0, 0.0) == (0.0, 0.0)

    def test_tou_hour(self):
        tou = tuple(0.01 * (h + 1) for h in range(24))
        cost, _ = energy_cost(power(10.0), PriceSchedule(tou), 5, 0.0)
        assert cost == pytest.approx(10 * 0.06, rel=REL)

    def test_premium_without_offering(self):
        with pytest.raises(PlanInfeasibleError):
            energy_cost(power(100.0), PriceSchedule((0.1,) * 24), 0, 5.0)

    def test_premium_overshoot_clamped(self):
        sched = PriceSchedule((0.10,) * 24, clean_premium=0.05)
        cost, brown = energy_cost(power(100.0), sched, 0, 500.0)
        assert brown == 0.0
        assert cost == pytest.approx(10.0 + 5.0, rel=REL)

    def test_tou_must_have_24_entries(self):
        with pytest.raises(ConfigError):
            PriceSchedule((0.1,) * 23)

    @given(st.floats(0, 1e4), st.floats(0, 1e4), st.floats(0, 1e4), st.floats(0.001, 2))
    def test_premium_monotonicity(self, energy, lo, extra, premium_price):
        sched = PriceSchedule((0.10,) * 24, clean_premium=premium_price)
        c1, b1 = energy_cost(power(energy), sched, 0, lo)
        c2, b2 = energy_cost(power(energy), sched, 0, lo + extra)
        assert b2 <= b1
        assert c2 >= c1

    @given(st.floats(0, 1e4), st.floats(0, 1e4), st.floats(0, 1e4))
    def test_brown_plus_clean_is_total(self, energy, contract, premium):
        sched = PriceSchedule((0.1,) * 24, 0.05, AnnualContract(0.15, contract))
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0)
        _, pb = datacenter_objectives(energy, f, sched, 0, premium)
        assert 0.0 <= pb.e_brown
        assert pb.e_brown + pb.e_clean == pytest.approx(pb.total, rel=1e-12, abs=1e-9)


class TestComposition:
    def test_datacenter_objectives(self):
        f = LocationFactors(ewif=1.0, carbon_factor=2.0, cop=4.0)
        sched = PriceSchedule((0.1,) * 24, clean_premium=0.05)
        obj, pb = datacenter_objectives(100.0, f, sched, 0, 50.0)
        energy = 188.0
        v_e = 100.0 / 0.66
        v_b = v_e / 4
        assert pb.total == pytest.approx(energy)
        assert obj.cost == pytest.approx(energy * 0.1 + 50 * 0.05)
        assert obj.water == pytest.approx(v_e + v_b + energy)
        m_w = ((v_e + v_b) * 550e-6 + v_b * 640e-6) / 2
        assert obj.carbon == pytest.approx((energy - 50) / 2 + m_w)
        assert all(math.isfinite(v) for v in obj)

    def test_node_type_validation(self):
        with pytest.raises(ConfigError):
            NodeType("x", 4, 100.0, {"wl": 90.0}, {"wl": 1.0})
        with pytest.raises(ConfigError):
            NodeType("x", 4, 100.0, {"wl": 120.0}, {"wl": 0.0})
        with pytest.raises(ConfigError):
            LocationFactors(ewif=1.0, carbon_factor=2.0, cop=8.0)
