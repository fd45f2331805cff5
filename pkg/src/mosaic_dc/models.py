"""Power, water, carbon and energy-cost models for a single datacenter.

Every function here is pure. The scalar forms mirror the model equations
one-to-one; :mod:`mosaic_dc.evaluation` composes the same formulas over
numpy arrays for the optimizers.

Units used throughout:

* node powers in W, facility powers in kW, energies in kWh
* water volumes in liters, carbon in kg CO2, money in USD
* carbon factor in kWh generated per kg CO2 emitted, so ``kWh / CF -> kg``
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import CapacityError, ConfigError, PlanInfeasibleError

logger = logging.getLogger(__name__)

HOURS_PER_DAY = 24
CRAC_MULTIPLIER = 3.0  # CRAC + chiller + support, each equal to CRAC power
IPCS_FRACTION = 0.13

MECHANICAL = "mechanical"
FREE_AIR = "free-air"


@dataclass(frozen=True)
class NodeType:
    """A server SKU with fixed-P-state power and throughput per workload type."""

    id: str
    core_count: int
    idle_power: float
    active_power: Mapping[str, float]
    throughput: Mapping[str, float]

    def __post_init__(self):
        if not self.idle_power > 0:
            raise ConfigError(f"node type {self.id!r}: idle_power must be > 0")
        if set(self.active_power) != set(self.throughput):
            raise ConfigError(
                f"node type {self.id!r}: active_power and throughput cover different workload types"
            )
        for wl, ap in self.active_power.items():
            if ap < self.idle_power:
                raise ConfigError(f"node type {self.id!r}: active_power[{wl!r}] < idle_power")
        for wl, thr in self.throughput.items():
            if not thr > 0:
                raise ConfigError(f"node type {self.id!r}: throughput[{wl!r}] must be > 0")

    def energy_per_job(self, workload: str) -> float:
        """Watt-hours spent per job of ``workload`` on a busy node."""
        return self.active_power[workload] / self.throughput[workload]


@dataclass(frozen=True)
class FreeAirPolicy:
    """When free-air cooling may run and what it costs.

    Free-air is feasible when the outdoor temperature is at most ``max_temp_c``
    and the dew point lies in ``[min_dew_point_c, max_dew_point_c]``. While it
    runs, cooling draws ``fan_fraction`` of the CRAC power and the cooling
    tower consumes no water.
    """

    max_temp_c: float = 27.0
    min_dew_point_c: float = -9.0
    max_dew_point_c: float = 15.0
    fan_fraction: float = 0.15

    def allows(self, outdoor_temp_c: float, dew_point_c: float) -> bool:
        return (
            outdoor_temp_c <= self.max_temp_c
            and self.min_dew_point_c <= dew_point_c <= self.max_dew_point_c
        )


@dataclass(frozen=True)
class LocationFactors:
    """Environmental constants of one site.

    ``weather`` holds one ``(outdoor_temp_c, dew_point_c)`` pair per local hour.
    """

    ewif: float
    carbon_factor: float
    cop: float
    water_latent_heat: float = 0.66
    concentration_cycles: float = 5.0
    potable_intensity: float = 550e-6
    wastewater_intensity: float = 640e-6
    free_air_cooling: bool = False
    weather: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.ewif < 0:
            raise ConfigError("ewif must be >= 0")
        if not self.carbon_factor > 0:
            raise ConfigError("carbon_factor must be > 0")
        if not 3.0 <= self.cop <= 7.0:
            raise ConfigError(f"cop {self.cop} outside [3.0, 7.0]")
        if not self.concentration_cycles > 1:
            raise ConfigError("concentration_cycles must be > 1")
        if not self.water_latent_heat > 0:
            raise ConfigError("water_latent_heat must be > 0")

    def cooling_mode(self, hour: int, policy: FreeAirPolicy) -> str:
        if not self.free_air_cooling or not self.weather:
            return MECHANICAL
        temp, dew = self.weather[hour % len(self.weather)]
        return FREE_AIR if policy.allows(temp, dew) else MECHANICAL


@dataclass(frozen=True)
class AnnualContract:
    price: float
    contracted_rate: float  # kWh per epoch


@dataclass(frozen=True)
class PriceSchedule:
    """Hourly TOU tariff plus the optional clean-energy offerings of a site."""

    tou: tuple[float, ...]
    clean_premium: float | None = None
    annual_contract: AnnualContract | None = None

    def __post_init__(self):
        if len(self.tou) != HOURS_PER_DAY:
            raise ConfigError(f"tou must have {HOURS_PER_DAY} entries, got {len(self.tou)}")
        if any(p < 0 for p in self.tou):
            raise ConfigError("tou prices must be >= 0")
        if self.clean_premium is not None and self.clean_premium < 0:
            raise ConfigError("clean_premium must be >= 0")
        if self.annual_contract is not None and (
            self.annual_contract.price < 0 or self.annual_contract.contracted_rate < 0
        ):
            raise ConfigError("annual contract price and rate must be >= 0")


@dataclass(frozen=True)
class PowerBreakdown:
    p_it: float
    p_cooling: float
    p_ipcs: float
    total: float
    e_brown: float
    e_clean: float


@dataclass(frozen=True)
class ObjectiveVector:
    cost: float
    carbon: float
    water: float

    def as_array(self) -> np.ndarray:
        return np.array([self.cost, self.carbon, self.water])

    def __iter__(self):
        return iter((self.cost, self.carbon, self.water))


def it_power(
    active_assignment: Mapping[tuple[str, str], int],
    inventory: Mapping[str, int],
    node_types: Mapping[str, NodeType],
) -> float:
    """IT load in kW: busy nodes at their active power, the rest idle.

    ``active_assignment`` maps ``(workload_type, node_type)`` to a count of
    active nodes.
    """
    busy: dict[str, int] = {}
    watts = 0.0
    for (wl, nt), count in active_assignment.items():
        if count < 0:
            raise CapacityError(f"negative active count for ({wl!r}, {nt!r})")
        if count == 0:
            continue
        if nt not in inventory:
            raise CapacityError(f"node type {nt!r} not installed")
        busy[nt] = busy.get(nt, 0) + count
        watts += count * node_types[nt].active_power[wl]
    for nt, installed in inventory.items():
        idle = installed - busy.get(nt, 0)
        if idle < 0:
            raise CapacityError(
                f"{busy[nt]} active {nt!r} nodes exceed the {installed} installed"
            )
        watts += idle * node_types[nt].idle_power
    return watts / 1000.0


def crac_power(p_it, cop):
    return p_it / cop


def cooling_power(p_it: float, factors: LocationFactors, epoch: int,
                  policy: FreeAirPolicy = FreeAirPolicy()) -> float:
    """Cooling power in kW for the cooling mode active at local hour ``epoch``."""
    if p_it < 0:
        raise ValueError("p_it must be >= 0")
    crac = crac_power(p_it, factors.cop)
    if factors.cooling_mode(epoch, policy) == FREE_AIR:
        return policy.fan_fraction * crac
    return CRAC_MULTIPLIER * crac


def ipcs_power(p_it):
    return IPCS_FRACTION * p_it


def power_breakdown(p_it: float, factors: LocationFactors, epoch: int,
                    policy: FreeAirPolicy = FreeAirPolicy(),
                    epoch_hours: float = 1.0) -> PowerBreakdown:
    """All facility power components; energy is booked as brown until priced."""
    p_cool = cooling_power(p_it, factors, epoch, policy)
    p_ipcs = ipcs_power(p_it)
    total = p_it + p_cool + p_ipcs
    return PowerBreakdown(p_it, p_cool, p_ipcs, total, total * epoch_hours, 0.0)


def water_usage(power: PowerBreakdown, factors: LocationFactors, epoch_hours: float,
                cooling_mode: str = MECHANICAL) -> tuple[float, float, float]:
    """Evaporative, blowdown and source water in liters for one epoch."""
    if not epoch_hours > 0:
        raise ValueError("epoch_hours must be > 0")
    if not factors.concentration_cycles > 1:
        raise ConfigError("concentration_cycles must be > 1")
    if cooling_mode == FREE_AIR:
        v_e = v_b = 0.0
    else:
        e_it = power.p_it * epoch_hours
        v_e = e_it / factors.water_latent_heat
        v_b = v_e / (factors.concentration_cycles - 1)
    v_s = power.total * epoch_hours * factors.ewif
    return v_e, v_b, v_s


def carbon_emissions(e_brown: float, v_e: float, v_b: float,
                     factors: LocationFactors) -> tuple[float, float]:
    """Electricity-based and water-treatment-based carbon in kg."""
    cf = factors.carbon_factor
    m_electricity = e_brown / cf
    m_water = ((v_b + v_e) * factors.potable_intensity + v_b * factors.wastewater_intensity) / cf
    return m_electricity, m_water


def energy_cost(power: PowerBreakdown, schedule: PriceSchedule, epoch: int,
                clean_premium_kwh: float, epoch_hours: float = 1.0) -> tuple[float, float]:
    """Bill one epoch of energy and return ``(cost_usd, e_brown_kwh)``.

    Contracted energy is consumed first at the contract price. The rest is
    billed at the TOU price of local hour ``epoch``; up to
    ``clean_premium_kwh`` of it additionally pays the clean premium.
    Contract and premium energy are clean, everything else is brown.
    """
    if clean_premium_kwh < 0:
        raise PlanInfeasibleError("clean_premium_kwh must be >= 0")
    energy = power.total * epoch_hours
    if schedule.clean_premium is None and clean_premium_kwh > 0:
        raise PlanInfeasibleError("clean premium requested at a location without an offering")
    cost = 0.0
    contracted = 0.0
    if schedule.annual_contract is not None:
        contracted = min(energy, schedule.annual_contract.contracted_rate)
        cost += contracted * schedule.annual_contract.price
    remainder = energy - contracted
    cost += remainder * schedule.tou[epoch % HOURS_PER_DAY]
    premium = clean_premium_kwh
    if premium > remainder:
        logger.debug("clamping clean premium %.6g kWh to purchasable %.6g kWh", premium, remainder)
        premium = remainder
    if premium > 0:
        cost += premium * schedule.clean_premium
    e_brown = remainder - premium
    return cost, e_brown


def datacenter_objectives(p_it: float, factors: LocationFactors, schedule: PriceSchedule,
                          hour: int, clean_premium_kwh: float,
                          policy: FreeAirPolicy = FreeAirPolicy(),
                          epoch_hours: float = 1.0) -> tuple[ObjectiveVector, PowerBreakdown]:
    """Scalar composition of every model for one datacenter and epoch.

    Kept deliberately naive; the test-suite uses it as the reference for the
    vectorized evaluator.
    """
    mode = factors.cooling_mode(hour, policy)
    power = power_breakdown(p_it, factors, hour, policy, epoch_hours)
    cost, e_brown = energy_cost(power, schedule, hour, clean_premium_kwh, epoch_hours)
    energy = power.total * epoch_hours
    power = PowerBreakdown(power.p_it, power.p_cooling, power.p_ipcs, power.total,
                           e_brown, energy - e_brown)
    v_e, v_b, v_s = water_usage(power, factors, epoch_hours, mode)
    m_el, m_w = carbon_emissions(e_brown, v_e, v_b, factors)
    water = v_e + v_b + v_s
    if not all(math.isfinite(v) for v in (cost, m_el + m_w, water)):
        raise ValueError("non-finite objective")
    return ObjectiveVector(cost, m_el + m_w, water), power
