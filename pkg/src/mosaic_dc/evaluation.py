"""Objective evaluation of distribution plans.

:class:`CompiledEpoch` packs everything an epoch needs into arrays and scores
genomes with a compiled loop.
:func:`evaluate_plan_scalar` walks the same models one datacenter at a time
and serves as the slow reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .decision import DecisionSpace, DistributionPlan, list_order, local_schedule
from .errors import OversubscriptionError, PlanInfeasibleError
from .models import (
    CRAC_MULTIPLIER,
    FREE_AIR,
    ObjectiveVector,
    datacenter_objectives,
    it_power,
)
from .scenario import Scenario

OBJECTIVE_NAMES = ("cost_usd", "carbon_kg", "water_l")


@dataclass(frozen=True)
class BatchResult:
    objectives: np.ndarray   # (B, 3) cost, carbon, water
    energy_kwh: np.ndarray   # (B, D) facility energy per datacenter
    premium_kwh: np.ndarray  # (B, D) clean premium actually bought


class CompiledEpoch:
    """Array form of one (scenario, epoch) for fast evaluation."""

    def __init__(self, scenario: Scenario, epoch: int, space: DecisionSpace | None = None):
        self.scenario = scenario
        self.epoch = epoch
        self.space = space if space is not None else DecisionSpace(scenario, epoch)
        sp = self.space
        wls = sp.workload_types
        nts = scenario.node_types
        locs = scenario.locations
        self.n_dcs = sp.n_dcs
        self.n_workloads = sp.n_workloads
        self.hours = float(scenario.epoch_hours)
        self.gar = sp.gar
        self.inventory = sp.inventory
        self.throughput = sp.throughput
        self.order = list_order(nts, wls)
        self.active_w = np.array([[nt.active_power[wl] for wl in wls] for nt in nts])  # (K, L)
        self.idle_w = np.array([nt.idle_power for nt in nts])

        hours = [loc.local_hour(epoch) for loc in locs]
        self.free_air = np.array([loc.factors.cooling_mode(h, scenario.free_air) == FREE_AIR
                                  for loc, h in zip(locs, hours)])
        cop = np.array([loc.factors.cop for loc in locs])
        self.cooling_factor = np.where(self.free_air, scenario.free_air.fan_fraction,
                                       CRAC_MULTIPLIER) / cop
        self.ewif = np.array([loc.factors.ewif for loc in locs])
        self.cf = np.array([loc.factors.carbon_factor for loc in locs])
        self.latent = np.array([loc.factors.water_latent_heat for loc in locs])
        self.cycles = np.array([loc.factors.concentration_cycles for loc in locs])
        self.potable = np.array([loc.factors.potable_intensity for loc in locs])
        self.wastewater = np.array([loc.factors.wastewater_intensity for loc in locs])
        self.tou = np.array([loc.prices.tou[h] for loc, h in zip(locs, hours)])
        self.premium_price = np.array([loc.prices.clean_premium or 0.0 for loc in locs])
        self.contract_price = np.array([
            loc.prices.annual_contract.price if loc.prices.annual_contract else 0.0
            for loc in locs])
        self.contract_rate = np.array([
            loc.prices.annual_contract.contracted_rate if loc.prices.annual_contract else 0.0
            for loc in locs])

    def evaluate(self, genomes: np.ndarray) -> BatchResult:
        """Score genomes of shape ``(B, G)``; genomes must already be repaired."""
        genomes = np.atleast_2d(np.asarray(genomes, dtype=float))
        n_share = self.space.n_share_genes
        premium_req = genomes[:, n_share:]
        if np.any(premium_req[:, ~self.space.premium_available] > 0):
            raise PlanInfeasibleError("clean premium requested at a location without an offering")

        n = genomes.shape[0]
        objectives = np.empty((n, 3))
        energy = np.empty((n, self.n_dcs))
        premium = np.empty((n, self.n_dcs))
        failed = _kernels.evaluate_batch(
            genomes, self.n_dcs, self.n_workloads, self.gar, self.inventory, self.throughput,
            self.order, self.active_w, self.idle_w, self.cooling_factor, self.hours,
            self.contract_rate, self.contract_price, self.tou, self.premium_price,
            self.free_air, self.latent, self.cycles, self.ewif, self.potable, self.wastewater,
            self.cf, objectives, energy, premium)
        if failed >= 0:
            b, d = divmod(failed, self.n_dcs)
            raise OversubscriptionError(
                f"datacenter {self.space.dc_names[d]!r} cannot serve its arrival "
                f"(plan {b} of batch)", self.epoch)
        return BatchResult(objectives, energy, premium)


def evaluate_plan(scenario: Scenario, epoch: int, plan: DistributionPlan) -> ObjectiveVector:
    """Cost, carbon and water of executing ``plan`` during ``epoch``."""
    result = CompiledEpoch(scenario, epoch).evaluate(plan.genome()[None, :])
    cost, carbon, water = result.objectives[0]
    return ObjectiveVector(float(cost), float(carbon), float(water))


def evaluate_plan_scalar(scenario: Scenario, epoch: int, plan: DistributionPlan) -> ObjectiveVector:
    """Datacenter-by-datacenter evaluation through the scalar model functions."""
    gar = scenario.demand.at(epoch)
    wls = scenario.demand.workload_types
    node_types = {nt.id: nt for nt in scenario.node_types}
    arrival = plan.arrival_rates(gar)
    cost = carbon = water = 0.0
    for d, loc in enumerate(scenario.locations):
        assignment = local_schedule(scenario.node_types, loc.inventory,
                                    {wl: float(arrival[d, j]) for j, wl in enumerate(wls)})
        p_it = it_power(assignment.active, loc.inventory, node_types)
        obj, _ = datacenter_objectives(p_it, loc.factors, loc.prices, loc.local_hour(epoch),
                                       float(plan.premium_kwh[d]), scenario.free_air,
                                       scenario.epoch_hours)
        cost += obj.cost
        carbon += obj.carbon
        water += obj.water
    return ObjectiveVector(cost, carbon, water)
