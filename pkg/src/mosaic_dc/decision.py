"""Decision space of one epoch: genome layout, repair, and tier-2 list scheduling.

A genome is a flat float vector::

    [share[0, 0], ..., share[0, L-1], share[1, 0], ..., share[D-1, L-1],
     premium_kwh[0], ..., premium_kwh[D-1]]

``share[d, j]`` is the fraction of workload type ``j``'s global arrival rate
sent to datacenter ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import OversubscriptionError
from .models import CRAC_MULTIPLIER, IPCS_FRACTION, NodeType

if TYPE_CHECKING:
    from .scenario import Scenario

SHARE_SUM_TOL = _kernels.SHARE_SUM_TOL
CONSERVATION_RTOL = 1e-9
_CEIL_EPS = _kernels.CEIL_EPS


@dataclass(frozen=True)
class WorkloadDemand:
    """Global arrival rate (jobs/hour) per workload type and epoch."""

    workload_types: tuple[str, ...]
    gar: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.workload_types:
            raise ValueError("at least one workload type is required")
        if len(self.gar) != len(self.workload_types):
            raise ValueError("gar needs one series per workload type")
        if len({len(s) for s in self.gar}) != 1:
            raise ValueError("gar series have different lengths")
        if any(v < 0 for s in self.gar for v in s):
            raise ValueError("gar must be >= 0")

    @property
    def n_epochs(self) -> int:
        return len(self.gar[0])

    def at(self, epoch: int) -> np.ndarray:
        return np.array([series[epoch] for series in self.gar], dtype=float)


@dataclass(frozen=True, eq=False)
class DistributionPlan:
    """Per-epoch decision: workload shares per datacenter plus premium purchases."""

    shares: np.ndarray       # (D, L)
    premium_kwh: np.ndarray  # (D,)

    @classmethod
    def from_genome(cls, genome: np.ndarray, n_dcs: int, n_workloads: int) -> "DistributionPlan":
        genome = np.asarray(genome, dtype=float)
        split = n_dcs * n_workloads
        return cls(genome[:split].reshape(n_dcs, n_workloads).copy(), genome[split:].copy())

    def genome(self) -> np.ndarray:
        return np.concatenate([self.shares.ravel(), self.premium_kwh])

    def arrival_rates(self, gar: np.ndarray) -> np.ndarray:
        """AR[d, j] = share[d, j] * GAR[j]."""
        return self.shares * np.asarray(gar, dtype=float)[None, :]

    def __eq__(self, other):
        if not isinstance(other, DistributionPlan):
            return NotImplemented
        return (np.array_equal(self.shares, other.shares)
                and np.array_equal(self.premium_kwh, other.premium_kwh))


@dataclass(frozen=True)
class NodeAssignment:
    """Active node counts per ``(workload_type, node_type)`` at one datacenter."""

    active: Mapping[tuple[str, str], int]
    inventory: Mapping[str, int]

    def active_nodes(self, node_type: str) -> int:
        return sum(n for (_, nt), n in self.active.items() if nt == node_type)

    def idle_nodes(self, node_type: str) -> int:
        return self.inventory.get(node_type, 0) - self.active_nodes(node_type)


def list_order(node_types: Sequence[NodeType], workload_types: Sequence[str]) -> np.ndarray:
    """Node-type indices per workload type, cheapest energy-per-job first.

    Ties fall back to the node-type id so the order never depends on how the
    caller listed the node types.
    """
    order = np.empty((len(workload_types), len(node_types)), dtype=np.intp)
    for j, wl in enumerate(workload_types):
        ranked = sorted(range(len(node_types)),
                        key=lambda k: (node_types[k].energy_per_job(wl), node_types[k].id))
        order[j] = ranked
    return order


def schedule_counts(arrival: np.ndarray, inventory: np.ndarray, throughput: np.ndarray,
                    order: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Greedy list scheduling, vectorized over leading axes.

    Args:
        arrival: ``(..., L)`` jobs/hour per workload type.
        inventory: ``(..., K)`` installed nodes per node type.
        throughput: ``(K, L)`` jobs/hour of one busy node.
        order: ``(L, K)`` node-type visiting order per workload type.

    Returns:
        ``(active, residual)`` where ``active`` is ``(..., L, K)`` node counts
        (as floats holding integers) and ``residual`` is the ``(..., L)``
        arrival left unserved once every node was taken.
    """
    n_wl = arrival.shape[-1]
    n_nt = inventory.shape[-1]
    remaining = np.array(np.broadcast_to(inventory, arrival.shape[:-1] + (n_nt,)), dtype=float)
    active = np.zeros(arrival.shape + (n_nt,))
    residual = np.zeros(arrival.shape)
    for j in range(n_wl):
        left = arrival[..., j]
        for k in order[j]:
            if not np.any(left > 0):
                break
            thr = throughput[k, j]
            need = np.maximum(np.ceil(left / thr - _CEIL_EPS), 0.0)
            fits = need <= remaining[..., k]
            take = np.where(fits, need, remaining[..., k])
            remaining[..., k] -= take
            active[..., j, k] = take
            # Fully covered once the rounded-up count fits.
            left = np.where(fits, 0.0, np.maximum(left - take * thr, 0.0))
        residual[..., j] = left
    return active, residual


def schedule_failed(residual: np.ndarray, arrival: np.ndarray) -> np.ndarray:
    """Boolean mask of schedules that left real demand unserved."""
    return np.any(residual > CONSERVATION_RTOL * np.maximum(arrival, 1.0), axis=-1)


def local_schedule(node_types: Sequence[NodeType], inventory: Mapping[str, int],
                   arrival: Mapping[str, float]) -> NodeAssignment:
    """Assign one datacenter's arrival rates to nodes by list scheduling."""
    workload_types = list(arrival)
    nts = list(node_types)
    inv = np.array([inventory.get(nt.id, 0) for nt in nts], dtype=float)
    thr = np.array([[nt.throughput[wl] for wl in workload_types] for nt in nts], dtype=float)
    rates = np.array([arrival[wl] for wl in workload_types], dtype=float)
    if np.any(rates < 0):
        raise ValueError("arrival rates must be >= 0")
    active, residual = schedule_counts(rates, inv, thr, list_order(nts, workload_types))
    if schedule_failed(residual, rates):
        short = {wl: float(r) for wl, r in zip(workload_types, residual) if r > 0}
        raise OversubscriptionError(f"arrival exceeds datacenter capacity, unserved jobs/h: {short}")
    counts = {}
    for j, wl in enumerate(workload_types):
        for k, nt in enumerate(nts):
            if active[j, k] > 0:
                counts[(wl, nt.id)] = int(active[j, k])
    return NodeAssignment(counts, {nt.id: int(inventory.get(nt.id, 0)) for nt in nts})


def conservation_check(plan: DistributionPlan, demand: WorkloadDemand, epoch: int) -> bool:
    """True iff the per-datacenter arrival rates add back up to every GAR."""
    gar = demand.at(epoch)
    total = plan.arrival_rates(gar).sum(axis=0)
    return bool(np.all(np.abs(total - gar) <= CONSERVATION_RTOL * np.abs(gar)))


class DecisionSpace:
    """Genome bounds and repair for one (scenario, epoch).

    Repair does three things, in order: renormalize the share columns so
    every workload type is fully distributed, shift load away from
    datacenters that could not schedule it, and clamp premium genes into
    ``[premium_lb, premium_ub]``. The upper bound is the most energy the site
    could draw in the epoch; the cost model later clamps to what it
    actually buys.
    """

    def __init__(self, scenario: "Scenario", epoch: int):
        self.scenario = scenario
        self.epoch = epoch
        self.dc_names = tuple(loc.name for loc in scenario.locations)
        self.workload_types = tuple(scenario.demand.workload_types)
        self.n_dcs = len(self.dc_names)
        self.n_workloads = len(self.workload_types)
        self.n_share_genes = self.n_dcs * self.n_workloads
        self.genome_size = self.n_share_genes + self.n_dcs
        self.gar = scenario.demand.at(epoch)

        node_types = scenario.node_types
        self.throughput = np.array(
            [[nt.throughput[wl] for wl in self.workload_types] for nt in node_types], dtype=float)
        self.inventory = np.array(
            [[loc.inventory.get(nt.id, 0) for nt in node_types] for loc in scenario.locations],
            dtype=float)
        # jobs/hour datacenter d could serve if it ran workload j alone
        self.capacity = self.inventory @ self.throughput
        with np.errstate(divide="ignore"):
            slack = np.where(self.capacity > 0,
                             self.throughput.max(axis=0)[None, :] / self.capacity, np.inf)
        # one partially used node per workload type is the worst rounding loss
        margin = slack.sum(axis=1)
        self.util_limit = np.maximum(1.0 - margin - 1e-9, 0.0)

        self.premium_available = np.array(
            [loc.prices.clean_premium is not None for loc in scenario.locations])
        self.premium_ub = np.where(self.premium_available, self._max_energy(), 0.0)
        floors = getattr(scenario, "premium_floor_kwh", {})
        self.premium_lb = np.minimum(
            [float(floors.get(name, 0.0)) for name in self.dc_names], self.premium_ub)
        self.lower = np.concatenate([np.zeros(self.n_share_genes), self.premium_lb])
        self.upper = np.concatenate([np.ones(self.n_share_genes), self.premium_ub])

        usable = (self.capacity * self.util_limit[:, None]).sum(axis=0)
        load = float(np.sum(np.divide(self.gar, usable, out=np.full_like(self.gar, np.inf),
                                      where=usable > 0)[self.gar > 0]))
        if load > 1.0 + 1e-12:
            raise OversubscriptionError(
                f"demand needs {load:.4f} of schedulable fleet capacity", epoch)

    def _max_energy(self) -> np.ndarray:
        sc = self.scenario
        ap_max = np.array([max(nt.active_power[wl] for wl in self.workload_types)
                           for nt in sc.node_types])
        p_it = self.inventory @ ap_max / 1000.0
        cop = np.array([loc.factors.cop for loc in sc.locations])
        return p_it * (1.0 + CRAC_MULTIPLIER / cop + IPCS_FRACTION) * sc.epoch_hours

    def utilization(self, shares: np.ndarray) -> np.ndarray:
        """Fraction of each datacenter's schedulable capacity a share matrix uses."""
        return self.utilization_from_arrival(shares * self.gar[None, :])

    def utilization_from_arrival(self, arrival: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(arrival > 0, arrival / self.capacity, 0.0)
        return frac.sum(axis=1)

    def repair(self, x: np.ndarray) -> np.ndarray:
        """Map any real vector of genome length onto a feasible genome."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.genome_size,):
            raise ValueError(f"genome must have {self.genome_size} genes, got {x.shape}")
        out = np.empty(self.genome_size)
        status = _kernels.repair(x, self.n_dcs, self.n_workloads, self.gar, self.capacity,
                                 self.util_limit, self.premium_lb, self.premium_ub, out)
        if status == _kernels.REPAIR_NO_HEADROOM:
            raise OversubscriptionError("no datacenter has headroom left", self.epoch)
        if status == _kernels.REPAIR_NO_CONVERGENCE:
            raise OversubscriptionError("capacity repair did not converge", self.epoch)
        return out

    def random_genome(self, rng: np.random.Generator) -> np.ndarray:
        raw = rng.random(self.genome_size) * np.concatenate(
            [np.ones(self.n_share_genes), self.premium_ub])
        return self.repair(raw)

    def to_plan(self, genome: np.ndarray) -> DistributionPlan:
        return DistributionPlan.from_genome(genome, self.n_dcs, self.n_workloads)

    def gene_names(self) -> list[str]:
        names = [f"share:{dc}:{wl}" for dc in self.dc_names for wl in self.workload_types]
        names += [f"premium_kwh:{dc}" for dc in self.dc_names]
        return names
