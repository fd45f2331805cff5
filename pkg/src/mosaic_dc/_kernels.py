"""Compiled inner loops for genome repair and plan evaluation.

Optimizers evaluate one genome at a time during local search, where numpy's
per-call overhead dominates; these loops keep a single evaluation in the
microsecond range. Status codes are returned instead of raising so callers
can build descriptive exceptions.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .models import IPCS_FRACTION

CEIL_EPS = 1e-9
UNSERVED_RTOL = 1e-9
SHARE_SUM_TOL = 1e-12

REPAIR_OK = 0
REPAIR_NO_HEADROOM = 1
REPAIR_NO_CONVERGENCE = 2


@njit(cache=True)
def evaluate_batch(genomes, n_dcs, n_wl, gar, inventory, throughput, order, active_w, idle_w,
                   cooling_factor, hours, contract_rate, contract_price, tou, premium_price,
                   free_air, latent, cycles, ewif, potable, wastewater, cf,
                   out_obj, out_energy, out_premium):
    """Fill the output arrays; return ``b * n_dcs + d`` of the first
    datacenter that cannot serve its arrival, or -1."""
    n_nt = inventory.shape[1]
    remaining = np.empty(n_nt)
    n_share = n_dcs * n_wl
    for b in range(genomes.shape[0]):
        cost = 0.0
        carbon = 0.0
        water = 0.0
        for d in range(n_dcs):
            for k in range(n_nt):
                remaining[k] = inventory[d, k]
            watts = 0.0
            for j in range(n_wl):
                arrival = genomes[b, d * n_wl + j] * gar[j]
                left = arrival
                for idx in range(n_nt):
                    if left <= 0.0:
                        break
                    k = order[j, idx]
                    thr = throughput[k, j]
                    need = math.ceil(left / thr - CEIL_EPS)
                    if need < 0.0:
                        need = 0.0
                    if need <= remaining[k]:
                        take = need
                        left = 0.0
                    else:
                        take = remaining[k]
                        left = left - take * thr
                    remaining[k] -= take
                    watts += take * active_w[k, j]
                if left > UNSERVED_RTOL * max(arrival, 1.0):
                    return b * n_dcs + d
            for k in range(n_nt):
                watts += remaining[k] * idle_w[k]
            p_it = watts / 1000.0
            energy = (p_it + p_it * cooling_factor[d] + IPCS_FRACTION * p_it) * hours
            contracted = min(energy, contract_rate[d])
            remainder = energy - contracted
            premium = min(genomes[b, n_share + d], remainder)
            brown = remainder - premium
            cost += contracted * contract_price[d] + remainder * tou[d] + premium * premium_price[d]
            if free_air[d]:
                v_e = 0.0
            else:
                v_e = p_it * hours / latent[d]
            v_b = v_e / (cycles[d] - 1.0)
            v_s = energy * ewif[d]
            carbon += (brown + (v_b + v_e) * potable[d] + v_b * wastewater[d]) / cf[d]
            water += v_e + v_b + v_s
            out_energy[b, d] = energy
            out_premium[b, d] = premium
        out_obj[b, 0] = cost
        out_obj[b, 1] = carbon
        out_obj[b, 2] = water
    return -1


@njit(cache=True)
def _utilization(arrival, capacity, util):
    n_dcs, n_wl = arrival.shape
    for d in range(n_dcs):
        u = 0.0
        for j in range(n_wl):
            if arrival[d, j] > 0.0:
                if capacity[d, j] > 0.0:
                    u += arrival[d, j] / capacity[d, j]
                else:
                    u = np.inf
        util[d] = u


@njit(cache=True)
def repair(x, n_dcs, n_wl, gar, capacity, limit, premium_lb, premium_ub, out):
    """Write the repaired genome into ``out`` and return a status code."""
    n_share = n_dcs * n_wl
    for i in range(x.shape[0]):
        v = x[i]
        # +inf premium means "as much as allowed" and is clamped below
        if not math.isfinite(v) and not (i >= n_share and v > 0.0):
            v = 0.0
        out[i] = v
    for j in range(n_wl):
        s = 0.0
        for d in range(n_dcs):
            if out[d * n_wl + j] < 0.0:
                out[d * n_wl + j] = 0.0
            s += out[d * n_wl + j]
        if s <= 0.0:
            for d in range(n_dcs):
                out[d * n_wl + j] = 1.0 / n_dcs
        elif abs(s - 1.0) > SHARE_SUM_TOL:
            for d in range(n_dcs):
                out[d * n_wl + j] /= s
    for d in range(n_dcs):
        v = out[n_share + d]
        if v < premium_lb[d]:
            v = premium_lb[d]
        if v > premium_ub[d]:
            v = premium_ub[d]
        out[n_share + d] = v

    arrival = np.empty((n_dcs, n_wl))
    for d in range(n_dcs):
        for j in range(n_wl):
            arrival[d, j] = out[d * n_wl + j] * gar[j]
    util = np.empty(n_dcs)
    _utilization(arrival, capacity, util)
    violated = False
    for d in range(n_dcs):
        if util[d] > limit[d] + SHARE_SUM_TOL:
            violated = True
    if not violated:
        return REPAIR_OK

    removed = np.empty(n_wl)
    weight_total = np.empty(n_wl)
    for _ in range(200):
        for j in range(n_wl):
            removed[j] = 0.0
        for d in range(n_dcs):
            if util[d] > limit[d]:
                scale = limit[d] / util[d] if np.isfinite(util[d]) else 0.0
                for j in range(n_wl):
                    removed[j] += arrival[d, j] * (1.0 - scale)
                    arrival[d, j] *= scale
                util[d] = limit[d]
        for j in range(n_wl):
            t = 0.0
            for d in range(n_dcs):
                room = limit[d] - util[d]
                if room > 0.0:
                    t += room * capacity[d, j]
            weight_total[j] = t
            if removed[j] > 0.0 and t <= 0.0:
                return REPAIR_NO_HEADROOM
        for d in range(n_dcs):
            room = limit[d] - util[d]
            if room > 0.0:
                for j in range(n_wl):
                    if weight_total[j] > 0.0:
                        arrival[d, j] += removed[j] * room * capacity[d, j] / weight_total[j]
        _utilization(arrival, capacity, util)
        done = True
        for d in range(n_dcs):
            if util[d] > limit[d] + SHARE_SUM_TOL:
                done = False
        if done:
            for j in range(n_wl):
                if gar[j] > 0.0:
                    for d in range(n_dcs):
                        out[d * n_wl + j] = arrival[d, j] / gar[j]
            return REPAIR_OK
    return REPAIR_NO_CONVERGENCE
