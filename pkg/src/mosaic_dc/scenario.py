"""Scenario documents: datacenter sites, node tables, tariffs and demand.

Scenarios are stored as JSON (``schema_version`` 1). The layout is::

    {
      "schema_version": 1,
      "epoch_hours": 1.0,
      "free_air": {"max_temp_c": 27, "min_dew_point_c": -9,
                   "max_dew_point_c": 15, "fan_fraction": 0.15},
      "node_types": [{"id": "...", "core_count": 4, "idle_power_w": 25,
                      "active_power_w": {"<workload>": W, ...},
                      "throughput_jph": {"<workload>": jobs_per_hour, ...}}],
      "demand": {"workload_types": ["..."],
                 "gar": {"<workload>": [24 jobs/hour values]},
                 "premium_floor_kwh": {"<location>": kWh}},          # optional
      "locations": [{"name": "...", "tz_offset_h": -6,
                     "factors": {"ewif": L/kWh, "carbon_factor": kWh/kg, "cop": ...,
                                 "water_latent_heat": kWh/L, "concentration_cycles": ...,
                                 "potable_intensity": kWh/L, "wastewater_intensity": kWh/L,
                                 "free_air_cooling": bool,
                                 "weather": [[temp_c, dew_point_c] x 24]},
                     "prices": {"tou": [24 USD/kWh], "clean_premium": USD/kWh | null,
                                "annual_contract": {"price": USD/kWh,
                                                    "contracted_rate_kwh": kWh} | null},
                     "inventory": {"<node type id>": count}}]
    }

Epoch ``t`` is an hour on a shared reference clock; a site with offset
``tz_offset_h`` reads its TOU price and weather at local hour
``(t + tz_offset_h) mod 24``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .decision import WorkloadDemand
from .errors import ConfigError, ScenarioError
from .models import (
    HOURS_PER_DAY,
    AnnualContract,
    FreeAirPolicy,
    LocationFactors,
    NodeType,
    PriceSchedule,
)

SCHEMA_VERSION = 1
BUNDLED_16DC = "synthetic-16dc.json"

# Published parameter ranges the generator samples from.
TOU_RANGE = (0.018, 0.48)
PREMIUM_RANGE = (0.0039, 1.44)
CONTRACT_PRICE = 0.15
COP_RANGE = (3.74, 5.73)
EWIF_RANGE = (0.0, 3.97)
WATER_LATENT_HEAT = 0.66
CONCENTRATION_CYCLES = 5.0
POTABLE_INTENSITY = 550e-6
WASTEWATER_INTENSITY = 640e-6
NODES_PER_DC = 4320

WORKLOAD_TYPES = ("lda", "kmeans", "naive_bayes", "image_to_text", "image_to_image")

# (state, UTC offset in hours); Texas hosts the annual clean contract.
US_SITES = (
    ("california", -8), ("oregon", -8), ("washington", -8), ("nevada", -8),
    ("arizona", -7), ("utah", -7), ("colorado", -7), ("texas", -6),
    ("illinois", -6), ("minnesota", -6), ("iowa", -6), ("georgia", -5),
    ("virginia", -5), ("new_york", -5), ("ohio", -5), ("florida", -5),
)
CONTRACT_SITE = "texas"


@dataclass(frozen=True)
class Location:
    name: str
    tz_offset: int
    factors: LocationFactors
    prices: PriceSchedule
    inventory: Mapping[str, int]

    def local_hour(self, epoch: int) -> int:
        return (epoch + self.tz_offset) % HOURS_PER_DAY


@dataclass(frozen=True)
class Scenario:
    locations: tuple[Location, ...]
    node_types: tuple[NodeType, ...]
    demand: WorkloadDemand
    epoch_hours: float = 1.0
    free_air: FreeAirPolicy = field(default_factory=FreeAirPolicy)
    premium_floor_kwh: Mapping[str, float] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def n_epochs(self) -> int:
        return self.demand.n_epochs

    def location(self, name: str) -> Location:
        for loc in self.locations:
            if loc.name == name:
                return loc
        raise KeyError(name)


def default_node_types() -> tuple[NodeType, ...]:
    """Synthetic power/throughput table for the three server SKUs.

    The values are invented but plausible: they only need to give each
    workload type a distinct energy-per-job ranking. Throughput is a per-SKU
    speed times a per-workload job rate, so nodes are interchangeable
    capacity units up to that speed factor.
    """
    skus = (
        # id, cores, idle W, dynamic W, speed
        ("E3-1225v3", 4, 25.0, 55.0, 1.0),
        ("E5649", 12, 90.0, 130.0, 1.6),
        ("E5-2697v2", 24, 110.0, 210.0, 3.2),
    )
    job_rate = {"lda": 20.0, "kmeans": 60.0, "naive_bayes": 90.0,
                "image_to_text": 12.0, "image_to_image": 8.0}
    # dynamic-power intensity per (sku, workload); memory-bound image jobs
    # hurt the small 4-core part the most
    intensity = {
        "E3-1225v3": {"lda": 0.9, "kmeans": 0.8, "naive_bayes": 0.6,
                      "image_to_text": 1.6, "image_to_image": 1.8},
        "E5649": {"lda": 0.85, "kmeans": 0.7, "naive_bayes": 0.5,
                  "image_to_text": 0.9, "image_to_image": 1.0},
        "E5-2697v2": {"lda": 1.0, "kmeans": 0.9, "naive_bayes": 0.75,
                      "image_to_text": 0.8, "image_to_image": 0.85},
    }
    out = []
    for sku, cores, idle, dyn, speed in skus:
        out.append(NodeType(
            id=sku,
            core_count=cores,
            idle_power=idle,
            active_power={wl: idle + dyn * intensity[sku][wl] for wl in WORKLOAD_TYPES},
            throughput={wl: speed * job_rate[wl] for wl in WORKLOAD_TYPES},
        ))
    return tuple(out)


def fleet_capacity(scenario: Scenario) -> np.ndarray:
    """Jobs/hour the whole fleet could serve of each workload type alone."""
    wls = scenario.demand.workload_types
    thr = np.array([[nt.throughput[wl] for wl in wls] for nt in scenario.node_types])
    inv = np.array([[loc.inventory.get(nt.id, 0) for nt in scenario.node_types]
                    for loc in scenario.locations], dtype=float)
    return (inv @ thr).sum(axis=0)


def subscription_rate(scenario: Scenario, epoch: int) -> float:
    """Share of fleet capacity the demand of ``epoch`` occupies.

    Equal to ``sum_j GAR_j / T`` where ``T`` is the fleet's maximal total
    throughput for the epoch's workload mix.
    """
    gar = scenario.demand.at(epoch)
    return float(np.sum(gar / fleet_capacity(scenario)))


def with_subscription(scenario: Scenario, rate: float) -> Scenario:
    """Rescale demand so the busiest epoch runs at subscription ``rate``.

    The 24-hour shape and the workload mix are kept.
    """
    if not 0 < rate <= 1:
        raise ConfigError("subscription rate must be in (0, 1]")
    cap = fleet_capacity(scenario)
    gar = np.array(scenario.demand.gar, dtype=float)
    per_epoch = (gar / cap[:, None]).sum(axis=0)
    peak = per_epoch.max()
    if peak <= 0:
        raise ConfigError("cannot rescale an all-zero demand")
    scaled = gar * (rate / peak)
    demand = WorkloadDemand(scenario.demand.workload_types,
                            tuple(tuple(float(v) for v in row) for row in scaled))
    return replace(scenario, demand=demand)


def generate_scenario(n_dcs: int = 16, seed: int = 0, subscription: float = 0.75,
                      n_workloads: int = 5, profile: str = "flat",
                      nodes_per_dc: int = NODES_PER_DC) -> Scenario:
    """Draw a synthetic scenario from the published parameter ranges.

    Exactly one site (Texas when it is among the sites) offers the annual
    clean contract; roughly half of the others sell a clean premium.
    ``profile`` is ``"flat"`` or ``"diurnal"``; for the diurnal shape the
    busiest epoch runs at ``subscription``.
    """
    if n_dcs < 1 or n_workloads < 1 or nodes_per_dc < 1:
        raise ConfigError("counts must be >= 1")
    if n_workloads > len(WORKLOAD_TYPES):
        raise ConfigError(f"at most {len(WORKLOAD_TYPES)} workload types are defined")
    if profile not in ("flat", "diurnal"):
        raise ConfigError(f"unknown demand profile {profile!r}")
    rng = np.random.default_rng(seed)
    workload_types = WORKLOAD_TYPES[:n_workloads]
    node_types = tuple(
        NodeType(nt.id, nt.core_count, nt.idle_power,
                 {wl: nt.active_power[wl] for wl in workload_types},
                 {wl: nt.throughput[wl] for wl in workload_types})
        for nt in default_node_types())

    sites = _pick_sites(n_dcs, rng)
    contract_idx = next((i for i, (name, _) in enumerate(sites) if name == CONTRACT_SITE), 0)
    locations = []
    for i, (name, tz) in enumerate(sites):
        mix = rng.dirichlet(np.full(len(node_types), 2.0))
        counts = np.floor(mix * nodes_per_dc).astype(int)
        counts[np.argmax(mix)] += nodes_per_dc - counts.sum()
        inventory = {nt.id: int(c) for nt, c in zip(node_types, counts)}

        factors = LocationFactors(
            ewif=float(rng.uniform(*EWIF_RANGE)),
            carbon_factor=float(rng.uniform(1.1, 5.0)),
            cop=float(rng.uniform(*COP_RANGE)),
            water_latent_heat=WATER_LATENT_HEAT,
            concentration_cycles=CONCENTRATION_CYCLES,
            potable_intensity=POTABLE_INTENSITY,
            wastewater_intensity=WASTEWATER_INTENSITY,
            free_air_cooling=bool(rng.random() < 0.5),
            weather=_weather(rng),
        )

        tou = _tou(rng)
        premium = None
        contract = None
        if i == contract_idx:
            ap_max = max(max(nt.active_power.values()) for nt in node_types)
            rate = 0.25 * nodes_per_dc * ap_max / 1000.0 * (1 + 3 / factors.cop + 0.13)
            contract = AnnualContract(CONTRACT_PRICE, round(float(rate), 3))
        elif rng.random() < 0.5:
            premium = float(rng.uniform(*PREMIUM_RANGE))
        locations.append(Location(name, tz, factors, PriceSchedule(tou, premium, contract),
                                  inventory))

    mix = rng.dirichlet(np.full(n_workloads, 2.0))
    if profile == "flat":
        shape = np.ones(HOURS_PER_DAY)
    else:
        hours = np.arange(HOURS_PER_DAY)
        shape = 0.7 + 0.3 * np.cos(2 * np.pi * (hours - 14) / HOURS_PER_DAY)
    gar = mix[:, None] * shape[None, :]
    demand = WorkloadDemand(workload_types, tuple(tuple(float(v) for v in row) for row in gar))
    draft = Scenario(tuple(locations), node_types, demand)
    return with_subscription(draft, subscription)


def _pick_sites(n_dcs: int, rng: np.random.Generator) -> list[tuple[str, int]]:
    if n_dcs >= len(US_SITES):
        extra = [(f"site_{i:02d}", int(rng.integers(-8, -4)))
                 for i in range(len(US_SITES), n_dcs)]
        return list(US_SITES) + extra
    others = [s for s in US_SITES if s[0] != CONTRACT_SITE]
    picked = [others[i] for i in sorted(rng.choice(len(others), n_dcs - 1, replace=False))]
    texas = next(s for s in US_SITES if s[0] == CONTRACT_SITE)
    return sorted(picked + [texas], key=US_SITES.index)


def _weather(rng: np.random.Generator) -> tuple[tuple[float, float], ...]:
    mean = rng.uniform(5.0, 30.0)
    swing = rng.uniform(4.0, 10.0)
    spread = rng.uniform(4.0, 15.0)
    out = []
    for h in range(HOURS_PER_DAY):
        temp = mean + swing * math.cos(2 * math.pi * (h - 15) / HOURS_PER_DAY)
        out.append((round(temp, 2), round(temp - spread, 2)))
    return tuple(out)


def _tou(rng: np.random.Generator) -> tuple[float, ...]:
    lo, hi = TOU_RANGE
    off_peak = rng.uniform(lo, 0.12)
    peak = min(off_peak * rng.uniform(1.5, 6.0), hi)
    start = int(rng.integers(11, 16))
    length = int(rng.integers(4, 8))
    prices = []
    for h in range(HOURS_PER_DAY):
        if start <= h < start + length:
            p = peak
        elif start - 3 <= h < start or start + length <= h < start + length + 2:
            p = (off_peak + peak) / 2
        else:
            p = off_peak
        prices.append(round(float(min(max(p, lo), hi)), 5))
    return tuple(prices)


# --------------------------------------------------------------------------- I/O

def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    return {
        "schema_version": scenario.schema_version,
        "epoch_hours": scenario.epoch_hours,
        "free_air": {
            "max_temp_c": scenario.free_air.max_temp_c,
            "min_dew_point_c": scenario.free_air.min_dew_point_c,
            "max_dew_point_c": scenario.free_air.max_dew_point_c,
            "fan_fraction": scenario.free_air.fan_fraction,
        },
        "node_types": [
            {"id": nt.id, "core_count": nt.core_count, "idle_power_w": nt.idle_power,
             "active_power_w": dict(nt.active_power), "throughput_jph": dict(nt.throughput)}
            for nt in scenario.node_types
        ],
        "demand": {
            "workload_types": list(scenario.demand.workload_types),
            "gar": {wl: list(series) for wl, series in
                    zip(scenario.demand.workload_types, scenario.demand.gar)},
            "premium_floor_kwh": dict(scenario.premium_floor_kwh),
        },
        "locations": [_location_to_dict(loc) for loc in scenario.locations],
    }


def _location_to_dict(loc: Location) -> dict[str, Any]:
    f = loc.factors
    p = loc.prices
    return {
        "name": loc.name,
        "tz_offset_h": loc.tz_offset,
        "factors": {
            "ewif": f.ewif, "carbon_factor": f.carbon_factor, "cop": f.cop,
            "water_latent_heat": f.water_latent_heat,
            "concentration_cycles": f.concentration_cycles,
            "potable_intensity": f.potable_intensity,
            "wastewater_intensity": f.wastewater_intensity,
            "free_air_cooling": f.free_air_cooling,
            "weather": [list(w) for w in f.weather],
        },
        "prices": {
            "tou": list(p.tou),
            "clean_premium": p.clean_premium,
            "annual_contract": None if p.annual_contract is None else {
                "price": p.annual_contract.price,
                "contracted_rate_kwh": p.annual_contract.contracted_rate,
            },
        },
        "inventory": dict(loc.inventory),
    }


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=1) + "\n",
                          encoding="utf-8")


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a scenario file; errors carry the offending path."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(str(path), f"cannot read file: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}", f"parse error: {exc.msg}") from exc
    return scenario_from_dict(doc)


def bundled_scenario_path(name: str = BUNDLED_16DC) -> Path:
    return Path(str(resources.files("mosaic_dc") / "data" / name))


def load_bundled(name: str = BUNDLED_16DC) -> Scenario:
    return load_scenario(bundled_scenario_path(name))


class _Reader:
    """Walks the JSON document keeping a dotted path for diagnostics."""

    def __init__(self, value: Any, path: str):
        self.value = value
        self.path = path

    def fail(self, message: str) -> ScenarioError:
        return ScenarioError(self.path, message)

    def get(self, key: str, default: Any = ...) -> "_Reader":
        if not isinstance(self.value, dict):
            raise self.fail("expected an object")
        if key not in self.value:
            if default is ...:
                raise ScenarioError(f"{self.path}.{key}", "missing required field")
            return _Reader(default, f"{self.path}.{key}")
        return _Reader(self.value[key], f"{self.path}.{key}")

    def items(self, label=None) -> list["_Reader"]:
        if not isinstance(self.value, list):
            raise self.fail("expected a list")
        return [_Reader(v, f"{self.path}[{i if label is None else label(v, i)}]")
                for i, v in enumerate(self.value)]

    def mapping(self) -> dict[str, "_Reader"]:
        if not isinstance(self.value, dict):
            raise self.fail("expected an object")
        return {k: _Reader(v, f"{self.path}.{k}") for k, v in self.value.items()}

    def number(self, lo: float | None = None, hi: float | None = None,
               strict_lo: bool = False) -> float:
        v = self.value
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise self.fail(f"expected a finite number, got {v!r}")
        if lo is not None and (v < lo or (strict_lo and v == lo)):
            raise self.fail(f"value {v} must be {'>' if strict_lo else '>='} {lo}")
        if hi is not None and v > hi:
            raise self.fail(f"value {v} must be <= {hi}")
        return float(v)

    def integer(self, lo: int | None = None) -> int:
        v = self.value
        if isinstance(v, bool) or not isinstance(v, int):
            raise self.fail(f"expected an integer, got {v!r}")
        if lo is not None and v < lo:
            raise self.fail(f"value {v} must be >= {lo}")
        return v

    def string(self) -> str:
        if not isinstance(self.value, str) or not self.value:
            raise self.fail(f"expected a non-empty string, got {self.value!r}")
        return self.value

    def boolean(self) -> bool:
        if not isinstance(self.value, bool):
            raise self.fail(f"expected true/false, got {self.value!r}")
        return self.value

    def series(self, length: int, lo: float | None = None) -> tuple[float, ...]:
        items = self.items()
        if len(items) != length:
            raise self.fail(f"expected {length} entries, got {len(items)}")
        return tuple(r.number(lo) for r in items)


def scenario_from_dict(doc: Any) -> Scenario:
    root = _Reader(doc, "scenario")
    version = root.get("schema_version").integer()
    if version != SCHEMA_VERSION:
        raise ScenarioError("scenario.schema_version",
                            f"unsupported version {version}, expected {SCHEMA_VERSION}")
    epoch_hours = root.get("epoch_hours", 1.0).number(0.0, strict_lo=True)

    fa = root.get("free_air", {})
    free_air = FreeAirPolicy(
        max_temp_c=fa.get("max_temp_c", 27.0).number(),
        min_dew_point_c=fa.get("min_dew_point_c", -9.0).number(),
        max_dew_point_c=fa.get("max_dew_point_c", 15.0).number(),
        fan_fraction=fa.get("fan_fraction", 0.15).number(0.0),
    )
    if free_air.min_dew_point_c > free_air.max_dew_point_c:
        raise ScenarioError("scenario.free_air", "min_dew_point_c exceeds max_dew_point_c")

    dem = root.get("demand")
    workload_types = tuple(r.string() for r in dem.get("workload_types").items())
    if not workload_types:
        raise ScenarioError("scenario.demand.workload_types", "at least one workload type")
    if len(set(workload_types)) != len(workload_types):
        raise ScenarioError("scenario.demand.workload_types", "duplicate workload type")
    gar_map = dem.get("gar").mapping()
    for wl in gar_map:
        if wl not in workload_types:
            raise ScenarioError(f"scenario.demand.gar.{wl}", "undeclared workload type")
    gar = []
    n_epochs = None
    for wl in workload_types:
        if wl not in gar_map:
            raise ScenarioError(f"scenario.demand.gar.{wl}", "missing arrival series")
        reader = gar_map[wl]
        n = len(reader.items())
        if n_epochs is None:
            n_epochs = n
        gar.append(reader.series(n_epochs, lo=0.0))
    if n_epochs == 0:
        raise ScenarioError("scenario.demand.gar", "arrival series are empty")
    demand = WorkloadDemand(workload_types, tuple(gar))

    node_types = []
    for r in root.get("node_types").items(label=_id_label("id")):
        node_types.append(_node_type(r, workload_types))
    ids = [nt.id for nt in node_types]
    if not node_types:
        raise ScenarioError("scenario.node_types", "at least one node type is required")
    if len(set(ids)) != len(ids):
        raise ScenarioError("scenario.node_types", "duplicate node type id")

    locations = [_location(r, set(ids)) for r in root.get("locations").items(label=_id_label("name"))]
    if not locations:
        raise ScenarioError("scenario.locations", "at least one location is required")
    names = [loc.name for loc in locations]
    if len(set(names)) != len(names):
        raise ScenarioError("scenario.locations", "duplicate location name")

    floors = {}
    for name, r in dem.get("premium_floor_kwh", {}).mapping().items():
        if name not in names:
            raise ScenarioError(r.path, "unknown location")
        value = r.number(0.0)
        loc = locations[names.index(name)]
        if value > 0 and loc.prices.clean_premium is None:
            raise ScenarioError(r.path, f"location {name!r} offers TOU pricing only; "
                                        "no clean premium can be purchased")
        floors[name] = value

    return Scenario(tuple(locations), tuple(node_types), demand, epoch_hours, free_air, floors,
                    version)


def _id_label(key: str):
    def label(value, index):
        if isinstance(value, dict) and isinstance(value.get(key), str):
            return value[key]
        return index
    return label


def _node_type(r: _Reader, workload_types: tuple[str, ...]) -> NodeType:
    nt_id = r.get("id").string()
    idle = r.get("idle_power_w").number(0.0, strict_lo=True)
    ap_map = r.get("active_power_w").mapping()
    thr_map = r.get("throughput_jph").mapping()
    active, thr = {}, {}
    for wl in workload_types:
        if wl not in ap_map:
            raise ScenarioError(f"{r.path}.active_power_w.{wl}", "missing workload type")
        if wl not in thr_map:
            raise ScenarioError(f"{r.path}.throughput_jph.{wl}", "missing workload type")
        active[wl] = ap_map[wl].number(idle)
        thr[wl] = thr_map[wl].number(0.0, strict_lo=True)
    for key, mp in (("active_power_w", ap_map), ("throughput_jph", thr_map)):
        for wl in mp:
            if wl not in workload_types:
                raise ScenarioError(f"{r.path}.{key}.{wl}", "undeclared workload type")
    return NodeType(nt_id, r.get("core_count", 1).integer(1), idle, active, thr)


def _location(r: _Reader, node_ids: set[str]) -> Location:
    name = r.get("name").string()
    tz = r.get("tz_offset_h", 0).integer()
    f = r.get("factors")
    weather = []
    w = f.get("weather", [])
    if w.value:
        for i, pair in enumerate(w.items()):
            if not isinstance(pair.value, list) or len(pair.value) != 2:
                raise pair.fail("expected [outdoor_temp_c, dew_point_c]")
            weather.append(tuple(_Reader(v, f"{pair.path}[{k}]").number()
                                 for k, v in enumerate(pair.value)))
        if len(weather) != HOURS_PER_DAY:
            raise w.fail(f"expected {HOURS_PER_DAY} entries, got {len(weather)}")
    factors = LocationFactors(
        ewif=f.get("ewif").number(0.0),
        carbon_factor=f.get("carbon_factor").number(0.0, strict_lo=True),
        cop=f.get("cop").number(3.0, 7.0),
        water_latent_heat=f.get("water_latent_heat", WATER_LATENT_HEAT).number(0.0, strict_lo=True),
        concentration_cycles=f.get("concentration_cycles", CONCENTRATION_CYCLES).number(
            1.0, strict_lo=True),
        potable_intensity=f.get("potable_intensity", POTABLE_INTENSITY).number(0.0),
        wastewater_intensity=f.get("wastewater_intensity", WASTEWATER_INTENSITY).number(0.0),
        free_air_cooling=f.get("free_air_cooling", False).boolean(),
        weather=tuple(weather),
    )
    p = r.get("prices")
    tou = p.get("tou").series(HOURS_PER_DAY, lo=0.0)
    cp = p.get("clean_premium", None)
    premium = None if cp.value is None else cp.number(0.0)
    ac = p.get("annual_contract", None)
    contract = None
    if ac.value is not None:
        contract = AnnualContract(ac.get("price").number(0.0),
                                  ac.get("contracted_rate_kwh").number(0.0))
    inventory = {}
    for nt, c in r.get("inventory").mapping().items():
        if nt not in node_ids:
            raise ScenarioError(c.path, f"unknown node type {nt!r}")
        inventory[nt] = c.integer(0)
    return Location(name, tz, factors, PriceSchedule(tou, premium, contract), inventory)
