from __future__ import annotations

import numpy as np
import pytest

from mosaic_dc.decision import WorkloadDemand
from mosaic_dc.models import (
    AnnualContract,
    LocationFactors,
    NodeType,
    PriceSchedule,
)
from mosaic_dc.scenario import Location, Scenario, load_bundled


def flat_tou(price: float) -> tuple[float, ...]:
    return (price,) * 24


def small_scenario(gar: float = 100.0, premium=(0.05, None), contract=(None, None),
                   inventory=(10, 10), tou=(0.10, 0.20), cf=(2.0, 1.5), ewif=(1.0, 0.5),
                   cop=(4.0, 5.0), n_epochs: int = 1, floors=None) -> Scenario:
    """Two datacenters, one node type, one workload type."""
    nt = NodeType("n1", 8, 50.0, {"wl": 200.0}, {"wl": 25.0})
    locs = []
    for d in range(len(inventory)):
        factors = LocationFactors(ewif=ewif[d], carbon_factor=cf[d], cop=cop[d])
        ac = None if contract[d] is None else AnnualContract(0.15, contract[d])
        prices = PriceSchedule(flat_tou(tou[d]), premium[d], ac)
        locs.append(Location(f"dc{d}", 0, factors, prices, {"n1": inventory[d]}))
    demand = WorkloadDemand(("wl",), ((gar,) * n_epochs,))
    return Scenario(tuple(locs), (nt,), demand, premium_floor_kwh=floors or {})


@pytest.fixture
def two_dc() -> Scenario:
    return small_scenario()


@pytest.fixture(scope="session")
def bundled() -> Scenario:
    return load_bundled()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


# Acceptance reporting: tests tagged ``@pytest.mark.acceptance(n, "title")``
# are rolled up into one PASS/FAIL line per criterion after the run.
_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, title = marker.args
    entry = _ACCEPTANCE.setdefault(number, {"title": title, "ok": True, "notes": []})
    failed = report.failed or hasattr(report, "wasxfail")
    if failed:
        entry["ok"] = False
        entry["notes"].append(f"{item.name} failed")
    if report.when == "call":
        entry["notes"].extend(v for k, v in item.user_properties if k == "detail")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        entry = _ACCEPTANCE[number]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {entry['title']}")
        for note in entry["notes"]:
            terminalreporter.write_line(f"         {note}")
