"""Shared fixtures: the bundled snapshot (loaded once per session), the
fitted rate model, the OD coefficient sets, and a tiny three-county world
whose expected numbers are small enough to check by hand."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from stormflux.evacmodel import fit, load_observations
from stormflux.geodata import load_datasets
from stormflux.odchoice import load_coefficients
from stormflux.scenario import load_scenario, run_scenario

REPO = Path(__file__).resolve().parent.parent

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def snapshot_datasets():
    return load_datasets(REPO / "data")


@pytest.fixture(scope="session")
def snapshot_model():
    return fit(load_observations(REPO / "data" / "evac_observations.csv"))


@pytest.fixture(scope="session")
def snapshot_coeffs():
    friends, hotel, _ = load_coefficients(REPO / "config" / "od_coefficients.json")
    return friends, hotel


@pytest.fixture(scope="session")
def laura_scenario():
    return load_scenario(REPO / "scenarios" / "laura.json")


@pytest.fixture(scope="session")
def rita_scenario():
    return load_scenario(REPO / "scenarios" / "rita_counterfactual.json")


@pytest.fixture(scope="session")
def laura_result(laura_scenario, snapshot_datasets, snapshot_model, snapshot_coeffs):
    return run_scenario(laura_scenario, snapshot_datasets, snapshot_model,
                        snapshot_coeffs)


@pytest.fixture(scope="session")
def rita_result(rita_scenario, snapshot_datasets, snapshot_model, snapshot_coeffs):
    return run_scenario(rita_scenario, snapshot_datasets, snapshot_model,
                        snapshot_coeffs)


TOY_COUNTIES = """\
fips,name,district_id,population,lat,lon,hotel_count,msa_flag,interstate_flag,pct_white
01001,Seabrook,coast,10000,29.5,-94.5,12,0,1,0.6
01003,Northfield,north,40000,31.5,-95.5,40,1,1,0.7
01005,Westbury,west,25000,30.0,-97.5,25,0,0,0.5
"""

TOY_CBG = """\
geoid,county_fips,population,lat,lon,risk_zone
010010001001,01001,4000,29.45,-94.55,1
010010001002,01001,3000,29.52,-94.48,3
010010002001,01001,3000,29.55,-94.42,
010030001001,01003,40000,31.5,-95.5,
010050001001,01005,25000,30.0,-97.5,
"""

TOY_DISTRICTS = """\
fips,district_id
01001,coast
01003,north
01005,west
"""

TOY_CASES_LINES = ["fips,date,new_cases"]
for day in range(17, 27):
    TOY_CASES_LINES.append(f"01001,2020-08-{day:02d},5")
    TOY_CASES_LINES.append(f"01003,2020-08-{day:02d},8")
    TOY_CASES_LINES.append(f"01005,2020-08-{day:02d},2")
TOY_CASES = "\n".join(TOY_CASES_LINES) + "\n"

TOY_MODEL = {
    "alpha": -1.0,
    "beta_zone": [0.0, -0.2, -0.5, -0.9, -1.4, -2.0],
    "beta_intensity": [0.0, 0.8, 1.6, 2.4, 3.2, 3.6],
    "lambda": 15.0,
    "fit_meta": {},
}

TOY_COEFFS = {
    "friends": {"distance": -0.004, "log_population": 0.3,
                "threatened": -2.0, "msa": 0.2, "pct_white": 0.1},
    "hotel": {"distance": -0.005, "log_hotels": 0.4,
              "threatened": -2.0, "interstate": 0.3, "pct_white": 0.1},
    "transforms": {"distance": "miles", "population": "log1p",
                   "hotels": "log1p"},
}

TOY_SCENARIO = {
    "name": "toy",
    "category": 4,
    "warned": ["01001"],
    "mandatory": ["01001"],
    "voluntary": [],
    "split": {"friends": 0.6, "hotel": 0.4},
    "prevalence": {"source": "computed", "as_of": "2020-08-26", "window_days": 10},
    "mc_samples": 200,
    "seed": 7,
}


def write_toy_tree(root: Path) -> Path:
    data = root / "data"
    data.mkdir(parents=True, exist_ok=True)
    (data / "counties.csv").write_text(TOY_COUNTIES, encoding="utf-8")
    (data / "cbg.csv").write_text(TOY_CBG, encoding="utf-8")
    (data / "districts.csv").write_text(TOY_DISTRICTS, encoding="utf-8")
    (data / "cases.csv").write_text(TOY_CASES, encoding="utf-8")
    (root / "model.json").write_text(json.dumps(TOY_MODEL), encoding="utf-8")
    (root / "coeffs.json").write_text(json.dumps(TOY_COEFFS), encoding="utf-8")
    (root / "scenario.json").write_text(json.dumps(TOY_SCENARIO), encoding="utf-8")
    return root


@pytest.fixture(scope="session")
def toy_root(tmp_path_factory):
    return write_toy_tree(tmp_path_factory.mktemp("toy"))


@pytest.fixture(scope="session")
def toy_datasets(toy_root):
    return load_datasets(toy_root / "data")


@pytest.fixture(scope="session")
def toy_model():
    from stormflux.evacmodel import model_from_dict
    return model_from_dict(TOY_MODEL)


@pytest.fixture(scope="session")
def toy_coeffs(toy_root):
    friends, hotel, _ = load_coefficients(toy_root / "coeffs.json")
    return friends, hotel


@pytest.fixture(scope="session")
def toy_scenario(toy_root):
    return load_scenario(toy_root / "scenario.json")
