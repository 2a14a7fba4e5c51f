import pathlib

import pytest

REPO = pathlib.Path(__file__).resolve().parent.parent
SCENARIOS = REPO / "scenarios"


@pytest.fixture
def paper_scenario_path() -> str:
    return str(SCENARIOS / "paper.scenario")


@pytest.fixture
def hopping_scenario_path() -> str:
    return str(SCENARIOS / "hopping.scenario")
