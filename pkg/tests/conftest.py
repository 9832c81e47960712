import pytest

from basesplit.cost import CostProfile
from basesplit.scenario import ScenarioSpec, build_scenario, small_oracle_scenario


@pytest.fixture(scope="session")
def profile():
    return CostProfile()


@pytest.fixture(scope="session")
def small():
    return small_oracle_scenario()


@pytest.fixture(scope="session")
def two_cell():
    return build_scenario(ScenarioSpec(2, 2, False))


@pytest.fixture(scope="session")
def two_cell_comp():
    return build_scenario(ScenarioSpec(2, 2, True))


def by_label(graph, label):
    return next(n.id for n in graph.nodes if n.label == label)
