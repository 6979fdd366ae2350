import pytest

from retroflow import fixtures
from retroflow.experiment import make_world


@pytest.fixture(scope="session")
def att_topology():
    return fixtures.att25_topology()


@pytest.fixture(scope="session")
def att_placement(att_topology):
    return fixtures.att_table2_placement(att_topology)


@pytest.fixture(scope="session")
def att_world(att_topology, att_placement):
    # all-pairs flows plus the programmability matrix: built once, reused
    return make_world(att_topology, att_placement)


@pytest.fixture(scope="session")
def ring5():
    return fixtures.ring5_topology()


@pytest.fixture()
def toy():
    """Five offline switches, two surviving controllers, three flows."""
    return fixtures.toy_recovery_instance()
