import os

import pytest

from cfmac.io import load_joint, load_mac, load_word_distribution

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


@pytest.fixture(scope="session")
def cstar_triple():
    """The committed strict-gain member: channel plus witness inputs."""
    mac = load_mac(fixture_path("cstar_mac.json"))
    p_ind = load_joint(fixture_path("cstar_p_ind.json"))
    p_dep = load_joint(fixture_path("cstar_p_dep.json"))
    return mac, p_ind, p_dep


@pytest.fixture(scope="session")
def wringing_words():
    """Word-level distribution whose only strong dependence sits at coordinate 1."""
    return load_word_distribution(fixture_path("wringing_words.json"))
