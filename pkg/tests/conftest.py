import pytest

from d2dmotif.interference import LaplaceContext
from d2dmotif.motifstats import motif_statistics
from d2dmotif.performance import laplace_table
from d2dmotif.pointprocess import NetworkConfig


@pytest.fixture(scope="session")
def default_config():
    return NetworkConfig()


@pytest.fixture(scope="session")
def default_stats(default_config):
    return motif_statistics(default_config)


@pytest.fixture(scope="session")
def default_ctx(default_config, default_stats):
    return LaplaceContext.from_config(default_config, default_stats.p_ss)


@pytest.fixture(scope="session")
def default_table(default_ctx):
    return laplace_table(default_ctx)


@pytest.fixture(scope="session")
def outage_config():
    """Small, dense clusters used for the outage comparisons."""
    return NetworkConfig(devices_per_cluster=25, parent_density=20.0)


@pytest.fixture(scope="session")
def outage_ctx(outage_config):
    return LaplaceContext.from_config(outage_config, motif_statistics(outage_config).p_ss)



_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    """Per-criterion verdict lines, echoed in the terminal summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_ACCEPTANCE, {})
    if rows:
        terminalreporter.section("acceptance criteria")
        for number in sorted(rows):
            terminalreporter.write_line(rows[number])
