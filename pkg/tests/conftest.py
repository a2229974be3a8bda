import pytest

from gfcalc.forms import Chart, FrameMetric, OrdForm
from gfcalc.metricfile import catalog_names, load_catalog_metric
from gfcalc.symexpr import parse_scalar


@pytest.fixture(scope="session")
def catalog():
    return {name: load_catalog_metric(name) for name in catalog_names()}


@pytest.fixture(scope="session")
def schwarzschild(catalog):
    return catalog["schwarzschild"]


@pytest.fixture(scope="session")
def minkowski(catalog):
    return catalog["minkowski_cartesian"]


@pytest.fixture(scope="session")
def de_sitter(catalog):
    return catalog["de_sitter"]


@pytest.fixture(scope="session")
def sphere2():
    """Unit 2-sphere chart and coframe (d th, sin th d ph)."""
    chart = Chart.make("th ph", assume=("th > 0", "th < pi"))
    names = chart.names
    coframe = (
        OrdForm(chart, 1, {(0,): parse_scalar("1", names)}),
        OrdForm(chart, 1, {(1,): parse_scalar("sin(th)", names)}),
    )
    return chart, FrameMetric((1, 1)), coframe
