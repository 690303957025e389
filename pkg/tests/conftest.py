import numpy as np
import pytest

from einlocus import RealTangent
from einlocus.sampling import sample_chart_points


def admitted_points(chart, count, seed=0):
    pts, _ = sample_chart_points(chart, count, seed=seed)
    assert len(pts) >= min(count, 2), f"could not sample {chart.label}"
    return pts


def random_tangents(point, count, seed=0):
    rng = np.random.default_rng(seed)
    dim = 2 * point.n
    return [RealTangent(rng.standard_normal(dim), point) for _ in range(count)]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
