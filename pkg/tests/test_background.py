import numpy as np
import pytest

from worldsheets.background import BackgroundSpacetime
from worldsheets.errors import BackgroundError


def test_flat_euclidean_metric_is_identity():
    bg = BackgroundSpacetime.euclidean(4)
    pts = np.random.default_rng(3).standard_normal((5, 4))
    g = bg.metric_at(pts)
    assert g.shape == (5, 4, 4)
    assert np.array_equal(g[0], np.eye(4))
    assert np.all(bg.christoffel_at(pts) == 0.0)


def test_minkowski_signature():
    bg = BackgroundSpacetime.minkowski(4)
    assert bg.signature == (-1, 1, 1, 1)
    g = bg.metric_at(np.zeros((1, 4)))[0]
    assert np.array_equal(g, np.diag([-1.0, 1.0, 1.0, 1.0]))


def test_bad_signature_rejected():
    with pytest.raises(BackgroundError):
        BackgroundSpacetime(3, (1, 2, 1))
    with pytest.raises(BackgroundError):
        BackgroundSpacetime(3, (1, 1))


def test_point_shape_validation():
    bg = BackgroundSpacetime.euclidean(3)
    with pytest.raises(BackgroundError):
        bg.metric_at(np.zeros((4, 2)))
    with pytest.raises(BackgroundError):
        bg.geometry_at(np.zeros(2))


def _polar_metric(x):
    """Flat plane in polar coordinates (r, phi): g = diag(1, r^2)."""
    r = x[0]
    return np.array([[1.0, 0.0], [0.0, r * r]])


def test_curved_chart_christoffels_match_closed_form():
    bg = BackgroundSpacetime(2, (1, 1), metric=_polar_metric, name="polar")
    r = 1.7
    geo = bg.geometry_at(np.array([r, 0.3]))
    # Gamma^r_phiphi = -r, Gamma^phi_rphi = 1/r
    assert abs(geo.christoffel[0, 1, 1] + r) < 1e-9
    assert abs(geo.christoffel[1, 0, 1] - 1.0 / r) < 1e-9
    # flat space in curvilinear coordinates: Riemann vanishes
    assert np.max(np.abs(geo.riemann)) < 1e-6


def _sphere_metric(x):
    """Unit two-sphere in colatitude/longitude coordinates."""
    return np.array([[1.0, 0.0], [0.0, np.sin(x[0]) ** 2]])


def test_sphere_background_riemann():
    bg = BackgroundSpacetime(2, (1, 1), metric=_sphere_metric, name="S2")
    theta = 1.1
    geo = bg.geometry_at(np.array([theta, 2.0]))
    # R^theta_phi theta phi = sin^2 theta on the unit sphere
    assert abs(geo.riemann[0, 1, 0, 1] - np.sin(theta) ** 2) < 1e-6
