"""Shared fixtures: the expensive geometries are built once per session."""

import numpy as np
import pytest

import worldsheets as ws
from worldsheets.geometry import geometry_fields

WINDOW = (-1.0, 1.0)


@pytest.fixture(scope="session")
def cylinder_setup():
    """Static circular string at n=128 with two synthetic deformations.

    The profiles deliberately have nonzero sigma-average in the radial
    frame slot (slot 1 on this surface): several first-variation checks
    integrate K . phi over the circle, and a zero-average profile would
    turn them into vacuous 0 = 0 comparisons.
    """
    emb = ws.static_cylinder(1.0, 128, 128, WINDOW)
    geo = geometry_fields(emb, intrinsic=True, twist=True)
    tau, sigma = np.meshgrid(emb.chart.axis_coordinates(0),
                             emb.chart.axis_coordinates(1), indexing="ij")
    n1 = np.stack([0.3 * np.cos(sigma) * np.cos(np.pi * tau / 2.0),
                   0.5 + 0.2 * np.sin(2.0 * sigma)], axis=-1)
    n2 = np.stack([0.4 * np.sin(sigma),
                   0.3 * np.cos(np.pi * tau / 2.0)], axis=-1)
    zero = np.zeros(emb.chart.shape + (2,))
    d1 = ws.DeformationField(emb, n1, zero, "profile")
    d2 = ws.DeformationField(emb, n2, zero, "profile")
    return emb, geo, d1, d2


@pytest.fixture(scope="session")
def wobble_setup():
    """Wobble-modulation family at n=128, gauge-fixed to normal tangents."""
    fam = ws.WobbleSolutionFamily(n_tau=128, n_sigma=128, tau_window=WINDOW)
    warped, geo, (f1, f2) = ws.normal_gauge_family(fam)
    return fam, warped, geo, f1, f2


@pytest.fixture(scope="session")
def conjugate_setup():
    """Conjugate-quadrature family at n=128 (nonzero two-form pair)."""
    fam = ws.ConjugateWobbleFamily(n_tau=128, n_sigma=128, tau_window=WINDOW)
    base = fam.member((0.0, 0.0))
    geo = geometry_fields(base, intrinsic=True, twist=True)
    f1 = ws.project_deformation(geo, fam.tangent(0))
    f2 = ws.project_deformation(geo, fam.tangent(1))
    return fam, geo, f1, f2


@pytest.fixture(scope="session")
def tilted_circle_setup():
    """Rigid-tilt family over the planar circle pair at n=256."""
    left, right = ws.circle_generators()
    fam = ws.TiltedSolutionFamily(left, right, n_tau=256, n_sigma=256,
                                  tau_window=WINDOW)
    base = fam.member((0.0, 0.0))
    geo = geometry_fields(base, intrinsic=True, twist=True)
    f1 = ws.project_deformation(geo, fam.tangent(0))
    f2 = ws.project_deformation(geo, fam.tangent(1))
    return fam, geo, f1, f2
