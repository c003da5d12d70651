"""Reference surface embeddings with closed-form derivatives.

Each builder returns an :class:`~worldsheets.geometry.Embedding` whose
first and second partials are supplied analytically, so downstream
curvature assemblies are limited only by quadrature and the chart's
derivative operators acting on *derived* fields, not on the embedding
itself.
"""

from __future__ import annotations

import numpy as np

from .background import BackgroundSpacetime
from .chart import GridChart
from .geometry import Embedding

TWO_PI = 2.0 * np.pi


def _pack(*components):
    return np.stack(np.broadcast_arrays(*components), axis=-1)


def static_cylinder(radius=1.0, n_tau=64, n_sigma=64, tau_window=(-1.0, 1.0)):
    """Circular string of fixed radius sitting still in 4d Minkowski.

    Not a solution of the equations of motion (the trace of the second
    fundamental form is 1/radius along the radial normal) but a clean
    stage for twist and deformation checks: the second normal direction
    is flat, and the twist potential vanishes identically.
    """
    chart = GridChart((n_tau, n_sigma),
                      (tau_window, (0.0, TWO_PI)),
                      periodic=(False, True))
    bg = BackgroundSpacetime.minkowski(4)
    tau, sigma = chart.grids()
    zero = np.zeros_like(tau)
    one = np.ones_like(tau)
    r = radius
    x = _pack(tau, r * np.cos(sigma), r * np.sin(sigma), zero)
    dx = np.stack([
        _pack(one, zero, zero, zero),
        _pack(zero, -r * np.sin(sigma), r * np.cos(sigma), zero),
    ], axis=-2)
    dxx = _pack(zero, zero, zero, zero)
    dss = _pack(zero, -r * np.cos(sigma), -r * np.sin(sigma), zero)
    ddx = np.stack([
        np.stack([dxx, dxx], axis=-2),
        np.stack([dxx, dss], axis=-2),
    ], axis=-3)
    return Embedding(chart, bg, x, dx, ddx, name="static-cylinder")


def flat_plane(n_u=32, n_v=32, extent=1.0):
    """Planar sheet in Euclidean 4-space; every curvature field vanishes."""
    chart = GridChart((n_u, n_v),
                      ((0.0, extent), (0.0, extent)),
                      periodic=(False, False))
    bg = BackgroundSpacetime.euclidean(4)
    u, v = chart.grids()
    zero = np.zeros_like(u)
    one = np.ones_like(u)
    x = _pack(u, v, zero, zero)
    dx = np.stack([
        _pack(one, zero, zero, zero),
        _pack(zero, one, zero, zero),
    ], axis=-2)
    z4 = _pack(zero, zero, zero, zero)
    ddx = np.stack([np.stack([z4, z4], axis=-2),
                    np.stack([z4, z4], axis=-2)], axis=-3)
    return Embedding(chart, bg, x, dx, ddx, name="flat-plane")


def product_torus(r1=1.0, r2=1.0, n_u=64, n_v=64):
    """Product of two circles in Euclidean 4-space (Clifford for r1=r2).

    Intrinsically flat; the normal bundle is trivial, so the twist
    curvature integrates to zero.
    """
    chart = GridChart((n_u, n_v), ((0.0, TWO_PI), (0.0, TWO_PI)),
                      periodic=(True, True))
    bg = BackgroundSpacetime.euclidean(4)
    u, v = chart.grids()
    zero = np.zeros_like(u)
    cu, su, cv, sv = np.cos(u), np.sin(u), np.cos(v), np.sin(v)
    x = _pack(r1 * cu, r1 * su, r2 * cv, r2 * sv)
    du = _pack(-r1 * su, r1 * cu, zero, zero)
    dv = _pack(zero, zero, -r2 * sv, r2 * cv)
    dx = np.stack([du, dv], axis=-2)
    duu = _pack(-r1 * cu, -r1 * su, zero, zero)
    dvv = _pack(zero, zero, -r2 * cv, -r2 * sv)
    duv = _pack(zero, zero, zero, zero)
    ddx = np.stack([np.stack([duu, duv], axis=-2),
                    np.stack([duv, dvv], axis=-2)], axis=-3)
    return Embedding(chart, bg, x, dx, ddx, name="product-torus")


def round_sphere(radius=1.0, cap=0.1, n_theta=64, n_phi=64):
    """Round sphere in Euclidean 3-space with polar caps excluded.

    The polar chart degenerates at the poles, so the colatitude runs over
    ``[cap, pi - cap]``; invariant integrals over the missing caps shrink
    like ``cap**2`` and can be removed by extrapolation.
    """
    chart = GridChart((n_theta, n_phi),
                      ((cap, np.pi - cap), (0.0, TWO_PI)),
                      periodic=(False, True))
    bg = BackgroundSpacetime.euclidean(3)
    th, ph = chart.grids()
    st, ct = np.sin(th), np.cos(th)
    cp, sp = np.cos(ph), np.sin(ph)
    R = radius
    x = _pack(R * st * cp, R * st * sp, R * ct)
    dth = _pack(R * ct * cp, R * ct * sp, -R * st)
    dph = _pack(-R * st * sp, R * st * cp, np.zeros_like(th))
    dx = np.stack([dth, dph], axis=-2)
    dthth = _pack(-R * st * cp, -R * st * sp, -R * ct)
    dthph = _pack(-R * ct * sp, R * ct * cp, np.zeros_like(th))
    dphph = _pack(-R * st * cp, -R * st * sp, np.zeros_like(th))
    ddx = np.stack([np.stack([dthth, dthph], axis=-2),
                    np.stack([dthph, dphph], axis=-2)], axis=-3)
    return Embedding(chart, bg, x, dx, ddx, name="round-sphere")


def whitney_sphere(cap=0.1, n_theta=64, n_phi=64):
    """Lagrangian sphere immersion in Euclidean 4-space with one double point.

    The unit sphere point ``(x, y, z)`` maps to
    ``(x, x z, y, y z) / (1 + z^2)``; both poles land on the origin.  The
    normal bundle twists, and its curvature integrates to minus the Euler
    characteristic of the sphere (up to the frame-orientation sign).
    """
    chart = GridChart((n_theta, n_phi),
                      ((cap, np.pi - cap), (0.0, TWO_PI)),
                      periodic=(False, True))
    bg = BackgroundSpacetime.euclidean(4)
    th, ph = chart.grids()
    s, c = np.sin(th), np.cos(th)
    cp, sp = np.cos(ph), np.sin(ph)
    D = 1.0 + c * c
    f = s / D
    h = s * c / D
    # d/dtheta of f and h, and second derivatives, in closed form
    fp = c * (3.0 - c * c) / D**2
    hp = (3.0 * c * c - 1.0) / D**2
    fpp = -s * (3.0 - 12.0 * c * c + c**4) / D**3
    hpp = -s * c * (10.0 - 6.0 * c * c) / D**3
    x = _pack(f * cp, h * cp, f * sp, h * sp)
    dth = _pack(fp * cp, hp * cp, fp * sp, hp * sp)
    dph = _pack(-f * sp, -h * sp, f * cp, h * cp)
    dx = np.stack([dth, dph], axis=-2)
    dthth = _pack(fpp * cp, hpp * cp, fpp * sp, hpp * sp)
    dthph = _pack(-fp * sp, -hp * sp, fp * cp, hp * cp)
    dphph = _pack(-f * cp, -h * cp, -f * sp, -h * sp)
    ddx = np.stack([np.stack([dthth, dthph], axis=-2),
                    np.stack([dthph, dphph], axis=-2)], axis=-3)
    return Embedding(chart, bg, x, dx, ddx, name="whitney-sphere")


def revolution_torus(ring=2.0, tube=0.5, n_alpha=64, n_beta=64):
    """Torus of revolution in Euclidean 3-space (codimension one).

    Gaussian curvature varies with the tube angle, making it a good
    non-homogeneous check for the intrinsic/extrinsic curvature routes.
    """
    chart = GridChart((n_alpha, n_beta), ((0.0, TWO_PI), (0.0, TWO_PI)),
                      periodic=(True, True))
    bg = BackgroundSpacetime.euclidean(3)
    al, be = chart.grids()
    ca, sa = np.cos(al), np.sin(al)
    cb, sb = np.cos(be), np.sin(be)
    w = ring + tube * ca
    zero = np.zeros_like(al)
    x = _pack(w * cb, w * sb, tube * sa)
    da = _pack(-tube * sa * cb, -tube * sa * sb, tube * ca)
    db = _pack(-w * sb, w * cb, zero)
    dx = np.stack([da, db], axis=-2)
    daa = _pack(-tube * ca * cb, -tube * ca * sb, -tube * sa)
    dab = _pack(tube * sa * sb, -tube * sa * cb, zero)
    dbb = _pack(-w * cb, -w * sb, zero)
    ddx = np.stack([np.stack([daa, dab], axis=-2),
                    np.stack([dab, dbb], axis=-2)], axis=-3)
    return Embedding(chart, bg, x, dx, ddx, name="revolution-torus")


def torus_times_circle(ring=2.0, tube=0.5, loop=1.0,
                       n_alpha=32, n_beta=32, n_lam=32):
    """Three-dimensional control worldvolume in Euclidean 5-space.

    Product of a torus of revolution with a circle.  Its Einstein tensor
    does not vanish (the circle block carries the torus curvature), which
    is exactly what distinguishes d = 3 from the two-dimensional case.
    """
    chart = GridChart((n_alpha, n_beta, n_lam),
                      ((0.0, TWO_PI),) * 3, periodic=(True, True, True))
    bg = BackgroundSpacetime.euclidean(5)
    al, be, lam = chart.grids()
    ca, sa = np.cos(al), np.sin(al)
    cb, sb = np.cos(be), np.sin(be)
    cl, sl = np.cos(lam), np.sin(lam)
    w = ring + tube * ca
    zero = np.zeros_like(al)
    x = _pack(w * cb, w * sb, tube * sa, loop * cl, loop * sl)
    da = _pack(-tube * sa * cb, -tube * sa * sb, tube * ca, zero, zero)
    db = _pack(-w * sb, w * cb, zero, zero, zero)
    dl = _pack(zero, zero, zero, -loop * sl, loop * cl)
    dx = np.stack([da, db, dl], axis=-2)
    daa = _pack(-tube * ca * cb, -tube * ca * sb, -tube * sa, zero, zero)
    dab = _pack(tube * sa * sb, -tube * sa * cb, zero, zero, zero)
    dbb = _pack(-w * cb, -w * sb, zero, zero, zero)
    dll = _pack(zero, zero, zero, -loop * cl, -loop * sl)
    z5 = _pack(zero, zero, zero, zero, zero)
    rows = [
        [daa, dab, z5],
        [dab, dbb, z5],
        [z5, z5, dll],
    ]
    ddx = np.stack([np.stack(r, axis=-2) for r in rows], axis=-3)
    return Embedding(chart, bg, x, dx, ddx, name="torus-times-circle")


def catenoid(neck=0.8483379867,  # solves neck*cosh(0.5/neck) = 1
             n_z=33, n_phi=64, half_height=0.5):
    """Exact minimal surface of revolution between two unit rings."""
    chart = GridChart((n_z, n_phi),
                      ((-half_height, half_height), (0.0, TWO_PI)),
                      periodic=(False, True))
    bg = BackgroundSpacetime.euclidean(3)
    z, ph = chart.grids()
    c = neck
    rho = c * np.cosh(z / c)
    drho = np.sinh(z / c)
    ddrho = np.cosh(z / c) / c
    cp, sp = np.cos(ph), np.sin(ph)
    zero = np.zeros_like(z)
    one = np.ones_like(z)
    x = _pack(rho * cp, rho * sp, z)
    dz = _pack(drho * cp, drho * sp, one)
    dp = _pack(-rho * sp, rho * cp, zero)
    dx = np.stack([dz, dp], axis=-2)
    dzz = _pack(ddrho * cp, ddrho * sp, zero)
    dzp = _pack(-drho * sp, drho * cp, zero)
    dpp = _pack(-rho * cp, -rho * sp, zero)
    ddx = np.stack([np.stack([dzz, dzp], axis=-2),
                    np.stack([dzp, dpp], axis=-2)], axis=-3)
    return Embedding(chart, bg, x, dx, ddx, name="catenoid")


def ring_cylinder(radius=1.0, n_z=33, n_phi=64, half_height=0.5):
    """Straight cylinder between two rings; relaxation seed for the catenoid."""
    chart = GridChart((n_z, n_phi),
                      ((-half_height, half_height), (0.0, TWO_PI)),
                      periodic=(False, True))
    bg = BackgroundSpacetime.euclidean(3)
    z, ph = chart.grids()
    cp, sp = np.cos(ph), np.sin(ph)
    zero = np.zeros_like(z)
    one = np.ones_like(z)
    r = radius
    x = _pack(r * cp, r * sp, z)
    dz = _pack(zero, zero, one)
    dp = _pack(-r * sp, r * cp, zero)
    dx = np.stack([dz, dp], axis=-2)
    z3 = _pack(zero, zero, zero)
    dpp = _pack(-r * cp, -r * sp, zero)
    ddx = np.stack([np.stack([z3, z3], axis=-2),
                    np.stack([z3, dpp], axis=-2)], axis=-3)
    return Embedding(chart, bg, x, dx, ddx, name="ring-cylinder")
