import numpy as np
import pytest

from worldsheets.chart import (GridChart, fd_coefficients,
                               open_axis_weights)
from worldsheets.errors import ChartError

TWO_PI = 2.0 * np.pi


def periodic_chart(n=64):
    return GridChart((n,), ((0.0, TWO_PI),), (True,))


def open_chart(n=65, lo=-1.0, hi=1.0):
    return GridChart((n,), ((lo, hi),), (False,))


def test_fd_coefficients_classic_stencils():
    assert np.allclose(fd_coefficients((-1, 0, 1), 1), [-0.5, 0.0, 0.5])
    assert np.allclose(fd_coefficients((-1, 0, 1), 2), [1.0, -2.0, 1.0])
    # interpolation weights sum to one and reproduce the center
    w = fd_coefficients((-2, -1, 0, 1, 2), 0)
    assert np.allclose(w, [0, 0, 1, 0, 0])


def test_fd_coefficients_rejects_underdetermined():
    with pytest.raises(ChartError):
        fd_coefficients((0, 1), 2)


def test_spectral_derivative_is_exact_for_band_limited_data():
    chart = periodic_chart(32)
    t = chart.axis_coordinates(0)
    f = np.sin(3 * t) + 0.5 * np.cos(7 * t)
    df = 3 * np.cos(3 * t) - 3.5 * np.sin(7 * t)
    assert np.max(np.abs(chart.partial(f, 0) - df)) < 1e-12
    d2f = -9 * np.sin(3 * t) - 24.5 * np.cos(7 * t)
    assert np.max(np.abs(chart.partial2(f, 0) - d2f)) < 1e-10


def test_open_derivative_exact_on_quartics():
    # five-point stencils differentiate degree-4 polynomials exactly,
    # boundary rows included
    chart = open_chart(33)
    x = chart.axis_coordinates(0)
    p = 2.0 + x - 3.0 * x**2 + 0.25 * x**4
    dp = 1.0 - 6.0 * x + x**3
    assert np.max(np.abs(chart.partial(p, 0) - dp)) < 1e-12
    d2p = -6.0 + 3.0 * x**2
    assert np.max(np.abs(chart.partial2(p, 0) - d2p)) < 1e-10


def test_open_derivative_fourth_order_convergence():
    errs = []
    for n in (33, 65, 129):
        chart = open_chart(n)
        x = chart.axis_coordinates(0)
        err = np.max(np.abs(chart.partial(np.sin(3 * x), 0)
                            - 3 * np.cos(3 * x)))
        errs.append(err)
    rate1 = np.log2(errs[0] / errs[1])
    rate2 = np.log2(errs[1] / errs[2])
    assert rate1 > 3.5
    assert rate2 > 3.5


def test_periodic_quadrature_spectral_accuracy():
    chart = periodic_chart(24)
    t = chart.axis_coordinates(0)
    val = chart.integrate(np.exp(np.sin(t)))
    # modified Bessel I_0(1) times 2 pi
    assert abs(val - TWO_PI * 1.2660658777520084) < 1e-13


def test_gregory_weights_integrate_quintic_exactly():
    n, h = 33, 2.0 / 32
    w = open_axis_weights(n, h)
    x = -1.0 + h * np.arange(n)
    assert abs(w @ x**5 - 0.0) < 1e-14
    assert abs(w @ x**4 - 0.4) < 1e-14
    assert abs(np.sum(w) - 2.0) < 1e-14


def test_open_quadrature_order_six():
    errs = []
    for n in (33, 65):
        chart = open_chart(n, 0.0, 1.0)
        x = chart.axis_coordinates(0)
        errs.append(abs(chart.integrate(np.exp(x)) - (np.e - 1.0)))
    assert np.log2(errs[0] / errs[1]) > 5.0


def test_gradient_shape_and_components():
    chart = GridChart((16, 12), ((0.0, TWO_PI), (0.0, 1.0)), (True, False))
    u, v = chart.grids()
    f = np.sin(u) * v**2
    g = chart.gradient(f)
    assert g.shape == (16, 12, 2)
    assert np.max(np.abs(g[..., 0] - np.cos(u) * v**2)) < 1e-10
    assert np.max(np.abs(g[..., 1] - 2 * np.sin(u) * v)) < 1e-8


def test_slice_integral_matches_manual_line_quadrature():
    chart = GridChart((16, 32), ((-1.0, 1.0), (0.0, TWO_PI)),
                      (False, True))
    u, v = chart.grids()
    flux = np.stack([np.cos(v) ** 2 * (1.0 + u), np.sin(v)], axis=-1)
    got = chart.slice_integral(flux, 0, 5)
    want = flux[5, :, 0] @ chart.axis_weights(1)
    assert abs(got - want) < 1e-15
    # and the analytic answer: integral of cos^2 is pi
    assert abs(got - np.pi * (1.0 + chart.axis_coordinates(0)[5])) < 1e-12


def test_refine_doubles_every_axis():
    chart = GridChart((16, 12), ((0.0, 1.0), (0.0, 2.0)), (False, False))
    fine = chart.refine()
    assert fine.sizes == (32, 24)
    assert fine.domains == chart.domains


@pytest.mark.parametrize("bad", [
    dict(sizes=(4,), domains=((0.0, 1.0),), periodic=(False,)),
    dict(sizes=(16,), domains=((1.0, 1.0),), periodic=(False,)),
    dict(sizes=(16, 16), domains=((0.0, 1.0),), periodic=(False, False)),
])
def test_invalid_chart_construction(bad):
    with pytest.raises(ChartError):
        GridChart(**bad)


def test_field_shape_mismatch_raises():
    chart = periodic_chart(16)
    with pytest.raises(ChartError):
        chart.partial(np.zeros(8), 0)
    with pytest.raises(ChartError):
        chart.partial(np.zeros(16), 1)
    with pytest.raises(ChartError):
        chart.integrate(np.zeros((16, 3)))
