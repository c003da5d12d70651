"""Uniform grid charts with spectral and finite-difference calculus.

A :class:`GridChart` discretizes a d-dimensional parameter domain as a
tensor-product grid.  Periodic axes are sampled on ``[lo, hi)`` without the
right endpoint and differentiated with the FFT; open axes include both
endpoints and use 4th-order centered finite differences with one-sided
stencils near the ends.  Quadrature is the trapezoid rule on periodic axes
(spectrally accurate there) and a Gregory end-corrected trapezoid rule on
open axes.

Fields are numpy arrays whose leading ``d`` axes are the grid axes; any
trailing axes are treated as components and broadcast through every
operation.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ChartError

_MIN_NODES = 8


def fd_coefficients(offsets, order):
    """Finite-difference weights for a derivative on integer node offsets.

    Solves the usual Vandermonde moment system, so the weights are exact
    for polynomials of degree ``len(offsets) - 1``.

    Parameters
    ----------
    offsets : sequence of int
        Stencil node positions relative to the evaluation point.
    order : int
        Derivative order (0 gives interpolation weights).
    """
    offs = np.asarray(offsets, dtype=float)
    n = offs.size
    if order >= n:
        raise ChartError(f"need more than {n} points for derivative order {order}")
    powers = np.arange(n)[:, None]
    system = offs[None, :] ** powers
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(system, rhs)


@lru_cache(maxsize=None)
def _open_derivative_matrix(n, order):
    """Dense n-by-n derivative matrix for a unit-spacing open axis.

    4th-order accurate: centered five-point stencils in the interior,
    one-sided five-point (first derivative) or six-point (second
    derivative) stencils in the two rows nearest each end.
    """
    width = 2
    npts = 5 if order == 1 else 6
    mat = np.zeros((n, n))
    center = fd_coefficients(range(-width, width + 1), order)
    for i in range(n):
        if i < width:
            offs = np.arange(npts) - i
        elif i >= n - width:
            offs = np.arange(-(npts - 1), 1) + (n - 1 - i)
        else:
            mat[i, i - width : i + width + 1] = center
            continue
        mat[i, i + offs] = fd_coefficients(offs, order)
    return mat


# Boundary weights of Gregory's order-6 end-corrected trapezoid rule.
# Exact through degree-5 polynomials, O(h^6) error on smooth integrands.
_GREGORY6 = np.array([95 / 288, 317 / 240, 23 / 30, 793 / 720, 157 / 160])


def open_axis_weights(n, h):
    """Quadrature weights for an open axis with n nodes and spacing h.

    Gregory's order-6 rule when enough nodes are available, otherwise the
    plain trapezoid rule.
    """
    w = np.ones(n)
    m = _GREGORY6.size
    if n >= 2 * m + 2:
        w[:m] = _GREGORY6
        w[-m:] = _GREGORY6[::-1]
    else:
        w[0] = w[-1] = 0.5
    return w * h


def _spectral_wavenumbers(n, length):
    k = np.fft.fftfreq(n, d=1.0 / n) * (2.0 * np.pi / length)
    return k


class GridChart:
    """Tensor-product parameter grid with per-axis calculus.

    Parameters
    ----------
    sizes : sequence of int
        Node count per axis (at least 8 each).
    domains : sequence of (float, float)
        Coordinate interval per axis.  Periodic axes cover ``[lo, hi)``,
        open axes ``[lo, hi]`` inclusive.
    periodic : sequence of bool
        Periodicity flag per axis.
    """

    def __init__(self, sizes, domains, periodic):
        sizes = tuple(int(s) for s in sizes)
        domains = tuple((float(a), float(b)) for a, b in domains)
        periodic = tuple(bool(p) for p in periodic)
        if not (len(sizes) == len(domains) == len(periodic)):
            raise ChartError("sizes, domains and periodic must have equal length")
        if len(sizes) == 0:
            raise ChartError("chart needs at least one axis")
        for s in sizes:
            if s < _MIN_NODES:
                raise ChartError(f"axis size {s} below minimum {_MIN_NODES}")
        for lo, hi in domains:
            if not hi > lo:
                raise ChartError(f"empty axis domain [{lo}, {hi}]")
        self.sizes = sizes
        self.domains = domains
        self.periodic = periodic
        self.dims = len(sizes)
        self.spacings = tuple(
            (hi - lo) / (n if per else n - 1)
            for n, (lo, hi), per in zip(sizes, domains, periodic)
        )
        self._axis_coords = tuple(
            lo + self.spacings[a] * np.arange(sizes[a])
            for a, (lo, hi) in enumerate(domains)
        )
        self._weights = tuple(
            np.full(n, h) if per else open_axis_weights(n, h)
            for n, h, per in zip(sizes, self.spacings, periodic)
        )

    @property
    def shape(self):
        return self.sizes

    def axis_coordinates(self, axis):
        """1-D node coordinates along one axis."""
        self._check_axis(axis)
        return self._axis_coords[axis]

    def grids(self):
        """Dense coordinate arrays, one per axis, each of full grid shape."""
        return np.meshgrid(*self._axis_coords, indexing="ij")

    def axis_weights(self, axis):
        self._check_axis(axis)
        return self._weights[axis]

    def _check_axis(self, axis):
        if not 0 <= axis < self.dims:
            raise ChartError(f"axis {axis} out of range for {self.dims}-d chart")

    def _check_field(self, field):
        field = np.asarray(field)
        if field.shape[: self.dims] != self.sizes:
            raise ChartError(
                f"field shape {field.shape} does not start with grid shape {self.sizes}"
            )
        return field

    def partial(self, field, axis):
        """First partial derivative along one grid axis.

        Spectral on periodic axes (the Nyquist mode is zeroed, as usual for
        odd derivatives of real data), 4th-order finite differences with
        one-sided end stencils on open axes.
        """
        self._check_axis(axis)
        field = self._check_field(field)
        if self.periodic[axis]:
            n = self.sizes[axis]
            length = self.domains[axis][1] - self.domains[axis][0]
            k = _spectral_wavenumbers(n, length)
            if n % 2 == 0:
                k = k.copy()
                k[n // 2] = 0.0
            fhat = np.fft.fft(field, axis=axis)
            shape = [1] * field.ndim
            shape[axis] = n
            out = np.fft.ifft(fhat * (1j * k).reshape(shape), axis=axis)
            return np.ascontiguousarray(out.real)
        mat = _open_derivative_matrix(self.sizes[axis], 1) / self.spacings[axis]
        return self._apply_matrix(mat, field, axis)

    def partial2(self, field, axis):
        """Second partial derivative along one axis (direct stencil)."""
        self._check_axis(axis)
        field = self._check_field(field)
        if self.periodic[axis]:
            n = self.sizes[axis]
            length = self.domains[axis][1] - self.domains[axis][0]
            k = _spectral_wavenumbers(n, length)
            fhat = np.fft.fft(field, axis=axis)
            shape = [1] * field.ndim
            shape[axis] = n
            out = np.fft.ifft(fhat * (-(k**2)).reshape(shape), axis=axis)
            return np.ascontiguousarray(out.real)
        mat = _open_derivative_matrix(self.sizes[axis], 2) / self.spacings[axis] ** 2
        return self._apply_matrix(mat, field, axis)

    @staticmethod
    def _apply_matrix(mat, field, axis):
        moved = np.moveaxis(field, axis, 0)
        flat = moved.reshape(moved.shape[0], -1)
        out = (mat @ flat).reshape(moved.shape)
        return np.ascontiguousarray(np.moveaxis(out, 0, axis))

    def gradient(self, field):
        """Stack of all first partials; new axis inserted after the grid axes.

        Output shape is ``grid_shape + (dims,) + component_shape``.
        """
        parts = [self.partial(field, a) for a in range(self.dims)]
        return np.stack(parts, axis=self.dims)

    def integrate(self, density):
        """Quadrature of a scalar density over the whole chart.

        Plain weighted sum of node values; exact for constants by
        construction of the weights.
        """
        density = self._check_field(density)
        if density.ndim != self.dims:
            raise ChartError("integrate expects a scalar density")
        out = density
        for axis in reversed(range(self.dims)):
            out = np.tensordot(out, self._weights[axis], axes=([axis], [0]))
        return float(out)

    def slice_integral(self, flux, slice_axis, index):
        """Integrate the ``slice_axis`` component of a flux over one slice.

        ``flux`` has shape ``grid_shape + (dims,)``: one contravariant
        component per axis.  The slice is the set of nodes with the given
        index on ``slice_axis``; the remaining axes are integrated with
        their own weights.  Only d = 2 charts are supported, matching the
        codimension-two use downstream.
        """
        if self.dims != 2:
            raise ChartError("slice_integral requires a 2-d chart")
        self._check_axis(slice_axis)
        flux = self._check_field(flux)
        if flux.shape != self.sizes + (self.dims,):
            raise ChartError(
                f"flux shape {flux.shape} must be grid shape + ({self.dims},)"
            )
        n = self.sizes[slice_axis]
        if not -n <= index < n:
            raise ChartError(f"slice index {index} out of range")
        comp = flux[..., slice_axis]
        line = np.take(comp, index, axis=slice_axis)
        other = 1 - slice_axis
        return float(line @ self._weights[other])

    def refine(self, factor=2):
        """New chart with every axis size multiplied by ``factor``."""
        if factor < 1:
            raise ChartError("refinement factor must be >= 1")
        return GridChart(
            tuple(s * factor for s in self.sizes), self.domains, self.periodic
        )

    def __repr__(self):
        axes = ", ".join(
            f"[{lo:g},{hi:g}{')' if per else ']'}x{n}"
            for n, (lo, hi), per in zip(self.sizes, self.domains, self.periodic)
        )
        return f"GridChart({axes})"
