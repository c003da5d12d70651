"""Background (ambient) spacetimes that worldsheets are embedded in.

The backgrounds used throughout the test surfaces are flat, where every
connection coefficient vanishes identically and the fast paths below
return exact zeros.  A general metric callback is supported as well; its
Christoffel symbols and Riemann tensor are assembled from centered finite
differences of the metric components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BackgroundError

_FD_STEP = 1e-5


@dataclass
class PointGeometry:
    """Metric data at a single point: g, its inverse, Christoffels, Riemann.

    ``christoffel[m, a, b]`` is Gamma^m_ab and ``riemann[m, n, a, b]`` is
    R^m_nab in the convention R^m_nab = d_a Gamma^m_bn - d_b Gamma^m_an
    + Gamma^m_ac Gamma^c_bn - Gamma^m_bc Gamma^c_an.
    """

    metric: np.ndarray
    inverse: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray


class BackgroundSpacetime:
    """Ambient pseudo-Riemannian manifold of dimension ``dimension``.

    Parameters
    ----------
    dimension : int
    signature : sequence of {+1, -1}, optional
        Diagonal signature of the flat metric.  Defaults to Euclidean.
    metric : callable, optional
        ``metric(x) -> (dimension, dimension) array`` for a curved
        background; must accept a single point.  When omitted the metric
        is the constant diagonal built from ``signature``.
    name : str, optional
    """

    def __init__(self, dimension, signature=None, metric=None, name=""):
        dimension = int(dimension)
        if dimension < 2:
            raise BackgroundError("background dimension must be at least 2")
        if signature is None:
            signature = (1,) * dimension
        signature = tuple(int(s) for s in signature)
        if len(signature) != dimension or any(s not in (-1, 1) for s in signature):
            raise BackgroundError(f"bad signature {signature}")
        self.dimension = dimension
        self.signature = signature
        self._metric_fn = metric
        self.name = name or ("flat" if metric is None else "curved")

    @classmethod
    def euclidean(cls, dimension):
        return cls(dimension, (1,) * dimension, name=f"euclidean{dimension}")

    @classmethod
    def minkowski(cls, dimension):
        """Flat Lorentzian background with signature (-, +, ..., +)."""
        return cls(dimension, (-1,) + (1,) * (dimension - 1), name=f"minkowski{dimension}")

    @property
    def is_flat(self):
        return self._metric_fn is None

    @property
    def signature_array(self):
        return np.array(self.signature, dtype=float)

    def metric_at(self, points):
        """Metric components at an array of points, shape (..., N, N)."""
        points = self._check_points(points)
        if self.is_flat:
            g = np.zeros(points.shape[:-1] + (self.dimension, self.dimension))
            idx = np.arange(self.dimension)
            g[..., idx, idx] = self.signature_array
            return g
        flat = points.reshape(-1, self.dimension)
        out = np.stack([np.asarray(self._metric_fn(x), dtype=float) for x in flat])
        return out.reshape(points.shape[:-1] + (self.dimension, self.dimension))

    def christoffel_at(self, points):
        """Gamma^m_ab at an array of points, shape (..., N, N, N)."""
        points = self._check_points(points)
        n = self.dimension
        if self.is_flat:
            return np.zeros(points.shape[:-1] + (n, n, n))
        flat = points.reshape(-1, n)
        out = np.stack([self._christoffel_point(x) for x in flat])
        return out.reshape(points.shape[:-1] + (n, n, n))

    def geometry_at(self, point):
        """Full :class:`PointGeometry` at a single point."""
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dimension,):
            raise BackgroundError(f"point shape {point.shape} != ({self.dimension},)")
        n = self.dimension
        g = self.metric_at(point[None])[0]
        ginv = np.linalg.inv(g)
        if self.is_flat:
            zero3 = np.zeros((n, n, n))
            return PointGeometry(g, ginv, zero3, np.zeros((n, n, n, n)))
        dg = self._metric_gradient(point)
        gamma = self._christoffel_from(ginv, dg)
        riemann = self._riemann_point(point, g, ginv, dg, gamma)
        return PointGeometry(g, ginv, gamma, riemann)

    # internals ---------------------------------------------------------

    def _check_points(self, points):
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dimension:
            raise BackgroundError(
                f"points last axis {points.shape[-1]} != dimension {self.dimension}"
            )
        return points

    def _metric_gradient(self, x, h=_FD_STEP):
        """dg[l, m, n] = d_l g_mn by centered differences."""
        n = self.dimension
        dg = np.empty((n, n, n))
        for l in range(n):
            xp = x.copy()
            xm = x.copy()
            xp[l] += h
            xm[l] -= h
            dg[l] = (self._metric_fn(xp) - np.asarray(self._metric_fn(xm))) / (2 * h)
        return dg

    # Second differences use a larger step than first differences: at 1e-5
    # the h^-2 roundoff amplification would sit right at 1e-6, swamping the
    # h^2 truncation term.  1e-4 balances the two near 1e-8.
    def _metric_hessian(self, x, h=1e-4):
        """ddg[k, l, m, n] = d_k d_l g_mn (centered, cross stencil)."""
        n = self.dimension
        g0 = np.asarray(self._metric_fn(x), dtype=float)
        ddg = np.empty((n, n, n, n))
        for k in range(n):
            for l in range(k, n):
                if k == l:
                    xp = x.copy()
                    xm = x.copy()
                    xp[k] += h
                    xm[k] -= h
                    val = (
                        np.asarray(self._metric_fn(xp))
                        - 2 * g0
                        + np.asarray(self._metric_fn(xm))
                    ) / h**2
                else:
                    val = np.zeros((n, n))
                    for sk in (1, -1):
                        for sl in (1, -1):
                            xx = x.copy()
                            xx[k] += sk * h
                            xx[l] += sl * h
                            val += sk * sl * np.asarray(self._metric_fn(xx))
                    val /= 4 * h**2
                ddg[k, l] = val
                ddg[l, k] = val
        return ddg

    @staticmethod
    def _christoffel_from(ginv, dg):
        # Gamma^m_ab = 1/2 g^mn (d_a g_nb + d_b g_na - d_n g_ab)
        bracket = (
            np.einsum("anb->nab", dg) + np.einsum("bna->nab", dg) - dg
        )
        return 0.5 * np.einsum("mn,nab->mab", ginv, bracket)

    def _christoffel_point(self, x):
        g = np.asarray(self._metric_fn(x), dtype=float)
        return self._christoffel_from(np.linalg.inv(g), self._metric_gradient(x))

    def _riemann_point(self, x, g, ginv, dg, gamma):
        """R^m_nab assembled from first and second metric derivatives."""
        ddg = self._metric_hessian(x)
        dginv = -np.einsum("mp,apq,qk->amk", ginv, dg, ginv)
        # B[k, b, n] = d_b g_kn + d_n g_kb - d_k g_bn and its gradient dB
        B = np.einsum("bkn->kbn", dg) + np.einsum("nkb->kbn", dg) - dg
        dB = (
            np.einsum("abkn->akbn", ddg)
            + np.einsum("ankb->akbn", ddg)
            - np.einsum("akbn->akbn", ddg)
        )
        # dGamma[a, m, b, n] = d_a Gamma^m_bn
        dGamma = 0.5 * (
            np.einsum("amk,kbn->ambn", dginv, B) + np.einsum("mk,akbn->ambn", ginv, dB)
        )
        return (
            np.einsum("ambn->mnab", dGamma)
            - np.einsum("bman->mnab", dGamma)
            + np.einsum("mac,cbn->mnab", gamma, gamma)
            - np.einsum("mbc,can->mnab", gamma, gamma)
        )

    def __repr__(self):
        tag = "flat" if self.is_flat else "curved"
        return f"BackgroundSpacetime({self.name}, dim={self.dimension}, {tag})"
