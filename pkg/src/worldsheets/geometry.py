"""Worldsheet geometry: embeddings, frames, curvature towers.

An :class:`Embedding` is a sampled map from a :class:`~worldsheets.chart.GridChart`
into a :class:`~worldsheets.background.BackgroundSpacetime`.  From it we build
tangent and normal frames, the induced metric, intrinsic curvature, the
second fundamental form, and the normal-bundle (twist) connection and its
curvature.

Conventions
-----------
* ``K_ab^i = -g(n^i, d_a e_b + ambient Gamma term)``; with this sign the
  normal variation of the induced metric is ``2 K_ab^i phi_i`` and the mean
  curvature vector is ``-K^i n_i``.
* ``omega_a^{ij} = g(n^i, d_a n^j + ambient Gamma term)``, antisymmetrized
  in ``ij``; its curvature is ``Omega_ab^{ij} = d_b omega_a^{ij} -
  d_a omega_b^{ij}``.
* The twist scalar counts each antisymmetric index pair once:
  ``Omega = Omega_01^{01} / sqrt|gamma|`` for codimension two, so that
  ``(1/2pi) * integral(sqrt|gamma| * Omega)`` is an integer for closed
  normal bundles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .background import BackgroundSpacetime
from .chart import GridChart
from .errors import DegenerateMetricError, EmbeddingError, FrameError

DEGENERACY_THRESHOLD = 1e-8
_FRAME_RESIDUAL_TOL = 1e-6


class Embedding:
    """Sampled worldsheet ``X^mu(xi)`` with optional analytic derivatives.

    Parameters
    ----------
    chart : GridChart
    background : BackgroundSpacetime
    x : array, shape ``grid_shape + (N,)``
    dx : array, shape ``grid_shape + (d, N)``, optional
        First partials ``d_a X^mu`` when known in closed form.  When absent
        the chart's derivative operators are used.
    ddx : array, shape ``grid_shape + (d, d, N)``, optional
        Second partials ``d_a d_b X^mu``.
    """

    def __init__(self, chart: GridChart, background: BackgroundSpacetime, x,
                 dx=None, ddx=None, d3x=None, name=""):
        self.chart = chart
        self.background = background
        x = np.asarray(x, dtype=float)
        want = chart.shape + (background.dimension,)
        if x.shape != want:
            raise EmbeddingError(f"samples shape {x.shape}, expected {want}")
        if not np.isfinite(x).all():
            raise EmbeddingError("embedding samples contain non-finite values")
        self.x = x
        d, n = chart.dims, background.dimension
        if dx is not None:
            dx = np.asarray(dx, dtype=float)
            if dx.shape != chart.shape + (d, n):
                raise EmbeddingError("dx shape mismatch")
        if ddx is not None:
            ddx = np.asarray(ddx, dtype=float)
            if ddx.shape != chart.shape + (d, d, n):
                raise EmbeddingError("ddx shape mismatch")
        if d3x is not None:
            d3x = np.asarray(d3x, dtype=float)
            if d3x.shape != chart.shape + (d, d, d, n):
                raise EmbeddingError("d3x shape mismatch")
        self.dx = dx
        self.ddx = ddx
        self.d3x = d3x
        self.name = name
        self._cache = {}

    @property
    def codimension(self):
        return self.background.dimension - self.chart.dims

    def tangents(self):
        """First partials ``e_a^mu``, shape ``grid + (d, N)``."""
        if self.dx is not None:
            return self.dx
        key = "tangents"
        if key not in self._cache:
            self._cache[key] = self.chart.gradient(self.x)
        return self._cache[key]

    def second_partials(self):
        """Second partials ``d_a d_b X^mu``, symmetric in ``ab``."""
        if self.ddx is not None:
            return self.ddx
        key = "second"
        if key not in self._cache:
            ch = self.chart
            d = ch.dims
            e = self.tangents()
            out = np.empty(ch.shape + (d, d, self.background.dimension))
            for a in range(d):
                out[..., a, a, :] = ch.partial2(self.x, a)
                for b in range(a + 1, d):
                    mixed = ch.partial(e[..., b, :], a)
                    out[..., a, b, :] = mixed
                    out[..., b, a, :] = mixed
            self._cache[key] = out
        return self._cache[key]

    def metric_nodes(self):
        """Ambient metric at every node, or None for a flat background."""
        if self.background.is_flat:
            return None
        key = "g_nodes"
        if key not in self._cache:
            self._cache[key] = self.background.metric_at(self.x)
        return self._cache[key]

    def christoffel_nodes(self):
        if self.background.is_flat:
            return None
        key = "chris_nodes"
        if key not in self._cache:
            self._cache[key] = self.background.christoffel_at(self.x)
        return self._cache[key]

    def dot(self, u, v):
        """Ambient metric contraction of two vector sample fields."""
        g = self.metric_nodes()
        if g is None:
            sig = self.background.signature_array
            return np.einsum("...m,...m->...", u * sig, v)
        return np.einsum("...m,...mn,...n->...", u, g, v)

    def displaced(self, delta_x, d_delta=None, dd_delta=None, name=""):
        """New embedding with samples ``x + delta_x``.

        When the displacement's own partials are supplied (and this
        embedding carries analytic ones), the displaced embedding keeps
        analytic derivatives; otherwise it falls back to chart operators.
        """
        dx = ddx = None
        if self.dx is not None and d_delta is not None:
            dx = self.dx + d_delta
        if self.ddx is not None and dd_delta is not None:
            ddx = self.ddx + dd_delta
        return Embedding(self.chart, self.background, self.x + delta_x,
                         dx=dx, ddx=ddx,
                         name=name or (self.name + "+delta"))

    def __repr__(self):
        return (f"Embedding({self.name or 'unnamed'}, {self.chart!r}, "
                f"N={self.background.dimension})")


@dataclass
class FrameField:
    """Orthonormal adapted frame along a worldsheet.

    ``tangent[..., a, :]`` are the coordinate tangents (not normalized);
    ``normal[..., i, :]`` are g-orthonormal spacelike normals.
    """

    tangent: np.ndarray
    normal: np.ndarray

    @property
    def codimension(self):
        return self.normal.shape[-2]

    def rotated(self, alpha):
        """Gauge-rotate a codimension-two frame by the angle field alpha."""
        if self.codimension != 2:
            raise FrameError("gauge rotation implemented for codimension two")
        c = np.cos(alpha)[..., None]
        s = np.sin(alpha)[..., None]
        n1 = self.normal[..., 0, :]
        n2 = self.normal[..., 1, :]
        out = np.stack([c * n1 + s * n2, -s * n1 + c * n2], axis=-2)
        return FrameField(self.tangent, out)

    def swapped(self):
        """Reverse the normal ordering (flips the bundle orientation)."""
        return FrameField(self.tangent, self.normal[..., ::-1, :].copy())


# ----------------------------------------------------------------- frames


def induced_metric(emb: Embedding, e=None):
    """gamma_ab = g(e_a, e_b); returns (gamma, gamma_inv, det, sqrt|det|)."""
    if e is None:
        e = emb.tangents()
    g = emb.metric_nodes()
    if g is None:
        sig = emb.background.signature_array
        gamma = np.einsum("...am,...bm->...ab", e * sig, e)
    else:
        gamma = np.einsum("...am,...mn,...bn->...ab", e, g, e)
    gamma = 0.5 * (gamma + np.swapaxes(gamma, -1, -2))
    det = np.linalg.det(gamma)
    bad = np.abs(det) < DEGENERACY_THRESHOLD
    if bad.any():
        idx = np.unravel_index(int(np.argmin(np.abs(det))), det.shape)
        raise DegenerateMetricError(
            f"induced metric degenerate at node {idx}: |det gamma| = "
            f"{abs(det[idx]):.3e} < {DEGENERACY_THRESHOLD:.0e}",
            node=idx, value=float(det[idx]))
    return gamma, np.linalg.inv(gamma), det, np.sqrt(np.abs(det))


def _polar_factor(m):
    """Closest orthogonal matrix to each (..., k, k) block."""
    if m.shape[-1] == 1:
        return np.sign(m)
    u, _, vt = np.linalg.svd(m)
    return u @ vt


def _frame_inner(na, nb, g, sig):
    """Pairwise ambient inner products of two normal stacks -> (..., k, k)."""
    if g is None:
        return np.einsum("...im,...jm->...ij", na * sig, nb)
    return np.einsum("...im,...mn,...jn->...ij", na, g, nb)


def _raw_normals(emb, e, gamma_inv):
    """Per-node Gram-Schmidt normals from fixed reference axes.

    Reference axes are tried from the last background coordinate axis
    downward; an axis is skipped at nodes where its residual after
    projection drops below tolerance.  The result is orthonormal but can
    flip between neighboring nodes; see :func:`_smooth_frames`.
    """
    nbg = emb.background.dimension
    k = emb.codimension
    shape = emb.chart.shape
    g = emb.metric_nodes()
    sig = emb.background.signature_array

    def adot(u, v):
        if g is None:
            return np.einsum("...m,...m->...", u * sig, v)
        return np.einsum("...m,...mn,...n->...", u, g, v)

    # covariant tangent projector pieces: P(v) = e_a gamma^{ab} g(e_b, v)
    def tangent_part(v):
        eb_v = np.stack([adot(e[..., b, :], v) for b in range(e.shape[-2])], axis=-1)
        coef = np.einsum("...ab,...b->...a", gamma_inv, eb_v)
        return np.einsum("...a,...am->...m", coef, e)

    normals = np.zeros(shape + (k, nbg))
    count = np.zeros(shape, dtype=int)
    order = list(range(nbg - 1, -1, -1))
    for axis in order:
        if (count >= k).all():
            break
        v = np.zeros(shape + (nbg,))
        v[..., axis] = 1.0
        v = v - tangent_part(v)
        for j in range(k):
            nj = normals[..., j, :]
            v = v - nj * adot(nj, v)[..., None]
        norm2 = adot(v, v)
        ok = (norm2 > _FRAME_RESIDUAL_TOL**2) & (count < k)
        if not ok.any():
            continue
        unit = v / np.sqrt(np.where(ok, norm2, 1.0))[..., None]
        for slot in range(k):
            sel = ok & (count == slot)
            if sel.any():
                normals[sel, slot, :] = unit[sel]
        count = count + ok.astype(int)
    if (count < k).any():
        nbad = int((count < k).sum())
        raise FrameError(
            f"could not complete the normal frame at {nbad} nodes "
            f"(reference axes exhausted)")
    return normals


def _rotate2(normals, angle):
    """Rotate the two normals of each node by a per-node angle."""
    c = np.cos(angle)[..., None]
    s = np.sin(angle)[..., None]
    n1 = normals[..., 0, :]
    n2 = normals[..., 1, :]
    return np.stack([c * n1 - s * n2, s * n1 + c * n2], axis=-2)


def _align_line(normals, axis, periodic, g, sig):
    """Align frames sequentially along one grid axis, in place.

    ``normals`` holds the (sub-)grid stack; the sweep runs over ``axis``
    with all other axes vectorized.  ``g`` is the ambient metric at the
    same nodes, or None for a flat background.  On periodic axes the
    closure holonomy is spread uniformly so the frame stays continuous
    across the wrap.
    """
    moved = np.moveaxis(normals, axis, 0)
    gmoved = None if g is None else np.moveaxis(g, axis, 0)
    n = moved.shape[0]
    k = moved.shape[-2]
    for t in range(1, n):
        m = _frame_inner(moved[t - 1], moved[t],
                         None if gmoved is None else gmoved[t], sig)
        a = _polar_factor(m)
        moved[t] = a @ moved[t]
    if not periodic:
        return normals
    m = _frame_inner(moved[n - 1], moved[0],
                     None if gmoved is None else gmoved[0], sig)
    a = _polar_factor(m)
    if k == 1:
        if (a < 0).any():
            raise FrameError("normal line bundle is non-orientable around a loop")
        return normals
    if k != 2:
        return normals  # holonomy distribution implemented for k <= 2
    det = np.linalg.det(a)
    if (det < 0).any():
        raise FrameError("orientation-reversing holonomy around a periodic axis")
    theta = np.arctan2(a[..., 1, 0], a[..., 0, 0])
    theta = _unwrap_leading(theta)
    ramp = np.arange(n) / n
    for t in range(n):
        moved[t] = _rotate2(moved[t], theta * ramp[t])
    return normals


def _unwrap_leading(theta):
    """Unwrap closure angles so they vary continuously across lines."""
    if theta.ndim == 0:
        return theta
    out = theta
    for ax in range(theta.ndim):
        out = np.unwrap(out, axis=ax)
    return out


def normal_frame(emb: Embedding, e=None, gamma_inv=None, smooth=True):
    """Orthonormal normal frame, smoothed across the grid.

    The raw per-node Gram-Schmidt frame is aligned by a deterministic
    sweep: first along axis 0 on the zero-line of the other axes, then
    along each remaining axis over the full grid, with periodic closure
    holonomy spread uniformly and unwrapped across neighboring lines.
    """
    if e is None:
        e = emb.tangents()
    if gamma_inv is None:
        _, gamma_inv, _, _ = induced_metric(emb, e)
    normals = _raw_normals(emb, e, gamma_inv)
    if not smooth:
        return normals
    chart = emb.chart
    d = chart.dims
    g = emb.metric_nodes()
    sig = emb.background.signature_array
    # axis-by-axis sweep: axis a is swept on the sub-grid where all axes
    # after a are pinned to index 0, which by induction is already aligned
    # along axes before a; the last axis is then swept over the full grid.
    for axis in range(d - 1):
        sl = [slice(None)] * d
        for later in range(axis + 1, d):
            sl[later] = slice(0, 1)
        sub = np.ascontiguousarray(normals[tuple(sl + [Ellipsis])])
        gsub = None if g is None else g[tuple(sl + [Ellipsis])]
        _align_line(sub, axis, chart.periodic[axis], gsub, sig)
        normals[tuple(sl + [Ellipsis])] = sub
    _align_line(normals, d - 1, chart.periodic[d - 1], g, sig)
    return normals


def frame_field(emb: Embedding, smooth=True) -> FrameField:
    e = emb.tangents()
    _, gamma_inv, _, _ = induced_metric(emb, e)
    return FrameField(e, normal_frame(emb, e, gamma_inv, smooth=smooth))


# ---------------------------------------------------- fundamental forms


def second_fundamental_form(emb: Embedding, frames: FrameField, gamma_inv):
    """K_ab^i and the mean-curvature components K^i.

    Shapes ``grid + (d, d, k)`` and ``grid + (k,)``.
    """
    dd = emb.second_partials()
    chris = emb.christoffel_nodes()
    if chris is not None:
        e = frames.tangent
        dd = dd + np.einsum("...mnp,...an,...bp->...abm", chris, e, e)
    g = emb.metric_nodes()
    n = frames.normal
    if g is None:
        sig = emb.background.signature_array
        K = -np.einsum("...abm,...im->...abi", dd, n * sig)
    else:
        K = -np.einsum("...abm,...mn,...in->...abi", dd, g, n)
    K = 0.5 * (K + np.swapaxes(K, -3, -2))
    trace = np.einsum("...ab,...abi->...i", gamma_inv, K)
    return K, trace


def metric_derivative_tower(emb: Embedding, e=None):
    """First and second partials of the induced metric in closed form.

    Available when the embedding carries analytic ``dx``, ``ddx`` and
    ``d3x`` over a flat background; returns ``(None, None)`` otherwise so
    callers fall back to chart operators.  Avoiding chart derivatives of
    the metric keeps the curvature tower at round-off accuracy on open
    (finite-difference) axes.
    """
    if emb.d3x is None or emb.dx is None or emb.ddx is None:
        return None, None
    if not emb.background.is_flat:
        return None, None
    sig = emb.background.signature_array
    if e is None:
        e = emb.dx
    es = e * sig
    dd = emb.ddx
    d3 = emb.d3x
    # dgamma[..., c, a, b] = d_c gamma_ab
    dgamma = (np.einsum("...cam,...bm->...cab", dd, es)
              + np.einsum("...am,...cbm->...cab", es, dd))
    # ddgamma[..., l, c, a, b] = d_l d_c gamma_ab
    ddgamma = (np.einsum("...lcam,...bm->...lcab", d3, es)
               + np.einsum("...cam,...lbm->...lcab", dd, dd * sig)
               + np.einsum("...lam,...cbm->...lcab", dd * sig, dd)
               + np.einsum("...am,...lcbm->...lcab", es, d3))
    return dgamma, ddgamma


def worldsheet_christoffel(chart: GridChart, gamma, gamma_inv, dgamma=None):
    """Levi-Civita symbols of the induced metric, ``grid + (d, d, d)``."""
    if dgamma is None:
        dgamma = chart.gradient(gamma)  # [..., l, a, b] = d_l gamma_ab
    bracket = (np.einsum("...anb->...nab", dgamma)
               + np.einsum("...bna->...nab", dgamma)
               - np.einsum("...nab->...nab", dgamma))
    return 0.5 * np.einsum("...mn,...nab->...mab", gamma_inv, bracket)


def intrinsic_curvature(chart: GridChart, gamma, gamma_inv, chris=None,
                        dgamma=None, ddgamma=None):
    """Riemann, Ricci, scalar and Einstein tensors of the induced metric.

    Generic in the worldsheet dimension; nothing is short-circuited for
    d = 2, so the identity G_ab = 0 there is a genuine output.  When the
    metric's analytic derivative tower is supplied, the symbol gradient is
    assembled from it instead of chart operators.
    """
    if chris is None:
        chris = worldsheet_christoffel(chart, gamma, gamma_inv, dgamma)
    if dgamma is not None and ddgamma is not None:
        dginv = -np.einsum("...mp,...lpq,...qn->...lmn",
                           gamma_inv, dgamma, gamma_inv)
        bracket = (np.einsum("...anb->...nab", dgamma)
                   + np.einsum("...bna->...nab", dgamma)
                   - np.einsum("...nab->...nab", dgamma))
        dbracket = (np.einsum("...lanb->...lnab", ddgamma)
                    + np.einsum("...lbna->...lnab", ddgamma)
                    - np.einsum("...lnab->...lnab", ddgamma))
        dchris = 0.5 * (np.einsum("...lmn,...nab->...lmab", dginv, bracket)
                        + np.einsum("...mn,...lnab->...lmab", gamma_inv, dbracket))
    else:
        dchris = chart.gradient(chris)  # [..., l, m, a, b] = d_l Gamma^m_ab
    # R^m_nab = d_a Gamma^m_bn - d_b Gamma^m_an
    #           + Gamma^m_ac Gamma^c_bn - Gamma^m_bc Gamma^c_an
    term = np.einsum("...ambn->...mnab", dchris)
    riem = (term - np.einsum("...mnba->...mnab", term)
            + np.einsum("...mac,...cbn->...mnab", chris, chris)
            - np.einsum("...mbc,...can->...mnab", chris, chris))
    ricci = np.einsum("...mnmb->...nb", riem)
    scalar = np.einsum("...ab,...ab->...", gamma_inv, ricci)
    einstein = ricci - 0.5 * gamma * scalar[..., None, None]
    return riem, ricci, scalar, einstein


def normal_connection(emb: Embedding, frames: FrameField):
    """Twist potential omega_a^{ij} and curvature Omega_ab^{ij}.

    ``omega_a^{ij} = g(n^i, d_a n^j + Gamma pullback)`` antisymmetrized in
    ``ij``; ``Omega_ab^{ij} = d_b omega_a^{ij} - d_a omega_b^{ij}``.
    """
    chart = emb.chart
    n = frames.normal
    k = frames.codimension
    dn = np.stack([chart.partial(n, a) for a in range(chart.dims)], axis=-3)
    # dn[..., a, j, mu] = d_a n^j_mu
    chris = emb.christoffel_nodes()
    if chris is not None:
        e = frames.tangent
        dn = dn + np.einsum("...mnp,...an,...jp->...ajm", chris, e, n)
    g = emb.metric_nodes()
    if g is None:
        sig = emb.background.signature_array
        omega = np.einsum("...im,...ajm->...aij", n * sig, dn)
    else:
        omega = np.einsum("...im,...mn,...ajn->...aij", n, g, dn)
    omega = 0.5 * (omega - np.swapaxes(omega, -1, -2))
    domega = np.stack([chart.partial(omega, a) for a in range(chart.dims)], axis=-4)
    # domega[..., b, a, i, j] = d_b omega_a^{ij}
    Omega = np.einsum("...baij->...abij", domega) - np.einsum("...abij->...abij", domega)
    return omega, Omega


def twist_scalar(Omega, sqrt_gamma):
    """Scalar curvature of the normal bundle for d = 2, k = 2.

    Counts each antisymmetric pair once: ``Omega_01^{01} / sqrt|gamma|``.
    """
    if Omega.shape[-1] != 2 or Omega.shape[-4] != 2:
        raise FrameError("twist scalar requires d = 2 and codimension 2")
    return Omega[..., 0, 1, 0, 1] / sqrt_gamma


@dataclass
class GeometryFields:
    """Per-node geometric tower of one embedding."""

    embedding: Embedding
    frames: FrameField
    gamma: np.ndarray
    gamma_inv: np.ndarray
    det_gamma: np.ndarray
    sqrt_gamma: np.ndarray
    lorentzian: bool
    second_ff: np.ndarray
    mean_curvature: np.ndarray
    christoffel: Optional[np.ndarray] = None
    riemann: Optional[np.ndarray] = None
    ricci: Optional[np.ndarray] = None
    ricci_scalar: Optional[np.ndarray] = None
    einstein: Optional[np.ndarray] = None
    twist_potential: Optional[np.ndarray] = None
    twist_curvature: Optional[np.ndarray] = None
    twist_scalar: Optional[np.ndarray] = None

    @property
    def area(self):
        """Quadrature of the worldsheet measure over the chart."""
        return self.embedding.chart.integrate(self.sqrt_gamma)


def geometry_fields(emb: Embedding, frames: FrameField = None,
                    intrinsic=True, twist=True) -> GeometryFields:
    """Compute the full geometric tower of an embedding.

    ``intrinsic=False`` skips the induced-curvature block and
    ``twist=False`` the normal-connection block (used by iteration-heavy
    callers that only need the extrinsic data).
    """
    e = emb.tangents() if frames is None else frames.tangent
    gamma, gamma_inv, det, sqrtg = induced_metric(emb, e)
    if frames is None:
        frames = FrameField(e, normal_frame(emb, e, gamma_inv))
    K, trace = second_fundamental_form(emb, frames, gamma_inv)
    signs = np.sign(det)
    if not (signs == signs.flat[0]).all():
        raise DegenerateMetricError("induced metric changes signature across the grid")
    out = GeometryFields(
        embedding=emb, frames=frames, gamma=gamma, gamma_inv=gamma_inv,
        det_gamma=det, sqrt_gamma=sqrtg, lorentzian=bool(signs.flat[0] < 0),
        second_ff=K, mean_curvature=trace)
    if intrinsic:
        dgamma, ddgamma = metric_derivative_tower(emb, e)
        chris = worldsheet_christoffel(emb.chart, gamma, gamma_inv, dgamma)
        riem, ricci, scalar, einstein = intrinsic_curvature(
            emb.chart, gamma, gamma_inv, chris, dgamma, ddgamma)
        out.christoffel = chris
        out.riemann = riem
        out.ricci = ricci
        out.ricci_scalar = scalar
        out.einstein = einstein
    if twist and emb.codimension >= 2:
        omega, Omega = normal_connection(emb, frames)
        out.twist_potential = omega
        out.twist_curvature = Omega
        if emb.chart.dims == 2 and emb.codimension == 2:
            out.twist_scalar = twist_scalar(Omega, sqrtg)
    return out


def covariant_divergence(chart: GridChart, sqrt_gamma, vector):
    """(1/sqrt g) d_a (sqrt g V^a) for a contravariant sample field."""
    density = sqrt_gamma[..., None] * vector
    div = np.zeros(chart.shape)
    for a in range(chart.dims):
        div = div + chart.partial(density[..., a], a)
    return div / sqrt_gamma


def gauss_identity_residual(geo: GeometryFields):
    """R - ((K^i)^2 - K_ab^i K^{ab}_i) for flat backgrounds (contracted Gauss).

    Returns the per-node residual; useful as an independent consistency
    check of the extrinsic and intrinsic routes.
    """
    if not geo.embedding.background.is_flat:
        raise EmbeddingError("Gauss residual helper assumes a flat background")
    K = geo.second_ff
    Kup = np.einsum("...ac,...bd,...cdi->...abi", geo.gamma_inv, geo.gamma_inv, K)
    ksq = np.einsum("...i,...i->...", geo.mean_curvature, geo.mean_curvature)
    kk = np.einsum("...abi,...abi->...", Kup, K)
    return geo.ricci_scalar - (ksq - kk)
