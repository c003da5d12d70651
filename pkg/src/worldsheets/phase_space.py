"""Symplectic structure on the space of extremal worldsheets.

A deformation of a worldsheet is split in the adapted frame into normal
components ``phi^i`` and tangential components ``phi^a``.  Pairs of
deformations feed antisymmetric bilinear kernels: the standard
normal-bundle current, and the two boundary currents obtained by varying
the curvature densities whose integrals are the Euler characteristic and
the first Chern number.  Integrating a kernel over a constant-tau slice
gives the corresponding two-form on solution space; slice independence
is the numerical statement of its conservation.

Every closed-form kernel here has a finite-difference counterpart that
rebuilds the same object from nothing but embeddings and difference
quotients (`exterior_derivative_oracle` and the aligned-frame helpers),
so the algebra can be checked against the definitions rather than
against itself.

All bilinear kernels are assembled as ``A(d1, d2) - A(d2, d1)``, which
makes antisymmetry under argument swap exact in floating point, not just
up to rounding.  Coupling constants are *not* baked into the kernels;
callers supply them (see `symplectic_form`).
"""

import numpy as np
from dataclasses import dataclass

from .errors import DeformationError, OracleError
from .geometry import (Embedding, FrameField, induced_metric,
                       second_fundamental_form, normal_connection,
                       geometry_fields, GeometryFields)
from .invariants import SIGMA_1, SIGMA_2

SIGMA_0 = 1.0   # bare worldsheet tension


# -------------------------------------------------------------- projection


@dataclass
class DeformationField:
    """Adapted-frame components of one worldsheet deformation.

    ``normal`` has shape ``grid + (k,)`` (components ``phi^i``),
    ``tangential`` shape ``grid + (d,)`` (components ``phi^a``).
    ``provenance`` records how the field was obtained: ``"family-tangent"``
    for difference quotients of a solution family, ``"synthetic"`` for
    hand-built profiles.
    """

    embedding: Embedding
    normal: np.ndarray
    tangential: np.ndarray
    provenance: str = "synthetic"

    def displacement(self, frames):
        """Reassemble the ambient vector ``n_i phi^i + e_a phi^a``."""
        return (np.einsum("...i,...im->...m", self.normal, frames.normal)
                + np.einsum("...a,...am->...m", self.tangential, frames.tangent))


def project_deformation(geo, delta_x, provenance="synthetic",
                        reconstruction_tol=1e-10):
    """Split an ambient displacement field into frame components.

    The components must reassemble the input: a residual above
    ``reconstruction_tol`` (relative to the field's scale) means the
    displacement sticks out of the frame span and is rejected.
    """
    emb = geo.embedding
    frames = geo.frames
    delta_x = np.asarray(delta_x, dtype=float)
    if delta_x.shape != emb.x.shape:
        raise DeformationError(
            f"displacement shape {delta_x.shape}, expected {emb.x.shape}")
    k = frames.codimension
    d = emb.chart.dims
    phi_n = np.stack(
        [emb.dot(frames.normal[..., i, :], delta_x) for i in range(k)],
        axis=-1)
    cov = np.stack(
        [emb.dot(frames.tangent[..., a, :], delta_x) for a in range(d)],
        axis=-1)
    phi_t = np.einsum("...ab,...b->...a", geo.gamma_inv, cov)
    field = DeformationField(emb, phi_n, phi_t, provenance)
    rebuilt = field.displacement(frames)
    scale = max(float(np.max(np.abs(delta_x))), 1e-30)
    residual = float(np.max(np.abs(rebuilt - delta_x))) / scale
    if residual > reconstruction_tol:
        raise DeformationError(
            f"frame reconstruction residual {residual:.3e} exceeds "
            f"{reconstruction_tol:.1e}")
    return field


def _same_base(d1, d2):
    if d1.embedding is not d2.embedding:
        raise DeformationError(
            "deformations live on different base solutions")


def _field_second_partials(chart, grad):
    """Second partials of a vector field from its gradient stack."""
    d = chart.dims
    out = np.empty(chart.shape + (d, d, grad.shape[-1]))
    for a in range(d):
        for b in range(a, d):
            mixed = chart.partial(grad[..., b, :], a)
            out[..., a, b, :] = mixed
            out[..., b, a, :] = mixed
    return out


def displaced_embedding(emb, disp, scale, name=""):
    """``X + scale * disp`` with derivative bookkeeping.

    Solution charts are periodic in tau while the time coordinate ramps
    linearly, so spectral derivatives of raw displaced samples would be
    nonsense; when the base embedding carries analytic partials, the
    displacement field (which *is* periodic) is differentiated by chart
    operators and stacked on top of them.
    """
    disp = np.asarray(disp, dtype=float)
    chart = emb.chart
    d_disp = dd_disp = None
    if emb.dx is not None:
        d_disp = chart.gradient(disp)
        if emb.ddx is not None:
            dd_disp = _field_second_partials(chart, d_disp)
    return emb.displaced(scale * disp,
                         None if d_disp is None else scale * d_disp,
                         None if dd_disp is None else scale * dd_disp,
                         name=name)


def metric_variation(geo, deformation):
    """First variation of the induced metric under the normal part,
    ``2 K_ab^i phi_i``."""
    return 2.0 * np.einsum("...abi,...i->...ab",
                           geo.second_ff, deformation.normal)


# ------------------------------------------------- finite-difference checks


def verify_deformation_formulas(geo, deformation, step=1e-4):
    """Check the closed-form first variations against central differences.

    Displaces the embedding along the normal part and, separately, along
    the tangential part, and compares the difference quotients of the
    induced metric, its volume density and the total area with the
    corresponding closed forms.  Returns a dict of relative gaps:

    ``metric_normal``      D_delta gamma_ab  vs  2 K_ab^i phi_i
    ``measure_normal``     D_delta sqrt      vs  sqrt K^i phi_i
    ``metric_tangential``  Lie-dragged gamma vs  nabla_a phi_b + nabla_b phi_a
    ``measure_tangential`` Lie-dragged sqrt  vs  sqrt nabla_a phi^a
    ``area_normal``        d(area)/d(eps)    vs  integral sqrt K^i phi_i
    ``area_tangential``    |d(area)/d(eps)|  (absolute; a pure boundary term)

    Here K is the trace with respect to the *outward-positive* convention
    used throughout the geometry tower, under which the normal first
    variation of the area carries a plus sign; equivalently the action
    ``-sigma_0 * area`` varies by ``-sigma_0 * integral sqrt K^i phi_i``.
    """
    emb = geo.embedding
    chart = emb.chart
    if geo.christoffel is None:
        raise DeformationError(
            "formula verification needs the intrinsic tower; "
            "build geometry_fields with intrinsic=True")
    frames = geo.frames
    out = {}

    def fd_pair(disp):
        plus = displaced_embedding(emb, disp, step)
        minus = displaced_embedding(emb, disp, -step)
        gp, _, _, sp = induced_metric(plus)
        gm, _, _, sm = induced_metric(minus)
        d_gamma = (gp - gm) / (2.0 * step)
        d_sqrt = (sp - sm) / (2.0 * step)
        d_area = (chart.integrate(sp) - chart.integrate(sm)) / (2.0 * step)
        return d_gamma, d_sqrt, d_area

    def rel(fd, pred):
        scale = max(float(np.max(np.abs(pred))), float(np.max(np.abs(fd))),
                    1e-30)
        return float(np.max(np.abs(fd - pred))) / scale

    # normal displacement
    disp_n = np.einsum("...i,...im->...m", deformation.normal, frames.normal)
    d_gamma, d_sqrt, d_area = fd_pair(disp_n)
    k_phi = np.einsum("...i,...i->...", geo.mean_curvature, deformation.normal)
    out["metric_normal"] = rel(d_gamma, metric_variation(geo, deformation))
    out["measure_normal"] = rel(d_sqrt, geo.sqrt_gamma * k_phi)
    pred_area = chart.integrate(geo.sqrt_gamma * k_phi)
    out["area_normal"] = (abs(d_area - pred_area)
                          / max(abs(pred_area), abs(d_area), 1e-30))

    # tangential displacement
    phi_t = deformation.tangential
    disp_t = np.einsum("...a,...am->...m", phi_t, frames.tangent)
    d_gamma, d_sqrt, d_area = fd_pair(disp_t)
    phi_low = np.einsum("...ab,...b->...a", geo.gamma, phi_t)
    dphi = np.stack([chart.partial(phi_low, a) for a in range(chart.dims)],
                    axis=-2)
    nab = dphi - np.einsum("...cab,...c->...ab", geo.christoffel, phi_low)
    pred_metric = nab + np.swapaxes(nab, -1, -2)
    div = np.zeros(chart.shape)
    for a in range(chart.dims):
        div = div + chart.partial(geo.sqrt_gamma * phi_t[..., a], a)
    out["metric_tangential"] = rel(d_gamma, pred_metric)
    out["measure_tangential"] = rel(d_sqrt, div)
    out["area_tangential"] = abs(d_area)
    return out


# ------------------------------------------------------------- the current


def normal_covariant_derivative(geo, phi):
    """``nabla-tilde_a phi^i``: chart gradient plus the twist connection."""
    if geo.twist_potential is None:
        raise DeformationError(
            "normal connection missing; build geometry_fields with twist=True")
    chart = geo.embedding.chart
    dphi = np.stack([chart.partial(phi, a) for a in range(chart.dims)],
                    axis=-2)
    return dphi + np.einsum("...aij,...j->...ai", geo.twist_potential, phi)


def symplectic_current(geo, d1, d2):
    """Bilinear current ``j^a = phi1_i nabla-tilde^a phi2^i - (1 <-> 2)``.

    Worldsheet-covariantly conserved when both deformations solve the
    linearized extremality equation on an extremal base.
    """
    _same_base(d1, d2)
    g1 = normal_covariant_derivative(geo, d1.normal)
    g2 = normal_covariant_derivative(geo, d2.normal)
    low = (np.einsum("...i,...ai->...a", d1.normal, g2)
           - np.einsum("...i,...ai->...a", d2.normal, g1))
    return np.einsum("...ab,...b->...a", geo.gamma_inv, low)


# --------------------------------------------------- Euler-density current


def _christoffel_variation(geo, d_gamma):
    """delta Gamma^c_ab for a metric perturbation, via covariant derivatives."""
    chart = geo.embedding.chart
    if geo.christoffel is None:
        raise DeformationError(
            "Christoffel variation needs the intrinsic tower; "
            "build geometry_fields with intrinsic=True")
    gam = geo.christoffel
    dpart = np.stack([chart.partial(d_gamma, a) for a in range(chart.dims)],
                     axis=-3)
    # nab[..., a, b, c] = nabla_a (d_gamma)_bc
    nab = (dpart
           - np.einsum("...dab,...dc->...abc", gam, d_gamma)
           - np.einsum("...dac,...bd->...abc", gam, d_gamma))
    bracket = (np.einsum("...adb->...dab", nab)
               + np.einsum("...bda->...dab", nab)
               - np.einsum("...dab->...dab", nab))
    return 0.5 * np.einsum("...cd,...dab->...cab", geo.gamma_inv, bracket)


def gb_potential(geo, deformation):
    """Boundary current of the varied curvature density.

    In two worldsheet dimensions the Einstein tensor vanishes, so the
    normal variation of ``sqrt(-gamma) R`` is a pure coordinate
    divergence; this returns the vector it is the divergence of,
    assembled from the traces of the varied Levi-Civita symbols.  The
    orientation is fixed so that

        d/d(eps) [sqrt(-gamma) R]  =  d_a [sqrt(-gamma) psi^a]

    holds pointwise with no extra sign (checked against central
    differences in the test suite).  A conformal perturbation
    ``d_gamma = c * gamma`` with constant ``c`` gives zero.
    """
    d_gamma = metric_variation(geo, deformation)
    d_sym = _christoffel_variation(geo, d_gamma)
    t1 = np.einsum("...ab,...cbc->...a", geo.gamma_inv, d_sym)
    t2 = np.einsum("...bc,...abc->...a", geo.gamma_inv, d_sym)
    return t2 - t1


def _gb_directional(geo, phi_outer, phi_inner):
    """One orientation of the second variation of the curvature current."""
    chart = geo.embedding.chart
    gi = geo.gamma_inv
    K = geo.second_ff
    gam = geo.christoffel
    d = chart.dims
    kup = np.einsum("...ac,...bd,...cdi->...abi", gi, gi, K)
    # trace term: K^{abi} d_b (K^j phi_j)
    s = np.einsum("...i,...i->...", geo.mean_curvature, phi_inner)
    ds = np.stack([chart.partial(s, b) for b in range(d)], axis=-1)
    mean_term = np.einsum("...abi,...b->...ai", kup, ds)
    # mixed tensor M^a_c = K_c^{a j} phi_j and its covariant gradient
    m = np.einsum("...ad,...dcj,...j->...ac", gi, K, phi_inner)
    dm = np.stack([chart.partial(m, b) for b in range(d)], axis=-3)
    nab_m = (dm
             + np.einsum("...abd,...dc->...bac", gam, m)
             - np.einsum("...dbc,...ad->...bac", gam, m))
    # twice-lowered N_bc = K_bc^j phi_j with raised-gradient nabla^a N_bc
    n = np.einsum("...bcj,...j->...bc", K, phi_inner)
    dn = np.stack([chart.partial(n, l) for l in range(d)], axis=-3)
    nab_n = (dn
             - np.einsum("...edb,...ec->...dbc", gam, n)
             - np.einsum("...edc,...be->...dbc", gam, n))
    nab_n_up = np.einsum("...ad,...dbc->...abc", gi, nab_n)
    bracket = (np.einsum("...bci,...bac->...ai", kup, nab_m)
               + np.einsum("...bci,...cab->...ai", kup, nab_m)
               - np.einsum("...bci,...abc->...ai", kup, nab_n_up))
    return -2.0 * np.einsum("...i,...ai->...a",
                            phi_outer, mean_term + bracket)


def gb_kernel(geo, d1, d2):
    """Antisymmetrized second variation of the curvature current.

    The two-form analogue of `gb_potential`: the change of ``psi^a`` along
    one normal deformation evaluated on another, minus the swap.  Built
    entirely from the second fundamental form and its first derivatives;
    nonzero on generic curved worldsheets even though the underlying
    density integrates to a constant.
    """
    _same_base(d1, d2)
    return (_gb_directional(geo, d1.normal, d2.normal)
            - _gb_directional(geo, d2.normal, d1.normal))


def gb_density_kernel(geo, d1, d2):
    """Second variation of the *density* ``sqrt(-gamma) psi^a``.

    Adds to ``sqrt(-gamma) *`` `gb_kernel` the product-rule cross terms
    in which one deformation varies the measure and the other the
    current.  This is the object whose slice integrals are
    slice-independent, and the one the finite-difference oracle of the
    density functional reproduces.
    """
    _same_base(d1, d2)
    base = geo.sqrt_gamma[..., None] * gb_kernel(geo, d1, d2)
    w1 = geo.sqrt_gamma * np.einsum("...i,...i->...",
                                    geo.mean_curvature, d1.normal)
    w2 = geo.sqrt_gamma * np.einsum("...i,...i->...",
                                    geo.mean_curvature, d2.normal)
    cross = (w1[..., None] * gb_potential(geo, d2)
             - w2[..., None] * gb_potential(geo, d1))
    return base + cross


# --------------------------------------------------- Chern-density current


def _require_codim2(geo):
    emb = geo.embedding
    if emb.codimension != 2 or emb.chart.dims != 2:
        raise DeformationError(
            "twist-variation currents require a two-dimensional worldsheet "
            "of codimension two")


def chern_potential(geo, deformation):
    """Variation of the twist density under one normal deformation.

    Returns the weight-one density current ``Theta^a`` defined by the
    identity

        d/d(eps) [twist curvature density]  =  d_a Theta^a

    under a normal displacement (checked by central differences in the
    test suite), assembled by dualizing the first variation of the twist
    potential,

        delta omega_b^{ij} = K_cb^i nabla-tilde^c phi^j - (i <-> j),

    whose orientation is fixed against the gauge-aligned
    finite-difference transport of the connection (see
    `twist_variation_oracle`).  Valid over flat backgrounds;
    ambient-curvature contributions to the twist variation are not
    implemented.  Normalization constants are the caller's business.
    """
    _require_codim2(geo)
    if not geo.embedding.background.is_flat:
        raise DeformationError(
            "twist variation over a curved background is not implemented")
    grad = normal_covariant_derivative(geo, deformation.normal)
    grad_up = np.einsum("...ab,...bi->...ai", geo.gamma_inv, grad)
    raw = np.einsum("...cbi,...cj->...bij", geo.second_ff, grad_up)
    d_omega = raw - np.swapaxes(raw, -1, -2)
    # Theta^a = -eps~^{ab} delta omega_b^{01}: the dual orientation that
    # makes the density identity above hold with a plus sign, given the
    # stored curl order of the twist curvature.
    return np.stack([-d_omega[..., 1, 0, 1], d_omega[..., 0, 0, 1]], axis=-1)


def chern_kernel(geo, d1, d2):
    """Antisymmetrized second variation of the twist density current.

    Collapses to ``-(K^i phi1_i) Theta^a(phi2) + (K^i phi2_i) Theta^a(phi1)``,
    so it is pointwise zero wherever the mean curvature vanishes: on
    extremal worldsheets this kernel contributes nothing to the
    symplectic form, while off shell it is an honest nonzero two-form.
    """
    _same_base(d1, d2)
    _require_codim2(geo)
    w1 = np.einsum("...i,...i->...", geo.mean_curvature, d1.normal)
    w2 = np.einsum("...i,...i->...", geo.mean_curvature, d2.normal)
    return -(w1[..., None] * chern_potential(geo, d2)
             - w2[..., None] * chern_potential(geo, d1))


# ---------------------------------------------------------- form and slices


@dataclass
class SymplecticEvaluation:
    """Slice integrals of one bilinear kernel and their spread."""

    value: float
    slice_values: np.ndarray
    slice_indices: np.ndarray
    slice_independence: float
    current: np.ndarray
    divergence: np.ndarray
    max_divergence: float
    couplings: tuple


def _interior_slices(chart):
    n = chart.sizes[0]
    if chart.periodic[0]:
        idx = np.arange(n)
    else:
        # the one-sided band of the open-axis derivative is five rows
        # deep; slice statistics stay clear of it on both ends
        idx = np.arange(5, n - 5)
    if len(idx) < 2:
        raise DeformationError(
            "fewer than two interior constant-tau slices on this chart")
    return idx


def _slice_scan(chart, density_flux):
    idx = _interior_slices(chart)
    vals = np.array([chart.slice_integral(density_flux, 0, int(k))
                     for k in idx])
    mean = float(vals.mean())
    spread = float(np.max(np.abs(vals - mean)))
    # Normalize the spread by the charge when there is one; degenerate
    # pairs integrate to zero, and dividing noise by noise would report
    # a huge ratio for what is really a conserved (zero) charge.
    # The fallback scale is the circumference times the largest flux
    # sample, i.e. the charge the current *could* carry before
    # cancellation.
    length = chart.spacings[1] * chart.sizes[1]
    scale = max(abs(mean), length * float(np.max(np.abs(density_flux[..., 0]))))
    indep = spread / scale if scale > 0.0 else 0.0
    return idx, vals, mean, indep


def symplectic_form(geo, d1, d2, couplings=None):
    """Evaluate the two-form on a pair of deformations, slice by slice.

    The flux density is assembled from up to three conserved pieces,

        sigma_0 * sqrt(-gamma) j^a  +  sigma_1 * (density curvature kernel)
                                    +  sigma_2 * (twist kernel),

    with ``couplings = (sigma_0, sigma_1, sigma_2)`` (default: bare
    current only).  Each constant-tau slice yields one value of the form;
    the report carries all of them, their mean, and the worst relative
    deviation, which is the numerical test of conservation.  The
    orientation convention is ``dSigma_a = delta_a^tau d sigma``.
    """
    _same_base(d1, d2)
    if couplings is None:
        couplings = (SIGMA_0, 0.0, 0.0)
    s0, s1, s2 = (float(c) for c in couplings)
    chart = geo.embedding.chart
    flux = s0 * geo.sqrt_gamma[..., None] * symplectic_current(geo, d1, d2)
    if s1 != 0.0:
        flux = flux + s1 * gb_density_kernel(geo, d1, d2)
    if s2 != 0.0:
        flux = flux + s2 * chern_kernel(geo, d1, d2)
    idx, vals, mean, indep = _slice_scan(chart, flux)
    div = np.zeros(chart.shape)
    for a in range(chart.dims):
        div = div + chart.partial(flux[..., a], a)
    return SymplecticEvaluation(mean, vals, idx, indep, flux, div,
                                float(np.max(np.abs(div))), (s0, s1, s2))


@dataclass
class ConservationReport:
    max_divergence: float
    divergence: np.ndarray
    slice_values: np.ndarray
    slice_indices: np.ndarray
    slice_independence: float


def conservation_check(geo, current, density_weighted=False):
    """Divergence and slice spread of one current.

    ``density_weighted=False`` treats ``current`` as a worldsheet vector
    and forms the covariant divergence; ``True`` treats it as a
    weight-one density and uses the plain coordinate divergence.  Either
    way the slice integrals use the corresponding density flux.
    """
    chart = geo.embedding.chart
    current = np.asarray(current, dtype=float)
    if density_weighted:
        density = current
    else:
        density = geo.sqrt_gamma[..., None] * current
    div = np.zeros(chart.shape)
    for a in range(chart.dims):
        div = div + chart.partial(density[..., a], a)
    if not density_weighted:
        div = div / geo.sqrt_gamma
    idx, vals, _, indep = _slice_scan(chart, density)
    return ConservationReport(float(np.max(np.abs(div))), div, vals, idx,
                              indep)


# ----------------------------------------------------------------- oracles


def exterior_derivative_oracle(family, functional, step=1e-4,
                               tangent_step=1e-4, verify_step=True,
                               floor=1e-6):
    """Finite-difference exterior derivative of a solution-space one-form.

    ``family`` exposes ``member((s, t))`` returning an embedding for two
    real parameters; ``functional(embedding, v)`` evaluates the one-form
    on an ambient displacement field ``v`` and may return an array of any
    shape.  The value ``d Psi(V_s, V_t)`` at the origin is built from
    cross central differences, with the coordinate tangents recomputed at
    every shifted base point (the tangent step stays fixed so the
    consistency scan below probes only the outer quotient).

    With ``verify_step`` the derivative is repeated at half and quarter
    step; central differences must contract by about a factor four per
    halving.  Contraction is allowed to stall once the quotient
    differences drop below ``floor`` times the result scale -- that is
    the round-off plateau, and the value is still good to ``floor``
    relative.  Stalling *above* the plateau raises `OracleError`: the
    step is too small for this functional and the result untrustworthy.
    """

    def tangent_at(s, t, index):
        bump = ((tangent_step, 0.0), (0.0, tangent_step))[index]
        plus = family.member((s + bump[0], t + bump[1]))
        minus = family.member((s - bump[0], t - bump[1]))
        return (plus.x - minus.x) / (2.0 * tangent_step)

    def one_form(s, t, index):
        emb = family.member((s, t))
        return np.asarray(functional(emb, tangent_at(s, t, index)),
                          dtype=float)

    def derivative(h):
        along_s = (one_form(h, 0.0, 1) - one_form(-h, 0.0, 1)) / (2.0 * h)
        along_t = (one_form(0.0, h, 0) - one_form(0.0, -h, 0)) / (2.0 * h)
        return along_s - along_t

    out = derivative(step)
    if verify_step:
        half = derivative(step / 2.0)
        quarter = derivative(step / 4.0)
        c1 = float(np.max(np.abs(out - half)))
        c2 = float(np.max(np.abs(half - quarter)))
        scale = max(float(np.max(np.abs(out))), 1e-30)
        if c2 > 0.75 * c1 and c2 > floor * scale:
            raise OracleError(
                f"difference quotients stopped contracting "
                f"({c1:.3e} -> {c2:.3e}): step {step:.1e} too small for "
                f"this functional")
    return out


class LinearDisplacementFamily:
    """Straight-line two-parameter family ``X + s D1 + t D2``.

    Every member is built through the same `displaced_embedding`
    bookkeeping (including the origin), so difference quotients across
    members compare like with like.  Coordinate tangents are the constant
    fields D1, D2.
    """

    def __init__(self, embedding, delta1, delta2):
        self.base = embedding
        self.delta = (np.asarray(delta1, dtype=float),
                      np.asarray(delta2, dtype=float))

    def member(self, lam):
        s, t = lam
        disp = s * self.delta[0] + t * self.delta[1]
        return displaced_embedding(self.base, disp, 1.0,
                                   name=f"{self.base.name}@({s:.2e},{t:.2e})")

    def tangent(self, index, lam=(0.0, 0.0), step=None):
        return self.delta[index]


class ReparametrizedFamily:
    """Solution family composed with parameter-linear coordinate warps.

    Wraps a two-parameter exact-solution family so that the coordinate
    tangents at the base point are purely normal: the warp subtracts, to
    first order, the tangential part of each raw family tangent.  Members
    remain exact extremal surfaces (a reparametrized solution is the same
    surface), only their coordinate presentation changes.
    """

    def __init__(self, family, lam, zeta1, zeta2, background):
        self.family = family
        self.lam = np.asarray(lam, dtype=float)
        self.zeta = (np.asarray(zeta1, dtype=float),
                     np.asarray(zeta2, dtype=float))
        self.background = background
        base = family.member(tuple(self.lam))
        self.chart = base.chart
        grids = self.chart.grids()
        self._tau = grids[0]
        self._sigma = grids[1]

    def member(self, lam):
        s, t = lam
        chart = self.chart
        warp = [s * self.zeta[0][..., a] + t * self.zeta[1][..., a]
                for a in range(2)]
        tau = self._tau - warp[0]
        sigma = self._sigma - warp[1]
        a, b = self.family.generators_at(
            (self.lam[0] + s, self.lam[1] + t))
        u = tau + sigma
        v = tau - sigma
        x = np.empty(chart.shape + (self.background.dimension,))
        x[..., 0] = tau
        x[..., 1:] = 0.5 * (a.evaluate(u) + b.evaluate(v))
        # analytic first partials: the time slot ramps with tau, so chart
        # operators must not be left to differentiate the raw samples
        dtau = np.stack([(1.0 if c == 0 else 0.0) - chart.partial(warp[0], c)
                         for c in range(2)], axis=-1)
        dsig = np.stack([(0.0 if c == 0 else 1.0) - chart.partial(warp[1], c)
                         for c in range(2)], axis=-1)
        ap = a.evaluate(u, order=1)
        bp = b.evaluate(v, order=1)
        dx = np.empty(chart.shape + (2, self.background.dimension))
        for c in range(2):
            du = (dtau[..., c] + dsig[..., c])[..., None]
            dv = (dtau[..., c] - dsig[..., c])[..., None]
            dx[..., c, 0] = dtau[..., c]
            dx[..., c, 1:] = 0.5 * (ap * du + bp * dv)
        return Embedding(chart, self.background, x, dx=dx,
                         name=f"warped@({s:.2e},{t:.2e})")

    def tangent(self, index, lam=(0.0, 0.0), step=1e-4):
        bump = np.zeros(2)
        bump[index] = step
        lam = np.asarray(lam, dtype=float)
        plus = self.member(tuple(lam + bump))
        minus = self.member(tuple(lam - bump))
        return (plus.x - minus.x) / (2.0 * step)


def normal_gauge_family(family, lam=(0.0, 0.0), tangent_step=1e-4):
    """Gauge-fix a solution family so its tangents are purely normal.

    Projects the raw family tangents at ``lam`` onto the worldsheet,
    and returns a `ReparametrizedFamily` whose coordinate warp cancels
    exactly those tangential parts at the base point.  Also returns the
    two normal deformation fields, ready for kernel evaluation.
    """
    base = family.member(tuple(lam))
    geo = geometry_fields(base, intrinsic=True, twist=True)
    fields = []
    zetas = []
    for index in (0, 1):
        raw = family.tangent(index, lam, step=tangent_step)
        proj = project_deformation(geo, raw, provenance="family-tangent")
        zetas.append(proj.tangential)
        fields.append(DeformationField(base, proj.normal,
                                       np.zeros_like(proj.tangential),
                                       "family-tangent"))
    warped = ReparametrizedFamily(family, lam, zetas[0], zetas[1],
                                  base.background)
    return warped, geo, fields


def tangential_projection_functional(emb, v):
    """``phi^a`` components of a displacement on a member's own geometry."""
    e = emb.tangents()
    _, gamma_inv, _, _ = induced_metric(emb, e)
    cov = np.stack([emb.dot(e[..., a, :], v) for a in range(emb.chart.dims)],
                   axis=-1)
    return np.einsum("...ab,...b->...a", gamma_inv, cov)


def aligned_normal_frame(emb, base_frames):
    """Orthonormal normal frame of ``emb`` smoothly tied to a base frame.

    Projects each base normal onto the normal space of the (nearby)
    embedding and re-orthonormalizes in order.  Under a small displacement
    this transports the gauge instead of re-deriving it, so differences
    of connection components between the two surfaces are gauge-aligned.
    """
    e = emb.tangents()
    _, gamma_inv, _, _ = induced_metric(emb, e)
    d = emb.chart.dims
    normals = []
    for i in range(base_frames.codimension):
        n = base_frames.normal[..., i, :]
        cov = np.stack([emb.dot(e[..., a, :], n) for a in range(d)], axis=-1)
        up = np.einsum("...ab,...b->...a", gamma_inv, cov)
        n = n - np.einsum("...a,...am->...m", up, e)
        for prev in normals:
            n = n - emb.dot(prev, n)[..., None] * prev
        norm = np.sqrt(emb.dot(n, n))
        if np.min(norm) <= 0.0 or not np.isfinite(norm).all():
            raise DeformationError(
                "base frame degenerates on the displaced surface")
        n = n / norm[..., None]
        normals.append(n)
    return FrameField(e, np.stack(normals, axis=-2))


def twist_variation_oracle(geo, deformation, step=1e-4):
    """Central-difference variation of the twist potential, gauge-aligned.

    Displaces the surface along the normal part of the deformation, drags
    the base frame onto both displaced surfaces with
    `aligned_normal_frame`, and differences the resulting connection
    components.  Returns ``delta omega[..., a, i, j]``.
    """
    _require_codim2(geo)
    emb = geo.embedding
    disp = np.einsum("...i,...im->...m",
                     deformation.normal, geo.frames.normal)
    sides = []
    for sign in (1.0, -1.0):
        shifted = displaced_embedding(emb, disp, sign * step)
        frames = aligned_normal_frame(shifted, geo.frames)
        omega, _ = normal_connection(shifted, frames)
        sides.append(omega)
    return (sides[0] - sides[1]) / (2.0 * step)


def chern_potential_oracle(geo, deformation, step=1e-4):
    """Finite-difference counterpart of `chern_potential`."""
    d_omega = twist_variation_oracle(geo, deformation, step)
    return np.stack([-d_omega[..., 1, 0, 1], d_omega[..., 0, 0, 1]], axis=-1)


def gb_flux_functional(emb, v):
    """Complete first-variation current of the Euler density on one member.

    Along any family flow with velocity ``v``, the rate of change of
    ``sqrt(-gamma) R`` is the plain divergence of this current: the
    normal part of ``v`` drives the boundary current of the metric
    variation, and the tangential part drags the density, adding the
    flux ``sqrt(-gamma) R zeta^a``.  Dropping the drag term leaves a
    current whose cross-family exterior derivative is visibly not
    conserved, so both pieces are mandatory.

    Feed this to `exterior_derivative_oracle` over an exact solution
    family: the resulting two-form field is conserved and carries the
    same slice charges as `gb_density_kernel` (the two may differ
    pointwise by an exact, charge-free current).
    """
    g = geometry_fields(emb, intrinsic=True, twist=False)
    proj = project_deformation(g, v)
    normal_only = DeformationField(emb, proj.normal,
                                   np.zeros_like(proj.tangential), "oracle")
    flux = g.sqrt_gamma[..., None] * gb_potential(g, normal_only)
    drag = (g.sqrt_gamma * g.ricci_scalar)[..., None] * proj.tangential
    return flux + drag


def chern_flux_functional(base_frames):
    """Complete first-variation current of the twist density, gauge-tied.

    Same structure as `gb_flux_functional` for the normal-bundle twist
    density, with one extra subtlety: the connection components are
    gauge-dependent, so every member's frame is transported from
    ``base_frames`` with `aligned_normal_frame`.  Frames re-derived
    independently per member may flip orientation between members,
    which turns the finite differences into order-one jumps.

    Returns the ``functional(emb, v)`` closure for
    `exterior_derivative_oracle`.
    """

    def functional(emb, v):
        frames = aligned_normal_frame(emb, base_frames)
        g = geometry_fields(emb, frames=frames, intrinsic=True, twist=True)
        proj = project_deformation(g, v)
        normal_only = DeformationField(emb, proj.normal,
                                       np.zeros_like(proj.tangential),
                                       "oracle")
        flux = chern_potential(g, normal_only)
        density = g.twist_curvature[..., 0, 1, 0, 1]
        return flux + density[..., None] * proj.tangential

    return functional
