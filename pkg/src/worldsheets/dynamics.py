"""Exact string solutions and minimal-surface relaxation.

Closed-string solutions in a flat Minkowski background are built from
left/right movers,

    X^0 = tau,   Xvec = (a(tau + sigma) + b(tau - sigma)) / 2,

where the generators ``a`` and ``b`` are closed curves with unit-speed
hodographs (|a'| = |b'| = 1).  Every such embedding solves the wave
equation in conformal gauge and is therefore an extremal worldsheet
(vanishing mean-curvature vector).  Generators are stored as truncated
Fourier series, so all parametric derivatives of the embedding are
available in closed form; the geometry layer consumes them directly and
never falls back on grid differencing of the embedding itself.

Drift-free generators (no net translation per period) yield worldsheets
that are 2*pi-periodic in tau as well as sigma, and those are placed on
fully periodic charts where spectral differentiation applies everywhere.
Generators with drift (a moving string) or worldsheets with cusp lines
are restricted to an open tau window.

Euclidean minimal surfaces are produced separately by relaxation: an
explicit mean-curvature flow X <- X + eta * H with the boundary rows
held fixed, which descends the area functional monotonically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .background import BackgroundSpacetime
from .chart import GridChart
from .errors import ConvergenceError, CurveError, StepInstabilityError
from .geometry import Embedding, induced_metric

__all__ = [
    "FourierCurve",
    "SolutionFamily",
    "TiltedSolutionFamily",
    "WobbleSolutionFamily",
    "ConjugateWobbleFamily",
    "RelaxationProblem",
    "unit_speed_reparametrize",
    "closed_string_solution",
    "oscillating_string_generators",
    "circle_generators",
    "unit_speed_generator",
    "extremality_residual",
    "relax_minimal_surface",
]


# ---------------------------------------------------------------------------
# Fourier curves


class FourierCurve:
    """Closed curve c(u) = c0 + drift*u + 2*sum_m Re(coeff_m e^{imu}).

    ``coefficients`` follows the rfft layout (modes m = 0..M); the m = 0
    entry holds the constant offset.  ``drift`` is the secular part: the
    curve satisfies c(u + 2*pi) = c(u) + 2*pi*drift.
    """

    def __init__(self, coefficients, drift=None):
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.ndim != 2:
            raise CurveError("coefficient array must be (modes, components)")
        self.coefficients = coefficients
        dim = coefficients.shape[1]
        self.drift = np.zeros(dim) if drift is None else np.asarray(drift, dtype=float)
        if self.drift.shape != (dim,):
            raise CurveError("drift shape does not match curve components")

    @property
    def dim(self):
        return self.coefficients.shape[1]

    @property
    def n_modes(self):
        return self.coefficients.shape[0]

    @classmethod
    def from_samples(cls, samples, drift=None):
        """Fit a trigonometric interpolant to uniform samples on [0, 2*pi).

        The Nyquist mode of an even-length sample set is dropped (it cannot
        be differentiated consistently), so ``evaluate`` reproduces the
        samples only up to that mode's amplitude.
        """
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[0] < 4:
            raise CurveError("need at least 4 curve samples, shaped (n, components)")
        n = samples.shape[0]
        if drift is not None:
            drift = np.asarray(drift, dtype=float)
            u = 2.0 * np.pi * np.arange(n) / n
            samples = samples - u[:, None] * drift[None, :]
        coeff = np.fft.rfft(samples, axis=0) / n
        if n % 2 == 0:
            coeff[-1] = 0.0
        return cls(coeff, drift)

    def evaluate(self, u, order=0):
        """Evaluate the curve or its order-th derivative at arbitrary points."""
        u = np.asarray(u, dtype=float)
        m = np.arange(1, self.n_modes)
        factor = (1j * m) ** order
        phases = np.exp(1j * np.multiply.outer(u, m))
        out = 2.0 * np.real(phases @ (factor[:, None] * self.coefficients[1:]))
        if order == 0:
            out = out + self.coefficients[0].real + np.multiply.outer(u, self.drift)
        elif order == 1:
            out = out + self.drift
        return out

    def evaluate_sum_grid(self, tau, sigma, sign, order=0):
        """Evaluate at u = tau + sign*sigma on the tensor grid, factorized.

        Returns an array of shape ``(len(tau), len(sigma), dim)`` without
        materializing the full outer phase array.
        """
        tau = np.asarray(tau, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
        m = np.arange(1, self.n_modes)
        ct = np.exp(1j * np.multiply.outer(tau, m))
        cs = np.exp(1j * sign * np.multiply.outer(sigma, m))
        factor = (1j * m) ** order
        out = 2.0 * np.real(
            np.einsum("tm,sm,mc->tsc", ct, cs, factor[:, None] * self.coefficients[1:])
        )
        if order == 0:
            u = tau[:, None] + sign * sigma[None, :]
            out = out + self.coefficients[0].real + u[..., None] * self.drift
        elif order == 1:
            out = out + self.drift
        return out

    def shifted(self, delta):
        """Parameter translation u -> u + delta (an exact symmetry of the fit)."""
        m = np.arange(self.n_modes)
        coeff = self.coefficients * np.exp(1j * m * delta)[:, None]
        coeff[0] += delta * self.drift
        return FourierCurve(coeff, self.drift.copy())

    def scaled(self, factor):
        return FourierCurve(self.coefficients * factor, self.drift * factor)

    def rotated(self, matrix):
        """Image of the curve under a fixed linear map of the ambient space."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (self.dim, self.dim):
            raise CurveError(
                f"transform shape {matrix.shape}, curve has {self.dim} components")
        return FourierCurve(self.coefficients @ matrix.T, self.drift @ matrix.T)

    def hodograph_samples(self, n):
        """Tangent vectors a'(u) on a uniform n-point grid."""
        u = 2.0 * np.pi * np.arange(n) / n
        return self.evaluate(u, order=1)


def _invert_monotone(value, slope, targets, guess, tol=1e-14, max_iter=60):
    """Solve value(x) = target for increasing value() by vectorized Newton."""
    x = np.array(guess, dtype=float)
    for _ in range(max_iter):
        residual = value(x) - targets
        x = x - residual / slope(x)
        if np.max(np.abs(residual)) < tol:
            return x
    raise ConvergenceError(
        "monotone inversion did not reach tolerance %.1e" % tol,
        history=[float(np.max(np.abs(value(x) - targets)))],
    )


def unit_speed_reparametrize(samples):
    """Reparametrize a closed curve to constant speed.

    Input and output are uniform samples on [0, 2*pi).  The output traverses
    the same image at constant speed L/(2*pi), where L is the total length.
    Raises ``CurveError`` at a vanishing-speed node.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    curve = FourierCurve.from_samples(samples)
    u = 2.0 * np.pi * np.arange(n) / n
    speed = np.linalg.norm(curve.evaluate(u, order=1), axis=-1)
    if np.min(speed) < 1e-10 * np.max(speed):
        k = int(np.argmin(speed))
        raise CurveError(
            "curve speed vanishes near node %d (u = %.6f); cannot reparametrize"
            % (k, u[k])
        )
    # Spectral arclength: s(u) = mean_speed * u + periodic part.
    shat = np.fft.rfft(speed) / n
    mean_speed = shat[0].real
    m = np.arange(1, shat.shape[0])
    anti = shat[1:] / (1j * m)
    if n % 2 == 0:
        anti[-1] = 0.0

    def arclength(x):
        phases = np.exp(1j * np.multiply.outer(x, m))
        per = 2.0 * np.real(phases @ anti)
        per0 = 2.0 * np.real(np.sum(anti))
        return mean_speed * x + (per - per0)

    def speed_at(x):
        phases = np.exp(1j * np.multiply.outer(x, m))
        return mean_speed + 2.0 * np.real(phases @ (shat[1:]))

    targets = mean_speed * u
    x = _invert_monotone(arclength, speed_at, targets, u)
    return curve.evaluate(x, order=0)


def unit_speed_generator(samples, n_modes=None):
    """Turn closed-curve samples into a unit-speed drift-aware generator.

    The curve is reparametrized to constant speed and then rescaled so the
    speed is exactly one (the period stays 2*pi, so the image shrinks or
    grows by L/(2*pi)).  The secular drift — the mean of the hodograph, a
    net translation per period — is detected and stored on the returned
    ``FourierCurve``.
    """
    resampled = unit_speed_reparametrize(samples)
    n = resampled.shape[0]
    curve = FourierCurve.from_samples(resampled)
    u = 2.0 * np.pi * np.arange(n) / n
    speed = np.linalg.norm(curve.evaluate(u, order=1), axis=-1)
    scale = 1.0 / np.mean(speed)
    tangents = curve.evaluate(u, order=1) * scale
    drift = tangents.mean(axis=0)
    if np.linalg.norm(drift) <= 1e-13:
        drift = np.zeros(curve.dim)
    out = FourierCurve(curve.coefficients * scale, drift)
    if n_modes is not None and n_modes < out.n_modes:
        out = FourierCurve(out.coefficients[:n_modes], out.drift)
    return out


# ---------------------------------------------------------------------------
# Generator construction


def _balance_on_sphere(points, tol=1e-15, max_iter=200):
    """Nudge unit vectors until their mean vanishes, staying on the sphere."""
    p = np.array(points, dtype=float)
    for _ in range(max_iter):
        mean = p.mean(axis=0)
        if np.linalg.norm(mean) < tol:
            return p
        p = p - mean
        p /= np.linalg.norm(p, axis=-1, keepdims=True)
    raise ConvergenceError("sphere balancing stalled", history=[float(np.linalg.norm(mean))])


def _band_hodograph(n, polar_offset, wave_height, southern):
    """Unit tangent curve winding once in azimuth with a balanced band profile.

    The image is the spherical curve z(phi) = c + h*sin(2*phi) with c -> -c
    for the southern band.  The parametrization weight
    w = 1 - (2c/h) sin(2*phi) makes the curve integrate to zero exactly —
    the z moment cancels by construction and the x, y moments vanish
    because w and the radius carry only even azimuthal harmonics.
    Requires h > 2|c| for a positive weight.
    """
    c = -polar_offset if southern else polar_offset
    h = wave_height
    if wave_height <= 2.0 * abs(polar_offset):
        raise CurveError("band construction needs wave_height > 2*polar_offset")
    ratio = c / h
    u = 2.0 * np.pi * np.arange(n) / n

    # u(phi) = phi + (c/h)[cos(2*phi) - 1].  Fixed-count Newton polish: the
    # inversion must hit the round-off floor, or its error shows up as a
    # broadband tail on the hodograph spectrum and ultimately as a spurious
    # extremality residual.
    phi = u.copy()
    for _ in range(12):
        value = phi + ratio * (np.cos(2.0 * phi) - 1.0)
        slope = 1.0 - 2.0 * ratio * np.sin(2.0 * phi)
        phi = phi - (value - u) / slope
    z = c + h * np.sin(2.0 * phi)
    rho = np.sqrt(1.0 - z * z)
    points = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
    return _balance_on_sphere(points)


def wobbled_string_generators(amplitude=0.1, harmonic=3, n_samples=256):
    """Circle-pair generators with a vertical wobble on the left mover.

    The left mover is the unit circle pushed out of its plane by
    ``amplitude * sin(harmonic * t)`` and re-parametrized to unit speed;
    the right mover is a plain circle.  Like the plain circle pair, the
    solutions cusp at tau = pi/2 mod pi and need a tau window such as
    (-1, 1), where the generator images stay well separated.
    """
    t = 2.0 * np.pi * np.arange(n_samples) / n_samples
    raw = np.stack(
        [np.cos(t), np.sin(t), amplitude * np.sin(harmonic * t)], axis=-1
    )
    left = unit_speed_generator(raw)
    _, right = circle_generators()
    return left, right


def oscillating_string_generators(n_samples=512, polar_offset=0.18, wave_height=0.65):
    """Left/right-mover pair for a cusp-free oscillating closed string.

    Both hodographs are unit curves on S^2 with zero mean (so the string is
    periodic in time as well as sigma).  The left mover rides a northern
    band and the right mover the mirror southern band, waving in phase so
    the height gap between the images is 2c pointwise in azimuth; the two
    images therefore stay apart everywhere, which keeps the induced metric
    nondegenerate over the whole worldsheet — degeneracy would require
    a'(u) = b'(v) for some pair of phases.
    """
    tang_a = _band_hodograph(n_samples, polar_offset, wave_height, southern=False)
    tang_b = _band_hodograph(n_samples, polar_offset, wave_height, southern=True)
    curves = []
    for tang in (tang_a, tang_b):
        that = np.fft.rfft(tang, axis=0) / n_samples
        m = np.arange(1, that.shape[0])
        coeff = np.zeros_like(that)
        coeff[1:] = that[1:] / (1j * m)[:, None]
        if n_samples % 2 == 0:
            coeff[-1] = 0.0
        curves.append(FourierCurve(coeff))
    return curves[0], curves[1]


def circle_generators():
    """Planar circle pair: the worldsheet X = (tau, cos tau cos sigma, cos tau sin sigma)."""
    coeff_a = np.zeros((2, 3), dtype=complex)
    coeff_a[1] = [0.5, -0.5j, 0.0]          # (cos u, sin u, 0)
    coeff_b = np.zeros((2, 3), dtype=complex)
    coeff_b[1] = [0.5, 0.5j, 0.0]           # (cos v, -sin v, 0)
    return FourierCurve(coeff_a), FourierCurve(coeff_b)


# ---------------------------------------------------------------------------
# Solution families and assembly


@dataclass
class SolutionFamily:
    """Two-parameter family of exact closed-string solutions.

    The parameters (lambda_1, lambda_2) translate the left- and right-mover
    phases: a(u) -> a(u + lambda_1), b(v) -> b(v + lambda_2).  Each member is
    an exact solution, so central-difference tangents of the family satisfy
    the linearized equation of motion automatically.
    """

    left: FourierCurve
    right: FourierCurve
    n_tau: int = 64
    n_sigma: int = 64
    tau_window: tuple | None = None
    name: str = "oscillating-string"
    degeneracy_margin: float = 1e-8

    def generators_at(self, lam):
        lam = tuple(lam)
        if len(lam) != 2:
            raise CurveError("family parameters must be (lambda1, lambda2)")
        return self.left.shifted(lam[0]), self.right.shifted(lam[1])

    def member(self, lam=(0.0, 0.0)):
        return closed_string_solution(self, lam)

    def tangent(self, index, lam=(0.0, 0.0), step=1e-4):
        """Phase-space tangent dX/dlambda_index by central differences."""
        lam = np.asarray(lam, dtype=float)
        bump = np.zeros(2)
        bump[index] = step
        plus = closed_string_solution(self, lam + bump)
        minus = closed_string_solution(self, lam - bump)
        return (plus.x - minus.x) / (2.0 * step)


def _axis_rotation(axis, angle):
    """Rotation of 3-space about one coordinate axis."""
    c, s = np.cos(angle), np.sin(angle)
    i, j = ((1, 2), (2, 0), (0, 1))[axis]
    m = np.eye(3)
    m[i, i] = c
    m[j, j] = c
    m[i, j] = -s
    m[j, i] = s
    return m


def _rotation_generator(axis):
    """Derivative of `_axis_rotation` at zero angle (cross product matrix)."""
    i, j = ((1, 2), (2, 0), (0, 1))[axis]
    w = np.zeros((3, 3))
    w[i, j] = -1.0
    w[j, i] = 1.0
    return w


@dataclass
class TiltedSolutionFamily(SolutionFamily):
    """Family tilting each mover rigidly about a fixed spatial axis.

    Phase translations (the parameters of `SolutionFamily`) have a blind
    spot: their two tangents carry *identical* normal projections, since
    each differs from a tangent-plane vector by the same timelike axis,
    so the symplectic current of that pair vanishes identically.  Rigid
    tilts about two different axes deform the worldsheet shape
    independently and make the standard nondegenerate deformation pair
    for current and kernel checks.
    """

    axis_left: int = 0
    axis_right: int = 1

    def generators_at(self, lam):
        lam = tuple(lam)
        if len(lam) != 2:
            raise CurveError("family parameters must be (lambda1, lambda2)")
        if self.left.dim != 3 or self.right.dim != 3:
            raise CurveError("rigid tilts are defined for three-component movers")
        return (self.left.rotated(_axis_rotation(self.axis_left, lam[0])),
                self.right.rotated(_axis_rotation(self.axis_right, lam[1])))

    def tangent(self, index, lam=(0.0, 0.0), step=None):
        """Exact rotational velocity field; ``step`` is accepted and ignored.

        The member's spatial part is a sum of rigidly rotated movers, so
        the parameter derivative is the rotation generator applied to the
        rotated mover -- no differencing, hence no step noise in downstream
        current and kernel evaluations.
        """
        emb = self.member(tuple(lam))
        tau = emb.chart.axis_coordinates(0)
        sigma = emb.chart.axis_coordinates(1)
        mover, direction = ((0, +1), (1, -1))[index]
        curve = self.generators_at(lam)[mover]
        axis = (self.axis_left, self.axis_right)[mover]
        field = curve.evaluate_sum_grid(tau, sigma, direction, order=0)
        out = np.zeros(emb.x.shape)
        out[..., 1:] = 0.5 * field @ _rotation_generator(axis).T
        return out


@dataclass
class WobbleSolutionFamily(SolutionFamily):
    """Family modulating an out-of-plane wobble on each mover separately.

    The first parameter raises the left mover's vertical wobble amplitude
    above its base value; the second switches on a different-harmonic
    wobble on the (initially planar) right mover.  Both directions change
    the worldsheet shape -- neither is an ambient isometry -- so their
    tangent pair probes the full current and kernel structure, including
    charge integrals that rigid-motion families leave at zero.
    """

    left: FourierCurve = None
    right: FourierCurve = None
    name: str = "wobble-pair"
    amplitude: float = 0.1
    harmonic_left: int = 3
    harmonic_right: int = 2
    n_samples: int = 256

    def __post_init__(self):
        # the movers are derived from the wobble parameters, not supplied
        self.left, self.right = self.generators_at((0.0, 0.0))

    def generators_at(self, lam):
        lam = tuple(lam)
        if len(lam) != 2:
            raise CurveError("family parameters must be (lambda1, lambda2)")
        t = 2.0 * np.pi * np.arange(self.n_samples) / self.n_samples
        left_raw = np.stack(
            [np.cos(t), np.sin(t),
             (self.amplitude + lam[0]) * np.sin(self.harmonic_left * t)],
            axis=-1)
        right_raw = np.stack(
            [np.cos(t), -np.sin(t),
             lam[1] * np.sin(self.harmonic_right * t)], axis=-1)
        return unit_speed_generator(left_raw), unit_speed_generator(right_raw)


@dataclass
class ConjugateWobbleFamily(WobbleSolutionFamily):
    """Sine and cosine amplitudes of one harmonic on one mover.

    Left- and right-mover sectors pair to zero under the phase-space
    two-form (they are symplectically orthogonal), so families that put
    one parameter on each mover always integrate to a vanishing form no
    matter how large the current is pointwise.  Driving the two
    quadratures of a single harmonic on the *same* mover gives the
    oscillator's canonically conjugate pair, whose form is an order-one
    number -- the right family for any check that needs omega itself
    away from zero.
    """

    def generators_at(self, lam):
        lam = tuple(lam)
        if len(lam) != 2:
            raise CurveError("family parameters must be (lambda1, lambda2)")
        t = 2.0 * np.pi * np.arange(self.n_samples) / self.n_samples
        h = self.harmonic_left
        left_raw = np.stack(
            [np.cos(t), np.sin(t),
             (self.amplitude + lam[0]) * np.sin(h * t) + lam[1] * np.cos(h * t)],
            axis=-1)
        right_raw = np.stack([np.cos(t), -np.sin(t), np.zeros_like(t)],
                             axis=-1)
        return unit_speed_generator(left_raw), unit_speed_generator(right_raw)


def closed_string_solution(family, lam=None):
    """Assemble the embedding of one family member.

    Builds X^0 = tau, Xvec = (a(tau+sigma) + b(tau-sigma))/2 on a periodic
    or tau-windowed chart, with the full analytic derivative tower (first,
    second and third parametric derivatives) attached.  Validates the
    conformal-gauge constraints and rejects degenerate (cusped) members,
    naming the worst grid location.
    """
    if lam is None:
        lam = (0.0, 0.0)
    a, b = family.generators_at(lam)
    if a.dim != b.dim:
        raise CurveError("left and right movers live in different dimensions")
    drift = a.drift + b.drift
    moving = bool(np.linalg.norm(drift) > 1e-12)
    if family.tau_window is None:
        if moving:
            raise CurveError(
                "generators carry net drift; supply a tau_window for a moving string"
            )
        chart = GridChart(
            (family.n_tau, family.n_sigma),
            ((0.0, 2.0 * np.pi), (0.0, 2.0 * np.pi)),
            periodic=(True, True),
        )
    else:
        chart = GridChart(
            (family.n_tau, family.n_sigma),
            (tuple(family.tau_window), (0.0, 2.0 * np.pi)),
            periodic=(False, True),
        )
    tau = chart.axis_coordinates(0)
    sigma = chart.axis_coordinates(1)

    orders_a = [a.evaluate_sum_grid(tau, sigma, +1, order=p) for p in range(4)]
    orders_b = [b.evaluate_sum_grid(tau, sigma, -1, order=p) for p in range(4)]

    nt, ns, dim = orders_a[0].shape
    x = np.zeros((nt, ns, dim + 1))
    x[..., 0] = tau[:, None]
    x[..., 1:] = 0.5 * (orders_a[0] + orders_b[0])

    def mover_derivative(n_sigma_derivs, total):
        sign = (-1.0) ** n_sigma_derivs
        return 0.5 * (orders_a[total] + sign * orders_b[total])

    dx = np.zeros((nt, ns, 2, dim + 1))
    dx[..., 0, 0] = 1.0
    dx[..., 0, 1:] = mover_derivative(0, 1)
    dx[..., 1, 1:] = mover_derivative(1, 1)

    ddx = np.zeros((nt, ns, 2, 2, dim + 1))
    ddx[..., 0, 0, 1:] = mover_derivative(0, 2)
    ddx[..., 0, 1, 1:] = mover_derivative(1, 2)
    ddx[..., 1, 0, 1:] = mover_derivative(1, 2)
    ddx[..., 1, 1, 1:] = mover_derivative(2, 2)

    d3x = np.zeros((nt, ns, 2, 2, 2, dim + 1))
    for axes in np.ndindex(2, 2, 2):
        d3x[..., axes[0], axes[1], axes[2], 1:] = mover_derivative(sum(axes), 3)

    background = BackgroundSpacetime.minkowski(dim + 1)
    emb = Embedding(chart, background, x, dx=dx, ddx=ddx, d3x=d3x, name=family.name)

    # Conformal-gauge constraints: e_tau +/- e_sigma are null iff |a'| = |b'| = 1.
    null_plus = -1.0 + np.sum(orders_a[1] ** 2, axis=-1)
    null_minus = -1.0 + np.sum(orders_b[1] ** 2, axis=-1)
    worst = max(np.max(np.abs(null_plus)), np.max(np.abs(null_minus)))
    if worst > 1e-8:
        raise CurveError(
            "conformal-gauge constraints violated (|residual| = %.2e): "
            "generators are not unit-speed" % worst
        )

    gamma = np.einsum("...am,...bm,m->...ab", dx, dx, background.signature_array)
    det = gamma[..., 0, 0] * gamma[..., 1, 1] - gamma[..., 0, 1] ** 2
    if np.max(det) > -family.degeneracy_margin:
        flat_idx = int(np.argmax(det))
        it, is_ = np.unravel_index(flat_idx, det.shape)
        raise CurveError(
            "cusp: worldsheet metric degenerates at tau = %.6f, sigma = %.6f "
            "(det gamma = %.3e)" % (tau[it], sigma[is_], det[it, is_])
        )
    return emb


# ---------------------------------------------------------------------------
# Extremality and relaxation


def mean_curvature_vector(emb):
    """Trace-of-second-fundamental-form vector, computed without normal frames.

    Returns the background-space vector H^mu = gamma^{ab} (dd X + Gamma ee)
    projected off the tangent plane.  For an extremal surface H = 0; the
    area-descent direction of the relaxation flow is +H.
    """
    e = emb.tangents()
    gamma, gamma_inv, det, sqrt_det = induced_metric(emb, e)
    dd = emb.second_partials()
    accel = np.einsum("...ab,...abm->...m", gamma_inv, dd)
    christoffel = emb.christoffel_nodes()
    if christoffel is not None:
        accel = accel + np.einsum(
            "...ab,...mnr,...an,...br->...m", gamma_inv, christoffel, e, e
        )
    g = emb.background.signature_array if emb.metric_nodes() is None else None
    if g is not None:
        inner = np.einsum("...am,m,...m->...a", e, g, accel)
    else:
        gm = emb.metric_nodes()
        inner = np.einsum("...am,...mn,...n->...a", e, gm, accel)
    tangential = np.einsum("...ab,...b,...am->...m", gamma_inv, inner, e)
    return accel - tangential


def extremality_residual(emb):
    """Max over nodes of the norm of the mean-curvature vector."""
    h = mean_curvature_vector(emb)
    if emb.metric_nodes() is None:
        norm2 = np.einsum("...m,m,...m->...", h, emb.background.signature_array, h)
    else:
        norm2 = np.einsum("...m,...mn,...n->...", h, emb.metric_nodes(), h)
    # The mean-curvature vector is normal; for our (timelike or Euclidean)
    # worldsheets the normal bundle is spacelike, so norm2 >= 0 up to round-off.
    return float(np.sqrt(np.max(np.abs(norm2))))


@dataclass
class RelaxationProblem:
    """Setup and run-record for mean-curvature-flow relaxation."""

    embedding: object
    fix_boundary: bool = True
    step: float | None = None
    max_iterations: int = 20000
    target_residual: float = 1e-4
    area_history: list = field(default_factory=list)
    residual_history: list = field(default_factory=list)


def _free_node_mask(chart):
    mask = np.ones(chart.sizes, dtype=bool)
    for axis, per in enumerate(chart.periodic):
        if not per:
            index = [slice(None)] * len(chart.sizes)
            index[axis] = 0
            mask[tuple(index)] = False
            index[axis] = -1
            mask[tuple(index)] = False
    return mask


def _stable_step(chart, gamma):
    """Explicit-flow stability heuristic: eta = (min physical spacing)^2 / 4."""
    h2 = np.inf
    for axis in range(len(chart.sizes)):
        spacing = chart.spacings[axis]
        scale = np.min(np.abs(gamma[..., axis, axis]))
        h2 = min(h2, scale * spacing * spacing)
    return 0.25 * h2


def relax_minimal_surface(prob: RelaxationProblem):
    """Relax an embedding to a minimal surface by explicit area descent.

    Iterates X <- X + eta * H (H the mean-curvature vector) with boundary
    rows pinned when ``fix_boundary`` is set.  Steps that increase the area
    are rejected and the step is halved; more than 10 halvings raises
    ``StepInstabilityError``.  Non-convergence within ``max_iterations``
    raises ``ConvergenceError`` carrying the residual history.  Area and
    residual histories are recorded on the problem object either way.

    The convergence residual is max |H| over the *free* nodes.  Pinned
    boundary rows are held by the constraint, so their discrete mean
    curvature measures the constraint force (and the displacement of their
    free neighbours through the one-sided stencils), not a failure of the
    flow; it does not converge and is not asked to.
    """
    from .geometry import Embedding

    base = prob.embedding
    if any(s != 1 for s in base.background.signature):
        raise CurveError("relaxation supports Euclidean backgrounds only")
    chart = base.chart
    x = np.array(base.x, dtype=float)
    free = _free_node_mask(chart) if prob.fix_boundary else np.ones(chart.sizes, dtype=bool)
    halvings = 0
    shrink = 1.0

    emb = Embedding(chart, base.background, x, name=base.name)
    for iteration in range(prob.max_iterations):
        e = emb.tangents()
        gamma, gamma_inv, det, sqrt_det = induced_metric(emb, e)
        area = chart.integrate(sqrt_det)
        h_vec = mean_curvature_vector(emb)
        norm2 = np.einsum("...m,...m->...", h_vec, h_vec)
        residual = float(np.sqrt(np.max(norm2[free])))
        prob.area_history.append(float(area))
        prob.residual_history.append(residual)
        if residual <= prob.target_residual:
            return emb

        eta = prob.step if prob.step is not None else _stable_step(chart, gamma)
        eta *= shrink
        while True:
            candidate = x + (eta * free[..., None]) * h_vec
            cand_emb = Embedding(chart, base.background, candidate, name=base.name)
            ce = cand_emb.tangents()
            _, _, _, cand_sqrt = induced_metric(cand_emb, ce)
            cand_area = chart.integrate(cand_sqrt)
            if cand_area <= area:
                break
            halvings += 1
            shrink *= 0.5
            eta *= 0.5
            if halvings > 10:
                raise StepInstabilityError(
                    "area increased through 10 step halvings (eta = %.3e)" % eta,
                    history=prob.residual_history,
                )
        x = candidate
        emb = cand_emb

    raise ConvergenceError(
        "relaxation did not reach residual %.1e in %d iterations (last %.3e)"
        % (prob.target_residual, prob.max_iterations, prob.residual_history[-1]),
        history=prob.residual_history,
    )
