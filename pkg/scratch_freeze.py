"""Final freeze measurements with the shipped package code."""
import numpy as np, time
import worldsheets as ws
from worldsheets.geometry import geometry_fields

t0 = time.time()

# --- criterion 6: tilted circle pair, fully periodic chart ---
left, right = ws.circle_generators()
fam6 = ws.TiltedSolutionFamily(left, right, n_tau=256, n_sigma=256,
                               tau_window=(-1.0, 1.0))
base6 = fam6.member((0.0, 0.0))
print("c6 residual:", ws.extremality_residual(base6))
geo6 = geometry_fields(base6, intrinsic=True, twist=True)
f1 = ws.project_deformation(geo6, fam6.tangent(0))
f2 = ws.project_deformation(geo6, fam6.tangent(1))
j = ws.symplectic_current(geo6, f1, f2)
rep = ws.conservation_check(geo6, j)
print("c6 max|j|:", np.max(np.abs(j)), "div full:", rep.max_divergence,
      "indep:", rep.slice_independence, "n_slices:", len(rep.slice_values))
ev = ws.symplectic_form(geo6, f1, f2)
print("c6 omega:", ev.value, "indep:", ev.slice_independence)
print("   time", time.time() - t0)

# --- criterion 6: Eq.14 one-form oracle on the wobble family ---
t0 = time.time()
fam14 = ws.WobbleSolutionFamily(n_tau=128, n_sigma=128,
                                tau_window=(-1.0, 1.0))
warped, geo14, (g1, g2) = ws.normal_gauge_family(fam14)
jj = ws.symplectic_current(geo14, g1, g2)
dphi = ws.exterior_derivative_oracle(warped,
                                     ws.tangential_projection_functional,
                                     floor=1e-5)
scale = max(np.max(np.abs(dphi)), np.max(np.abs(jj)))
print("c6 eq14 oracle gap:", np.max(np.abs(dphi + jj)) / scale,
      "scale:", scale, "time", time.time() - t0)

# --- criterion 7: GB kernel vs family oracle, invariant content ---
t0 = time.time()
kern = ws.gb_density_kernel(geo14, g1, g2)
print("c7 kernel max:", np.max(np.abs(kern)))
dpsi = ws.exterior_derivative_oracle(warped, ws.gb_flux_functional,
                                     floor=3e-5)
rep_k = ws.conservation_check(geo14, kern, density_weighted=True)
rep_o = ws.conservation_check(geo14, dpsi, density_weighted=True)
chart = geo14.embedding.chart
fscale = max(np.max(np.abs(kern)), np.max(np.abs(dpsi)))
fscale *= chart.spacings[1] * chart.sizes[1]
gap = np.max(np.abs(rep_k.slice_values - rep_o.slice_values)) / fscale
print("c7 charges: kernel", np.max(np.abs(rep_k.slice_values)),
      "oracle", np.max(np.abs(rep_o.slice_values)), "rel gap:", gap)
print("c7 oracle indep:", rep_o.slice_independence,
      "kernel indep:", rep_k.slice_independence)
print("c7 pointwise rep gap:",
      np.max(np.abs(dpsi - kern)) / np.max(np.abs(kern)),
      "time", time.time() - t0)

# --- criterion 8: cylinder chern sector ---
t0 = time.time()
cyl = ws.static_cylinder(1.0, 128, 128, (-1.0, 1.0))
geoc = geometry_fields(cyl, intrinsic=True, twist=True)
tau, sigma = np.meshgrid(cyl.chart.axis_coordinates(0),
                         cyl.chart.axis_coordinates(1), indexing="ij")
n1 = np.stack([0.3 * np.cos(sigma) * np.cos(np.pi * tau / 2),
               0.5 + 0.2 * np.sin(2 * sigma)], axis=-1)
n2 = np.stack([0.4 * np.sin(sigma), 0.3 * np.cos(np.pi * tau / 2)], axis=-1)
zero = np.zeros(cyl.chart.shape + (2,))
d1 = ws.DeformationField(cyl, n1, zero, "profile")
d2 = ws.DeformationField(cyl, n2, zero, "profile")
cker = ws.chern_kernel(geoc, d1, d2)
print("c8 cylinder kernel max:", np.max(np.abs(cker)))
theta = ws.chern_potential(geoc, d1)
theta_fd = ws.chern_potential_oracle(geoc, d1)
tscale = np.max(np.abs(theta))
print("c8 theta oracle gap:",
      np.max(np.abs(theta - theta_fd)) / tscale, "scale", tscale)

# density identity: d/de[twist density] = div Theta under normal displacement
disp = np.einsum("...i,...im->...m", d1.normal, geoc.frames.normal)
h = 1e-4
sides = []
for sign in (1.0, -1.0):
    sh = ws.displaced_embedding(cyl, disp, sign * h)
    fr = ws.aligned_normal_frame(sh, geoc.frames)
    gg = geometry_fields(sh, frames=fr, intrinsic=False, twist=True)
    sides.append(gg.twist_curvature[..., 0, 1, 0, 1])
dens_rate = (sides[0] - sides[1]) / (2.0 * h)
div = sum(cyl.chart.partial(theta[..., a], a) for a in range(2))
iscale = max(np.max(np.abs(dens_rate)), np.max(np.abs(div)))
print("c8 density identity gap:",
      np.max(np.abs(dens_rate - div)[5:-5]) / iscale, "scale", iscale,
      "time", time.time() - t0)

# family-oracle route on the cylinder (off-shell): invariant content
t0 = time.time()
disp1 = np.einsum("...i,...im->...m", d1.normal, geoc.frames.normal)
disp2 = np.einsum("...i,...im->...m", d2.normal, geoc.frames.normal)
famc = ws.LinearDisplacementFamily(cyl, disp1, disp2)
dtheta = ws.exterior_derivative_oracle(famc,
                                       ws.chern_flux_functional(geoc.frames),
                                       floor=1e-5)
rep_ck = ws.conservation_check(geoc, cker, density_weighted=True)
rep_co = ws.conservation_check(geoc, dtheta, density_weighted=True)
cfscale = max(np.max(np.abs(cker)), np.max(np.abs(dtheta)))
cfscale *= cyl.chart.spacings[1] * cyl.chart.sizes[1]
cgap = np.max(np.abs(rep_ck.slice_values - rep_co.slice_values)) / cfscale
print("c8 family-oracle charges gap:", cgap,
      "| kernel charges", np.max(np.abs(rep_ck.slice_values)),
      "oracle charges", np.max(np.abs(rep_co.slice_values)))
print("c8 oracle indep:", rep_co.slice_independence,
      "dtheta max:", np.max(np.abs(dtheta)),
      "pointwise gap:", np.max(np.abs(dtheta - cker)),
      "time", time.time() - t0)
