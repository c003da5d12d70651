"""Eq.21 oracle: gb_density_kernel vs FD exterior derivative of sqrt*psi."""
import numpy as np
import worldsheets.dynamics as dyn
import worldsheets.phase_space as ps
from worldsheets.geometry import geometry_fields

left, right = dyn.wobbled_string_generators()
fam = dyn.TiltedSolutionFamily(left, right, n_tau=128, n_sigma=128,
                               tau_window=(-1.0, 1.0))
warped, geo, (f1, f2) = ps.normal_gauge_family(fam)

kern = ps.gb_density_kernel(geo, f1, f2)
print("max|gb_density_kernel| =", np.max(np.abs(kern)))


def functional(emb, v):
    g = geometry_fields(emb, intrinsic=True, twist=True)
    proj = ps.project_deformation(g, v)
    field = ps.DeformationField(emb, proj.normal,
                                np.zeros_like(proj.tangential), "oracle")
    return g.sqrt_gamma[..., None] * ps.gb_potential(g, field)


dpsi = ps.exterior_derivative_oracle(warped, functional)
scale = max(np.max(np.abs(kern)), np.max(np.abs(dpsi)))
gap = np.max(np.abs(dpsi - kern)) / scale
print("scale =", scale, " rel gap =", gap)
