"""Eq.14 oracle on the tilted (nondegenerate) family."""
import numpy as np
import worldsheets.dynamics as dyn
import worldsheets.phase_space as ps

left, right = dyn.wobbled_string_generators()
fam = dyn.TiltedSolutionFamily(left, right, n_tau=128, n_sigma=128,
                               tau_window=(-1.0, 1.0))
warped, geo, (f1, f2) = ps.normal_gauge_family(fam)

j = ps.symplectic_current(geo, f1, f2)
print("max|j| =", np.max(np.abs(j)))

dpsi = ps.exterior_derivative_oracle(warped, ps.tangential_projection_functional)
scale = max(np.max(np.abs(j)), np.max(np.abs(dpsi)))
gap = np.max(np.abs(np.asarray(dpsi) + j)) / scale
print("scale =", scale, " rel gap dPsi vs -j =", gap)
