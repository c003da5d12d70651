import numpy as np
from worldsheets.surfaces import static_cylinder
from worldsheets.geometry import geometry_fields
from worldsheets.dynamics import ConjugateWobbleFamily, closed_string_solution
from worldsheets.phase_space import (project_deformation, symplectic_form,
                                     verify_deformation_formulas,
                                     symplectic_current, conservation_check)

# --- cylinder trace slot ---
emb = static_cylinder(1.0, 64, 64)
g = geometry_fields(emb)
print("mean curvature sample [2,3]:", g.mean_curvature[2, 3])
print("mean curvature max abs per slot:",
      np.max(np.abs(g.mean_curvature[..., 0])),
      np.max(np.abs(g.mean_curvature[..., 1])))

# --- conjugate wobble family omega ---
fam = ConjugateWobbleFamily(n_tau=128, n_sigma=128, tau_window=(-1.0, 1.0))
base = closed_string_solution(fam)
geo = geometry_fields(base)
f1 = project_deformation(geo, fam.tangent(0))
f2 = project_deformation(geo, fam.tangent(1))
print("max |phi1_N|", np.max(np.abs(f1.normal)), "max |phi2_N|",
      np.max(np.abs(f2.normal)))
ev = symplectic_form(geo, f1, f2)
print("omega:", ev.value)
print("slices head:", ev.slice_values[:3], "tail:", ev.slice_values[-3:])
print("slice_independence:", ev.slice_independence)
print("max divergence:", ev.max_divergence)
cur = symplectic_current(geo, f1, f2)
rep = conservation_check(geo, cur)
print("cons: max_div", rep.max_divergence, "indep", rep.slice_independence)
