import numpy as np
from worldsheets.geometry import geometry_fields
from worldsheets.dynamics import WobbleSolutionFamily, closed_string_solution
from worldsheets.phase_space import (project_deformation, gb_density_kernel,
                                     conservation_check)

n = 512
fam = WobbleSolutionFamily(n_tau=n, n_sigma=n, tau_window=(-1.0, 1.0))
base = closed_string_solution(fam)
geo = geometry_fields(base)
f1 = project_deformation(geo, fam.tangent(0))
f2 = project_deformation(geo, fam.tangent(1))
ker = gb_density_kernel(geo, f1, f2)
rep = conservation_check(geo, ker, density_weighted=True)
rowmax = np.max(np.abs(rep.divergence), axis=1)
for margin in (4, 8, 16, 32, 64):
    print(f"margin {margin:3d}: {np.max(rowmax[margin:-margin]):.3e}")
print("row profile 0..20:", np.array2string(rowmax[:21], precision=1))
print("middle rows 250..262:", np.array2string(rowmax[250:262], precision=1))
