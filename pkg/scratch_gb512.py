import numpy as np, time
from worldsheets.geometry import geometry_fields
from worldsheets.dynamics import WobbleSolutionFamily, closed_string_solution
from worldsheets.phase_space import (project_deformation, gb_density_kernel,
                                     symplectic_current, conservation_check)

for n in (256, 512):
    t0 = time.time()
    fam = WobbleSolutionFamily(n_tau=n, n_sigma=n, tau_window=(-1.0, 1.0))
    base = closed_string_solution(fam)
    geo = geometry_fields(base)
    f1 = project_deformation(geo, fam.tangent(0))
    f2 = project_deformation(geo, fam.tangent(1))
    ker = gb_density_kernel(geo, f1, f2)
    rep = conservation_check(geo, ker, density_weighted=True)
    interior = rep.divergence[8:-8, :]
    print(f"n={n}: kernel max {np.max(np.abs(ker)):.4g} "
          f"div interior {np.max(np.abs(interior)):.3e} "
          f"full {rep.max_divergence:.3e} indep {rep.slice_independence:.3e} "
          f"({time.time()-t0:.1f}s)")
    jj = symplectic_current(geo, f1, f2)
    rj = conservation_check(geo, jj)
    ji = rj.divergence[8:-8, :]
    print(f"      j max {np.max(np.abs(jj)):.4g} "
          f"div interior {np.max(np.abs(ji)):.3e} full {rj.max_divergence:.3e} "
          f"indep {rj.slice_independence:.3e}")
