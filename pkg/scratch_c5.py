import numpy as np
from worldsheets.surfaces import static_cylinder
from worldsheets.geometry import geometry_fields
from worldsheets.phase_space import DeformationField, verify_deformation_formulas

emb = static_cylinder(1.0, 64, 64)
g = geometry_fields(emb)
tau, sigma = np.meshgrid(emb.chart.axis_coordinates(0),
                         emb.chart.axis_coordinates(1), indexing="ij")
nrm = np.zeros(g.mean_curvature.shape)
nrm[..., 0] = np.cos(sigma) * np.cos(np.pi * tau / 2.0)
nrm[..., 1] = 0.5 + np.sin(2.0 * sigma) + 0.2 * np.cos(np.pi * tau / 2.0)
tan = np.zeros(emb.x.shape[:-1] + (2,))
tan[..., 0] = 0.3 * (1.0 - tau ** 2) * np.sin(sigma)
tan[..., 1] = 0.4 * np.cos(2.0 * sigma)
field = DeformationField(emb, nrm, tan, "profile")
rep = verify_deformation_formulas(g, field)
for k, v in rep.items():
    print(f"{k:22s} {v:.3e}")
