"""Numerical laboratory for extremal string worldsheets.

Builds exact closed-string worldsheets and relaxed minimal surfaces,
measures their intrinsic and normal-bundle topology (Euler
characteristic and first Chern number), and evaluates the boundary
potentials and conserved two-form those topological densities
contribute on the space of solutions.
"""

from .background import BackgroundSpacetime, PointGeometry
from .chart import GridChart, fd_coefficients, open_axis_weights
from .config import ScenarioConfig, load_config, parse_config
from .dynamics import (ConjugateWobbleFamily, FourierCurve,
                       RelaxationProblem, SolutionFamily,
                       TiltedSolutionFamily, WobbleSolutionFamily,
                       circle_generators, closed_string_solution,
                       extremality_residual, mean_curvature_vector,
                       oscillating_string_generators, relax_minimal_surface,
                       unit_speed_generator, unit_speed_reparametrize,
                       wobbled_string_generators)
from .errors import (BackgroundError, ChartError, ConfigError,
                     ConvergenceError, CurveError, DeformationError,
                     DegenerateMetricError, EmbeddingError, FrameError,
                     OracleError, StepInstabilityError, WorldsheetError)
from .geometry import (Embedding, FrameField, GeometryFields, frame_field,
                       gauss_identity_residual, geometry_fields,
                       induced_metric, normal_frame)
from .invariants import (SIGMA_1, SIGMA_2, InvariantReport,
                         cap_extrapolated_chern, cap_extrapolated_euler,
                         chern_number, euler_characteristic, richardson_caps)
from .phase_space import (ConservationReport, DeformationField,
                          LinearDisplacementFamily, ReparametrizedFamily,
                          SymplecticEvaluation, aligned_normal_frame,
                          chern_kernel, chern_potential,
                          chern_potential_oracle, conservation_check,
                          chern_flux_functional, displaced_embedding,
                          exterior_derivative_oracle, gb_density_kernel,
                          gb_flux_functional, gb_kernel, gb_potential,
                          metric_variation, normal_gauge_family,
                          project_deformation, symplectic_current,
                          symplectic_form, tangential_projection_functional,
                          twist_variation_oracle, verify_deformation_formulas)
from .scenarios import SCENARIOS, run_scenario, verify_suite
from .surfaces import (catenoid, flat_plane, product_torus, revolution_torus,
                       ring_cylinder, round_sphere, static_cylinder,
                       torus_times_circle, whitney_sphere)

__version__ = "0.1.0"
