"""Numerics for left-invariant metrics on S^3 = SU(2) and their minimal two-spheres."""

from .group import (ANTIPODAL, IDENTITY, LieAlgebraVector, TangentVector, UnitQuaternion,
                    antipode, differential_left_translate, haar_sample, inverse,
                    left_translate, multiply, right_translate)
from .metric import (HomogeneousMetric, RicciSpectrum, berger, evaluate_metric,
                     ricci_eigenvalues, round_metric, scalar_curvature, structure_constants,
                     volume)
from .quadrature import QuadratureError, SurfaceGrid
from .surfaces import (ParametrizedSphere, area, area_element, sigma0, sphere_set_distance,
                       surface_average, translate_sphere)
from .integral_geometry import (MonteCarloReport, integrate_volume, verify_averaging_formula,
                                verify_unimodularity)
from .systole import (F, F_derivatives_at_one, SystoleCurvePoint, berger_minimal_area,
                      conformal_experiment, systole_curve, two_systole_rp3)

__version__ = "0.1.0"
