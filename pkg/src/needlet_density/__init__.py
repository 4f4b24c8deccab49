"""Needlet frames on S^2 and the hard-thresholding needlet density estimator."""

from .cubature import CubatureRule, build_rule, integrate, load_rule, save_rule
from .estimator import (DensityEstimate, EstimatorConfig, empirical_coefficients, error_metrics,
                        estimate_density, hard_threshold)
from .frame import (BesovParams, CoefficientPyramid, NeedletAtom, analyze, besov_norm,
                    coefficient_covariance, l2_norm_squared, needlet_eval, synthesize)
from .models import TWO_BUMP, UNIFORM, DensityModel, Sample, density_eval, sample_mixture, sample_uniform
from .sphere import geodesic_distance, legendre_kernel, projector_kernel_sum
from .window import WindowFunction, build_window, localization_integral, partition_of_unity_defect

__version__ = "0.1.0"
