"""Numerics for variable-exponent Muckenhoupt weights.

Modulars and Luxemburg norms on variable Lebesgue spaces, scalar and
matrix Muckenhoupt characteristics over finite cube families, reducing
operators via inscribed ellipsoids, reverse Holder certification, and
exponent-openness sweeps, with a JSON-config command line on top.
"""

from .errors import (ConfigError, DomainError, InfiniteModularError,
                     NonIntegrableError, QuadratureError, VarweightsError)
from .exponents import (ExponentFunction, bump_exponent, constant_exponent,
                        diening_constant, fit_log_holder_constants,
                        harmonic_mean, log_decay_exponent, piecewise_exponent)
from .fields import (FieldSingularity, ScalarField, callable_field,
                     constant_weight, indicator_field, power_weight,
                     product_weight)
from .geometry import Box, Cube, CubeFamily, FamilySpec, build_family, origin_cube
from .norms import (NormResult, holder_defect, large_cube_norm_constants,
                    luxemburg_norm, modular, modular_samples,
                    unit_characteristic, weighted_norm)
from .quadrature import (Grid, IntegrationPlan, SingularPoint, build_grid,
                         check_integrable, integrate_cube)
from .scalar import (AInftyEstimate, CharacteristicReport, CubeRow,
                     LemmaReport, LEMMA_IDS, RHCertificate, SearchResult,
                     SweepResult, SweepRow, classical_ap_characteristic,
                     fit_ainfty_constants, muckenhoupt_characteristic,
                     openness_sweep, reverse_holder_exponent,
                     search_reverse_holder_exponent,
                     verify_average_reverse_holder, verify_norm_reverse_holder,
                     verify_weight_lemma)
from .ellipsoid import EllipsoidResult, inscribed_ellipsoid_matrix
from .matrices import (AveragedField, MatrixCharacteristicReport,
                       MatrixScalarComparison, MatrixSingularity, MatrixWeight,
                       ReducingOperator, TestField, apply_averaging,
                       apply_aux_averaging, averaging_norm_lower_bound,
                       averaging_ratio_rows, constant_matrix_weight,
                       congruent_power_weight, default_test_fields,
                       diagonal_power_weight, matrix_app_characteristic,
                       matrix_characteristic_on_cube, matrix_from_scalar,
                       matrix_openness_sweep, matrix_to_scalar_check, op_norm,
                       op_norms, reduced_characteristic,
                       reduced_characteristic_on_cube, reducing_operator,
                       unit_directions, validate_matrix_weight)
from .report import (Report, report_from_json, report_to_json, rows_to_csv)
from .config import load_config

__version__ = "0.1.0"
