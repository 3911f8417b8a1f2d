"""
isort:skip_file
"""

from .validation import ValidationError as ValidationError
from .validation import DegreeCapError as DegreeCapError
from .validation import SignPatternError as SignPatternError
from .validation import RankDeficientError as RankDeficientError
from .validation import EstimationRangeError as EstimationRangeError
from .validation import KappaRangeError as KappaRangeError
from .validation import SchemaError as SchemaError

from .target_fn import TargetSpec as TargetSpec
from .target_fn import eval_inverse_approx as eval_inverse_approx
from .target_fn import eval_normalized_target as eval_normalized_target
from .target_fn import min_valid_kappa as min_valid_kappa

from .cheb import ChebSeries as ChebSeries
from .cheb import Parity as Parity
from .cheb import compute_coeffs as compute_coeffs
from .cheb import eval_series as eval_series
from .cheb import choose_degree as choose_degree

from .qsp_eval import AngleSet as AngleSet
from .qsp_eval import Convention as Convention
from .qsp_eval import Origin as Origin
from .qsp_eval import convert as convert
from .qsp_eval import eval_poly as eval_poly
from .qsp_eval import eval_poly_grad as eval_poly_grad
from .qsp_eval import eval_poly_weighted_grad as eval_poly_weighted_grad
from .qsp_eval import eval_poly_batch as eval_poly_batch
from .qsp_eval import eval_unitary as eval_unitary

from .phase_solver import SolveConfig as SolveConfig
from .phase_solver import SolveResult as SolveResult
from .phase_solver import cheb_sample_nodes as cheb_sample_nodes
from .phase_solver import solve_angles as solve_angles
from .phase_solver import residual_report as residual_report

from .meta_fit import ReferenceBank as ReferenceBank
from .meta_fit import MetaParams as MetaParams
from .meta_fit import extract_theta_max as extract_theta_max
from .meta_fit import fit_amplitude as fit_amplitude
from .meta_fit import split_envelope as split_envelope
from .meta_fit import merge_envelope as merge_envelope
from .meta_fit import fit_envelope as fit_envelope
from .meta_fit import build_meta as build_meta

from .angle_estimator import EstimateRequest as EstimateRequest
from .angle_estimator import estimate_na as estimate_na
from .angle_estimator import build_envelope_values as build_envelope_values
from .angle_estimator import estimate_angles as estimate_angles
from .angle_estimator import pinned_endpoint_shift as pinned_endpoint_shift

from .verifier import ErrorSweep as ErrorSweep
from .verifier import DiagonalSystem as DiagonalSystem
from .verifier import SvdSystem as SvdSystem
from .verifier import sweep_error as sweep_error
from .verifier import build_test_matrix_F as build_test_matrix_F
from .verifier import build_test_matrix_sin as build_test_matrix_sin
from .verifier import apply_inverse_via_svd as apply_inverse_via_svd
from .verifier import apply_svd_inverse as apply_svd_inverse
from .verifier import inversion_error as inversion_error

from .angle_io import save_angles as save_angles
from .angle_io import load_angles as load_angles
from .angle_io import save_meta as save_meta
from .angle_io import load_meta as load_meta

from .cli import cli as cli
