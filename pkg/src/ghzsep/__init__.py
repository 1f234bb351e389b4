"""Full-separability tests and certificates for three-qubit states."""

from .classify import Verdict, classify_state, run_ensemble
from .criterion import c_value, c_value_closed_form, c_value_numeric, evaluate_observation, optimize_x
from .separability import certify, lambda_minus, mu_cubed
from .states import ghz_diagonal_from_lambdas, ghz_diagonal_from_probs, hyllus_state, kay_state

__version__ = "0.1.0"
