"""Integration and invariant monitoring for the mass-action SIR model."""

from .errors import SirkitError
from .integrator import AugmentedState, IntegratorConfig, Trajectory, integrate, refine_convergence
from .model import Derivative, SirParams, SirState, in_simplex, total_population, validate_params, vector_field
from .monitor import InvariantReport, MonitorConfig, km_value, run_all
from .phase_plane import Branch, LevelCurve, i_on_level, level_value, s_on_level, trace_level_curve
from .representations import (
    i_representation,
    representation_residuals,
    s_representation,
    scalar_linear_solution,
)
from .threshold import Verdict, analyze, classify_initial, detect_stationary_crossing, growth_condition, r_eff, r_init

__version__ = "0.1.0"
