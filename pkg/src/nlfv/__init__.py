"""Finite-volume solver for coupled nonlocal multilane traffic balance laws."""
from .errors import (ConfigParseError, ConfigValidationError, DegenerateStudy,
                     GhostZoneTooSmall, MismatchedSupport, NegativeWeight, NlfvError,
                     NonNestedGrids, NonPositiveCfl, RangeViolation, SupportOverflow)
from .model import KernelSpec, LaneModel, SystemSpec, two_lane_system, validate_system
from .kernel import KernelWeights, convolve_interfaces, discretize, weights_for_grid
from .initial import CosSquared, SinSquared, two_lane_initial_data
from .scheme import (GridSpec, RunConfig, SystemState, Trajectory, cfl_bound, cfl_time_step,
                     lf_flux, project_initial_data, run, step)
from .splitting import split_step
from .local import local_run, localize
from .diagnostics import (StepMonitor, entropy_residual, l1_distance, monotonicity_probe,
                          total_mass, total_variation)
from .experiments import (convergence_study, nonlocal_to_local_study, split_compare,
                          two_lane_scenario)

__version__ = "0.1.0"
