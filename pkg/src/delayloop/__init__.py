"""Tuning and simulation of PI, Smith-predictor and variable-structure
controllers for first-order-plus-dead-time plants, in delay-normalized time."""

from .core import (ControllerGains, NormalizedPlant, PerformanceIndices, PlantModel,
                   gains_from_physical, gains_to_physical, normalize_plant)
from .errors import (ConditioningError, DivergenceError, InfeasibleTuning,
                     NumericalError, OverdampedError)
from .mos_solver import PiecewiseResponse, constant_history, control_output, solve
from .stability import (hi_stability_bounds, phase_margin, proportional_limit,
                        ultimate_gain)
from .sp_analytic import sp_ise, sp_overshoots, sp_response
from .proposed import ProposedScenario, proposed_ise, proposed_overshoots, response
from .tuning import (ChartCurve, TunedPoint, pi_indices, proposed_indices,
                     reproduce_table1, sp_indices, trace_curve, tune_pi,
                     tune_proposed, tune_sp)
from .runtime import (FopdtPlant, Mode, RuntimeConfig, VariableStructureController,
                      adapt_gain, simulate)

__all__ = [name for name in dir() if not name.startswith("_")]
