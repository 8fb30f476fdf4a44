"""Exact maximal conditional expected accumulated reward in MDPs.

The conditional expectation of the reward accumulated until reaching F,
given that G is eventually reached, is maximized over all schedulers.
Everything is computed in exact rational arithmetic: the finiteness
check, a sound upper bound, threshold decisions, the optimal value and
an optimal reward-based scheduler.
"""

from .bounds import upper_bound
from .errors import (CmdpError, EmptyActStar, NegativeAfterShift, NotAcyclic,
                     ParseError, PositiveEcPresent, PreconditionViolated,
                     SchedulerIncomplete, SemanticError, Singular,
                     SpaceTooLarge)
from .finiteness import check_finiteness
from .model import (Action, Mdp, RewardBasedScheduler, SchedulerValue,
                    evaluate_scheduler, validate_mdp)
from .modelio import emit_model, export_result, parse_model
from .optimize import SolveResult, solve_model
from .oracle import brute_force_max
from .preprocess import CanonicalMdp, check_precondition, mec_quotient, normal_form
from .saturation import Saturation, saturation_point
from .threshold import (ThresholdAnswer, decide, solve_acyclic,
                        threshold_acyclic, threshold_solve)
from .transform import (LayerInfo, ScaleInfo, layer_acyclic,
                        min_conditional_acyclic, scale_rationals)

__version__ = "0.1.0"

__all__ = [
    "Action", "CanonicalMdp", "CmdpError", "EmptyActStar", "LayerInfo",
    "Mdp", "NegativeAfterShift", "NotAcyclic", "ParseError",
    "PositiveEcPresent", "PreconditionViolated", "RewardBasedScheduler",
    "Saturation", "ScaleInfo", "SchedulerIncomplete", "SchedulerValue",
    "SemanticError", "Singular", "SolveResult", "SpaceTooLarge",
    "ThresholdAnswer", "brute_force_max", "check_finiteness",
    "check_precondition", "decide", "emit_model", "evaluate_scheduler",
    "export_result", "layer_acyclic", "mec_quotient",
    "min_conditional_acyclic", "normal_form", "parse_model",
    "saturation_point", "scale_rationals", "solve_acyclic", "solve_model",
    "threshold_acyclic", "threshold_solve", "upper_bound", "validate_mdp",
]
