"""Numerical laboratory for minimal displacement vectors of firmly nonexpansive maps."""

from .displacement import (DisplacementEstimate, EstimatorConfig, check_composition_bound,
                           check_convex_combo_bound, compare_cyclic_rotations,
                           diagnose_attainment, estimate_displacement, exact_displacement)
from .dsl import dump_operator, parse_operator, parse_operator_file
from .errors import (DimensionError, DisplabError, DSLError, InvalidOperatorError,
                     NonFiniteIterateError, NumericalFailure)
from .experiments import ExperimentReport, run_demo, run_random_suite
from .hyperbola import project_hyperbola_epigraph
from .monotone import (ConstantMap, NormalConeBox, PsdLinear, Shifted, SubdiffAbs,
                       block_resolvent, resolvent, shift_operator, verify_resolvent_shift)
from .operators import (AffineScale, Averaged, Compose, ConvexCombo, ProjBall, ProjBox,
                        ProjHalfspace, ProjHyperbolaEpi, ProjHyperplane, Translation, apply,
                        averaged, check_averaged, check_firm_nonexpansive, compose,
                        convex_combination, identity)
from .product import (WitnessCertificate, block_apply, cyclic_shift,
                      synthesize_near_fixed_point, verify_telescoping)
from .trace import emit_trace

__version__ = "0.1.0"
