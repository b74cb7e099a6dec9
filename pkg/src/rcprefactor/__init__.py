"""Random-coding error exponents and subexponential prefactors for DMCs under
(possibly mismatched) maximum-metric decoding."""

from .bounds import (BoundCurve, BoundKind, berry_esseen_tail, gallager_bound,
                     rcu_exact, rcu_joint_types, theorem_shape)
from .density import (DensityTable, TiltedLaw, build_density_table, competitor_spectrum,
                      forward_spectrum, multiletter_density, reverse_spectrum, tilt, untilt)
from .exponents import (ExponentReport, Regime, critical_rate, e0, e0_derivatives,
                        e0_sup_s, error_exponent, gmi, prefactor_regime)
from .laws import DiscreteRealLaw, convolve_n, law_moments
from .montecarlo import PrefactorFit, SimEstimate, prefactor_fit, rcu_monte_carlo, simulate_pe
from .regularity import (RegularityReport, compute_y1, is_regular, optimal_joint_type,
                         select_delta, type_exponent_constrained,
                         type_exponent_unconstrained, variance_floor)
from .scenario import (Channel, InputDistribution, JointType, Metric, Scenario,
                       empirical_type, enumerate_joint_types, joint_type_log_probability,
                       load_scenario, validate_scenario)

__version__ = "0.1.0"
