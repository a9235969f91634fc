"""Numerical laboratory for selected pullback attractors.

Sections A(t) of nonautonomous, possibly non-unique dynamics are computed
by pullback ensemble iteration over explicit selection families, and the
continuity / limit behaviour of the section map is verified against
closed-form oracles at desk scale.
"""

from .metric import (
    MetricDescriptor,
    SetCloud,
    cloud,
    hausdorff,
    in_eps_neighborhood,
    prune,
    semidist,
)
from .process import (
    CompleteOrbit,
    ProcessModel,
    SelectionRule,
    SelectionSpace,
    Trajectory,
    concatenate,
    extend_backward,
    sample_solution_set,
    solve,
    translate,
    upper_semicontinuity_check,
)
from .attractor import (
    AttractorFamily,
    PullbackConfig,
    attractor_family,
    autonomous_attractor,
    backward_limit,
    forward_limit,
    pullback_section,
    quasi_invariance_check,
    selected_attraction_check,
)
from .continuity import (
    ConvergenceTable,
    asymptotic_autonomy_check,
    autonomous_tracking,
    backward_autonomous_tracking,
    backward_convergence,
    continuity_modulus,
    forward_convergence,
)
from .benchmarks import (
    BenchmarkSpec,
    inclusion_bruteforce_oracle,
    linear_pullback_oracle,
    make_cubic,
    make_inclusion,
    make_linear,
)
from . import plap

__all__ = [
    "MetricDescriptor",
    "SetCloud",
    "cloud",
    "semidist",
    "hausdorff",
    "in_eps_neighborhood",
    "prune",
    "ProcessModel",
    "SelectionRule",
    "SelectionSpace",
    "Trajectory",
    "CompleteOrbit",
    "solve",
    "translate",
    "concatenate",
    "sample_solution_set",
    "upper_semicontinuity_check",
    "extend_backward",
    "PullbackConfig",
    "AttractorFamily",
    "pullback_section",
    "attractor_family",
    "forward_limit",
    "backward_limit",
    "autonomous_attractor",
    "quasi_invariance_check",
    "selected_attraction_check",
    "ConvergenceTable",
    "continuity_modulus",
    "forward_convergence",
    "backward_convergence",
    "asymptotic_autonomy_check",
    "autonomous_tracking",
    "backward_autonomous_tracking",
    "BenchmarkSpec",
    "make_linear",
    "make_cubic",
    "make_inclusion",
    "linear_pullback_oracle",
    "inclusion_bruteforce_oracle",
    "plap",
]
