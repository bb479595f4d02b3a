"""Parabolic obstacle problems on homogeneous Carnot groups.

The heavy lifting lives in the compiled extension ``carnotlab._core``; this
package re-exports the main operations and adds a small convenience wrapper
for scenario runs.
"""

from carnotlab._core import (
    GroupSpec,
    SpaceTimePoint,
    ball_volume_mc,
    builtin_scenario_text,
    cc_distance_upper,
    check_dyadic,
    compose,
    compose_st,
    dilate,
    dilate_st,
    euclidean_group,
    fit_exponent,
    flow,
    heisenberg_group,
    hom_norm,
    hom_norm_st,
    homogeneous_dimension,
    hormander_rank,
    invert,
    list_scenarios,
    parabolic_quasi_distance,
    quasi_distance,
    run_scenario_json,
    solve_heat_1d,
    volume_growth_exponent,
    xdiff,
    xxdiff,
)

__all__ = [
    "GroupSpec",
    "SpaceTimePoint",
    "ball_volume_mc",
    "builtin_scenario_text",
    "cc_distance_upper",
    "check_dyadic",
    "compose",
    "compose_st",
    "dilate",
    "dilate_st",
    "euclidean_group",
    "fit_exponent",
    "flow",
    "heisenberg_group",
    "hom_norm",
    "hom_norm_st",
    "homogeneous_dimension",
    "hormander_rank",
    "invert",
    "list_scenarios",
    "parabolic_quasi_distance",
    "quasi_distance",
    "run_scenario",
    "run_scenario_json",
    "solve_heat_1d",
    "volume_growth_exponent",
    "xdiff",
    "xxdiff",
]


def run_scenario(id_or_text, seed=-1):
    """Run a built-in scenario id or raw config text; returns a report dict."""
    return run_scenario_json(id_or_text, seed)
