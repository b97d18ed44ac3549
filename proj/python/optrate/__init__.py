from ._optrate import (
    ConfigError,
    __version__,
    chi_mean,
    least_squares_minnorm,
    project_l1_ball,
    run_scenario,
    scenario_csv,
    scenario_names,
    statistical_dimension_psi,
)

__all__ = [
    "ConfigError",
    "__version__",
    "chi_mean",
    "least_squares_minnorm",
    "project_l1_ball",
    "run_scenario",
    "scenario_csv",
    "scenario_names",
    "statistical_dimension_psi",
]
