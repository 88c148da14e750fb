"""Three-operator splitting toolkit: Python surface of the C++ core."""

from opsplit._core import (
    __version__,
    deblur_objective,
    haar2d_forward,
    haar2d_inverse,
    hard_soft_resolvent,
    oracle_minimize_2d,
    power_iteration,
    project_ball,
    project_box,
    soft_threshold,
    solve_two_ball,
)

__all__ = [
    "__version__",
    "deblur_objective",
    "haar2d_forward",
    "haar2d_inverse",
    "hard_soft_resolvent",
    "oracle_minimize_2d",
    "power_iteration",
    "project_ball",
    "project_box",
    "soft_threshold",
    "solve_two_ball",
]
