"""Numerical tolerances shared across modules.

Every geometric or comparison tolerance lives here so that a single record
controls membership slack, region classification and gain thresholds.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    membership_slack: float = 1e-9
    region_eps: float = 1e-9
    projection_tol: float = 1e-9
    # first-order feasibility step used to decide admissible directions
    direction_eps: float = 1e-6
    gradient_floor: float = 1e-9
    gain_tol: float = 1e-3
    residual_tol: float = 1e-3
    # residual probe length as a fraction of the domain diameter
    residual_delta: float = 1e-3
    line_search_tol: float = 1e-8


DEFAULT_TOLERANCES = Tolerances()
