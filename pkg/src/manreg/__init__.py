"""Trajectory tracking and maneuver regulation for a reduced VTOL model.

A thrust-vector vehicle reduced to position, velocity and yaw is flown
along reference maneuvers two ways: tracking a clock-indexed reference,
or regulating against the metric projection of the state onto the
reference curve. Both share one feedback-linearizing control law; a
Lyapunov certificate supplies the projection metric.
"""

from .dynamics import (AttitudeLag, ControlInput, DisturbanceInput,
                       ReducedState, SaturationFlags, SingularAttitudeError,
                       VehicleParams, ZERO_DISTURBANCE, reduced_dynamics,
                       rk4_step, saturate, step, thrust_axis)
from .maneuvers import (DerivativeMismatchError, DerivativeReport, Maneuver,
                        ReferencePoint, circle, export_table, hover,
                        nominal_input, turn90, validate_derivatives)
from .tracking import (Gains, IntegratorState, MU3_MARGIN,
                       SingularThrustError, VirtualInput, feedback_linearize,
                       tracking_virtual_input, update_integrator)
from .lyapunov import (CertificateError, IllConditionedLyapunovWarning,
                       LinearSystem, LyapunovCertificate, NonHurwitzError,
                       build_closed_loop, certify, default_projection_metric,
                       solve_lyapunov)
from .regulation import (AmbiguousProjectionWarning, EmptyWindowError,
                         ProjectionConfig, ProjectionState,
                         RegulationDiagnostics, project, project_brute_force,
                         regulation_control)
from .trace import SCHEMA_VERSION, SchemaError, TRACE_COLUMNS, TraceLog
from .harness import (ComparisonResult, DIVERGENCE_RADIUS, DragSpec, HoldSpec,
                      Metrics, RunResult, Scenario, apply_hold, compare,
                      compute_metrics, drag_force, run_scenario)
from .scenarios import (CONFIG_SCHEMA_VERSION, DEFAULT_GAINS,
                        hold_release_scenario, maneuver_from_dict,
                        maneuver_to_dict, payload_drag_scenario,
                        regulation_offset_scenario, scenario_from_dict,
                        scenario_pair_from_dict, scenario_to_dict,
                        tracking_convergence_scenario)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousProjectionWarning", "AttitudeLag", "CertificateError",
    "ComparisonResult", "CONFIG_SCHEMA_VERSION", "ControlInput",
    "DIVERGENCE_RADIUS", "DEFAULT_GAINS", "DerivativeMismatchError",
    "DerivativeReport", "DisturbanceInput", "DragSpec", "EmptyWindowError",
    "Gains", "HoldSpec", "IllConditionedLyapunovWarning", "IntegratorState",
    "LinearSystem", "LyapunovCertificate", "MU3_MARGIN", "Maneuver",
    "Metrics", "NonHurwitzError", "ProjectionConfig", "ProjectionState",
    "ReducedState", "ReferencePoint", "RegulationDiagnostics", "RunResult",
    "SCHEMA_VERSION", "SaturationFlags", "Scenario", "SchemaError",
    "SingularAttitudeError", "SingularThrustError", "TRACE_COLUMNS",
    "TraceLog", "VehicleParams", "VirtualInput", "ZERO_DISTURBANCE",
    "apply_hold", "build_closed_loop", "certify", "circle", "compare",
    "compute_metrics", "default_projection_metric", "drag_force",
    "export_table", "feedback_linearize", "hold_release_scenario", "hover",
    "maneuver_from_dict", "maneuver_to_dict", "nominal_input",
    "payload_drag_scenario", "project", "project_brute_force",
    "reduced_dynamics", "regulation_control", "regulation_offset_scenario",
    "rk4_step", "run_scenario", "saturate", "scenario_from_dict",
    "scenario_pair_from_dict", "scenario_to_dict", "step", "thrust_axis",
    "tracking_convergence_scenario",
    "tracking_virtual_input", "turn90", "update_integrator",
    "validate_derivatives",
]
