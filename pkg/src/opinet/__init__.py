"""Topology and confirmation-bias inference for cyber-social opinion networks."""

__version__ = "0.1.0"

from .approx import ApproxResult, infer_problem3, partial_exactness_check  # noqa: E402
from .dynamics import Trajectory, simulate, steady_state  # noqa: E402
from .exact import InferenceResult, infer_problem1, infer_problem2, source_residual  # noqa: E402
from .measurement import build_pq, numerical_rank  # noqa: E402
from .network import BiasSpec, NetworkSpec, Source, validate_network  # noqa: E402
from .scenario import Scenario, bundled_scenario, load_scenario  # noqa: E402

__all__ = [
    "ApproxResult",
    "BiasSpec",
    "InferenceResult",
    "NetworkSpec",
    "Scenario",
    "Source",
    "Trajectory",
    "build_pq",
    "bundled_scenario",
    "infer_problem1",
    "infer_problem2",
    "infer_problem3",
    "load_scenario",
    "numerical_rank",
    "partial_exactness_check",
    "simulate",
    "source_residual",
    "steady_state",
    "validate_network",
]
