"""Popular-content downloading in 60 GHz small cells.

Rate-greedy multi-hop path selection, concurrent transmission scheduling, an exact
minimum-slot oracle with its linearized integer program, two baseline schedulers,
arrival processes and a frame-level simulator.
"""

from .baselines import fdmach_schedule, sbts_paths, sbts_schedule
from .model import (
    AdjacencyError,
    DistanceRateMap,
    InterferenceMode,
    Link,
    RadioParams,
    RateMatrix,
    Topology,
    interference_power,
    make_feasibility,
    pairing_feasible,
    rate_matrix_from_topology,
    received_power,
    sinr,
)
from .paths import OpCounter, PathSet, max_hops_bound, select_paths
from .scheduling import Pairing, Schedule, hop_weight, schedule, validate_schedule
from .sim import FrameConfig, Metrics, Scheme, compute_metrics, run_simulation
from .traffic import TrafficConfig, TrafficMode, arrivals, ipp_arrivals, poisson_arrivals, traffic_load, with_load

__version__ = "0.1.0"

__all__ = [
    "AdjacencyError",
    "DistanceRateMap",
    "FrameConfig",
    "InterferenceMode",
    "Link",
    "Metrics",
    "OpCounter",
    "Pairing",
    "PathSet",
    "RadioParams",
    "RateMatrix",
    "Schedule",
    "Scheme",
    "Topology",
    "TrafficConfig",
    "TrafficMode",
    "arrivals",
    "compute_metrics",
    "fdmach_schedule",
    "hop_weight",
    "interference_power",
    "ipp_arrivals",
    "make_feasibility",
    "max_hops_bound",
    "pairing_feasible",
    "poisson_arrivals",
    "rate_matrix_from_topology",
    "received_power",
    "run_simulation",
    "sbts_paths",
    "sbts_schedule",
    "schedule",
    "select_paths",
    "sinr",
    "traffic_load",
    "validate_schedule",
    "with_load",
]
