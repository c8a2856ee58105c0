"""Set-size approximation from subset queries and subset samples."""
from .collision import estimate_universe_sampling
from .config import Estimate, EstimatorConfig
from .domain import (
    Explicit,
    Grid,
    Hashed,
    HiddenSet,
    Hypercube,
    Interval,
    Line,
    SubCube,
    SubGrid,
    SubsetFamily,
    Whole,
    load_hidden_set,
    write_hidden_set,
)
from .errors import (
    CapExceeded,
    EstimatorFailure,
    FamilyViolation,
    InvalidParams,
    InvalidSpec,
    SetSizeError,
)
from .interval import (
    estimate_interval_query_adaptive,
    estimate_interval_query_nonadaptive,
    estimate_interval_sample_adaptive,
    estimate_interval_sample_nonadaptive,
    exact_recover_binary_search,
)
from .oracle import OracleSession
from .registry import ESTIMATORS
from .structured import estimate_grid_sample_adaptive, estimate_hypercube_sample_adaptive
from .unrestricted import (
    estimate_unrestricted_adaptive,
    estimate_unrestricted_descending,
    estimate_unrestricted_nonadaptive,
)

__all__ = [
    "ESTIMATORS",
    "CapExceeded",
    "Estimate",
    "EstimatorConfig",
    "EstimatorFailure",
    "Explicit",
    "FamilyViolation",
    "Grid",
    "Hashed",
    "HiddenSet",
    "Hypercube",
    "Interval",
    "InvalidParams",
    "InvalidSpec",
    "Line",
    "OracleSession",
    "SetSizeError",
    "SubCube",
    "SubGrid",
    "SubsetFamily",
    "Whole",
    "estimate_grid_sample_adaptive",
    "estimate_hypercube_sample_adaptive",
    "estimate_interval_query_adaptive",
    "estimate_interval_query_nonadaptive",
    "estimate_interval_sample_adaptive",
    "estimate_interval_sample_nonadaptive",
    "estimate_universe_sampling",
    "estimate_unrestricted_adaptive",
    "estimate_unrestricted_descending",
    "estimate_unrestricted_nonadaptive",
    "exact_recover_binary_search",
    "load_hidden_set",
    "write_hidden_set",
]
