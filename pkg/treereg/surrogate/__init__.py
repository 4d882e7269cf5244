from .augment import augment_convex_hull, augment_random, restart_samples
from .buffer import record_sample
from .fit import retrain_surrogate, squared_errors
from .state import (
    AplSample,
    FitReport,
    SurrogateState,
    create_surrogate,
    init_net,
    net_forward,
    surrogate_predict,
    surrogate_value,
)

__all__ = [
    "AplSample",
    "FitReport",
    "SurrogateState",
    "augment_convex_hull",
    "augment_random",
    "create_surrogate",
    "init_net",
    "net_forward",
    "record_sample",
    "restart_samples",
    "retrain_surrogate",
    "squared_errors",
    "surrogate_predict",
    "surrogate_value",
]
