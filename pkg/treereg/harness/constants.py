CONFIG_FILE = "config.resolved"
METRICS_FILE = "metrics.csv"
SURROGATE_FILE = "surrogate.csv"
SURROGATE_FIT_FILE = "surrogate_fit.csv"
TIMING_FILE = "timing.csv"
TRADEOFF_FILE = "tradeoff.csv"
FAILURES_FILE = "failures.csv"
STABILITY_FILE = "stability.csv"
BASELINES_FILE = "baselines.csv"
FIDELITY_FILE = "fidelity.csv"
EVAL_FILE = "eval.csv"
TREES_DIR = "trees"
CHECKPOINTS_DIR = "checkpoints"
FINAL_CHECKPOINT = "final.npz"

METRIC_COLUMNS = ["split", "output", "auc", "f1", "accuracy", "apl_eval", "fidelity"]
RUN_KEY = ["config_hash", "regularizer", "lam", "seed"]
TRADEOFF_COLUMNS = [*RUN_KEY, *METRIC_COLUMNS]

BOUNDARY_RESOLUTION = 256
BOUNDARY_MARGIN = 0.05
POINT_RADIUS = 2
