import os

TEMPLATES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "templates")
DOT_TEMPLATE = os.path.join(TEMPLATES, "tree.dot.j2")

# a split must improve Gini impurity by more than this
MIN_GAIN = 1e-12
GAIN_TIE_TOLERANCE = 1e-12

DEFAULT_PRUNE_FRACTION = 0.2
MIN_APL_EXAMPLES = 10
