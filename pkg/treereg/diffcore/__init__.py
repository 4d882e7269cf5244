from .adam import AdamState, adam_step
from .checks import GradCheckReport, check_gradients, numeric_gradient
from .graph import (
    LEAKY_RELU_SLOPE,
    Matrix,
    Node,
    absolute,
    add,
    apply,
    as_matrix,
    backward,
    clip,
    concat,
    constant,
    div,
    exp,
    forward,
    leaky_relu,
    lift,
    log,
    matmul,
    mul,
    parameter,
    reduce_mean,
    reduce_sum,
    reshape,
    sigmoid,
    softmax,
    softplus,
    square,
    sub,
    tanh,
    topological_order,
    transpose,
)
from .params import ParamVector

__all__ = [
    "LEAKY_RELU_SLOPE",
    "AdamState",
    "GradCheckReport",
    "Matrix",
    "Node",
    "ParamVector",
    "absolute",
    "adam_step",
    "add",
    "apply",
    "as_matrix",
    "backward",
    "check_gradients",
    "clip",
    "concat",
    "constant",
    "div",
    "exp",
    "forward",
    "leaky_relu",
    "lift",
    "log",
    "matmul",
    "mul",
    "numeric_gradient",
    "parameter",
    "reduce_mean",
    "reduce_sum",
    "reshape",
    "sigmoid",
    "softmax",
    "softplus",
    "square",
    "sub",
    "tanh",
    "topological_order",
    "transpose",
]
