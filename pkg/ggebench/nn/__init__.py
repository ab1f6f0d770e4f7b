"""Dense numerical stack: parameters, layers, Adamax and gradient checking."""

from .layers import linear_backward, linear_forward, relu, sigmoid, softmax
from .params import ArchitectureSpec, LayerSpec, ParamGrads, Params, init_params
from .optim import OptimizerState, adamax_step
from .checkpoint import load_params, save_params
from .gradcheck import GradCheckReport, grad_check, grad_check_report

__all__ = [
    "ArchitectureSpec",
    "LayerSpec",
    "Params",
    "ParamGrads",
    "init_params",
    "linear_forward",
    "linear_backward",
    "relu",
    "sigmoid",
    "softmax",
    "OptimizerState",
    "adamax_step",
    "save_params",
    "load_params",
    "GradCheckReport",
    "grad_check",
    "grad_check_report",
]
