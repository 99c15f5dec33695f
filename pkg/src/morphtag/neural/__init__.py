"""Numeric core: LSTM kernels, layers with reverse passes, SGD, model files."""
from . import kernels
from .layers import (
    BiEncoderParams,
    LstmCellParams,
    affine_backward,
    affine_forward,
    bi_encode,
    bi_encode_backward,
    bi_encode_forward,
    glorot,
    lstm_step,
    softmax,
    softmax_xent,
    softmax_xent_grad,
)
from .optim import Gradients, OptimizerState, rate_at, sgd_step

__all__ = [
    "kernels", "BiEncoderParams", "LstmCellParams", "affine_backward", "affine_forward",
    "bi_encode", "bi_encode_backward", "bi_encode_forward", "glorot", "lstm_step",
    "softmax", "softmax_xent", "softmax_xent_grad", "Gradients", "OptimizerState",
    "rate_at", "sgd_step",
]
