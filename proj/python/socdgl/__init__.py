"""Drug-target interaction toolkit: multi-view affinity learning, dual graph
encoders with residual fusion, and imbalance-aware link prediction."""

from socdgl._core import (
    IoError,
    NumericalError,
    aupr,
    auroc,
    binarize_affinity,
    build_propagation,
    compute_loss,
    decode,
    even_filter,
    fuse,
    loss_gradient,
    odd_filter,
    run_multiview,
    soft_threshold,
    svt,
    sym_normalize,
    thresholded_metrics,
)

__all__ = [
    "IoError",
    "NumericalError",
    "aupr",
    "auroc",
    "binarize_affinity",
    "build_propagation",
    "compute_loss",
    "decode",
    "even_filter",
    "fuse",
    "loss_gradient",
    "odd_filter",
    "run_multiview",
    "soft_threshold",
    "svt",
    "sym_normalize",
    "thresholded_metrics",
]
