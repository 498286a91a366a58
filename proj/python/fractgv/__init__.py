"""Fractional-order TGV denoising and (alpha, r) grid-search training for 1D signals."""

from ._core import (
    FormatError,
    NumericError,
    TrainingError,
    denoise,
    gagliardo_seminorm,
    generate,
    grid_nodes,
    l2_dist_sq,
    project_lq_ball,
    tgv_seminorm,
    train,
    tv,
    tv_denoise_exact,
)

__all__ = [
    "FormatError",
    "NumericError",
    "TrainingError",
    "denoise",
    "gagliardo_seminorm",
    "generate",
    "grid_nodes",
    "l2_dist_sq",
    "project_lq_ball",
    "tgv_seminorm",
    "train",
    "tv",
    "tv_denoise_exact",
]
