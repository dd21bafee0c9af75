"""Quaternion low-rank matrix and tensor completion for color image/video inpainting.

Color pixels are encoded as purely imaginary quaternions, so an image becomes
one quaternion matrix and a video a third-order quaternion tensor. The library
provides the quaternion linear algebra (including the SVD), a robust low-rank
plus sparse completion solver, and patch-group pipelines that exploit nonlocal
self-similarity to inpaint images and videos that are not globally low rank.
"""

from .completion import (
    CompletionResult,
    ObservationMask,
    SolverConfig,
    admm_step,
    complete,
    default_lambda,
    project,
    svt,
)
from .imaging import DegradeSpec, decode, degrade, encode, load_image, psnr, save_image, ssim
from .patches import (
    PatchGroup,
    PatchSpec,
    aggregate,
    extract_patch,
    inpaint_nss,
    key_patch_grid,
    match_block,
    patch_distance,
    search_window,
    stack_group,
    weighted_patch_distance,
    window_weights,
)
from .qsvd import (
    NumericalError,
    QSvdResult,
    cumulative_energy,
    low_rank_approx,
    numerical_rank,
    qsvd,
    singular_values,
    spread_rank_index,
)
from .quatmat import TOLERANCES, QMatrix, Quaternion, norm, soft_threshold
from .video import (
    QTensor,
    TubeMaskSpec,
    degrade_video,
    inpaint_image_blocks,
    inpaint_tnss,
    match_block_3d,
)

__version__ = "0.1.0"

__all__ = [
    "CompletionResult",
    "DegradeSpec",
    "NumericalError",
    "ObservationMask",
    "PatchGroup",
    "PatchSpec",
    "QMatrix",
    "QSvdResult",
    "QTensor",
    "Quaternion",
    "SolverConfig",
    "TOLERANCES",
    "TubeMaskSpec",
    "admm_step",
    "aggregate",
    "complete",
    "cumulative_energy",
    "decode",
    "default_lambda",
    "degrade",
    "degrade_video",
    "encode",
    "extract_patch",
    "inpaint_image_blocks",
    "inpaint_nss",
    "inpaint_tnss",
    "key_patch_grid",
    "load_image",
    "low_rank_approx",
    "match_block",
    "match_block_3d",
    "norm",
    "numerical_rank",
    "patch_distance",
    "project",
    "psnr",
    "qsvd",
    "save_image",
    "search_window",
    "singular_values",
    "soft_threshold",
    "spread_rank_index",
    "ssim",
    "stack_group",
    "svt",
    "weighted_patch_distance",
    "window_weights",
]
