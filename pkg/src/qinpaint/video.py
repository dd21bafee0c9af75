"""Quaternion-tensor color videos: degradation protocols and cross-frame completion.

A color video is a third-order quaternion tensor whose frontal slices are the
frames. Patch groups are gathered across all frames inside a shared spatial
search window, which lets the solver exploit cross-frame redundancy even when
every frame is missing pixels at the same positions (tube-shaped holes).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .completion import ObservationMask, SolverConfig
from .imaging import _replace_with_uniform_noise, _sample_observed
from .patches import PatchSpec, _inpaint_frames, _match, inpaint_nss, search_window
from .quatmat import QMatrix

__all__ = [
    "QTensor",
    "TubeMaskSpec",
    "degrade_video",
    "match_block_3d",
    "inpaint_tnss",
    "inpaint_image_blocks",
    "search_window",
]


class QTensor:
    """Third-order quaternion tensor stored as (4, n1, n2, n3) planes."""

    __slots__ = ("planes",)

    def __init__(self, planes, copy=True):
        planes = np.array(planes, dtype=float, copy=copy)
        if planes.ndim != 4 or planes.shape[0] != 4:
            raise ValueError(f"expected (4, n1, n2, n3) planes, got {planes.shape}")
        self.planes = planes

    @classmethod
    def from_frames(cls, frames):
        if not frames:
            raise ValueError("need at least one frame")
        shape = frames[0].shape
        if any(f.shape != shape for f in frames):
            raise ValueError("all frames must share the same shape")
        return cls(np.stack([f.planes for f in frames], axis=-1), copy=False)

    @property
    def shape(self):
        return self.planes.shape[1:]

    @property
    def n_frames(self):
        return self.planes.shape[3]

    @property
    def is_pure(self):
        return not np.any(self.planes[0])

    def frame(self, k):
        """Frontal slice k as a quaternion matrix."""
        return QMatrix(self.planes[:, :, :, k])

    def frames(self):
        return [self.frame(k) for k in range(self.n_frames)]

    def __repr__(self):
        return f"QTensor(shape={self.shape})"


@dataclass(frozen=True)
class TubeMaskSpec:
    """Video degradation protocol.

    mode "tube" draws one spatial pattern of missing pixels and noise
    locations shared by every frame; "non-tube" draws independently per frame
    at the same fractions. Noise replaces pixels with uniform values in
    [0, 255], independently per channel (and per frame).
    """

    mode: str = "tube"
    missing: float = 0.0
    noise: float = 0.0

    def validate(self):
        if self.mode not in ("tube", "non-tube"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not (0.0 <= self.missing <= 1.0 and 0.0 <= self.noise <= 1.0):
            raise ValueError("fractions must lie in [0, 1]")


def degrade_video(X, spec, seed=0):
    """Corrupt and subsample a video; returns the observation and per-frame masks.

    Noise is applied before masking, so pixels that are both corrupted and
    missing are simply missing. With a fixed seed the output is reproducible.
    """
    spec.validate()
    rng = np.random.default_rng(seed)
    shape = X.shape[:2]
    n3 = X.n_frames
    out = X.planes.copy()
    if spec.mode == "tube":
        noise_locs = _sample_observed(shape, spec.noise, rng)
        observed = _sample_observed(shape, 1.0 - spec.missing, rng)
        masks = [ObservationMask(observed) for _ in range(n3)]
        for k in range(n3):
            frame = out[:, :, :, k]
            _replace_with_uniform_noise(frame, noise_locs, rng)
            frame *= observed
    else:
        masks = []
        for k in range(n3):
            noise_locs = _sample_observed(shape, spec.noise, rng)
            observed = _sample_observed(shape, 1.0 - spec.missing, rng)
            masks.append(ObservationMask(observed))
            frame = out[:, :, :, k]
            _replace_with_uniform_noise(frame, noise_locs, rng)
            frame *= observed
    return QTensor(out, copy=False), masks


def match_block_3d(ref, key, spec):
    """Block matching across every frame of a video.

    ``key`` is (row, col, frame). Candidates share the key's spatial window on
    every frame; ties are broken by (frame, row, col).
    """
    i, j, k = key
    frames = [ref.planes[:, :, :, t] for t in range(ref.n_frames)]
    return _match(frames, (int(k), int(i), int(j)), spec)


def inpaint_tnss(X, masks, spec=None, config=None, workers=1, report=None):
    """Cross-frame patch-group completion of a color video.

    Parameters
    ----------
    X : QTensor
        Observed video, purely imaginary.
    masks : list of ObservationMask
        One mask per frame (tube-shaped degradation passes equal masks).
    spec, config, workers, report
        As in :func:`qinpaint.patches.inpaint_nss`; key patches are laid on a
        per-frame grid and every group searches all frames.
    """
    if not X.is_pure:
        raise ValueError("expected a purely imaginary (color) tensor")
    if isinstance(masks, ObservationMask):
        masks = [masks]
    if len(masks) != X.n_frames:
        raise ValueError(f"need {X.n_frames} masks, got {len(masks)}")
    if any(m.shape != X.shape[:2] for m in masks):
        raise ValueError("mask shape mismatch")
    spec = spec if spec is not None else PatchSpec()
    config = config if config is not None else SolverConfig()
    data = [X.planes[:, :, :, k] * masks[k].observed for k in range(X.n_frames)]
    frames, stats = _inpaint_frames(data, masks, spec, config, workers)
    if report is not None:
        report.update(stats)
    return QTensor(np.stack(frames, axis=-1), copy=False)


def _block_ranges(n, block, minimum):
    """Split [0, n) into spans of ~block, merging a too-small tail."""
    if block >= n:
        return [(0, n)]
    starts = list(range(0, n, block))
    spans = [(s, min(s + block, n)) for s in starts]
    if spans[-1][1] - spans[-1][0] < minimum and len(spans) > 1:
        last = spans.pop()
        prev = spans.pop()
        spans.append((prev[0], last[1]))
    return spans


def inpaint_image_blocks(X, mask, spec=None, config=None, block_shape=(192, 256),
                         workers=1, report=None):
    """Tile a large image into blocks and run the patch pipeline per block.

    Blocks are processed independently (in parallel when workers > 1) and
    pasted back in order; patch overlap smooths seams only inside each block.
    """
    spec = spec if spec is not None else PatchSpec()
    config = config if config is not None else SolverConfig()
    n1, n2 = X.shape
    row_spans = _block_ranges(n1, block_shape[0], spec.rows)
    col_spans = _block_ranges(n2, block_shape[1], spec.cols)
    blocks = [(rs, cs) for rs in row_spans for cs in col_spans]

    def run_block(span):
        (r0, r1), (c0, c1) = span
        sub = QMatrix(X.planes[:, r0:r1, c0:c1])
        submask = ObservationMask(mask.observed[r0:r1, c0:c1])
        stats = {}
        out = inpaint_nss(sub, submask, spec, config, workers=1, report=stats)
        return out, stats

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_block, blocks))
    else:
        results = [run_block(b) for b in blocks]

    recon = np.zeros_like(X.planes)
    total = {"groups": 0, "iterations": 0, "iterations_max": 0, "outer_iters": 0}
    for ((r0, r1), (c0, c1)), (out, stats) in zip(blocks, results):
        recon[:, r0:r1, c0:c1] = out.planes
        total["groups"] += stats["groups"]
        total["iterations"] += stats["iterations"]
        total["iterations_max"] = max(total["iterations_max"], stats["iterations_max"])
        total["outer_iters"] = max(total["outer_iters"], stats["outer_iters"])
    if report is not None:
        report.update(total)
    return QMatrix(recon, copy=False)
