"""Patch grouping and patch-based completion for color images.

Stacks of similar patches form strongly rank-deficient quaternion matrices
even when the whole image is not low rank. The pipeline tiles the image with
key patches, gathers the most similar patches for each key by block matching,
completes every stack with the robust solver, and averages the overlapping
reconstructions back onto the pixel grid with similarity weights.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from .completion import ObservationMask, SolverConfig, complete, project
from .quatmat import QMatrix

__all__ = [
    "PatchSpec",
    "PatchGroup",
    "extract_patch",
    "key_patch_grid",
    "patch_distance",
    "search_window",
    "window_weights",
    "weighted_patch_distance",
    "match_block",
    "stack_group",
    "aggregate",
    "inpaint_nss",
]

PIXEL_MAX = 255.0


@dataclass(frozen=True)
class PatchSpec:
    """Geometry and matching parameters of the patch pipeline.

    ``window`` is the search-window size around each key; 0 searches the whole
    image. Odd sizes span (window - 1) / 2 in every direction; even sizes are
    read as half-width window // 2. ``bandwidth`` scales the aggregation
    weights exp(-(f / bandwidth)^2); None self-tunes to the median matching
    distance of each group.
    """

    rows: int = 6
    cols: int = 6
    stride: int | None = None          # None: floor(rows / 2)
    group_size: int = 60
    window: int = 20
    bandwidth: float | None = None
    outer_iters: int = 1

    @property
    def effective_stride(self):
        return self.stride if self.stride is not None else max(1, self.rows // 2)

    @property
    def half_window(self):
        return self.window // 2

    def validate(self, shape):
        n1, n2 = shape
        if not (0 < self.rows <= n1 and 0 < self.cols <= n2):
            raise ValueError(f"patch {self.rows}x{self.cols} does not fit in {shape}")
        if self.group_size < 1:
            raise ValueError("group_size must be >= 1")
        if self.effective_stride < 1:
            raise ValueError("stride must be >= 1")
        if self.window < 0:
            raise ValueError("window must be >= 0")
        if self.outer_iters < 1:
            raise ValueError("outer_iters must be >= 1")


@dataclass
class PatchGroup:
    """A key patch and its matched members, ordered by nondecreasing distance.

    Coordinates are (frame, row, col) anchors of the top-left patch corner;
    single images use frame 0 throughout.
    """

    key: tuple
    coords: np.ndarray            # (d, 3) int
    distances: np.ndarray         # (d,) matching distances
    weight_distances: np.ndarray  # (d,) distances used for aggregation weights
    patch_shape: tuple
    data: QMatrix | None = None
    mask: ObservationMask | None = None
    reconstruction: QMatrix | None = None

    def __len__(self):
        return len(self.coords)


# -- geometry ----------------------------------------------------------------


def extract_patch(X, i, j, rows, cols):
    """The rows x cols patch anchored at (i, j), clamped to stay inside X."""
    n1, n2 = X.shape
    if rows > n1 or cols > n2:
        raise ValueError(f"patch {rows}x{cols} larger than image {X.shape}")
    i = min(max(int(i), 0), n1 - rows)
    j = min(max(int(j), 0), n2 - cols)
    return X[i:i + rows, j:j + cols]


def _strided_positions(n, size, stride):
    last = n - size
    positions = list(range(0, last + 1, stride))
    if positions[-1] != last:
        positions.append(last)
    return positions


def key_patch_grid(shape, spec):
    """Key-patch anchors on a strided grid, clamped so the patches cover the image."""
    spec.validate(shape)
    stride = spec.effective_stride
    rows_pos = _strided_positions(shape[0], spec.rows, stride)
    cols_pos = _strided_positions(shape[1], spec.cols, stride)
    return np.array([(i, j) for i in rows_pos for j in cols_pos], dtype=int)


def patch_distance(a, b):
    """Frobenius distance between two equally sized patches."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(((a.planes - b.planes) ** 2).sum()))


def search_window(center, size, limits):
    """In-bounds anchors within sup-norm half-width size // 2 of the center."""
    if size < 1:
        raise ValueError("window size must be >= 1")
    i, j = center
    max_i, max_j = limits
    h = size // 2
    si = np.arange(max(i - h, 0), min(i + h, max_i) + 1)
    sj = np.arange(max(j - h, 0), min(j + h, max_j) + 1)
    grid = np.stack(np.meshgrid(si, sj, indexing="ij"), axis=-1)
    return grid.reshape(-1, 2)


# -- similarity --------------------------------------------------------------


def window_weights(half):
    """Default offset weights: a Gaussian over the (2*half+1)^2 window."""
    sigma = max(1.0, half / 2.0)
    off = np.arange(-half, half + 1)
    g = np.exp(-(off ** 2) / (2.0 * sigma ** 2))
    return np.outer(g, g)


def _neighborhood_sq_distance(key_planes, mem_planes, key_anchor, mem_anchor,
                              rows, cols, half, weights, limits):
    """Weighted mean of squared patch distances over jointly valid offsets.

    Offsets shifting either patch outside the image drop out; the remaining
    weights are renormalized. Box sums per offset come from one integral image
    over the squared-difference field.
    """
    ki, kj = key_anchor
    si, sj = mem_anchor
    max_i, max_j = limits
    lo_i = max(-half, -ki, -si)
    hi_i = min(half, max_i - ki, max_i - si)
    lo_j = max(-half, -kj, -sj)
    hi_j = min(half, max_j - kj, max_j - sj)
    r0, r1 = ki + lo_i, ki + hi_i + rows
    c0, c1 = kj + lo_j, kj + hi_j + cols
    dr, dc = si - ki, sj - kj
    E = ((key_planes[:, r0:r1, c0:c1]
          - mem_planes[:, r0 + dr:r1 + dr, c0 + dc:c1 + dc]) ** 2).sum(axis=0)
    S = np.zeros((E.shape[0] + 1, E.shape[1] + 1))
    np.cumsum(np.cumsum(E, axis=0), axis=1, out=S[1:, 1:])
    box = (S[rows:, cols:] - S[:-rows, cols:]
           - S[rows:, :-cols] + S[:-rows, :-cols])
    w = weights[lo_i + half:hi_i + half + 1, lo_j + half:hi_j + half + 1]
    return float((w * box).sum() / w.sum())


def weighted_patch_distance(X, a, b, spec, weights=None):
    """Squared neighborhood-weighted distance between the patches at a and b.

    Averages the squared plain distances of the two patch neighborhoods over
    the search-window offsets, weighted by ``weights`` (default: Gaussian).
    With uniform weights this reduces to the pointwise mean of squared patch
    distances over the valid offsets.
    """
    spec.validate(X.shape)
    half = spec.half_window
    if weights is None:
        weights = window_weights(half)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (2 * half + 1, 2 * half + 1):
        raise ValueError("weights must cover the full offset window")
    if np.any(weights <= 0):
        raise ValueError("weights must be positive")
    limits = (X.shape[0] - spec.rows, X.shape[1] - spec.cols)
    for anchor in (a, b):
        if not (0 <= anchor[0] <= limits[0] and 0 <= anchor[1] <= limits[1]):
            raise ValueError(f"anchor {anchor} out of range")
    return _neighborhood_sq_distance(X.planes, X.planes, tuple(a), tuple(b),
                                     spec.rows, spec.cols, half, weights, limits)


# -- block matching ----------------------------------------------------------


def _frame_distances(planes, key_patch, anchors, rows, cols):
    """Squared distances of the patches at ``anchors`` to the key patch."""
    sw = sliding_window_view(planes, (rows, cols), axis=(1, 2))
    out = np.empty(len(anchors))
    chunk = 2048
    for start in range(0, len(anchors), chunk):
        sel = anchors[start:start + chunk]
        diff = sw[:, sel[:, 0], sel[:, 1]] - key_patch[:, None]
        out[start:start + chunk] = (diff ** 2).sum(axis=(0, 2, 3))
    return out


def _match(frames, key, spec):
    """The spec.group_size nearest patches to the key patch across all frames.

    Candidates are every anchor of the search window around the key position
    on each frame (or every anchor of every frame when the window is 0). Ties
    are broken by (frame, row, col). The returned group carries both the plain
    matching distances and the aggregation distances (neighborhood-weighted
    when a window is active).
    """
    kf, ki, kj = key
    rows, cols = spec.rows, spec.cols
    n1, n2 = frames[0].shape[1:]
    limits = (n1 - rows, n2 - cols)
    key_patch = frames[kf][:, ki:ki + rows, kj:kj + cols]
    if spec.window == 0:
        anchors = np.array([(i, j) for i in range(limits[0] + 1)
                            for j in range(limits[1] + 1)], dtype=int)
    else:
        anchors = search_window((ki, kj), spec.window, limits)
    cand_f, cand_i, cand_j, cand_d = [], [], [], []
    for f, planes in enumerate(frames):
        d2 = _frame_distances(planes, key_patch, anchors, rows, cols)
        cand_f.append(np.full(len(anchors), f))
        cand_i.append(anchors[:, 0])
        cand_j.append(anchors[:, 1])
        cand_d.append(d2)
    cand_f = np.concatenate(cand_f)
    cand_i = np.concatenate(cand_i)
    cand_j = np.concatenate(cand_j)
    cand_d = np.concatenate(cand_d)
    if len(cand_d) < spec.group_size:
        raise ValueError(
            f"only {len(cand_d)} candidate patches for group size {spec.group_size}; "
            "enlarge the window or shrink the group")
    order = np.lexsort((cand_j, cand_i, cand_f, cand_d))[:spec.group_size]
    coords = np.column_stack([cand_f[order], cand_i[order], cand_j[order]])
    distances = np.sqrt(cand_d[order])
    if spec.window > 0:
        weights = window_weights(spec.half_window)
        wdist = np.array([
            np.sqrt(_neighborhood_sq_distance(
                frames[kf], frames[f], (ki, kj), (i, j),
                rows, cols, spec.half_window, weights, limits))
            for f, i, j in coords
        ])
    else:
        wdist = distances.copy()
    return PatchGroup(key=(kf, ki, kj), coords=coords, distances=distances,
                      weight_distances=wdist, patch_shape=(rows, cols))


def match_block(ref, key, spec):
    """Block matching on a single image; key is the (row, col) anchor."""
    return _match([ref.planes], (0, key[0], key[1]), spec)


# -- stacking and aggregation -------------------------------------------------


def _vec_patch(planes, i, j, rows, cols):
    # column-major vectorization: stack the patch columns
    return planes[:, i:i + rows, j:j + cols].transpose(0, 2, 1).reshape(4, rows * cols)


def _stack(frames, observed, group):
    rows, cols = group.patch_shape
    d = len(group)
    data = np.empty((4, rows * cols, d))
    obs = np.empty((rows * cols, d), dtype=bool)
    for s, (f, i, j) in enumerate(group.coords):
        data[:, :, s] = _vec_patch(frames[f], i, j, rows, cols)
        obs[:, s] = observed[f][i:i + rows, j:j + cols].T.reshape(-1)
    return data, obs


def stack_group(X, mask, group):
    """Stack the member patches of ``group`` as columns, with the matching mask.

    Column s is the column-major vectorization of member s; a stacked entry is
    observed exactly when its source pixel is observed.
    """
    data, obs = _stack([X.planes], [mask.observed], group)
    return QMatrix(data, copy=False), ObservationMask(obs)


def _unstack_column(column, rows, cols):
    # inverse of _vec_patch
    return column.reshape(4, cols, rows).transpose(0, 2, 1)


def _group_weights(group, bandwidth):
    f = group.weight_distances
    sigma = bandwidth if bandwidth is not None else float(np.median(f))
    if not np.isfinite(sigma) or sigma <= 0:
        return np.ones(len(f))
    return np.maximum(np.exp(-((f / sigma) ** 2)), 1e-300)


def _accumulate(groups, n_frames, shape, bandwidth):
    sums = np.zeros((n_frames, 4) + shape)
    wsum = np.zeros((n_frames,) + shape)
    counts = np.zeros((n_frames,) + shape, dtype=int)
    for group in groups:
        if group.reconstruction is None:
            raise ValueError("group has no reconstruction to aggregate")
        rows, cols = group.patch_shape
        weights = _group_weights(group, bandwidth)
        planes = group.reconstruction.planes
        for s, (f, i, j) in enumerate(group.coords):
            patch = _unstack_column(planes[:, :, s], rows, cols)
            sums[f][:, i:i + rows, j:j + cols] += weights[s] * patch
            wsum[f][i:i + rows, j:j + cols] += weights[s]
            counts[f][i:i + rows, j:j + cols] += 1
    if np.any(counts == 0):
        raise ValueError("aggregation left uncovered pixels; key grid does not cover the image")
    return sums / wsum[:, None], counts


def aggregate(groups, shape, bandwidth=None):
    """Weighted per-pixel average of the reconstructed patches.

    Each member patch contributes with weight exp(-(f / sigma)^2) where f is
    its aggregation distance to the key; sigma defaults to the group's median
    distance (uniform weights when that median is zero). Returns the averaged
    image and the coverage counts; uncovered pixels raise.
    """
    recon, counts = _accumulate(groups, 1, shape, bandwidth)
    return QMatrix(recon[0], copy=False), counts[0]


# -- pipeline -----------------------------------------------------------------


def _fill_missing(planes, observed, window):
    """Matching reference: missing pixels get the local mean of observed ones.

    Distances on zero-filled data are dominated by the mask pattern rather
    than content, so holes are filled with a per-channel windowed mean of the
    observed pixels (global mean when the window is 0 or locally empty).
    """
    out = planes.copy()
    if window > 0:
        box = 2 * (window // 2) + 1
        den = ndimage.uniform_filter(observed.astype(float), size=box, mode="constant")
    else:
        den = None
    for t in range(1, 4):
        plane = planes[t]
        has_any = observed.any()
        global_mean = float(plane[observed].mean()) if has_any else 0.0
        if den is None:
            fill = np.full_like(plane, global_mean)
        else:
            num = ndimage.uniform_filter(plane * observed, size=box, mode="constant")
            local = np.full_like(plane, global_mean)
            np.divide(num, den, out=local, where=den > 0)
            fill = local
        out[t] = np.where(observed, plane, fill)
    return out


def _clip_pixels(planes):
    out = np.clip(planes, 0.0, PIXEL_MAX)
    out[0] = 0.0
    return out


def _inpaint_frames(data_frames, masks, spec, config, workers):
    """Shared engine behind the image and video pipelines.

    data_frames: list of (4, n1, n2) observed plane stacks (zero off-mask).
    Returns the reconstructed plane stacks and solve statistics.
    """
    shape = data_frames[0].shape[1:]
    spec.validate(shape)
    observed = [m.observed for m in masks]
    refs = [_fill_missing(p, o, spec.window) for p, o in zip(data_frames, observed)]
    grid = key_patch_grid(shape, spec)
    keys = [(f, int(i), int(j)) for f in range(len(data_frames)) for i, j in grid]
    stats = {"groups": 0, "iterations": 0, "iterations_max": 0, "outer_iters": 0}

    recon = None
    for _ in range(spec.outer_iters):
        def run_key(key):
            group = _match(refs, key, spec)
            data, obs = _stack(data_frames, observed, group)
            if obs.any():
                result = complete(QMatrix(data, copy=False), ObservationMask(obs), config)
                group.reconstruction = result.L
                iters = result.iterations
            else:
                # nothing observed anywhere in the group: the trivial solution
                group.reconstruction = QMatrix.zeros(data.shape[1:])
                iters = 0
            return group, iters

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run_key, keys))
        else:
            results = [run_key(key) for key in keys]
        groups = [g for g, _ in results]
        iters = [n for _, n in results]
        stats["groups"] += len(groups)
        stats["iterations"] += int(sum(iters))
        stats["iterations_max"] = max([stats["iterations_max"], *iters])
        stats["outer_iters"] += 1
        recon, _counts = _accumulate(groups, len(data_frames), shape, spec.bandwidth)
        recon = [_clip_pixels(r) for r in recon]
        refs = recon
    return recon, stats


def inpaint_nss(X, mask, spec=None, config=None, workers=1, report=None):
    """Patch-group completion of a color image.

    Parameters
    ----------
    X : QMatrix
        Observed image, purely imaginary (RGB channels on the i, j, k planes).
    mask : ObservationMask
        Observed pixels.
    spec : PatchSpec, optional
    config : SolverConfig, optional
        Per-group solver settings; lam=None uses each group's own sampling
        ratio and longer side.
    workers : int
        Thread count for the independent group solves. The aggregation order
        is fixed, so the result does not depend on this.
    report : dict, optional
        Filled with solve statistics (group count, total iterations).

    Returns
    -------
    QMatrix
        The reconstruction, purely imaginary with channels clipped to [0, 255].
    """
    if not X.is_pure:
        raise ValueError("expected a purely imaginary (color) matrix")
    if X.shape != mask.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {mask.shape}")
    spec = spec if spec is not None else PatchSpec()
    config = config if config is not None else SolverConfig()
    X0 = project(X, mask)
    frames, stats = _inpaint_frames([X0.planes], [mask], spec, config, workers)
    if report is not None:
        report.update(stats)
    return QMatrix(frames[0], copy=False)
