"""RGB image handling: pure-quaternion encoding, degradation, and quality metrics.

An RGB image is an (n1, n2, 3) uint8 array. Pixels are encoded as purely
imaginary quaternions R*i + G*j + B*k, which keeps the three channel values of
one pixel together as a single algebra element.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from .completion import ObservationMask, project
from .quatmat import QMatrix

__all__ = [
    "encode",
    "decode",
    "DegradeSpec",
    "degrade",
    "psnr",
    "ssim",
    "load_image",
    "save_image",
]

PIXEL_MAX = 255.0
PSNR_CAP = 100.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _check_rgb(img):
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected an (n1, n2, 3) RGB array, got {img.shape}")
    return img


def encode(img):
    """Encode an RGB image as a purely imaginary quaternion matrix."""
    img = _check_rgb(img).astype(float)
    n1, n2 = img.shape[:2]
    planes = np.zeros((4, n1, n2))
    planes[1] = img[:, :, 0]
    planes[2] = img[:, :, 1]
    planes[3] = img[:, :, 2]
    return QMatrix(planes, copy=False)


def decode(Q):
    """Back to an 8-bit RGB image: drop the real plane, clip, round half-up."""
    channels = np.stack([Q.planes[1], Q.planes[2], Q.planes[3]], axis=-1)
    return np.floor(np.clip(channels, 0.0, PIXEL_MAX) + 0.5).astype(np.uint8)


@dataclass(frozen=True)
class DegradeSpec:
    """Fraction of missing pixels, fraction of noisy pixels, and the seed."""

    missing: float = 0.0
    noise: float = 0.0
    seed: int = 0

    def validate(self):
        if not (0.0 <= self.missing <= 1.0 and 0.0 <= self.noise <= 1.0):
            raise ValueError("fractions must lie in [0, 1]")


def _sample_observed(shape, fraction, rng):
    """Boolean grid with exactly round(fraction * size) True entries."""
    total = int(shape[0]) * int(shape[1])
    count = int(round(fraction * total))
    flat = np.zeros(total, dtype=bool)
    flat[rng.permutation(total)[:count]] = True
    return flat.reshape(shape)


def _replace_with_uniform_noise(planes, locations, rng):
    """Overwrite the channel values at ``locations`` with uniform [0, 255] draws."""
    count = int(locations.sum())
    for t in range(1, 4):
        planes[t][locations] = rng.uniform(0.0, PIXEL_MAX, size=count)


def degrade(img, spec):
    """Corrupt and subsample an image per the degradation protocol.

    Noise replaces the pixel value at round(noise * n1 * n2) locations (shared
    across channels, values drawn independently per channel); afterwards a
    uniform mask keeps exactly round((1 - missing) * n1 * n2) entries. Noise is
    applied before masking, so corrupted-and-missing pixels are simply missing.
    """
    spec.validate()
    X = encode(img)
    rng = np.random.default_rng(spec.seed)
    noise_locs = _sample_observed(X.shape, spec.noise, rng)
    _replace_with_uniform_noise(X.planes, noise_locs, rng)
    mask = ObservationMask(_sample_observed(X.shape, 1.0 - spec.missing, rng))
    return project(X, mask), mask


def psnr(a, b):
    """Peak signal-to-noise ratio in dB over all pixels and channels (peak 255).

    Identical inputs return the 100 dB sentinel; the value is capped there.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    mse = float(((a - b) ** 2).mean())
    if mse == 0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * np.log10(PIXEL_MAX ** 2 / mse))


def _local_mean(plane, radius):
    # interior of a Gaussian filter equals the true windowed correlation
    smoothed = ndimage.gaussian_filter(plane, SSIM_SIGMA, radius=radius, mode="nearest")
    return smoothed[radius:-radius, radius:-radius]


def _ssim_plane(x, y):
    c1 = (SSIM_K1 * PIXEL_MAX) ** 2
    c2 = (SSIM_K2 * PIXEL_MAX) ** 2
    radius = SSIM_WINDOW // 2
    mu_x = _local_mean(x, radius)
    mu_y = _local_mean(y, radius)
    var_x = _local_mean(x * x, radius) - mu_x ** 2
    var_y = _local_mean(y * y, radius) - mu_y ** 2
    cov = _local_mean(x * y, radius) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x ** 2 + mu_y ** 2 + c1) * (var_x + var_y + c2)
    return float((num / den).mean())


def ssim(a, b):
    """Mean structural similarity with an 11x11 Gaussian window (sigma 1.5).

    Computed per channel on the window-interior region and averaged; constants
    K1=0.01, K2=0.03 at dynamic range 255.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    a = np.atleast_3d(a)
    b = np.atleast_3d(b)
    if min(a.shape[0], a.shape[1]) < SSIM_WINDOW:
        raise ValueError(f"image smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    values = [_ssim_plane(a[:, :, t], b[:, :, t]) for t in range(a.shape[2])]
    return float(np.mean(values))


def load_image(path):
    """Read an 8-bit RGB image from a lossless raster file; alpha is refused."""
    with Image.open(path) as im:
        if "A" in im.getbands() or "transparency" in im.info:
            raise ValueError(f"{path}: alpha channels are not supported")
        rgb = im.convert("RGB")
        return np.asarray(rgb, dtype=np.uint8)


def save_image(path, img):
    img = _check_rgb(img)
    Image.fromarray(np.asarray(img, dtype=np.uint8), mode="RGB").save(path)
