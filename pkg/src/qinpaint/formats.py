"""On-disk formats of the batch tool: masks, raw tensors, configs, reports.

Masks are human-diffable text ("QMASK" header plus sorted 1-based indices).
Raw tensors are "QTEN" binary files holding float32 channel data, which round-
trips intermediate results exactly where 8-bit images would quantize.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .completion import ObservationMask
from .quatmat import QMatrix
from .video import QTensor

__all__ = [
    "write_mask",
    "read_mask",
    "write_tensor",
    "read_tensor",
    "tensor_from_image",
    "read_config",
    "write_config",
    "append_report",
    "REPORT_COLUMNS",
]

REPORT_COLUMNS = ["input", "algorithm", "missing", "noise",
                  "psnr_db", "ssim", "iters", "seconds"]

_QTEN_MAGIC = b"QTEN"


def write_mask(path, masks):
    """Write one mask (image) or a list of per-frame masks (video)."""
    single = isinstance(masks, ObservationMask)
    if single:
        masks = [masks]
    n1, n2 = masks[0].shape
    lines = []
    if single:
        header = f"QMASK {n1} {n2}"
        for i, j in masks[0].indices:
            lines.append((int(i) + 1, int(j) + 1))
    else:
        header = f"QMASK {n1} {n2} {len(masks)}"
        for k, mask in enumerate(masks):
            for i, j in mask.indices:
                lines.append((int(i) + 1, int(j) + 1, k + 1))
    lines.sort()
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for entry in lines:
            fh.write(" ".join(str(v) for v in entry) + "\n")


def read_mask(path):
    """Read a mask file; returns a mask for images, a list of masks for videos."""
    with open(path) as fh:
        header = fh.readline().split()
        if not header or header[0] != "QMASK" or len(header) not in (3, 4):
            raise ValueError(f"{path}: not a QMASK file")
        dims = [int(v) for v in header[1:]]
        entries = [tuple(int(v) for v in line.split()) for line in fh if line.strip()]
    n1, n2 = dims[0], dims[1]
    if len(dims) == 2:
        idx = np.array(entries, dtype=int).reshape(-1, 2)
        return ObservationMask.from_indices((n1, n2), idx, one_based=True)
    n3 = dims[2]
    masks = []
    entries = np.array(entries, dtype=int).reshape(-1, 3)
    for k in range(1, n3 + 1):
        idx = entries[entries[:, 2] == k][:, :2]
        masks.append(ObservationMask.from_indices((n1, n2), idx, one_based=True))
    return masks


def write_tensor(path, tensor):
    """Raw tensor file: QTEN magic, uint32 dims, float32 LE channel data.

    Data layout is frame-major, row-major, channel-interleaved (R, G, B per
    pixel); the real plane of a pure tensor carries no information and is not
    stored.
    """
    if isinstance(tensor, QMatrix):
        tensor = QTensor(tensor.planes[..., None], copy=False)
    n1, n2, n3 = tensor.shape
    channels = tensor.planes[1:4]                    # (3, n1, n2, n3)
    data = channels.transpose(3, 1, 2, 0)            # (n3, n1, n2, 3)
    with open(path, "wb") as fh:
        fh.write(_QTEN_MAGIC)
        fh.write(np.array([n1, n2, n3], dtype="<u4").tobytes())
        fh.write(data.astype("<f4").tobytes())


def read_tensor(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _QTEN_MAGIC:
            raise ValueError(f"{path}: not a QTEN file")
        n1, n2, n3 = np.frombuffer(fh.read(12), dtype="<u4")
        raw = np.frombuffer(fh.read(), dtype="<f4")
    expected = int(n1) * int(n2) * int(n3) * 3
    if raw.size != expected:
        raise ValueError(f"{path}: truncated tensor data")
    data = raw.astype(float).reshape(int(n3), int(n1), int(n2), 3)
    planes = np.zeros((4, int(n1), int(n2), int(n3)))
    planes[1:4] = data.transpose(3, 1, 2, 0)
    return QTensor(planes, copy=False)


def tensor_from_image(Q):
    """Wrap a quaternion matrix as a single-frame tensor."""
    return QTensor(Q.planes[..., None], copy=False)


def read_config(path):
    """Flat key=value lines; blank lines and # comments are skipped."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def write_config(path, values):
    with open(path, "w") as fh:
        for key in sorted(values):
            if values[key] is not None:
                fh.write(f"{key}={values[key]}\n")


def append_report(path, row):
    """Append one result row to a CSV report, writing the header when new."""
    exists = os.path.exists(path) and os.path.getsize(path) > 0
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        if not exists:
            writer.writeheader()
        writer.writerow({key: row.get(key, "") for key in REPORT_COLUMNS})
