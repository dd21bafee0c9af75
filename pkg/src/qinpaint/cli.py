"""Batch command-line front end.

Subcommands: degrade (make reproducible incomplete/corrupted observations),
inpaint (reconstruct with one of the completion algorithms), metrics
(PSNR/SSIM of two files), spectrum (singular-value energy curves as CSV).
Exit codes: 0 ok, 1 user error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import formats, imaging
from .completion import ObservationMask, SolverConfig, complete, project
from .patches import PatchSpec, inpaint_nss, key_patch_grid, match_block, stack_group
from .qsvd import NumericalError, cumulative_energy, singular_values
from .quatmat import QMatrix
from .video import QTensor, TubeMaskSpec, degrade_video, inpaint_image_blocks, inpaint_tnss

THREADS_ENV = "QINPAINT_THREADS"


class UserError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UserError(message)


def _build_parser():
    parser = _Parser(prog="qinpaint",
                     description="Quaternion low-rank completion for color images and videos")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degrade", help="write a degraded observation plus its mask")
    p.add_argument("input")
    p.add_argument("--output", required=True, help="png/qten file, or a directory for videos")
    p.add_argument("--mask", required=True, help="mask file to write")
    p.add_argument("--missing", type=float, default=None)
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=["tube", "non-tube"], default=None,
                   help="video degradation pattern (default non-tube)")
    p.add_argument("--config", default=None)
    p.add_argument("--dump-config", default=None)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("inpaint", help="reconstruct an observation")
    p.add_argument("input")
    p.add_argument("--mask", default=None, required=False)
    p.add_argument("--output", default=None)
    p.add_argument("--algorithm", choices=["qmc", "nss-qmc", "tnss-qmc"], default=None)
    p.add_argument("--reference", default=None, help="ground truth for PSNR/SSIM")
    p.add_argument("--report", default=None, help="CSV report to append to")
    p.add_argument("--noise", type=float, default=None,
                   help="noise fraction of the observation, recorded in the report")
    p.add_argument("--patch-rows", type=int, default=None)
    p.add_argument("--patch-cols", type=int, default=None)
    p.add_argument("--stride", type=int, default=None)
    p.add_argument("--group-size", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--outer-iters", type=int, default=None)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--block-size", type=int, default=None,
                   help="tile large images into blocks of this size")
    p.add_argument("--config", default=None)
    p.add_argument("--dump-config", default=None)
    p.set_defaults(func=cmd_inpaint)

    p = sub.add_parser("metrics", help="PSNR and SSIM of two files")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("spectrum", help="singular values and energy ratios as CSV")
    p.add_argument("input")
    p.add_argument("--output", required=True)
    p.add_argument("--samples", type=int, default=16, help="number of patch groups to sample")
    p.add_argument("--patch-rows", type=int, default=None)
    p.add_argument("--patch-cols", type=int, default=None)
    p.add_argument("--stride", type=int, default=None)
    p.add_argument("--group-size", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.set_defaults(func=cmd_spectrum)

    return parser


# -- option resolution ---------------------------------------------------------


def _load_config(ns):
    path = getattr(ns, "config", None)
    if path is None:
        return {}
    if not os.path.exists(path):
        raise UserError(f"config file not found: {path}")
    return formats.read_config(path)


def _resolve(ns, cfg, key, default=None, cast=str):
    flag = getattr(ns, key, None)
    if flag is not None:
        return flag
    if key in cfg:
        raw = cfg[key]
        if raw == "":
            return None
        if cast is bool:
            return raw.lower() in ("1", "true", "yes")
        return cast(raw)
    return default


def _resolve_threads(ns, cfg):
    if getattr(ns, "threads", None) is not None:
        return ns.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UserError(f"bad {THREADS_ENV}: {env!r}") from exc
    if "threads" in cfg:
        return int(cfg["threads"])
    return 1


def _require_input(path):
    if not os.path.exists(path):
        raise UserError(f"input not found: {path}")


def _is_video_path(path):
    return os.path.isdir(path) or path.endswith(".qten")


def _load_observed(path):
    """Load an observation as a tensor plus a flag telling whether it is a video."""
    _require_input(path)
    if os.path.isdir(path):
        frames = sorted(f for f in os.listdir(path) if f.endswith(".png"))
        if not frames:
            raise UserError(f"no frames in {path}")
        mats = [imaging.encode(imaging.load_image(os.path.join(path, f))) for f in frames]
        return QTensor.from_frames(mats), True
    if path.endswith(".qten"):
        tensor = formats.read_tensor(path)
        return tensor, tensor.n_frames > 1
    return formats.tensor_from_image(imaging.encode(imaging.load_image(path))), False


def _write_frames(path, tensor):
    if path.endswith(".qten"):
        formats.write_tensor(path, tensor)
        return
    if tensor.n_frames == 1 and path.endswith(".png"):
        imaging.save_image(path, imaging.decode(tensor.frame(0)))
        return
    os.makedirs(path, exist_ok=True)
    for k in range(tensor.n_frames):
        name = os.path.join(path, f"frame_{k + 1:04d}.png")
        imaging.save_image(name, imaging.decode(tensor.frame(k)))


# -- subcommands ---------------------------------------------------------------


def cmd_degrade(ns):
    cfg = _load_config(ns)
    source = _resolve(ns, cfg, "input", ns.input)
    output = _resolve(ns, cfg, "output", ns.output)
    mask_path = _resolve(ns, cfg, "mask", ns.mask)
    missing = _resolve(ns, cfg, "missing", 0.0, float)
    noise = _resolve(ns, cfg, "noise", 0.0, float)
    seed = _resolve(ns, cfg, "seed", 0, int)
    mode = _resolve(ns, cfg, "mode", "non-tube")
    if ns.dump_config:
        formats.write_config(ns.dump_config, {
            "input": source, "output": output, "mask": mask_path,
            "missing": missing, "noise": noise, "seed": seed, "mode": mode,
        })
    tensor, is_video = _load_observed(source)
    spec = TubeMaskSpec(mode=mode, missing=missing, noise=noise)
    observed, masks = degrade_video(tensor, spec, seed=seed)
    if is_video:
        _write_frames(output, observed)
        formats.write_mask(mask_path, masks)
    else:
        _write_frames(output, observed)
        formats.write_mask(mask_path, masks[0])
    print(f"wrote {output} and {mask_path}")


def _patch_spec(ns, cfg):
    return PatchSpec(
        rows=_resolve(ns, cfg, "patch_rows", 6, int),
        cols=_resolve(ns, cfg, "patch_cols", 6, int),
        stride=_resolve(ns, cfg, "stride", None, int),
        group_size=_resolve(ns, cfg, "group_size", 60, int),
        window=_resolve(ns, cfg, "window", 20, int),
        bandwidth=_resolve(ns, cfg, "bandwidth", None, float),
        outer_iters=_resolve(ns, cfg, "outer_iters", 1, int),
    )


def _solver_config(ns, cfg, video):
    return SolverConfig(
        lam=_resolve(ns, cfg, "lam", None, float),
        mu=_resolve(ns, cfg, "mu", None, float),
        max_iters=_resolve(ns, cfg, "max_iters", 100 if video else 500, int),
        tol=_resolve(ns, cfg, "tol", 1e-4, float),
    )


def cmd_inpaint(ns):
    cfg = _load_config(ns)
    source = _resolve(ns, cfg, "input", ns.input)
    mask_path = _resolve(ns, cfg, "mask")
    output = _resolve(ns, cfg, "output")
    if mask_path is None or output is None:
        raise UserError("inpaint needs --mask and --output")
    reference = _resolve(ns, cfg, "reference")
    report_path = _resolve(ns, cfg, "report")
    noise = _resolve(ns, cfg, "noise", None, float)
    threads = _resolve_threads(ns, cfg)
    block_size = _resolve(ns, cfg, "block_size", None, int)

    observed, is_video = _load_observed(source)
    algorithm = _resolve(ns, cfg, "algorithm", "tnss-qmc" if is_video else "nss-qmc")
    if algorithm == "tnss-qmc" and not is_video:
        raise UserError("tnss-qmc requires video input")
    if algorithm == "nss-qmc" and is_video:
        raise UserError("nss-qmc expects a single image; use tnss-qmc for videos")

    _require_input(mask_path)
    masks = formats.read_mask(mask_path)
    if isinstance(masks, list) and not is_video:
        raise UserError("mask file is for a video but the input is an image")
    if not isinstance(masks, list):
        masks = [masks]
    if len(masks) != observed.n_frames:
        raise UserError(f"mask has {len(masks)} frames, input has {observed.n_frames}")

    spec = _patch_spec(ns, cfg)
    solver = _solver_config(ns, cfg, is_video)
    if ns.dump_config:
        formats.write_config(ns.dump_config, {
            "input": source, "mask": mask_path, "output": output,
            "algorithm": algorithm, "reference": reference, "report": report_path,
            "noise": noise, "threads": threads, "block_size": block_size,
            "patch_rows": spec.rows, "patch_cols": spec.cols, "stride": spec.stride,
            "group_size": spec.group_size, "window": spec.window,
            "bandwidth": spec.bandwidth, "outer_iters": spec.outer_iters,
            "lam": solver.lam, "mu": solver.mu,
            "max_iters": solver.max_iters, "tol": solver.tol,
        })

    stats = {}
    started = time.perf_counter()
    if algorithm == "qmc":
        frames = []
        total_iters = 0
        for k in range(observed.n_frames):
            result = complete(observed.frame(k), masks[k], solver)
            planes = np.clip(result.L.planes, 0.0, 255.0)
            planes[0] = 0.0
            frames.append(QMatrix(planes, copy=False))
            total_iters += result.iterations
        recon = QTensor.from_frames(frames)
        stats["iterations"] = total_iters
    elif algorithm == "nss-qmc":
        image = project(observed.frame(0), masks[0])
        if block_size:
            out = inpaint_image_blocks(image, masks[0], spec, solver,
                                       block_shape=(block_size, block_size),
                                       workers=threads, report=stats)
        else:
            out = inpaint_nss(image, masks[0], spec, solver, workers=threads,
                              report=stats)
        recon = formats.tensor_from_image(out)
    else:
        data = observed.planes.copy()
        for k, m in enumerate(masks):
            data[:, :, :, k] *= m.observed
        recon = inpaint_tnss(QTensor(data, copy=False), masks, spec, solver,
                             workers=threads, report=stats)
    seconds = time.perf_counter() - started
    _write_frames(output, recon)

    rho = float(np.mean([m.rho for m in masks]))
    row = {
        "input": source,
        "algorithm": algorithm,
        "missing": f"{1.0 - rho:.6f}",
        "noise": "" if noise is None else f"{noise:.6f}",
        "iters": stats.get("iterations", ""),
        "seconds": f"{seconds:.3f}",
        "psnr_db": "",
        "ssim": "",
    }
    if reference:
        ref_tensor, _ = _load_observed(reference)
        if ref_tensor.shape != recon.shape:
            raise UserError("reference shape does not match the reconstruction")
        psnr_vals, ssim_vals = _frame_metrics(ref_tensor, recon)
        row["psnr_db"] = f"{np.mean(psnr_vals):.4f}"
        row["ssim"] = f"{np.mean(ssim_vals):.6f}"
        print(f"psnr_db={row['psnr_db']} ssim={row['ssim']}")
    if report_path:
        formats.append_report(report_path, row)
    print(f"wrote {output} ({seconds:.1f}s, {stats.get('groups', 0)} groups, "
          f"{stats.get('iterations', 0)} iterations)")


def _frame_metrics(a, b):
    psnr_vals, ssim_vals = [], []
    for k in range(a.n_frames):
        x = imaging.decode(a.frame(k))
        y = imaging.decode(b.frame(k))
        psnr_vals.append(imaging.psnr(x, y))
        ssim_vals.append(imaging.ssim(x, y))
    return psnr_vals, ssim_vals


def cmd_metrics(ns):
    a, _ = _load_observed(ns.a)
    b, _ = _load_observed(ns.b)
    if a.shape != b.shape:
        raise UserError(f"shape mismatch: {a.shape} vs {b.shape}")
    psnr_vals, ssim_vals = _frame_metrics(a, b)
    print(f"psnr_db={np.mean(psnr_vals):.4f} ssim={np.mean(ssim_vals):.6f}")


def cmd_spectrum(ns):
    tensor, is_video = _load_observed(ns.input)
    if is_video:
        raise UserError("spectrum expects a single image")
    image = tensor.frame(0)
    spec = _patch_spec(ns, {})
    entries = []

    def add(source, i, j, A):
        s = singular_values(A)
        acc = cumulative_energy(A)
        for idx in range(len(s)):
            entries.append((source, i, j, idx + 1, s[idx], acc[idx]))

    add("image", "", "", image)
    grid = key_patch_grid(image.shape, spec)
    take = max(1, min(ns.samples, len(grid)))
    sample_idx = np.unique(np.linspace(0, len(grid) - 1, take).astype(int))
    full = ObservationMask.full(image.shape)
    for gi in sample_idx:
        i, j = (int(v) for v in grid[gi])
        group = match_block(image, (i, j), spec)
        stacked, _ = stack_group(image, full, group)
        if stacked.abs().max() == 0:  # an all-black stack has no spectrum
            continue
        add("patch", i, j, stacked)
    with open(ns.output, "w") as fh:
        fh.write("source,key_row,key_col,index,sigma,energy\n")
        for source, i, j, idx, sigma, energy in entries:
            fh.write(f"{source},{i},{j},{idx},{sigma:.10g},{energy:.10g}\n")
    print(f"wrote {ns.output}")


def main(argv=None):
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        ns.func(ns)
        return 0
    except UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
