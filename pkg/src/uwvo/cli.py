"""Command-line entry points: run, eval, synth, degrade, flow-debug.

Exit codes: 0 success, 1 bad input, 2 internal failure. Log verbosity comes
from the ``UWVO_LOG_LEVEL`` environment variable (default WARNING).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io as uio
from . import synth
from .config import RunConfig, load_config
from .errors import ParameterError, UwvoError
from .flow import estimate_flow, flow_epe, flow_to_color, interior_mask, weight_flow
from .geometry import CameraIntrinsics
from .imaging import (
    HazeParams,
    as_image,
    estimate_ambient,
    estimate_transmission,
    invert,
    normalization_offset,
    normalize_transmission,
)
from .pipeline import run_sequence, write_pair_log
from .report import evaluate_all, format_csv, format_table, plot_trajectories
from .trajectory import DEFAULT_DELTA_FRAMES, load_tum, save_tum

log = logging.getLogger("uwvo")

EXIT_OK, EXIT_BAD_INPUT, EXIT_INTERNAL = 0, 1, 2


def _resolve_config(args) -> RunConfig:
    cfg = load_config(getattr(args, "config", None))
    return cfg.with_overrides(seed=args.seed, alpha=args.alpha, beta_bias=args.beta_bias, mode=args.mode,
                              baseline=args.baseline, workers=getattr(args, "workers", None))


def _intrinsics_for(cfg: RunConfig, sequence_dir: Path) -> CameraIntrinsics:
    if cfg.intrinsics is not None:
        return cfg.intrinsics
    manifest = sequence_dir / "manifest.toml"
    if manifest.exists():
        cam = synth.read_manifest(sequence_dir)["intrinsics"]
        return CameraIntrinsics(cam["fx"], cam["fy"], cam["cx"], cam["cy"])
    raise ParameterError("camera intrinsics missing: add a [camera] table to the config")


def cmd_run(args) -> int:
    cfg = _resolve_config(args)
    seq = Path(args.sequence_dir)
    k = _intrinsics_for(cfg, seq)
    result = run_sequence(seq, cfg, k)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_tum(out, result.trajectory)
    write_pair_log(out.with_suffix(".pairs.csv"), result.records)
    n = len(result.records)
    print(f"wrote {len(result.trajectory)} poses to {out}; {result.failures}/{n} pairs failed")
    return EXIT_OK


def cmd_eval(args) -> int:
    ref = load_tum(args.reference)
    estimates = {}
    for path in args.estimates:
        name = Path(path).stem
        if name in estimates or name == "reference":
            name = str(path)
        estimates[name] = load_tum(path)
    rows = evaluate_all(estimates, ref, args.delta_frames, align=not args.no_align)
    sys.stdout.write(format_table(rows))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.csv").write_text(format_csv(rows))
        (out / "metrics.txt").write_text(format_table(rows))
        if not args.no_plots:
            plot_trajectories(estimates, ref, out, align=not args.no_align)
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = synth.preset(args.preset)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.frames is not None:
        overrides["frames"] = args.frames
    if args.noise is not None:
        overrides["noise_std"] = args.noise
    cfg = synth.with_overrides(cfg, **overrides)
    ds = synth.generate(cfg)
    out = synth.emit_dataset(ds, args.out_dir)
    print(f"wrote {len(ds.frames)} frames ({cfg.width}x{cfg.height}) of preset {cfg.name} to {out}")
    return EXIT_OK


def _triple(text: str) -> tuple[float, float, float]:
    vals = [float(v) for v in text.split(",")]
    if len(vals) == 1:
        vals = vals * 3
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("expected one value or three comma-separated values")
    return tuple(vals)


def cmd_degrade(args) -> int:
    seq = Path(args.sequence_dir)
    src = seq
    if (seq / "clean").is_dir() and not args.use_frames:
        src = seq / "clean"
    elif (seq / "frames").is_dir():
        src = seq / "frames"
    paths = sorted(src.glob("*.png"))
    if not paths:
        raise ParameterError(f"no PNG frames in {src}")
    if args.depth_dir is None and args.uniform_depth is None:
        raise ParameterError("give --depth-dir with per-frame PFM depth maps or --uniform-depth")
    frames = np.stack([uio.read_image(p) for p in paths])
    if args.depth_dir is not None:
        depth_dir = Path(args.depth_dir)
        if not depth_dir.is_dir():
            raise FileNotFoundError(f"depth directory not found: {depth_dir}")
        depth_paths = [depth_dir / f"{p.stem}.pfm" for p in paths]
        for d in depth_paths:
            if not d.exists():
                raise FileNotFoundError(f"missing depth map {d}")
        depths = np.stack([uio.read_pfm(d).astype(np.float64) for d in depth_paths])
    else:
        depths = np.full(frames.shape[:3], float(args.uniform_depth))
    haze = HazeParams(args.beta, args.ambient)
    degraded, trans = synth.degrade_sequence(frames, depths, haze, args.noise, args.seed or 0)
    out = Path(args.out_dir)
    (out / "frames").mkdir(parents=True, exist_ok=True)
    (out / "transmission").mkdir(parents=True, exist_ok=True)
    for p, img, t in zip(paths, degraded, trans):
        uio.write_image(out / "frames" / p.name, img)
        uio.write_pfm(out / "transmission" / f"{p.stem}.pfm", t)
    print(f"degraded {len(paths)} frames into {out / 'frames'}")
    return EXIT_OK


def cmd_flow_debug(args) -> int:
    cfg = _resolve_config(args)
    a = as_image(uio.read_image(args.frame_a))
    b = as_image(uio.read_image(args.frame_b))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    flow = estimate_flow(a, b, cfg.flow)
    if cfg.normalization is None:
        weights = np.ones(a.shape[:2])
        sigma = 0.0
    else:
        t_inv = invert(estimate_transmission(a, estimate_ambient(a, cfg.patch), cfg.patch))
        sigma = normalization_offset(t_inv, cfg.normalization)
        weights = normalize_transmission(t_inv, cfg.normalization)
    wflow = weight_flow(flow, weights)
    uio.write_flo(out / "flow.flo", flow)
    uio.write_flo(out / "weighted_flow.flo", wflow)
    uio.write_pfm(out / "weights.pfm", weights)
    uio.write_pgm_map(out / "weights.pgm", weights)
    radius = float(max(np.abs(flow).max(), np.abs(wflow).max(), 1e-9) * np.sqrt(2))
    panels = {
        "input": a,
        "weights": np.repeat(((weights - weights.min()) / max(np.ptp(weights), 1e-12))[..., None], 3, axis=2),
        "flow": flow_to_color(flow, radius),
        "weighted_flow": flow_to_color(wflow, radius),
    }
    for name, img in panels.items():
        uio.write_image(out / f"{name}.png", img)
    top = np.concatenate([panels["input"], panels["weights"]], axis=1)
    bottom = np.concatenate([panels["flow"], panels["weighted_flow"]], axis=1)
    uio.write_image(out / "panel.png", np.concatenate([top, bottom], axis=0))
    print(f"sigma {sigma:.6f}  weights [{weights.min():.6f}, {weights.max():.6f}]")
    if args.gt_flow:
        gt = uio.read_flo(args.gt_flow)
        epe = flow_epe(flow, gt, interior_mask(gt.shape, cfg.flow.border))
        print(f"EPE {epe:.6f} px")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage mistakes are bad input, not internal failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_INPUT, f"{self.prog}: error: {message}\n")


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML run configuration")
    p.add_argument("--seed", type=int, help="RANSAC seed override")
    p.add_argument("--alpha", type=float, help="weight spread (normalization.alpha)")
    p.add_argument("--beta-bias", type=float, dest="beta_bias", help="weight bias (normalization.beta_bias)")
    p.add_argument("--mode", choices=["scaled", "confidence"], help="how weights reach the pose solver")
    p.add_argument("--baseline", action="store_true", help="disable transmission weighting")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uwvo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="estimate a trajectory from an image sequence")
    p.add_argument("sequence_dir")
    p.add_argument("output", help="output TUM trajectory")
    _add_pipeline_flags(p)
    p.add_argument("--workers", type=int, help="frame-pair worker processes")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="score trajectories against a reference")
    p.add_argument("reference")
    p.add_argument("estimates", nargs="+")
    p.add_argument("--delta-frames", type=int, default=DEFAULT_DELTA_FRAMES, dest="delta_frames")
    p.add_argument("--no-align", action="store_true", dest="no_align", help="skip similarity alignment")
    p.add_argument("--out-dir", dest="out_dir", help="write metrics.csv and SVG plots here")
    p.add_argument("--no-plots", action="store_true", dest="no_plots")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic underwater dataset")
    p.add_argument("out_dir")
    p.add_argument("--preset", default="haze-heavy-01", help=f"one of: {', '.join(sorted(synth.PRESETS))}")
    p.add_argument("--seed", type=int)
    p.add_argument("--frames", type=int)
    p.add_argument("--noise", type=float, help="additive Gaussian noise std (default off)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("degrade", help="apply the haze model to a clean sequence")
    p.add_argument("sequence_dir")
    p.add_argument("out_dir")
    p.add_argument("--beta", type=_triple, required=True, help="attenuation per metre, one or three values")
    p.add_argument("--ambient", type=_triple, default=(0.10, 0.42, 0.50))
    p.add_argument("--depth-dir", dest="depth_dir", help="per-frame PFM depth maps")
    p.add_argument("--uniform-depth", type=float, dest="uniform_depth", help="constant scene depth in metres")
    p.add_argument("--use-frames", action="store_true", dest="use_frames",
                   help="read frames/ rather than clean/ from a dataset directory")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("flow-debug", help="write flow, weight map and visualization panels for one pair")
    p.add_argument("frame_a")
    p.add_argument("frame_b")
    p.add_argument("out_dir")
    p.add_argument("--gt-flow", dest="gt_flow", help="ground-truth .flo for an EPE printout")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_flow_debug)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("UWVO_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UwvoError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except Exception as exc:  # noqa: BLE001
        log.exception("internal failure")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
