"""Command-line pipeline: synth -> track -> metrics -> render, plus stats.

Exit codes: 0 success, 2 input or contract error, 1 internal error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import traceback
from pathlib import Path

from . import __version__
from .compose import PRESETS, RenderConfig, load_layouts, render_visualization, resolve_preset
from .errors import ConfigError, DataError, InputError
from .frame_io import ClipHeader, PixelFormat, load_clip, save_clip
from .kinematics import MetricsConfig, derive_series, detect_shots, shot_flags
from .records import (
    read_metrics, read_shots, read_track, shots_from_flags, write_metrics, write_shots, write_track,
)
from .render.panels import OverlaySpec
from .render.style import Style
from .tracker import Template, TrackerConfig, track_sequence

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT = 0, 1, 2

CONFIG_SECTIONS = {
    "tracker": ("lock_threshold", "search_radius_px"),
    "metrics": ("window_s", "smooth_alpha", "recoil_threshold", "refractory_s", "aimpoint", "px_per_mrad"),
    "render": ("style", "layouts", "span_s", "max_radius_px", "trail_s", "history_s"),
}


def load_config(path) -> dict:
    """Pipeline JSON: ``{"tracker": {...}, "metrics": {...}, "render": {...}}``."""
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    for section, value in data.items():
        if section not in CONFIG_SECTIONS:
            raise ConfigError(f"{path}: unknown section {section!r}")
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: section {section!r} must be an object")
        for key in value:
            if key not in CONFIG_SECTIONS[section]:
                raise ConfigError(f"{path}: unknown key {section}.{key}")
    base = Path(path).parent
    render = data.get("render", {})
    for key in ("style", "layouts"):
        if key in render:
            render[key] = str(base / render[key])
    return data


def _settings(args, section: str) -> dict:
    """Config-file values overridden by explicitly given flags."""
    out = dict(args.config_data.get(section, {}))
    for key in CONFIG_SECTIONS[section]:
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    return out


def _build(kind, section: str, values: dict):
    try:
        return kind(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {section} settings: {exc}") from None


def tracker_config(args) -> TrackerConfig:
    return _build(TrackerConfig, "tracker", _settings(args, "tracker"))


def metrics_config(args) -> MetricsConfig:
    s = _settings(args, "metrics")
    if s.get("recoil_threshold") == "auto":
        s["recoil_threshold"] = None
    if s.get("aimpoint") is not None:
        s["aimpoint"] = tuple(float(v) for v in s["aimpoint"])
    return _build(MetricsConfig, "metrics", s)


def render_config(args) -> RenderConfig:
    s = _settings(args, "render")
    style_path, layouts_path = s.pop("style", None), s.pop("layouts", None)
    style = Style.from_json(style_path) if style_path else Style()
    layouts = load_layouts(layouts_path) if layouts_path else None
    return _build(RenderConfig, "render", dict(s, style=style, layouts=layouts, overlay=OverlaySpec(style=style)))


# ----------------------------------------------------------------- commands

def cmd_synth(args) -> int:
    from .synth import ScenarioSpec, synthesize

    spec = ScenarioSpec.from_json(args.scenario)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    truth, clip, template = synthesize(spec)
    save_clip(args.out, spec.header, clip)
    if args.truth:
        truth.to_csv(args.truth)
    if args.shots:
        with open(args.shots, "w") as fh:
            json.dump(truth.shots_json(), fh, indent=2)
            fh.write("\n")
    if args.template:
        from PIL import Image

        Image.fromarray(template.array).save(args.template)
    return EXIT_OK


def _anchor(args):
    if (args.anchor_x is None) != (args.anchor_y is None):
        raise InputError("--anchor-x and --anchor-y must be given together")
    return None if args.anchor_x is None else (args.anchor_x, args.anchor_y)


def cmd_track(args) -> int:
    cfg = tracker_config(args)
    try:
        template = Template.from_file(args.template, _anchor(args))
    except OSError as exc:
        raise InputError(f"{args.template}: cannot read template image ({exc})") from None
    header, frames = load_clip(args.clip)
    track = track_sequence(frames, template, cfg)
    write_track(args.out, track, header.fps)
    return EXIT_OK


def _header_for(args) -> ClipHeader:
    if args.clip:
        header, _ = load_clip(args.clip)
        return header
    if args.fps is None or args.width is None or args.height is None:
        raise InputError("metrics needs --clip or all of --fps, --width and --height")
    from .frame_io import fps_rational

    num, den = fps_rational(args.fps)
    return ClipHeader(args.width, args.height, num, den, PixelFormat.GRAY8)


def cmd_metrics(args) -> int:
    cfg = metrics_config(args)
    header = _header_for(args)
    track = read_track(args.track)
    series = derive_series(track, header, cfg)
    shots = detect_shots(series, cfg)
    write_metrics(args.out, series, shot_flags(series, shots))
    if args.shots:
        write_shots(args.shots, shots)
    return EXIT_OK


def cmd_render(args) -> int:
    vis = f"VIS{args.vis}"
    cfg = render_config(args)
    mcfg = metrics_config(args)
    window_s = mcfg.window_s
    cfg = dataclasses.replace(cfg, overlay=dataclasses.replace(cfg.overlay, aimpoint=mcfg.aimpoint))
    header, frames = load_clip(args.clip)
    track = read_track(args.track)
    series, flags = read_metrics(args.metrics, header.fps, window_s)
    if len(series) != len(track):
        raise DataError(f"{args.metrics}: {len(series)} metrics rows but {args.track} has {len(track)} rows")
    if header.frame_count is not None and header.frame_count != len(series):
        raise DataError(f"{args.metrics}: {len(series)} metrics rows but the clip has {header.frame_count} frames")
    shots = read_shots(args.shots) if args.shots else shots_from_flags(series, flags)
    preset = resolve_preset(vis, (header.width, header.height), cfg.layouts, cfg.style)
    if preset.is_passthrough():
        out_header = header
    else:
        w, h = preset.canvas
        out_header = ClipHeader(w, h, header.fps_num, header.fps_den, PixelFormat.RGB24, len(series))
    save_clip(args.out, out_header, render_visualization(vis, frames, track, series, shots, cfg))
    return EXIT_OK


def cmd_stats(args) -> int:
    from .pairstats import analyze, format_table, rating_tests, report_json
    from .pairstats.io import read_preferences, read_ratings

    groups = read_preferences(args.preferences)
    reports = []
    for name, data in groups.items():
        reports.append(analyze(name or "All", data, args.alpha))
    if len(groups) > 1:
        merged = None
        for data in groups.values():
            merged = data if merged is None else merged.merge(data)
        reports.append(analyze("All", merged, args.alpha, args.combined_df))
    ratings = rating_tests(read_ratings(args.ratings)) if args.ratings else None
    text = format_table(reports)
    if args.out:
        Path(args.out).write_text(report_json(reports, ratings))
    if args.table:
        Path(args.table).write_text(text)
    if not args.out and not args.table:
        sys.stdout.write(text)
    return EXIT_OK


# ------------------------------------------------------------------- parser

def _positive_int(v):
    n = int(v)
    if n <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return n


def _threshold(v):
    return "auto" if v == "auto" else float(v)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scopevis", description="Rifle-scope video analytics and composite visualizations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="pipeline JSON with tracker/metrics/render sections; flags override it")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate a synthetic clip with ground truth")
    s.add_argument("scenario", help="scenario JSON")
    s.add_argument("--out", required=True, help="output clip (.y4m or PNG directory)")
    s.add_argument("--truth", help="ground-truth CSV (frame_idx,t,true_x,true_y)")
    s.add_argument("--shots", help="true shot events JSON")
    s.add_argument("--template", help="write the marker template as PNG")
    s.add_argument("--seed", type=int, help="override the scenario seed")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("track", help="track the marker through a clip")
    s.add_argument("clip", help="input clip (.y4m or PNG directory)")
    s.add_argument("--template", required=True, help="marker template image")
    s.add_argument("--anchor-x", type=float, help="marker center x inside the template (default: patch center)")
    s.add_argument("--anchor-y", type=float, help="marker center y inside the template")
    s.add_argument("--lock-threshold", dest="lock_threshold", type=float, help="minimum NCC score for a lock (0.55)")
    s.add_argument("--search-radius", dest="search_radius_px", type=_positive_int, help="search window radius in px (48)")
    s.add_argument("--out", required=True, help="track CSV")
    s.set_defaults(func=cmd_track)

    s = sub.add_parser("metrics", help="derive aim kinematics and detect shots")
    s.add_argument("track", help="track CSV")
    s.add_argument("--clip", help="clip supplying frame rate and size")
    s.add_argument("--fps", type=float, help="frame rate when no clip is given")
    s.add_argument("--width", type=_positive_int)
    s.add_argument("--height", type=_positive_int)
    _metrics_flags(s)
    s.add_argument("--out", required=True, help="metrics CSV")
    s.add_argument("--shots", help="detected shot events JSON")
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("render", help="render one of the composite visualizations")
    s.add_argument("--vis", type=int, choices=range(1, len(PRESETS) + 1), required=True, help="preset 1..5")
    s.add_argument("--clip", required=True)
    s.add_argument("--track", required=True)
    s.add_argument("--metrics", required=True)
    s.add_argument("--shots", help="shot events JSON (default: shot_flag column of the metrics)")
    s.add_argument("--style", help="style JSON")
    s.add_argument("--layouts", help="layout presets JSON")
    s.add_argument("--span-s", dest="span_s", type=float, help="time-series span in seconds (3)")
    s.add_argument("--max-radius", dest="max_radius_px", type=float, help="polar plot radius in px")
    s.add_argument("--trail-s", dest="trail_s", type=float, help="highlighted trail length in seconds (1)")
    s.add_argument("--window-s", dest="window_s", type=float, help="window for mean offset channels (1)")
    s.add_argument("--out", required=True, help="output clip (.y4m or PNG directory)")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("stats", help="analyze paired-comparison and rating data")
    s.add_argument("--preferences", required=True, help="CSV judge_id,stimulus_a,stimulus_b,winner[,group]")
    s.add_argument("--ratings", help="CSV judge_id,group,stimulus,rating")
    s.add_argument("--alpha", type=float, default=0.05, choices=(0.05, 0.01))
    s.add_argument("--combined-df", dest="combined_df", type=_positive_int,
                   help="degrees of freedom for the pooled test of equality (default t-1)")
    s.add_argument("--out", help="report JSON")
    s.add_argument("--table", help="plain-text table (printed when neither output is given)")
    s.set_defaults(func=cmd_stats)
    return p


def _metrics_flags(s):
    s.add_argument("--window-s", dest="window_s", type=float, help="accuracy/precision window in seconds (1)")
    s.add_argument("--smooth-alpha", dest="smooth_alpha", type=float, help="EMA smoothing before differencing (off)")
    s.add_argument("--recoil-threshold", dest="recoil_threshold", type=_threshold,
                   help="acceleration threshold in px/s^2 or 'auto'")
    s.add_argument("--refractory-s", dest="refractory_s", type=float, help="minimum time between shots (0.5)")
    s.add_argument("--aimpoint", nargs=2, type=float, metavar=("X", "Y"), help="aimpoint in px (frame center)")
    s.add_argument("--px-per-mrad", dest="px_per_mrad", type=float, help="report offsets in mrad")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.config_data = load_config(args.config)
        return args.func(args)
    except InputError as exc:
        print(f"scopevis {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"scopevis {args.command}: error: {exc.filename}: file not found", file=sys.stderr)
        return EXIT_INPUT
    except Exception:  # noqa: BLE001 - stable exit code for any internal failure
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
