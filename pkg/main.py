#!/usr/bin/env python3
"""
Viewport Stream - object-aware viewport prediction and tile bitrate
allocation for 360 degree video, as a CLI over CSV/JSON artifacts.
"""

import functools
import json
import os
import sys
from collections import defaultdict
from dataclasses import asdict
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import click
import numpy as np
from colorama import init

# Initialize colorama for cross-platform colored output
init()

# Add project root to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from allocators.naba import allocate_naba
from allocators.pyramid import TileAllocation, allocate_pyramid
from allocators.tiles import viewport_to_tile
from config.experiment import ExperimentConfig
from config.settings import settings
from core.exceptions import InvalidConfig, InvalidInput, StreamingError
from generators.report import ReportGenerator
from geometry.projection import EquirectPoint
from metrics.qoe import ChunkRecord, aggregate_qoe
from predictors.base import ObjectFrame, object_frames_from_rows
from tracking.tracker import run_tracker
from utils import console
from utils.experiment import run_experiment
from utils.file_utils import FileUtils
from utils.multi_variant import MultiVariantRunner, sweep_chunk_sizes
from utils.synthetic import SCENARIOS, ScenarioSpec, detections_from_object_frames, generate_synthetic
from utils.traces import TRACE_LAYOUTS, read_head_trace, resample_trace


def _parse_pair(value: Optional[str], name: str) -> Tuple[Optional[int], Optional[int]]:
    """'8x8' -> (8, 8)."""
    if value is None:
        return None, None
    try:
        first, second = value.lower().split('x')
        return int(first), int(second)
    except ValueError:
        raise InvalidConfig(f"{name} must look like AxB, got {value!r}")


class ViewportStreamingApp:
    """Main application class for the viewport streaming pipeline."""

    def __init__(self, cfg: ExperimentConfig, out_dir: str = settings.DEFAULT_OUTPUT_DIR):
        self.cfg = cfg
        self.report = ReportGenerator(out_dir)

    # Input loading

    def load_users(self, viewports: Sequence[str], traces: Sequence[str], layout: str) -> Dict[str, List[EquirectPoint]]:
        """
        Per-user viewports from viewport CSVs and/or head traces.

        Users are keyed by file name without extension.
        """
        users: Dict[str, List[EquirectPoint]] = {}
        for path in viewports:
            users[os.path.splitext(os.path.basename(path))[0]] = FileUtils.read_viewports(path)
        for path in traces:
            trace = read_head_trace(path, layout)
            console.detail(f"Loaded {len(trace.samples)} samples for {trace.user_id}")
            users[trace.user_id] = resample_trace(trace, self.cfg.fps, self.cfg.width, self.cfg.height)
        if not users:
            raise InvalidInput("pass at least one --viewports or --trace file")
        return users

    def load_objects(self, trajectories: Optional[str]) -> List[ObjectFrame]:
        """Per-frame objects from a trajectory CSV; centroids must lie inside the frame."""
        if not trajectories:
            return []
        return object_frames_from_rows(FileUtils.read_trajectories(trajectories), frame_dims=self.cfg.dims())

    # Commands

    def track(self, detections: str) -> Dict[str, Any]:
        found = FileUtils.read_detections(detections)
        console.info(f"Tracking {len(found)} detections...")
        tracks = run_tracker(found, self.cfg.width, self.cfg.height, self.cfg.tracker_config())
        rows = FileUtils.trajectory_rows(tracks)
        self.report.write_csv_artifact(settings.TRAJECTORIES_FILE, settings.TRAJECTORIES_HEADER, rows)
        console.success(f"{len(tracks)} track(s), {len(rows)} trajectory rows")
        return self.report.write_manifest('track', self.cfg.to_dict())

    def predict(self, users: Dict[str, List[EquirectPoint]], objects: List[ObjectFrame]) -> Dict[str, Any]:
        if self.cfg.variant == 'naba':
            raise InvalidConfig("the naba variant makes no viewport prediction")
        if len(users) != 1:
            raise InvalidInput(f"predict takes one user, got {len(users)}")
        (user_id, viewports), = users.items()
        console.info(f"Predicting {user_id} with {self.cfg.variant}...")
        run = run_experiment(self.cfg, viewports, objects, user_id=user_id).users[0]
        self.report.write_csv_artifact(settings.PREDICTIONS_FILE, settings.PREDICTIONS_HEADER, run.predictions)
        console.success(f"{run.qoe.chunks} chunk(s) predicted")
        return self.report.write_manifest('predict', self.cfg.to_dict())

    def allocate(self, predictions: str) -> Dict[str, Any]:
        rows = FileUtils.read_predictions(predictions)
        if not rows:
            raise InvalidInput(f"{predictions} has no prediction rows")
        grid, fov = self.cfg.grid(), self.cfg.fov()
        by_chunk: Dict[int, List[EquirectPoint]] = defaultdict(list)
        for chunk, _frame, pred_x, pred_y, *_ in sorted(rows, key=lambda r: (r[0], r[1])):
            by_chunk[chunk].append(EquirectPoint(x=pred_x, y=pred_y))
        out = []
        for chunk in sorted(by_chunk):
            if self.cfg.variant == 'naba':
                allocation = allocate_naba(grid, self.cfg.bitrate_mbps)
            else:
                centers = by_chunk[chunk]
                tiles = [viewport_to_tile(v, grid) for v in centers]
                allocation = allocate_pyramid(tiles, grid, fov, self.cfg.bitrate_mbps, centers=centers)
            out.extend(allocation.rows(chunk))
        self.report.write_csv_artifact(settings.ALLOCATIONS_FILE, settings.ALLOCATIONS_HEADER, out)
        console.success(f"{len(by_chunk)} chunk(s) allocated")
        return self.report.write_manifest('allocate', self.cfg.to_dict())

    def evaluate(self, users: Dict[str, List[EquirectPoint]], allocations: str, predictions: Optional[str]) -> Dict[str, Any]:
        if len(users) != 1:
            raise InvalidInput(f"evaluate takes one user, got {len(users)}")
        (user_id, viewports), = users.items()
        grid, fov = self.cfg.grid(), self.cfg.fov()

        matrices: Dict[int, Any] = {}
        for chunk, row, col, bitrate in FileUtils.read_allocations(allocations):
            matrix = matrices.setdefault(chunk, {})
            matrix[(row, col)] = bitrate
        predicted: Dict[int, Dict[int, EquirectPoint]] = defaultdict(dict)
        if predictions:
            for chunk, frame, pred_x, pred_y, *_ in FileUtils.read_predictions(predictions):
                predicted[chunk][frame] = EquirectPoint(x=pred_x, y=pred_y)

        records = []
        size, warmup = self.cfg.chunk_size, self.cfg.warmup_frames
        for chunk in sorted(matrices):
            cells = matrices[chunk]
            if len(cells) != grid.rows * grid.cols:
                raise InvalidInput(f"chunk {chunk}: {len(cells)} allocation cells for a {grid.rows}x{grid.cols} grid")
            bitrates = [[cells.get((r, c)) for c in range(grid.cols)] for r in range(grid.rows)]
            if any(value is None for line in bitrates for value in line):
                raise InvalidInput(f"chunk {chunk}: allocation does not cover the {grid.rows}x{grid.cols} grid")
            frames = sorted(predicted[chunk]) if chunk in predicted else list(range(warmup + chunk * size, warmup + (chunk + 1) * size))
            if frames[-1] >= len(viewports):
                raise InvalidInput(f"chunk {chunk} needs frame {frames[-1]}, {user_id} has {len(viewports)} frames")
            allocation = TileAllocation(bitrates=np.array(bitrates, dtype=float), total=float(np.sum(bitrates)))
            tiles = [viewport_to_tile(predicted[chunk][f], grid) for f in frames] if chunk in predicted else None
            records.append(ChunkRecord(
                chunk=chunk, actual=[viewports[f] for f in frames], allocation=allocation,
                grid=grid, fov=fov, predicted_tiles=tiles))

        qoe = aggregate_qoe(records)
        self.report.write_json_artifact(settings.QOE_FILE, {'user_id': user_id, **qoe.to_dict()})
        console.success(f"Q = {qoe.total:.4f} over {qoe.chunks} chunk(s)")
        return self.report.write_manifest('evaluate', self.cfg.to_dict())

    def compare(self, users: Dict[str, List[EquirectPoint]], objects: List[ObjectFrame], variants: Sequence[str]) -> Dict[str, Any]:
        console.info(f"Comparing {', '.join(variants)} on {len(users)} user(s)...")
        comparison = MultiVariantRunner(self.cfg, variants).run_all(users, objects)
        self.report.write_csv_artifact(settings.COMPARISON_CSV_FILE, settings.COMPARISON_HEADER, comparison.rows())
        self.report.write_json_artifact(settings.COMPARISON_JSON_FILE, comparison.to_dict())
        self.report.write_json_artifact(settings.LATENCY_FILE, {'latency': comparison.latency()})
        console.success(f"Compared {len(comparison.reports)} variant(s)")
        return self.report.write_manifest('compare', self.cfg.to_dict())

    def sweep(self, users: Dict[str, List[EquirectPoint]], objects: List[ObjectFrame], durations: Sequence[float]) -> Dict[str, Any]:
        console.info(f"Sweeping chunk durations {', '.join(str(d) for d in durations)}s...")
        result = sweep_chunk_sizes(self.cfg, durations, users, objects)
        self.report.write_csv_artifact(settings.SWEEP_FILE, settings.SWEEP_HEADER, result.rows())
        self.report.write_json_artifact(settings.LATENCY_FILE, {'latency': result.latency()})
        console.success(f"Swept {len(result.reports)} duration(s)")
        return self.report.write_manifest('sweep', self.cfg.to_dict())

    def synth(self, spec: ScenarioSpec) -> Dict[str, Any]:
        console.info(f"Generating {spec.name} ({spec.frames} frames, {spec.users} user(s))...")
        trace = generate_synthetic(spec)
        if spec.users == 1:
            FileUtils.write_viewports(self.report.path(settings.VIEWPORTS_FILE), trace.viewports)
            self.report.record_artifact(settings.VIEWPORTS_FILE, 'csv')
        else:
            for user_id, viewports in trace.users.items():
                filename = f"viewports_{user_id}.csv"
                FileUtils.write_viewports(self.report.path(filename), viewports)
                self.report.record_artifact(filename, 'csv')
        rows = [(frame.frame, object_id, p.x, p.y) for frame in trace.object_frames for object_id, p in sorted(frame.coords.items())]
        self.report.write_csv_artifact(settings.TRAJECTORIES_FILE, settings.TRAJECTORIES_HEADER, rows)
        detections = detections_from_object_frames(trace.object_frames, spec.width, spec.height)
        FileUtils.write_detections(self.report.path(settings.DETECTIONS_FILE), detections)
        self.report.record_artifact(settings.DETECTIONS_FILE, 'csv')
        console.success(f"Wrote {spec.name} scenario to {self.report.out_dir}")
        return self.report.write_manifest('synth', {**self.cfg.to_dict(), 'scenario': asdict(spec)})


def config_options(func: Callable) -> Callable:
    """Flags that mirror ExperimentConfig; unset flags keep the settings default."""
    options = [
        click.option('--width', type=int, help='Frame width in pixels'),
        click.option('--height', type=int, help='Frame height in pixels'),
        click.option('--fps', type=int, help='Frames per second'),
        click.option('--chunk-seconds', type=float, help='Chunk duration in seconds'),
        click.option('--warmup-seconds', type=float, help='Warm-up duration in seconds'),
        click.option('--tiles', help='Tile grid as ROWSxCOLS, e.g. 8x8'),
        click.option('--player', help='Player field of view as WIDTHxHEIGHT, e.g. 600x300'),
        click.option('--bitrate', type=float, help='Preferred bitrate in Mbps'),
        click.option('--order-x', help='ARIMA order for x as p,d,q'),
        click.option('--order-y', help='ARIMA order for y as p,d,q'),
        click.option('--pa-c', type=float, help='PA aggressiveness C'),
        click.option('--pa-epsilon', type=float, help='PA insensitivity epsilon'),
        click.option('--pa-alpha', type=float, help='PA learning rate alpha'),
        click.option('--pa-normalize/--no-pa-normalize', default=None, help='Scale PA features by the frame size'),
        click.option('--pa-residual/--pa-raw', default=None,
                     help='PARIMA fits the ARIMA error from object offsets, or regresses raw coordinates'),
        click.option('--deactivate-after', type=int, help='Frames a missing object is kept before a new ID'),
        click.option('--max-match-angle', type=float, help='Largest tracker match distance in radians'),
        click.option('--variant', type=click.Choice(settings.VARIANTS), help='Model variant'),
        click.option('--seed', type=int, help='Random seed'),
        click.option('--out-dir', '-o', default=settings.DEFAULT_OUTPUT_DIR, show_default=True, help='Output directory'),
        click.option('--quiet', '-q', is_flag=True, help='Only print the manifest and errors'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _build_app(params: Dict[str, Any]) -> ViewportStreamingApp:
    console.set_quiet(params.pop('quiet', False))
    out_dir = params.pop('out_dir')
    tile_rows, tile_cols = _parse_pair(params.pop('tiles', None), '--tiles')
    player_width, player_height = _parse_pair(params.pop('player', None), '--player')
    cfg = ExperimentConfig.from_settings(
        width=params.pop('width', None),
        height=params.pop('height', None),
        fps=params.pop('fps', None),
        chunk_seconds=params.pop('chunk_seconds', None),
        warmup_seconds=params.pop('warmup_seconds', None),
        tile_rows=tile_rows,
        tile_cols=tile_cols,
        player_width=player_width,
        player_height=player_height,
        bitrate_mbps=params.pop('bitrate', None),
        order_x=params.pop('order_x', None),
        order_y=params.pop('order_y', None),
        pa_c=params.pop('pa_c', None),
        pa_epsilon=params.pop('pa_epsilon', None),
        pa_alpha=params.pop('pa_alpha', None),
        pa_normalize=params.pop('pa_normalize', None),
        pa_residual=params.pop('pa_residual', None),
        deactivate_after=params.pop('deactivate_after', None),
        max_match_angle=params.pop('max_match_angle', None),
        variant=params.pop('variant', None),
        seed=params.pop('seed', None),
    )
    return ViewportStreamingApp(cfg, out_dir)


def _command(func: Callable[..., Dict[str, Any]]) -> Callable:
    """
    Run a command body and print the manifest.

    Pipeline errors exit with status 2, anything unexpected with status 1;
    both print a JSON error object on stdout.
    """

    @functools.wraps(func)
    def wrapper(**params):
        try:
            app = _build_app(params)
            manifest = func(app, **params)
        except StreamingError as e:
            click.echo(json.dumps(e.to_dict(), sort_keys=True))
            console.error(f"Error: {e.message}")
            sys.exit(2)
        except Exception as e:
            click.echo(json.dumps({'error': 'internal_error', 'message': f"{type(e).__name__}: {e}"}, sort_keys=True))
            console.error(f"Unexpected error: {type(e).__name__}: {e}")
            sys.exit(1)
        click.echo(json.dumps(manifest, indent=2, sort_keys=True))
        sys.exit(0)

    return wrapper


input_options = [
    click.option('--viewports', '-v', multiple=True, help='Per-frame viewport CSV (frame,x,y); repeatable'),
    click.option('--trace', multiple=True, help='Head-movement trace; repeatable'),
    click.option('--layout', type=click.Choice(TRACE_LAYOUTS), default='generic', show_default=True, help='Trace file layout'),
]


def user_inputs(func: Callable) -> Callable:
    for option in reversed(input_options):
        func = option(func)
    return func


@click.group()
@click.version_option(version="1.0.0")
def cli():
    """Viewport Stream - predict 360 degree video viewports and allocate tile bitrates."""
    pass


@cli.command()
@click.option('--detections', '-d', required=True, help='Detection CSV (frame,x_min,y_min,x_max,y_max,wrap)')
@config_options
@_command
def track(app, detections):
    """Track detected objects into per-frame trajectories."""
    return app.track(detections)


@cli.command()
@user_inputs
@click.option('--trajectories', '-t', help='Trajectory CSV (frame,object_id,cx,cy)')
@config_options
@_command
def predict(app, viewports, trace, layout, trajectories):
    """Predict per-chunk viewports for one user."""
    users = app.load_users(viewports, trace, layout)
    return app.predict(users, app.load_objects(trajectories))


@cli.command()
@click.option('--predictions', '-p', required=True, help='Prediction CSV written by predict')
@config_options
@_command
def allocate(app, predictions):
    """Allocate tile bitrates from predicted viewports."""
    return app.allocate(predictions)


@cli.command()
@user_inputs
@click.option('--allocations', '-a', required=True, help='Allocation CSV written by allocate')
@click.option('--predictions', '-p', help='Prediction CSV, adds the Manhattan tile error')
@config_options
@_command
def evaluate(app, viewports, trace, layout, allocations, predictions):
    """Score allocations against actual viewports (QoE)."""
    users = app.load_users(viewports, trace, layout)
    return app.evaluate(users, allocations, predictions)


@cli.command()
@user_inputs
@click.option('--trajectories', '-t', help='Trajectory CSV shared by all users')
@click.option('--variants', default=','.join(settings.DEFAULT_VARIANTS), show_default=True, help='Comma-separated variants')
@config_options
@_command
def compare(app, viewports, trace, layout, trajectories, variants):
    """Compare variants on identical inputs."""
    names = [name.strip() for name in variants.split(',') if name.strip()]
    unknown = [name for name in names if name not in settings.VARIANTS]
    if unknown or not names:
        raise InvalidConfig(f"unknown variant(s) {unknown}, expected some of {settings.VARIANTS}")
    users = app.load_users(viewports, trace, layout)
    return app.compare(users, app.load_objects(trajectories), names)


@cli.command()
@user_inputs
@click.option('--trajectories', '-t', help='Trajectory CSV shared by all users')
@click.option('--durations', default=','.join(str(s) for s in settings.CHUNK_SWEEP_SECONDS), show_default=True,
              help='Comma-separated chunk durations in seconds')
@config_options
@_command
def sweep(app, viewports, trace, layout, trajectories, durations):
    """Run the configured variant at several chunk durations."""
    try:
        seconds = [float(value) for value in durations.split(',') if value.strip()]
    except ValueError:
        raise InvalidConfig(f"--durations must be comma-separated numbers, got {durations!r}")
    if not seconds:
        raise InvalidConfig("--durations is empty")
    users = app.load_users(viewports, trace, layout)
    return app.sweep(users, app.load_objects(trajectories), seconds)


@cli.command()
@click.option('--scenario', '-s', type=click.Choice(SCENARIOS), default=SCENARIOS[0], show_default=True, help='Scenario')
@click.option('--duration', type=float, default=settings.SYNTH_DURATION_SECONDS, show_default=True, help='Duration in seconds')
@click.option('--noise', type=float, default=settings.SYNTH_NOISE_PX, show_default=True, help='Viewport noise stddev in pixels')
@click.option('--users', type=int, default=1, show_default=True, help='Number of users')
@click.option('--distractors', type=int, default=0, show_default=True, help='Extra objects the viewport ignores')
@config_options
@_command
def synth(app, scenario, duration, noise, users, distractors):
    """Generate a synthetic scenario (viewports, trajectories, detections)."""
    cfg = app.cfg
    spec = ScenarioSpec(
        name=scenario, duration_seconds=duration, fps=cfg.fps, width=cfg.width, height=cfg.height,
        seed=cfg.seed, noise_px=noise, users=users, distractors=distractors)
    return app.synth(spec)


if __name__ == '__main__':
    cli()
