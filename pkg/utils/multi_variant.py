from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence

from tqdm import tqdm

from config.experiment import ExperimentConfig
from config.settings import settings
from geometry.projection import EquirectPoint
from predictors.base import ObjectFrame
from utils import console
from utils.experiment import RunReport, run_users


@dataclass
class Comparison:
    """RunReports of several variants on identical inputs, in run order."""

    reports: Dict[str, RunReport] = field(default_factory=dict)

    def rows(self) -> List[List[Any]]:
        """One row per variant, columns as settings.COMPARISON_HEADER."""
        rows = []
        for variant, report in self.reports.items():
            rows.append([
                variant,
                len(report.users),
                report.chunks,
                report.mean_tile_error,
                report.mean_qoe,
                report.mean_component('q1'),
                report.mean_component('q2'),
                report.mean_component('q3'),
                report.mean_component('q4'),
                report.mean_object_contribution,
            ])
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            'variants': [dict(zip(settings.COMPARISON_HEADER, row)) for row in self.rows()],
            'reports': {variant: report.to_dict() for variant, report in self.reports.items()},
        }

    def latency(self) -> Dict[str, Any]:
        return {variant: report.latency_summary() for variant, report in self.reports.items()}


@dataclass
class SweepResult:
    """PARIMA runs at several chunk durations."""

    reports: List[RunReport] = field(default_factory=list)

    def rows(self) -> List[List[Any]]:
        """One row per duration, columns as settings.SWEEP_HEADER."""
        return [[
            report.config.chunk_seconds,
            report.config.chunk_size,
            report.chunks,
            report.mean_qoe,
            report.mean_qoe_per_chunk,
            report.mean_tile_error,
        ] for report in self.reports]

    def latency(self) -> Dict[str, Any]:
        return {str(report.config.chunk_seconds): report.latency_summary() for report in self.reports}


class MultiVariantRunner:
    """
    Runs several streaming variants over the same users and objects.
    """

    def __init__(self, cfg: ExperimentConfig, variants: Optional[Sequence[str]] = None):
        self.cfg = cfg
        self.variants = list(variants) if variants else list(settings.DEFAULT_VARIANTS)

    def run_all(
        self, users: Mapping[str, Sequence[EquirectPoint]], object_frames: Sequence[Optional[ObjectFrame]]
    ) -> Comparison:
        """
        Run every variant on identical inputs and seeds.

        Args:
            users: Viewport trace per user id
            object_frames: Object centroids shared by all users

        Returns:
            Comparison keyed by variant name; a variant listed twice runs once
        """
        comparison = Comparison()
        for variant in tqdm(self.variants, desc="Variants", disable=console.is_quiet()):
            if variant in comparison.reports:
                continue
            cfg = self.cfg.with_overrides(variant=variant)
            console.detail(f"Running {variant} on {len(users)} user(s)...")
            report = run_users(cfg, users, object_frames)
            comparison.reports[variant] = report
            error = report.mean_tile_error
            console.detail(
                f"  {variant}: Q = {report.mean_qoe:.3f}"
                + (f", tile error = {error:.3f}" if error is not None else ""))
        return comparison


def compare_variants(
    cfg_base: ExperimentConfig,
    variants: Sequence[str],
    users: Mapping[str, Sequence[EquirectPoint]],
    object_frames: Sequence[Optional[ObjectFrame]],
) -> Comparison:
    """Shorthand for MultiVariantRunner(cfg_base, variants).run_all(users, object_frames)."""
    return MultiVariantRunner(cfg_base, variants).run_all(users, object_frames)


def sweep_chunk_sizes(
    cfg: ExperimentConfig,
    chunk_seconds_list: Sequence[float],
    users: Mapping[str, Sequence[EquirectPoint]],
    object_frames: Sequence[Optional[ObjectFrame]],
) -> SweepResult:
    """
    Run the configured variant at each chunk duration.

    The warm-up is kept, but it is raised to at least one chunk when a
    duration exceeds it.

    Args:
        cfg: Base configuration
        chunk_seconds_list: Chunk durations in seconds
        users: Viewport trace per user id
        object_frames: Object centroids shared by all users

    Returns:
        SweepResult in the order of chunk_seconds_list
    """
    result = SweepResult()
    for seconds in tqdm(chunk_seconds_list, desc="Chunk sizes", disable=console.is_quiet()):
        run_cfg = cfg.with_overrides(chunk_seconds=seconds, warmup_seconds=max(cfg.warmup_seconds, seconds))
        result.reports.append(run_users(run_cfg, users, object_frames))
    return result
