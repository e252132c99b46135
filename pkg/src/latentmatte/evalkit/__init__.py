"""Metrics, benchmark runner, and ablation grids."""

from .bench import (
    ABLATION_KINDS,
    DENSITY_GRID,
    MethodSpec,
    RemovalCache,
    method_spec,
    model_fingerprint,
    run_ablation,
    run_benchmark,
)
from .metrics import INFINITE, psnr, psnr_masked, ssim, temporal_consistency
from .report import MetricReport, MetricRow, SceneScore, report_to_csv, report_to_summary_csv, report_to_text

__all__ = [
    "INFINITE",
    "psnr",
    "psnr_masked",
    "ssim",
    "temporal_consistency",
    "MetricReport",
    "MetricRow",
    "SceneScore",
    "report_to_csv",
    "report_to_summary_csv",
    "report_to_text",
    "MethodSpec",
    "method_spec",
    "RemovalCache",
    "model_fingerprint",
    "run_benchmark",
    "run_ablation",
    "ABLATION_KINDS",
    "DENSITY_GRID",
]
