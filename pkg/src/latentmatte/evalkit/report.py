"""Tabular metric reports with CSV and aligned plain-text rendering."""

from dataclasses import dataclass, field

import numpy as np

from .metrics import INFINITE


@dataclass
class SceneScore:
    scene: str
    seed: int
    psnr: float
    ssim: float
    temporal: float
    psnr_unmasked: float


@dataclass
class MetricRow:
    label: str
    scores: list[SceneScore] = field(default_factory=list)

    def _mean(self, name: str) -> float:
        vals = [getattr(s, name) for s in self.scores]
        if any(v == INFINITE for v in vals):
            return INFINITE
        return float(np.mean(vals)) if vals else float("nan")

    @property
    def mean_psnr(self) -> float:
        return self._mean("psnr")

    @property
    def mean_ssim(self) -> float:
        return self._mean("ssim")

    @property
    def mean_temporal(self) -> float:
        return self._mean("temporal")

    @property
    def mean_psnr_unmasked(self) -> float:
        return self._mean("psnr_unmasked")


@dataclass
class MetricReport:
    rows: list[MetricRow]
    fingerprint: str
    seeds: list[int]

    def row(self, label: str) -> MetricRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)


def _fmt(v: float) -> str:
    if v == INFINITE:
        return "inf"
    return f"{v:.4f}"


def report_to_csv(report: MetricReport) -> str:
    lines = ["label,scene,seed,psnr,ssim,temporal,psnr_unmasked"]
    for row in report.rows:
        for s in row.scores:
            lines.append(f"{row.label},{s.scene},{s.seed},{_fmt(s.psnr)},"
                         f"{_fmt(s.ssim)},{_fmt(s.temporal)},{_fmt(s.psnr_unmasked)}")
        lines.append(f"{row.label},mean,,{_fmt(row.mean_psnr)},{_fmt(row.mean_ssim)},"
                     f"{_fmt(row.mean_temporal)},{_fmt(row.mean_psnr_unmasked)}")
    return "\n".join(lines) + "\n"


def report_to_summary_csv(report: MetricReport) -> str:
    """One data line per method row, means only."""
    lines = ["label,psnr,ssim,temporal,psnr_unmasked"]
    for row in report.rows:
        lines.append(f"{row.label},{_fmt(row.mean_psnr)},{_fmt(row.mean_ssim)},"
                     f"{_fmt(row.mean_temporal)},{_fmt(row.mean_psnr_unmasked)}")
    return "\n".join(lines) + "\n"


def report_to_text(report: MetricReport) -> str:
    headers = ["label", "psnr", "ssim", "temporal", "psnr_unmasked", "scenes"]
    body = [
        [row.label, _fmt(row.mean_psnr), _fmt(row.mean_ssim),
         _fmt(row.mean_temporal), _fmt(row.mean_psnr_unmasked), str(len(row.scores))]
        for row in report.rows
    ]
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h)
              for i, h in enumerate(headers)]
    def line(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(r) for r in body)
    out.append(f"fingerprint: {report.fingerprint}")
    return "\n".join(out) + "\n"
