"""Track containers shared by the synthetic-scene oracle and real trackers."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class TrackSet:
    """Per-source-point positions across all frames.

    positions[s, j] is the (x, y) location of source point s in frame j;
    valid[s, j] says whether that correspondence is usable. The source's own
    row (j == source_frames[s]) holds the query position itself.
    """

    source_frames: np.ndarray  # (n,) int64
    positions: np.ndarray      # (n, F, 2) float32, (x, y)
    valid: np.ndarray          # (n, F) bool
    frames: int

    @property
    def n_sources(self) -> int:
        return int(self.source_frames.size)

    def source_xy(self, s: int) -> tuple[float, float]:
        i = int(self.source_frames[s])
        return float(self.positions[s, i, 0]), float(self.positions[s, i, 1])

    def correspondences(self, s: int):
        """Valid (frame, x, y) entries of source s, excluding its own frame."""
        i = int(self.source_frames[s])
        out = []
        for j in range(self.frames):
            if j != i and self.valid[s, j]:
                out.append((j, float(self.positions[s, j, 0]), float(self.positions[s, j, 1])))
        return out

    def save(self, path: str | Path) -> None:
        """Line records `point_id, frame, x, y, valid`; the first line of each
        point is its source frame."""
        lines = []
        for s in range(self.n_sources):
            i = int(self.source_frames[s])
            order = [i] + [j for j in range(self.frames) if j != i]
            for j in order:
                x, y = self.positions[s, j]
                lines.append(f"{s}, {j}, {x:.4f}, {y:.4f}, {int(self.valid[s, j])}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TrackSet":
        by_point: dict[int, list[tuple[int, float, float, bool]]] = {}
        order: list[int] = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            pid_s, frame_s, x_s, y_s, valid_s = [p.strip() for p in line.split(",")]
            pid = int(pid_s)
            if pid not in by_point:
                by_point[pid] = []
                order.append(pid)
            by_point[pid].append((int(frame_s), float(x_s), float(y_s), valid_s == "1"))
        n = len(order)
        frames = max(max(j for j, *_ in recs) for recs in by_point.values()) + 1
        source_frames = np.zeros(n, dtype=np.int64)
        positions = np.zeros((n, frames, 2), dtype=np.float32)
        valid = np.zeros((n, frames), dtype=bool)
        for s, pid in enumerate(order):
            recs = by_point[pid]
            source_frames[s] = recs[0][0]
            for j, x, y, ok in recs:
                positions[s, j] = (x, y)
                valid[s, j] = ok
        return cls(source_frames=source_frames, positions=positions, valid=valid, frames=frames)
