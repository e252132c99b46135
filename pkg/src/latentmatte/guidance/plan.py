"""Guidance plans: which attention entries get rewritten, per query token."""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..numerics import load_tensor, save_tensor
from ..tracking import TokenCorrespondence


def _compile(queries: list[int], sets: list[list[int]]):
    """Flatten per-query key sets into gather/write index arrays.

    Returns (pair_rows, pair_cols, pair_seg, pair_counts, write_rows,
    write_cols, write_seg). Means come from a[pair_rows, pair_cols] summed by
    segment; writes scatter means[write_seg] into a[write_rows, write_cols].
    """
    pr, pc, ps, wr, wc, ws, counts = [], [], [], [], [], [], []
    for qi, (q, keys) in enumerate(zip(queries, sets)):
        m = len(keys)
        counts.append(m * (m - 1))
        for a in keys:
            for b in keys:
                if a != b:
                    pr.append(a)
                    pc.append(b)
                    ps.append(qi)
        for k in keys:
            wr.append(q)
            wc.append(k)
            ws.append(qi)
    to = lambda v: np.asarray(v, dtype=np.int64)
    return to(pr), to(pc), to(ps), to(counts), to(wr), to(wc), to(ws)


@dataclass
class GuidancePlan:
    """Entry-rewrite schedule for one removal.

    temporal_queries[i] is a global token index whose row gets its
    cross-frame background entries (temporal_sets[i], global indices)
    replaced by their mean pairwise attention. spatial_* is the in-frame
    analogue. Global token index = latent_frame * tokens_per_frame + token.
    """

    tokens_per_frame: int
    total_tokens: int
    temporal_queries: list[int] = field(default_factory=list)
    temporal_sets: list[list[int]] = field(default_factory=list)
    spatial_queries: list[int] = field(default_factory=list)
    spatial_sets: list[list[int]] = field(default_factory=list)
    renormalize_rows: bool = False
    symmetric: bool = False

    def __post_init__(self):
        for q, keys in zip(
            list(self.temporal_queries) + list(self.spatial_queries),
            list(self.temporal_sets) + list(self.spatial_sets),
        ):
            if not 0 <= q < self.total_tokens:
                raise ConfigError(f"query token {q} out of range")
            if len(keys) < 2:
                raise ConfigError("every planned key set needs at least 2 tokens")
            for k in keys:
                if not 0 <= k < self.total_tokens:
                    raise ConfigError(f"key token {k} out of range")
        self._temporal = _compile(self.temporal_queries, self.temporal_sets)
        self._spatial = _compile(self.spatial_queries, self.spatial_sets)

    @property
    def is_empty(self) -> bool:
        return not self.temporal_queries and not self.spatial_queries

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        header = [
            f"tokens_per_frame = {self.tokens_per_frame}",
            f"total_tokens = {self.total_tokens}",
            f"renormalize_rows = {int(self.renormalize_rows)}",
            f"symmetric = {int(self.symmetric)}",
        ]
        (path / "plan.txt").write_text("\n".join(header) + "\n")
        for name, queries, sets in (
            ("temporal", self.temporal_queries, self.temporal_sets),
            ("spatial", self.spatial_queries, self.spatial_sets),
        ):
            flat = [k for keys in sets for k in keys]
            offsets = np.cumsum([0] + [len(keys) for keys in sets])
            save_tensor(path / f"{name}_queries.vt", np.asarray(queries, dtype=np.int64).astype(np.float32))
            save_tensor(path / f"{name}_keys.vt", np.asarray(flat, dtype=np.int64).astype(np.float32))
            save_tensor(path / f"{name}_offsets.vt", offsets.astype(np.float32))

    @classmethod
    def load(cls, path: str | Path) -> "GuidancePlan":
        path = Path(path)
        fields = {}
        for line in (path / "plan.txt").read_text().splitlines():
            if "=" in line:
                k, v = line.split("=", 1)
                fields[k.strip()] = int(v.strip())
        parts = {}
        for name in ("temporal", "spatial"):
            queries = load_tensor(path / f"{name}_queries.vt").astype(np.int64).tolist()
            keys = load_tensor(path / f"{name}_keys.vt").astype(np.int64)
            offsets = load_tensor(path / f"{name}_offsets.vt").astype(np.int64)
            sets = [keys[offsets[i] : offsets[i + 1]].tolist() for i in range(len(queries))]
            parts[name] = (queries, sets)
        return cls(
            tokens_per_frame=fields["tokens_per_frame"],
            total_tokens=fields["total_tokens"],
            temporal_queries=parts["temporal"][0],
            temporal_sets=parts["temporal"][1],
            spatial_queries=parts["spatial"][0],
            spatial_sets=parts["spatial"][1],
            renormalize_rows=bool(fields["renormalize_rows"]),
            symmetric=bool(fields["symmetric"]),
        )


def make_plan(
    correspondences: list[TokenCorrespondence],
    latent_frames: int,
    tokens_per_frame: int,
    use_temporal: bool = True,
    use_spatial: bool = True,
    renormalize_rows: bool = False,
    symmetric: bool = False,
) -> GuidancePlan:
    """Build a plan from token correspondences.

    Queries whose cross-frame set has fewer than 2 tokens contribute no
    temporal rewrite; in-frame support alone then carries them. Sets below
    size 2 are dropped rather than raised, so a partially trackable scene
    still produces a usable plan.
    """
    n = tokens_per_frame
    tq, ts, sq, ss = [], [], [], []
    for tc in correspondences:
        qf, qp = tc.query
        q_global = qf * n + qp
        if use_temporal and len(tc.background) >= 2:
            tq.append(q_global)
            ts.append([jf * n + token for jf, token in tc.background])
        if use_spatial and len(tc.surround) >= 2:
            sq.append(q_global)
            ss.append([qf * n + token for token in tc.surround])
    return GuidancePlan(
        tokens_per_frame=n,
        total_tokens=latent_frames * n,
        temporal_queries=tq,
        temporal_sets=ts,
        spatial_queries=sq,
        spatial_sets=ss,
        renormalize_rows=renormalize_rows,
        symmetric=symmetric,
    )
