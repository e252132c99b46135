"""Attention-entry rewriting: consensus means written over masked queries."""

import numpy as np

from ..errors import InsufficientCorrespondences, ShapeError
from .plan import GuidancePlan


def _check_square(a: np.ndarray, total: int | None = None) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"attention must be square, got {a.shape}")
    if total is not None and a.shape[0] != total:
        raise ShapeError(f"attention is {a.shape[0]} tokens, plan expects {total}")


def _pair_mean(a: np.ndarray, globals_: list[int]) -> float:
    if len(globals_) < 2:
        raise InsufficientCorrespondences(f"need at least 2 tokens, got {len(globals_)}")
    idx = np.asarray(globals_, dtype=np.int64)
    sub = a[np.ix_(idx, idx)].astype(np.float64)
    m = idx.size
    return float((sub.sum() - np.trace(sub)) / (m * (m - 1)))


def mean_temporal_attention(a: np.ndarray, c_set, tokens_per_frame: int) -> float:
    """Mean attention over all ordered cross-frame pairs of the background set.

    c_set is a list of (latent frame, token index) with at most one entry per
    frame, so every ordered pair crosses frames.
    """
    _check_square(a)
    frames = [jf for jf, _ in c_set]
    if len(set(frames)) != len(frames):
        raise ShapeError("temporal set must hold at most one token per frame")
    return _pair_mean(a, [jf * tokens_per_frame + t for jf, t in c_set])


def mean_spatial_attention(a: np.ndarray, s_set, frame: int, tokens_per_frame: int) -> float:
    """Mean attention over all ordered pairs of in-frame surround tokens."""
    _check_square(a)
    return _pair_mean(a, [frame * tokens_per_frame + t for t in s_set])


def _segment_means(a: np.ndarray, compiled) -> np.ndarray:
    pair_rows, pair_cols, pair_seg, pair_counts = compiled[:4]
    sums = np.bincount(pair_seg, weights=a[pair_rows, pair_cols].astype(np.float64),
                       minlength=pair_counts.size)
    return sums / pair_counts


def _write(a: np.ndarray, compiled, means: np.ndarray, symmetric: bool) -> np.ndarray:
    write_rows, write_cols, write_seg = compiled[4:]
    vals = means[write_seg].astype(a.dtype)
    a[write_rows, write_cols] = vals
    if symmetric:
        a[write_cols, write_rows] = vals
    return write_rows


def _renormalize(a: np.ndarray, rows: np.ndarray) -> None:
    rows = np.unique(rows)
    sums = a[rows].sum(axis=1, keepdims=True)
    a[rows] = a[rows] / sums


def _apply(a: np.ndarray, plan: GuidancePlan, compiled, symmetric_rows_too: bool):
    if compiled[3].size == 0:
        return a
    means = _segment_means(a, compiled)
    rows = _write(a, compiled, means, plan.symmetric)
    if plan.renormalize_rows:
        touched = rows
        if plan.symmetric:
            touched = np.concatenate([rows, compiled[5]])
        _renormalize(a, touched)
    return a


def apply_temporal_guidance(a: np.ndarray, plan: GuidancePlan) -> np.ndarray:
    """Replace each planned query's cross-frame background entries with their
    mean pairwise attention. Every unplanned entry is returned bit-identical."""
    _check_square(a, plan.total_tokens)
    return _apply(a.copy(), plan, plan._temporal, plan.symmetric)


def apply_spatial_guidance(a: np.ndarray, plan: GuidancePlan) -> np.ndarray:
    """In-frame analogue of apply_temporal_guidance over the surround sets."""
    _check_square(a, plan.total_tokens)
    return _apply(a.copy(), plan, plan._spatial, plan.symmetric)


def make_guidance_hook(plans):
    """Attention hook applying the temporal rewrite then the spatial rewrite.

    plans may be a single GuidancePlan (used at every layer), a list indexed
    by layer, or a dict layer -> plan; a missing or None entry leaves that
    layer untouched. The hook edits the head's matrix in place and returns it.
    """
    if plans is None:
        return lambda layer, head, a: None

    def resolve(layer: int):
        if isinstance(plans, GuidancePlan):
            return plans
        if isinstance(plans, dict):
            return plans.get(layer)
        return plans[layer] if layer < len(plans) else None

    def hook(layer: int, head: int, a: np.ndarray):
        plan = resolve(layer)
        if plan is None or plan.is_empty:
            return None
        _check_square(a, plan.total_tokens)
        _apply(a, plan, plan._temporal, plan.symmetric)
        _apply(a, plan, plan._spatial, plan.symmetric)
        return a

    return hook
