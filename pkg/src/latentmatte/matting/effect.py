"""Attention-derived effect masks: find the pixels an object influences.

One noising/denoising step is enough: the captured attention already says
which tokens (shadows, reflections) look at the object's tokens. Masked-key
softmax turns that into a per-token object-affinity score.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DegenerateMask, EmptyMask, ConstantInput, MissingSoftMask
from ..numerics import add_noise, histogram_256, otsu_threshold, quantize_256, save_tensor, load_tensor
from ..scene.io import load_mask_video, save_mask_video


@dataclass
class EffectMask:
    """Per-latent-frame object+effects masks.

    soft: (f, h, w) float32 in [0,1], minmax-normalized per frame; None when
    only a binary mask is known. binary: (f, h, w) bool, the per-frame Otsu
    split of soft. thresholds: the per-frame Otsu cut as a fraction of 1.
    """

    binary: np.ndarray
    soft: np.ndarray | None = None
    thresholds: np.ndarray | None = None

    def to_pixel(self, temporal: int = 2, spatial: int = 4) -> np.ndarray:
        """Nearest-neighbor upsample of the binary mask to pixel resolution."""
        out = np.repeat(self.binary, temporal, axis=0)
        out = np.repeat(out, spatial, axis=1)
        return np.repeat(out, spatial, axis=2)

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        save_mask_video(path / "binary", self.binary)
        if self.soft is not None:
            save_tensor(path / "soft.vt", self.soft)

    @classmethod
    def load(cls, path: str | Path) -> "EffectMask":
        path = Path(path)
        binary = load_mask_video(path / "binary")
        soft = load_tensor(path / "soft.vt") if (path / "soft.vt").exists() else None
        return cls(binary=binary, soft=soft)


def effect_mask_from_capture(capture, latent_object_mask: np.ndarray, head_dim: int) -> EffectMask:
    """Reduce captured attention to per-frame effect masks.

    Per layer and latent frame, keys outside the object mask are zeroed
    (their logits become exactly 0), the in-frame attention is re-softmaxed,
    and each query's mass on object keys becomes its score. Scores average
    over layers and heads, then are normalized and Otsu-binarized per frame.
    """
    mask = np.asarray(latent_object_mask, dtype=bool)
    f, h, w = mask.shape
    n = h * w
    flat = mask.reshape(f, n)
    if not flat.any():
        raise EmptyMask("latent object mask is empty")

    scores = np.zeros((f, n), dtype=np.float64)
    count = 0
    for q_all, k_all in zip(capture.queries, capture.keys):
        heads = q_all.shape[0]
        for i in range(f):
            sl = slice(i * n, (i + 1) * n)
            q = q_all[:, sl, :]
            k = k_all[:, sl, :] * flat[i][None, :, None]
            logits = (q @ k.transpose(0, 2, 1)) / np.sqrt(np.float32(head_dim))
            logits -= logits.max(axis=2, keepdims=True)
            e = np.exp(logits, dtype=np.float64)
            att = e / e.sum(axis=2, keepdims=True)
            scores[i] += att[:, :, flat[i]].sum(axis=2).sum(axis=0)
        count += heads
    scores /= count

    soft = np.zeros((f, n), dtype=np.float32)
    binary = np.zeros((f, n), dtype=bool)
    thresholds = np.zeros(f, dtype=np.float32)
    for i in range(f):
        if flat[i].all():
            # every key is an object key, so every query's mass is 1
            soft[i] = 1.0
            binary[i] = True
            thresholds[i] = 0.0
            continue
        lo, hi = scores[i].min(), scores[i].max()
        norm = (scores[i] - lo) / (hi - lo) if hi > lo else np.zeros(n)
        soft[i] = norm.astype(np.float32)
        bins = quantize_256(soft[i])
        try:
            t = otsu_threshold(histogram_256(soft[i]))
        except ConstantInput as err:
            raise DegenerateMask(f"latent frame {i} has a constant affinity map") from err
        binary[i] = bins >= t
        thresholds[i] = t / 256.0
    return EffectMask(
        binary=binary.reshape(f, h, w),
        soft=soft.reshape(f, h, w),
        thresholds=thresholds,
    )


def extract_effect_mask(model, video: np.ndarray, m_obj: np.ndarray, t_mid: int | None = None,
                        rng=None) -> EffectMask:
    """Object+effects mask from one noising/denoising step of the video."""
    from ..numerics import SeededRng
    from .latentmask import latent_mask_encode
    from ..model import AttentionCapture

    m_obj = np.asarray(m_obj, dtype=bool)
    if not m_obj.any():
        raise EmptyMask("object mask is empty")
    latent_mask = latent_mask_encode(model, m_obj)

    sched = model.schedule()
    if t_mid is None:
        t_mid = sched.T // 2
    if rng is None:
        rng = SeededRng(0)
    z = model.encode(video)
    z_t, _ = add_noise(z, t_mid, sched, rng)
    capture = AttentionCapture()
    model.denoise_step(z_t, t_mid, capture=capture)
    return effect_mask_from_capture(capture, latent_mask, model.config.head_dim)
