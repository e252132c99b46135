"""Spatio-temporal transformer denoiser (numpy forward) with attention hooks.

Tokens: one per latent cell, ordered frame-major with in-frame index
p = y * w + x, so the joint attention matrix is (f*n) x (f*n). Hooks observe
each layer's post-softmax attention per head and may rewrite it before the
value-weighted sum; a capture object can record per-layer queries and keys
for attention-derived masking.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import NoCheckpoint, ShapeError
from .config import ModelConfig
from .layers import gelu, layer_norm, time_embedding


def denoiser_weight_names(config: ModelConfig) -> tuple[str, ...]:
    names = [
        "den.embed.w", "den.embed.b",
        "den.pe_frame", "den.pe_spatial",
        "den.time.fc1.w", "den.time.fc1.b",
        "den.time.fc2.w", "den.time.fc2.b",
        "den.ln_f.g", "den.ln_f.b",
        "den.head.w", "den.head.b",
    ]
    for i in range(config.layers):
        p = f"den.blocks.{i}."
        names += [
            p + "ln1.g", p + "ln1.b", p + "qkv.w", p + "qkv.b",
            p + "proj.w", p + "proj.b", p + "ln2.g", p + "ln2.b",
            p + "fc1.w", p + "fc1.b", p + "fc2.w", p + "fc2.b",
        ]
    return tuple(names)


def check_denoiser_weights(weights: dict, config: ModelConfig) -> None:
    missing = [n for n in denoiser_weight_names(config) if n not in weights]
    if missing:
        raise NoCheckpoint(f"denoiser weights missing: {missing[:3]}...")


@dataclass
class AttentionCapture:
    """Records per-layer queries and keys (head-split) during one forward."""

    queries: list = field(default_factory=list)  # per layer: (heads, N, dh)
    keys: list = field(default_factory=list)

    def record(self, q: np.ndarray, k: np.ndarray) -> None:
        self.queries.append(q)
        self.keys.append(k)


def denoise_step(
    weights: dict,
    config: ModelConfig,
    z_t: np.ndarray,
    t: int,
    hooks=(),
    capture: AttentionCapture | None = None,
) -> np.ndarray:
    """One denoiser forward: predicts the noise eps_hat in z_t at step t."""
    check_denoiser_weights(weights, config)
    if z_t.ndim != 4 or z_t.shape[3] != config.channels:
        raise ShapeError(f"expected (f,h,w,{config.channels}) latent, got {z_t.shape}")
    f, h, w, c = z_t.shape
    if f > config.grid_frames or h > config.grid_h or w > config.grid_w:
        raise ShapeError(
            f"latent {z_t.shape} exceeds the positional grid "
            f"({config.grid_frames},{config.grid_h},{config.grid_w})"
        )
    n = h * w
    N = f * n
    heads, dh, D = config.heads, config.head_dim, config.dim

    x = z_t.reshape(N, c).astype(np.float32) @ weights["den.embed.w"] + weights["den.embed.b"]
    pe_s = weights["den.pe_spatial"][:h, :w].reshape(n, D)
    pe = (weights["den.pe_frame"][:f, None, :] + pe_s[None, :, :]).reshape(N, D)
    temb = time_embedding(t, D) @ weights["den.time.fc1.w"] + weights["den.time.fc1.b"]
    temb = np.maximum(temb, 0.0) @ weights["den.time.fc2.w"] + weights["den.time.fc2.b"]
    x = x + pe + temb

    scale = np.float32(1.0 / np.sqrt(dh))
    for layer in range(config.layers):
        p = f"den.blocks.{layer}."
        hdn = layer_norm(x, weights[p + "ln1.g"], weights[p + "ln1.b"])
        qkv = hdn @ weights[p + "qkv.w"] + weights[p + "qkv.b"]
        qkv = qkv.reshape(N, 3, heads, dh).transpose(1, 2, 0, 3)  # (3, heads, N, dh)
        q, k, v = qkv[0] * scale, qkv[1], qkv[2]
        if capture is not None:
            capture.record(q.copy() / scale, k.copy())
        att = q @ k.transpose(0, 2, 1)
        att -= att.max(axis=2, keepdims=True)
        np.exp(att, out=att)
        att /= att.sum(axis=2, keepdims=True)
        if hooks:
            for head in range(heads):
                a_head = att[head]
                for hook in hooks:
                    result = hook(layer, head, a_head)
                    if result is not None:
                        a_head = result
                att[head] = a_head
        out = (att @ v).transpose(1, 0, 2).reshape(N, D)
        x = x + out @ weights[p + "proj.w"] + weights[p + "proj.b"]
        hdn = layer_norm(x, weights[p + "ln2.g"], weights[p + "ln2.b"])
        hdn = gelu(hdn @ weights[p + "fc1.w"] + weights[p + "fc1.b"])
        x = x + hdn @ weights[p + "fc2.w"] + weights[p + "fc2.b"]

    x = layer_norm(x, weights["den.ln_f.g"], weights["den.ln_f.b"])
    eps_hat = x @ weights["den.head.w"] + weights["den.head.b"]
    return eps_hat.reshape(f, h, w, c).astype(np.float32)
