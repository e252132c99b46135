"""Trainers for the VAE-lite and the denoiser (torch, CPU).

Training is the only place torch appears; the trained weights are exported to
plain float32 arrays and all inference runs in numpy. Both trainers are
deterministic per seed: single-threaded torch, seeded init, seeded batch
order.
"""

import math

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import BudgetZero
from ..numerics import NoiseSchedule, SeededRng
from .config import ModelConfig
from .vae import vae_encode

_silu = F.silu


def _setup_torch(seed: int) -> None:
    torch.set_num_threads(1)
    torch.manual_seed(seed)


class TorchVae(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        w, c = config.vae_width, config.channels
        self.enc1 = nn.Conv2d(6, w, 3, stride=2, padding=1)
        self.enc2 = nn.Conv2d(w, 2 * w, 3, stride=2, padding=1)
        self.enc3 = nn.Conv2d(2 * w, c, 1, stride=1, padding=0)
        self.dec1 = nn.Conv2d(c, 2 * w, 1, stride=1, padding=0)
        self.dec2 = nn.Conv2d(2 * w, w, 3, stride=1, padding=1)
        self.dec3 = nn.Conv2d(w, w, 3, stride=1, padding=1)
        self.dec4 = nn.Conv2d(w, 6, 3, stride=1, padding=1)

    def encode(self, x):
        x = _silu(self.enc1(x))
        x = _silu(self.enc2(x))
        return self.enc3(x)

    def decode(self, z):
        x = _silu(self.dec1(z))
        x = F.interpolate(x, scale_factor=2, mode="nearest")
        x = _silu(self.dec2(x))
        x = F.interpolate(x, scale_factor=2, mode="nearest")
        x = _silu(self.dec3(x))
        return self.dec4(x)

    def forward(self, x):
        return self.decode(self.encode(x))


def export_vae_weights(model: TorchVae, latent_mean=None, latent_std=None) -> dict:
    out = {}
    mapping = {
        "vae.enc.conv1": model.enc1, "vae.enc.conv2": model.enc2, "vae.enc.conv3": model.enc3,
        "vae.dec.conv1": model.dec1, "vae.dec.conv2": model.dec2, "vae.dec.conv3": model.dec3,
        "vae.dec.conv4": model.dec4,
    }
    for name, mod in mapping.items():
        out[name + ".w"] = mod.weight.detach().numpy().astype(np.float32).copy()
        out[name + ".b"] = mod.bias.detach().numpy().astype(np.float32).copy()
    c = model.enc3.out_channels
    out["vae.latent_mean"] = (
        np.zeros(c, dtype=np.float32) if latent_mean is None else latent_mean.astype(np.float32)
    )
    out["vae.latent_std"] = (
        np.ones(c, dtype=np.float32) if latent_std is None else latent_std.astype(np.float32)
    )
    return out


class TorchDenoiser(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        D, c = config.dim, config.channels
        self.embed = nn.Linear(c, D)
        self.pe_frame = nn.Parameter(torch.randn(config.grid_frames, D) * 0.02)
        self.pe_spatial = nn.Parameter(torch.randn(config.grid_h, config.grid_w, D) * 0.02)
        self.time_fc1 = nn.Linear(D, D)
        self.time_fc2 = nn.Linear(D, D)
        self.blocks = nn.ModuleList()
        for _ in range(config.layers):
            blk = nn.Module()
            blk.ln1 = nn.LayerNorm(D)
            blk.qkv = nn.Linear(D, 3 * D)
            blk.proj = nn.Linear(D, D)
            blk.ln2 = nn.LayerNorm(D)
            blk.fc1 = nn.Linear(D, config.mlp_ratio * D)
            blk.fc2 = nn.Linear(config.mlp_ratio * D, D)
            self.blocks.append(blk)
        self.ln_f = nn.LayerNorm(D)
        self.head = nn.Linear(D, c)

    def time_embedding(self, t: torch.Tensor) -> torch.Tensor:
        D = self.config.dim
        half = D // 2
        freqs = torch.exp(
            -math.log(10000.0) * torch.arange(half, dtype=torch.float32) / half
        )
        ang = t.float()[:, None] * freqs[None, :]
        return torch.cat([torch.sin(ang), torch.cos(ang)], dim=1)

    def forward(self, z_tokens: torch.Tensor, pe: torch.Tensor, t: torch.Tensor) -> torch.Tensor:
        """z_tokens: (B,N,c); pe: (B,N,D) or (1,N,D); t: (B,) step indices."""
        cfg = self.config
        B, N, _ = z_tokens.shape
        x = self.embed(z_tokens) + pe
        temb = self.time_fc2(F.relu(self.time_fc1(self.time_embedding(t))))
        x = x + temb[:, None, :]
        scale = 1.0 / math.sqrt(cfg.head_dim)
        for blk in self.blocks:
            h = blk.ln1(x)
            qkv = h.reshape(B, N, -1) @ blk.qkv.weight.t() + blk.qkv.bias
            qkv = qkv.reshape(B, N, 3, cfg.heads, cfg.head_dim).permute(2, 0, 3, 1, 4)
            q, k, v = qkv[0], qkv[1], qkv[2]
            att = torch.softmax((q @ k.transpose(-2, -1)) * scale, dim=-1)
            out = (att @ v).transpose(1, 2).reshape(B, N, -1)
            x = x + blk.proj(out)
            x = x + blk.fc2(F.gelu(blk.fc1(blk.ln2(x))))
        return self.head(self.ln_f(x))


def export_denoiser_weights(model: TorchDenoiser) -> dict:
    out = {
        "den.embed.w": model.embed.weight.detach().numpy().T.astype(np.float32).copy(),
        "den.embed.b": model.embed.bias.detach().numpy().astype(np.float32).copy(),
        "den.pe_frame": model.pe_frame.detach().numpy().astype(np.float32).copy(),
        "den.pe_spatial": model.pe_spatial.detach().numpy().astype(np.float32).copy(),
        "den.time.fc1.w": model.time_fc1.weight.detach().numpy().T.astype(np.float32).copy(),
        "den.time.fc1.b": model.time_fc1.bias.detach().numpy().astype(np.float32).copy(),
        "den.time.fc2.w": model.time_fc2.weight.detach().numpy().T.astype(np.float32).copy(),
        "den.time.fc2.b": model.time_fc2.bias.detach().numpy().astype(np.float32).copy(),
        "den.ln_f.g": model.ln_f.weight.detach().numpy().astype(np.float32).copy(),
        "den.ln_f.b": model.ln_f.bias.detach().numpy().astype(np.float32).copy(),
        "den.head.w": model.head.weight.detach().numpy().T.astype(np.float32).copy(),
        "den.head.b": model.head.bias.detach().numpy().astype(np.float32).copy(),
    }
    for i, blk in enumerate(model.blocks):
        p = f"den.blocks.{i}."
        out[p + "ln1.g"] = blk.ln1.weight.detach().numpy().astype(np.float32).copy()
        out[p + "ln1.b"] = blk.ln1.bias.detach().numpy().astype(np.float32).copy()
        out[p + "qkv.w"] = blk.qkv.weight.detach().numpy().T.astype(np.float32).copy()
        out[p + "qkv.b"] = blk.qkv.bias.detach().numpy().astype(np.float32).copy()
        out[p + "proj.w"] = blk.proj.weight.detach().numpy().T.astype(np.float32).copy()
        out[p + "proj.b"] = blk.proj.bias.detach().numpy().astype(np.float32).copy()
        out[p + "ln2.g"] = blk.ln2.weight.detach().numpy().astype(np.float32).copy()
        out[p + "ln2.b"] = blk.ln2.bias.detach().numpy().astype(np.float32).copy()
        out[p + "fc1.w"] = blk.fc1.weight.detach().numpy().T.astype(np.float32).copy()
        out[p + "fc1.b"] = blk.fc1.bias.detach().numpy().astype(np.float32).copy()
        out[p + "fc2.w"] = blk.fc2.weight.detach().numpy().T.astype(np.float32).copy()
        out[p + "fc2.b"] = blk.fc2.bias.detach().numpy().astype(np.float32).copy()
    return out


def _random_mask_pair(rng: SeededRng, h: int, w: int) -> np.ndarray:
    """A moving rectangle or disk rendered as a two-frame 0/1 RGB pair."""
    shape_disk = int(rng.integers(0, 2)) == 1
    size = int(rng.integers(5, max(6, min(h, w) // 2)))
    cx = int(rng.integers(size // 2, w - size // 2))
    cy = int(rng.integers(size // 2, h - size // 2))
    dx = int(rng.integers(-2, 3))
    dy = int(rng.integers(-2, 3))
    frames = []
    for step in range(2):
        m = np.zeros((h, w), dtype=np.float32)
        x0, y0 = cx + dx * step, cy + dy * step
        if shape_disk:
            yy, xx = np.mgrid[0:h, 0:w]
            m[(xx - x0) ** 2 + (yy - y0) ** 2 <= (size / 2) ** 2] = 1.0
        else:
            m[
                max(0, y0 - size // 2): y0 + size // 2,
                max(0, x0 - size // 2): x0 + size // 2,
            ] = 1.0
        frames.append(np.stack([m, m, m], axis=-1))
    return np.stack(frames)  # (2,H,W,3) in {0,1}


def _vae_sample_pool(scenes) -> list[np.ndarray]:
    pool = []
    for b in scenes:
        pool.append(b.composite)
        pool.append(b.background_gt)
    return pool


def train_vae(
    scenes,
    budget: int,
    seed: int = 0,
    config: ModelConfig | None = None,
    batch_size: int = 16,
    lr: float = 2e-3,
    mask_fraction: float = 0.15,
    log=None,
) -> tuple[dict, dict]:
    """Returns (weights, meta). Budget counts optimizer steps; 0 returns the
    seeded initialization with neutral latent stats."""
    if budget < 0:
        raise BudgetZero(f"negative training budget {budget}")
    config = config or ModelConfig()
    _setup_torch(seed)
    model = TorchVae(config)
    if budget == 0:
        return export_vae_weights(model), {"kind": "vae", "steps": "0", "seed": str(seed)}

    pool = _vae_sample_pool(scenes)
    rng = SeededRng(seed).child("vae-batches")
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, T_max=budget, eta_min=lr * 0.1)
    first_loss = last_loss = None
    for step in range(budget):
        batch = []
        for _ in range(batch_size):
            if float(rng.uniform(())) < mask_fraction:
                video = _random_mask_pair(rng, pool[0].shape[1], pool[0].shape[2])
                pair_idx = 0
            else:
                video = pool[int(rng.integers(0, len(pool)))]
                pair_idx = int(rng.integers(0, video.shape[0] // 2))
            pair = video[2 * pair_idx: 2 * pair_idx + 2]  # (2,H,W,3)
            batch.append(pair.transpose(0, 3, 1, 2).reshape(6, *pair.shape[1:3]))
        x = torch.from_numpy(np.stack(batch).astype(np.float32)) * 2.0 - 1.0
        recon = model(x)
        loss = F.mse_loss(recon, x)
        opt.zero_grad()
        loss.backward()
        opt.step()
        sched.step()
        if first_loss is None:
            first_loss = float(loss.detach())
        last_loss = float(loss.detach())
        if log and (step % 200 == 0 or step == budget - 1):
            log(f"vae step {step} loss {float(loss.detach()):.5f}")

    # latent stats over the scene pool (pre-normalization encoder outputs)
    model.eval()
    collected = []
    with torch.no_grad():
        for video in pool:
            pairs = video.reshape(video.shape[0] // 2, 2, *video.shape[1:3], 3)
            x = pairs.transpose(0, 1, 4, 2, 3).reshape(-1, 6, *video.shape[1:3])
            z = model.encode(torch.from_numpy(x.astype(np.float32)) * 2.0 - 1.0)
            collected.append(z.numpy())
    allz = np.concatenate(collected, axis=0)  # (n, c, h, w)
    mean = allz.mean(axis=(0, 2, 3)).astype(np.float32)
    std = (allz.std(axis=(0, 2, 3)) + 1e-6).astype(np.float32)
    weights = export_vae_weights(model, mean, std)
    meta = {
        "kind": "vae",
        "steps": str(budget),
        "seed": str(seed),
        "loss_start": f"{first_loss:.6f}",
        "loss_end": f"{last_loss:.6f}",
    }
    return weights, meta


def train_denoiser(
    scenes,
    vae_weights: dict,
    budget: int,
    seed: int = 0,
    config: ModelConfig | None = None,
    batch_size: int = 4,
    lr: float = 1e-3,
    crop: int = 8,
    full_tail_fraction: float = 0.2,
    full_batch_size: int = 2,
    log=None,
) -> tuple[dict, dict]:
    """Noise-prediction MSE on the VAE latents of the scene suite.

    Most steps run on spatial token crops (cheap); the final fraction runs at
    the full token count so attention sees inference-sized rows. Returns
    weights containing BOTH the vae and denoiser tensors (a usable bundle).
    """
    if budget < 0:
        raise BudgetZero(f"negative training budget {budget}")
    config = config or ModelConfig()
    _setup_torch(seed)
    model = TorchDenoiser(config)
    meta = {"kind": "bundle", "steps": str(budget), "seed": str(seed)}
    if budget == 0:
        weights = dict(vae_weights)
        weights.update(export_denoiser_weights(model))
        return weights, meta

    latents = []
    for b in scenes:
        for video in (b.composite, b.background_gt):
            latents.append(vae_encode(vae_weights, config, video))
    nsched = NoiseSchedule.linear(config.steps)
    alphas = torch.from_numpy(nsched.alphas.astype(np.float32))
    sigmas = torch.from_numpy(nsched.sigmas.astype(np.float32))

    rng = SeededRng(seed).child("den-batches")
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    lr_sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, T_max=budget, eta_min=lr * 0.1)
    pe_frame = model.pe_frame
    pe_spatial = model.pe_spatial
    full_tail = int(np.ceil(full_tail_fraction * budget))
    first_loss = last_loss = None

    for step in range(budget):
        full = step >= budget - full_tail
        bsz = full_batch_size if full else batch_size
        z0s, pes = [], []
        for _ in range(bsz):
            z = latents[int(rng.integers(0, len(latents)))]
            f, h, w, c = z.shape
            if full:
                y0 = x0 = 0
                hc, wc = h, w
            else:
                hc = wc = crop
                y0 = int(rng.integers(0, h - hc + 1))
                x0 = int(rng.integers(0, w - wc + 1))
            zc = z[:, y0: y0 + hc, x0: x0 + wc]
            z0s.append(torch.from_numpy(zc.reshape(f * hc * wc, c)))
            pe = pe_frame[:f, None, :] + pe_spatial[y0: y0 + hc, x0: x0 + wc].reshape(
                1, hc * wc, -1
            )
            pes.append(pe.reshape(f * hc * wc, -1))
        z0 = torch.stack(z0s)             # (B,N,c)
        pe = torch.stack(pes)             # (B,N,D), carries pe gradients
        t = torch.from_numpy(rng.integers(0, config.steps, (bsz,)).astype(np.int64))
        eps = torch.from_numpy(rng.normal(tuple(z0.shape)))
        z_t = alphas[t][:, None, None] * z0 + sigmas[t][:, None, None] * eps
        pred = model(z_t, pe, t)
        loss = F.mse_loss(pred, eps)
        opt.zero_grad()
        loss.backward()
        opt.step()
        lr_sched.step()
        if first_loss is None:
            first_loss = float(loss.detach())
        last_loss = float(loss.detach())
        if log and (step % 200 == 0 or step == budget - 1):
            log(f"denoiser step {step} loss {float(loss.detach()):.5f} {'full' if full else 'crop'}")

    weights = dict(vae_weights)
    weights.update(export_denoiser_weights(model))
    meta["loss_start"] = f"{first_loss:.6f}"
    meta["loss_end"] = f"{last_loss:.6f}"
    return weights, meta
