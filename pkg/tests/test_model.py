import numpy as np
import pytest

from latentmatte.errors import NoCheckpoint, ShapeError, BudgetZero
from latentmatte.model import (
    AttentionCapture,
    LatentModel,
    ModelConfig,
    load_checkpoint,
    save_checkpoint,
    vae_decode_mask,
)
from latentmatte.model.sampler import sample
from latentmatte.numerics import NoiseSchedule, SeededRng, softmax_rows
from latentmatte.scene import SceneSpec, Sprite, Shadow, synthesize

TINY = ModelConfig(
    layers=2, heads=2, head_dim=8, channels=4, grid_frames=2, grid_h=4, grid_w=4, vae_width=8
)


def tiny_scene(seed=0, side=16, frames=4):
    return synthesize(
        SceneSpec(
            frames=frames,
            height=side,
            width=side,
            background="textured",
            sprites=[Sprite("square", 4, (0.9, 0.3, 0.3), (1.0, 0.0), (5.0, 8.0))],
            shadow=Shadow(offset=(2, 2), opacity=0.5),
            seed=seed,
        )
    )


@pytest.fixture(scope="module")
def tiny_model():
    from latentmatte.model.train import train_vae

    weights, meta = train_vae([], budget=0, seed=3, config=TINY)
    from latentmatte.model.train import train_denoiser

    weights, meta = train_denoiser([], weights, budget=0, seed=3, config=TINY)
    return LatentModel(weights, TINY, meta)


class TestVaeShapes:
    def test_encode_shape(self, tiny_model):
        b = tiny_scene()
        z = tiny_model.encode(b.composite)
        assert z.shape == (2, 4, 4, 4)

    def test_full_scale_shape_arithmetic(self):
        cfg = ModelConfig()
        model = LatentModel({}, cfg)
        assert model.latent_shape(16, 64, 64) == (8, 16, 16, 8)

    def test_encode_deterministic(self, tiny_model):
        b = tiny_scene()
        assert np.array_equal(tiny_model.encode(b.composite), tiny_model.encode(b.composite))

    def test_encode_rejects_odd_frames(self, tiny_model):
        with pytest.raises(ShapeError):
            tiny_model.encode(np.zeros((3, 16, 16, 3), dtype=np.float32))

    def test_encode_rejects_bad_spatial(self, tiny_model):
        with pytest.raises(ShapeError):
            tiny_model.encode(np.zeros((4, 18, 18, 3), dtype=np.float32))

    def test_decode_zero_latent_in_range(self, tiny_model):
        v = tiny_model.decode(np.zeros((2, 4, 4, 4), dtype=np.float32))
        assert v.shape == (4, 16, 16, 3)
        assert np.all(np.isfinite(v)) and v.min() >= 0.0 and v.max() <= 1.0

    def test_missing_weights(self):
        model = LatentModel({}, TINY)
        with pytest.raises(NoCheckpoint):
            model.encode(np.zeros((4, 16, 16, 3), dtype=np.float32))

    def test_latents_on_grid(self, tiny_model):
        z = tiny_model.encode(tiny_scene().composite)
        assert np.array_equal(np.round(z * 4096) / 4096, z)


class TestDecodeMask:
    def test_saturation_ones(self):
        m = np.ones((2, 4, 4), dtype=np.float32)
        out = vae_decode_mask(TINY, m)
        assert out.shape == (4, 16, 16)
        assert np.array_equal(out, np.ones_like(out))

    def test_saturation_zeros(self):
        out = vae_decode_mask(TINY, np.zeros((2, 4, 4), dtype=np.float32))
        assert np.array_equal(out, np.zeros_like(out))

    def test_monotone_scaling(self):
        rng = np.random.default_rng(0)
        m = rng.random((2, 4, 4)).astype(np.float32)
        full = vae_decode_mask(TINY, m)
        scaled = vae_decode_mask(TINY, 0.5 * m)
        assert np.all(scaled <= full + 1e-7)

    def test_impulse_footprint_exhaustive(self):
        f, h, w = 2, 4, 4
        for ti in range(f):
            for yi in range(h):
                for xi in range(w):
                    m = np.zeros((f, h, w), dtype=np.float32)
                    m[ti, yi, xi] = 1.0
                    out = vae_decode_mask(TINY, m)
                    support = np.argwhere(out > 1e-7)
                    # footprint 2x4x4 plus at most one latent cell of halo
                    t_lo, t_hi = 2 * (ti - 1), 2 * (ti + 1) + 1
                    y_lo, y_hi = 4 * (yi - 1), 4 * (yi + 1) + 3
                    x_lo, x_hi = 4 * (xi - 1), 4 * (xi + 1) + 3
                    assert np.all(support[:, 0] >= t_lo) and np.all(support[:, 0] <= t_hi)
                    assert np.all(support[:, 1] >= y_lo) and np.all(support[:, 1] <= y_hi)
                    assert np.all(support[:, 2] >= x_lo) and np.all(support[:, 2] <= x_hi)
                    # argmax inside the cell's own 2x4x4 footprint
                    peak = np.unravel_index(np.argmax(out), out.shape)
                    assert 2 * ti <= peak[0] <= 2 * ti + 1
                    assert 4 * yi <= peak[1] <= 4 * yi + 3
                    assert 4 * xi <= peak[2] <= 4 * xi + 3

    def test_rejects_out_of_range(self):
        with pytest.raises(ShapeError):
            vae_decode_mask(TINY, np.full((2, 4, 4), 1.5, dtype=np.float32))


class TestDenoiserHooks:
    def test_empty_vs_identity_hook(self, tiny_model):
        z = SeededRng(1).normal((2, 4, 4, 4))
        plain = tiny_model.denoise_step(z, 3)
        hooked = tiny_model.denoise_step(z, 3, hooks=[lambda l, h, a: a])
        assert np.array_equal(plain, hooked)

    def test_none_return_means_unchanged(self, tiny_model):
        z = SeededRng(1).normal((2, 4, 4, 4))
        plain = tiny_model.denoise_step(z, 3)
        hooked = tiny_model.denoise_step(z, 3, hooks=[lambda l, h, a: None])
        assert np.array_equal(plain, hooked)

    def test_rows_stochastic_before_hooks(self, tiny_model):
        sums = []

        def hook(layer, head, a):
            sums.append(a.sum(axis=1))
            return None

        tiny_model.denoise_step(SeededRng(2).normal((2, 4, 4, 4)), 0, hooks=[hook])
        assert len(sums) == TINY.layers * TINY.heads
        for s in sums:
            np.testing.assert_allclose(s, 1.0, atol=1e-5)

    def test_last_layer_row_edit_is_local(self, tiny_model):
        z = SeededRng(3).normal((2, 4, 4, 4))
        target_row = 7
        last = TINY.layers - 1

        def hook(layer, head, a):
            if layer != last:
                return None
            edited = a.copy()
            edited[target_row] = 0.0
            edited[target_row, target_row] = 1.0
            return edited

        plain = tiny_model.denoise_step(z, 3)
        hooked = tiny_model.denoise_step(z, 3, hooks=[hook])
        diff = np.abs(plain - hooked).reshape(-1, TINY.channels).max(axis=1)
        assert diff[target_row] > 0
        others = np.delete(diff, target_row)
        assert np.all(others == 0)

    def test_capture_matches_observed_attention(self, tiny_model):
        z = SeededRng(4).normal((2, 4, 4, 4))
        seen = {}

        def hook(layer, head, a):
            seen[(layer, head)] = a.copy()
            return None

        cap = AttentionCapture()
        tiny_model.denoise_step(z, 5, hooks=[hook], capture=cap)
        assert len(cap.queries) == TINY.layers
        for layer in range(TINY.layers):
            q, k = cap.queries[layer], cap.keys[layer]
            for head in range(TINY.heads):
                rebuilt = softmax_rows(
                    (q[head] @ k[head].T / np.sqrt(TINY.head_dim)).astype(np.float32)
                )
                np.testing.assert_allclose(rebuilt, seen[(layer, head)], atol=1e-5)

    def test_oversized_latent_rejected(self, tiny_model):
        with pytest.raises(ShapeError):
            tiny_model.denoise_step(np.zeros((2, 8, 8, 4), dtype=np.float32), 0)


class TestSampler:
    def test_zero_eps_closed_form(self):
        sched = NoiseSchedule.linear(6)
        z0 = SeededRng(5).normal((2, 3, 3, 4))
        out = sample(lambda z, t, h: np.zeros_like(z), z0, sched)
        expected = z0 / np.float32(sched.alpha(0))
        np.testing.assert_allclose(out, expected, atol=1e-6)

    def test_oracle_denoiser_single_step(self):
        sched = NoiseSchedule(sigmas=np.array([0.7]))
        rng = SeededRng(6)
        x = rng.normal((1, 2, 2, 4))
        from latentmatte.numerics import add_noise

        z1, eps = add_noise(x, 0, sched, rng)
        out = sample(lambda z, t, h: eps, z1, sched)
        np.testing.assert_allclose(out, x, atol=1e-5)

    def test_callback_overwrites(self):
        sched = NoiseSchedule.linear(4)
        marker = np.full((1, 2, 2, 4), 7.0, dtype=np.float32)
        out = sample(
            lambda z, t, h: np.zeros_like(z),
            SeededRng(7).normal((1, 2, 2, 4)),
            sched,
            per_step_callback=lambda t, z: marker if t == sched.T - 1 else None,
        )
        assert np.array_equal(out, marker)

    def test_deterministic(self, tiny_model):
        z = SeededRng(8).normal((2, 4, 4, 4))
        sched = NoiseSchedule.linear(3)
        a = tiny_model.sample(z, sched)
        b = tiny_model.sample(z, sched)
        assert np.array_equal(a, b)


class TestCheckpoint:
    def test_round_trip(self, tiny_model, tmp_path):
        save_checkpoint(tmp_path / "ck", tiny_model.weights, TINY, {"kind": "bundle"})
        weights, config, meta = load_checkpoint(tmp_path / "ck")
        assert config == TINY
        assert meta["kind"] == "bundle"
        assert set(weights) == set(tiny_model.weights)
        for k in weights:
            assert np.array_equal(weights[k], tiny_model.weights[k])

    def test_missing_dir(self, tmp_path):
        with pytest.raises(NoCheckpoint):
            load_checkpoint(tmp_path / "nope")

    def test_model_load_save(self, tiny_model, tmp_path):
        tiny_model.save(tmp_path / "m")
        back = LatentModel.load(tmp_path / "m")
        z = SeededRng(1).normal((2, 4, 4, 4))
        assert np.array_equal(back.denoise_step(z, 1), tiny_model.denoise_step(z, 1))


class TestTraining:
    def test_vae_budget_zero_deterministic(self):
        from latentmatte.model.train import train_vae

        w1, _ = train_vae([], budget=0, seed=11, config=TINY)
        w2, _ = train_vae([], budget=0, seed=11, config=TINY)
        assert set(w1) == set(w2)
        for k in w1:
            assert np.array_equal(w1[k], w2[k])

    def test_vae_negative_budget(self):
        from latentmatte.model.train import train_vae

        with pytest.raises(BudgetZero):
            train_vae([], budget=-1, seed=0, config=TINY)

    def test_vae_loss_decreases(self):
        from latentmatte.model.train import train_vae

        scenes = [tiny_scene(seed=s) for s in range(2)]
        w, meta = train_vae(scenes, budget=60, seed=0, config=TINY, batch_size=8)
        assert float(meta["loss_end"]) < float(meta["loss_start"])

    def test_vae_training_deterministic(self):
        from latentmatte.model.train import train_vae

        scenes = [tiny_scene(seed=1)]
        w1, _ = train_vae(scenes, budget=5, seed=4, config=TINY, batch_size=4)
        w2, _ = train_vae(scenes, budget=5, seed=4, config=TINY, batch_size=4)
        for k in w1:
            assert np.array_equal(w1[k], w2[k])

    def test_denoiser_budget_zero_is_bundle(self, tiny_model):
        assert any(k.startswith("vae.") for k in tiny_model.weights)
        assert any(k.startswith("den.") for k in tiny_model.weights)

    def test_denoiser_loss_decreases(self):
        from latentmatte.model.train import train_denoiser, train_vae

        scenes = [tiny_scene(seed=s) for s in range(2)]
        vae_w, _ = train_vae(scenes, budget=30, seed=0, config=TINY, batch_size=8)
        w, meta = train_denoiser(
            scenes, vae_w, budget=60, seed=0, config=TINY, batch_size=4, crop=4
        )
        assert float(meta["loss_end"]) < float(meta["loss_start"])


class TestTorchNumpyParity:
    def test_vae_encoder_parity(self):
        import torch

        from latentmatte.model.train import TorchVae, export_vae_weights
        from latentmatte.model.vae import encode_raw

        torch.manual_seed(0)
        tv = TorchVae(TINY)
        weights = export_vae_weights(tv)
        b = tiny_scene()
        z_np = encode_raw(weights, TINY, b.composite)
        pairs = b.composite.reshape(2, 2, 16, 16, 3).transpose(0, 1, 4, 2, 3).reshape(2, 6, 16, 16)
        with torch.no_grad():
            z_t = tv.encode(torch.from_numpy(pairs.astype(np.float32)) * 2 - 1)
        z_t = z_t.numpy().transpose(0, 2, 3, 1)
        np.testing.assert_allclose(z_np, z_t, atol=1e-4)

    def test_denoiser_parity(self):
        import torch

        from latentmatte.model.denoiser import denoise_step
        from latentmatte.model.train import TorchDenoiser, export_denoiser_weights

        torch.manual_seed(1)
        td = TorchDenoiser(TINY)
        weights = export_denoiser_weights(td)
        z = SeededRng(9).normal((2, 4, 4, 4))
        out_np = denoise_step(weights, TINY, z, 7)
        tokens = torch.from_numpy(z.reshape(1, 32, 4))
        pe = (td.pe_frame[:2, None, :] + td.pe_spatial.reshape(1, 16, -1)).reshape(1, 32, -1)
        with torch.no_grad():
            out_t = td(tokens, pe, torch.tensor([7]))
        np.testing.assert_allclose(out_np, out_t.numpy().reshape(2, 4, 4, 4), atol=2e-4)
