"""Deterministic sampling loop over a noise schedule."""

import numpy as np

from ..numerics import NoiseSchedule


def sample(
    denoise_fn,
    z_T: np.ndarray,
    sched: NoiseSchedule,
    hooks=(),
    per_step_callback=None,
    t_start: int = 0,
) -> np.ndarray:
    """Run denoising steps t_start..T-1 from z at level t_start.

    denoise_fn(z, t, hooks) must return eps_hat. After each update the
    callback may overwrite the latent (that carries the known-region
    injection); returning None keeps the update's result.

    The update is the deterministic one: with x0_hat reconstructed from the
    eps prediction, z_{t+1} = alpha_{t+1} * x0_hat + sigma_{t+1} * eps_hat.
    A zero eps predictor therefore follows z_{t+1} = (alpha_{t+1}/alpha_t) z_t.
    """
    z = np.asarray(z_T, dtype=np.float32).copy()
    for t in range(t_start, sched.T):
        eps_hat = denoise_fn(z, t, hooks)
        alpha_t = np.float32(sched.alpha(t))
        sigma_t = np.float32(sched.sigma(t))
        alpha_n = np.float32(sched.alpha(t + 1))
        sigma_n = np.float32(sched.sigma(t + 1))
        x0_hat = (z - sigma_t * eps_hat) / alpha_t
        z = alpha_n * x0_hat + sigma_n * eps_hat
        if per_step_callback is not None:
            replaced = per_step_callback(t, z)
            if replaced is not None:
                z = replaced
    return z
