"""Video object removal and layer extraction on a toy latent video diffusion model.

The package removes objects (with their shadows and reflections) from short
videos, extracts per-object foreground layers with soft alpha, and composites
layers onto new backgrounds. It works by steering the self-attention of a
small spatio-temporal diffusion transformer, with a built-in synthetic scene
generator providing ground truth for every step.
"""

__version__ = "0.1.0"
