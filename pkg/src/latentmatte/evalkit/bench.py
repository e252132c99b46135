"""Benchmark and ablation harnesses over synthetic scene suites."""

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, EmptySuite
from ..pipeline import RemovalRequest, baseline_plain, baseline_renoise, remove_objects
from .metrics import psnr, psnr_masked, ssim, temporal_consistency
from .report import MetricReport, MetricRow, SceneScore

DENSITY_GRID = (0.2, 0.4, 0.6, 0.8, 1.0)
ABLATION_KINDS = ("attention", "density", "effectmask")


@dataclass(frozen=True)
class MethodSpec:
    """One benchmark row: which removal variant and with which knobs."""

    label: str
    kind: str = "removal"          # removal | plain | renoise
    use_temporal: bool = True
    use_spatial: bool = True
    use_effect_mask: bool = True
    density: float = 0.6


def method_spec(name: str, density: float = 0.6, use_effect_mask: bool = True) -> MethodSpec:
    base = dict(density=density, use_effect_mask=use_effect_mask)
    table = {
        "none": MethodSpec("none", kind="plain", **base),
        "spatial": MethodSpec("spatial", use_temporal=False, **base),
        "temporal": MethodSpec("temporal", use_spatial=False, **base),
        "temporal_spatial": MethodSpec("temporal_spatial", **base),
        "renoise": MethodSpec("renoise", kind="renoise", **base),
    }
    if name not in table:
        raise ConfigError(f"unknown method {name!r}; expected one of {sorted(table)}")
    return table[name]


class RemovalCache:
    """Score cache keyed by everything that determines a removal's output.

    Grid rows shared between ablations (the density 0.6 row is the attention
    grid's temporal_spatial row) then cost one removal, not three.
    """

    def __init__(self):
        self.scores: dict = {}
        self.hits = 0
        self.misses = 0

    def get(self, key):
        if key in self.scores:
            self.hits += 1
            return self.scores[key]
        self.misses += 1
        return None

    def put(self, key, value):
        self.scores[key] = value


def model_fingerprint(model) -> str:
    cached = getattr(model, "_weight_fingerprint", None)
    if cached is not None:
        return cached
    h = hashlib.sha256()
    for name in sorted(model.weights):
        h.update(name.encode("utf-8"))
        h.update(np.ascontiguousarray(model.weights[name]).tobytes())
    fp = h.hexdigest()[:16]
    model._weight_fingerprint = fp
    return fp


def _cache_key(bundle, spec: MethodSpec, tracker: str, steps: int, seed: int,
               model_fp: str) -> tuple:
    # the label is presentation only; rows with identical behavior share work
    behavior = (spec.kind, spec.use_temporal, spec.use_spatial,
                spec.use_effect_mask, spec.density)
    return (bundle.spec.name, bundle.spec.seed, behavior, tracker, steps, seed, model_fp)


def _run_unit(model, bundle, spec: MethodSpec, tracker: str, steps: int, seed: int):
    req = RemovalRequest(
        video=bundle.composite,
        masks=list(bundle.object_masks),
        use_effect_mask=spec.use_effect_mask,
        use_temporal=spec.use_temporal,
        use_spatial=spec.use_spatial,
        tracker=tracker,
        density=spec.density,
        steps=steps,
        seed=seed,
        scene=bundle if tracker == "oracle" else None,
    )
    if spec.kind == "plain":
        v_bg, _ = baseline_plain(model, req)
    elif spec.kind == "renoise":
        v_bg, _ = baseline_renoise(model, req)
    else:
        v_bg, _ = remove_objects(model, req)
    gt = bundle.background_gt
    unmasked = ~bundle.union_effects_mask()
    return SceneScore(
        scene=bundle.spec.name,
        seed=seed,
        psnr=psnr(v_bg, gt),
        ssim=ssim(v_bg, gt),
        temporal=temporal_consistency(v_bg, gt),
        psnr_unmasked=psnr_masked(v_bg, gt, unmasked),
    )


def _evaluate(model, bundles, specs, seeds, tracker, steps, jobs, cache) -> MetricReport:
    if not bundles:
        raise EmptySuite("no scenes to evaluate")
    if cache is None:
        cache = RemovalCache()
    model_fp = model_fingerprint(model)

    units = []
    for spec in specs:
        for bundle in bundles:
            for seed in seeds:
                units.append((bundle, spec, seed))
    missing = []
    seen = set()
    for bundle, spec, seed in units:
        key = _cache_key(bundle, spec, tracker, steps, seed, model_fp)
        if cache.get(key) is None and key not in seen:
            seen.add(key)
            missing.append((key, bundle, spec, seed))

    def work(item):
        _, bundle, spec, seed = item
        return _run_unit(model, bundle, spec, tracker, steps, seed)

    if jobs > 1 and len(missing) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, missing))
    else:
        results = [work(item) for item in missing]
    for (key, *_), score in zip(missing, results):
        cache.put(key, score)

    rows = []
    for spec in specs:
        row = MetricRow(label=spec.label)
        for bundle in bundles:
            for seed in seeds:
                key = _cache_key(bundle, spec, tracker, steps, seed, model_fp)
                row.scores.append(cache.scores[key])
        rows.append(row)

    suite_id = ";".join(f"{b.spec.name}:{b.spec.seed}" for b in bundles)
    digest = hashlib.sha256(suite_id.encode("utf-8")).hexdigest()[:8]
    fp = f"{model_fp}|{tracker}|steps={steps}|suite={digest}|seeds={list(seeds)}"
    return MetricReport(rows=rows, fingerprint=fp, seeds=list(seeds))


def run_benchmark(model, bundles, methods=("none", "temporal_spatial"), seeds=(0,),
                  tracker="blockmatch", steps=30, density=0.6, use_effect_mask=True,
                  jobs=1, cache=None) -> MetricReport:
    """Score each method on every scene; rows in the given method order."""
    specs = [method_spec(m, density=density, use_effect_mask=use_effect_mask)
             for m in methods]
    return _evaluate(model, bundles, specs, seeds, tracker, steps, jobs, cache)


def run_ablation(model, bundles, kind: str, seeds=(0,), tracker="blockmatch",
                 steps=30, jobs=1, cache=None) -> MetricReport:
    """The three supplement-style grids; see DENSITY_GRID for the densities."""
    if kind == "attention":
        specs = [method_spec(m) for m in
                 ("none", "spatial", "temporal", "temporal_spatial")]
    elif kind == "density":
        specs = []
        for d in DENSITY_GRID:
            base = method_spec("temporal_spatial", density=d)
            specs.append(MethodSpec(**{**base.__dict__, "label": f"density_{d:.1f}"}))
    elif kind == "effectmask":
        bundles = [b for b in bundles if b.spec.shadow is not None]
        with_spec = method_spec("temporal_spatial", use_effect_mask=True)
        without = method_spec("temporal_spatial", use_effect_mask=False)
        specs = [MethodSpec(**{**with_spec.__dict__, "label": "with"}),
                 MethodSpec(**{**without.__dict__, "label": "without"})]
    else:
        raise ConfigError(f"unknown ablation {kind!r}; expected one of {ABLATION_KINDS}")
    return _evaluate(model, bundles, specs, seeds, tracker, steps, jobs, cache)
