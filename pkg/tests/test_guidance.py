import numpy as np
import pytest

from latentmatte.errors import ConfigError, InsufficientCorrespondences, ShapeError
from latentmatte.guidance import (
    GuidancePlan,
    apply_spatial_guidance,
    apply_temporal_guidance,
    make_guidance_hook,
    make_plan,
    mean_spatial_attention,
    mean_temporal_attention,
)
from latentmatte.numerics import SeededRng, softmax_rows
from latentmatte.tracking import TokenCorrespondence


def brute_mean(a, idx):
    vals = [float(a[x, y]) for x in idx for y in idx if x != y]
    return sum(vals) / len(vals)


def random_attention(rng, total):
    return softmax_rows(rng.normal((total, total)))


def random_plan(rng, frames, n, n_queries=3, **flags):
    total = frames * n
    tq, ts, sq, ss = [], [], [], []
    used = set()
    for _ in range(n_queries):
        q = int(rng.integers(0, total))
        if q in used:
            continue
        used.add(q)
        # temporal set: one token in each of >=2 distinct frames
        k = int(rng.integers(2, frames + 1))
        frame_pick = sorted(rng.choice_without_replacement(frames, k))
        ts.append([int(f) * n + int(rng.integers(0, n)) for f in frame_pick])
        tq.append(q)
        # spatial set inside the query's frame
        qf = q // n
        m = int(rng.integers(2, min(n, 6) + 1))
        ss.append([qf * n + int(t) for t in rng.choice_without_replacement(n, m)])
        sq.append(q)
    return GuidancePlan(
        tokens_per_frame=n,
        total_tokens=total,
        temporal_queries=tq,
        temporal_sets=ts,
        spatial_queries=sq,
        spatial_sets=ss,
        **flags,
    )


def check_writes(a, out, plan, temporal=True, spatial=True):
    """Planned entries match the brute-force mean; everything else is bit-identical."""
    written = np.zeros(a.shape, dtype=bool)
    groups = []
    if temporal:
        groups.append((plan.temporal_queries, plan.temporal_sets))
    if spatial:
        groups.append((plan.spatial_queries, plan.spatial_sets))
    for queries, sets in groups:
        for q, keys in zip(queries, sets):
            want = brute_mean(a, keys)
            for k in keys:
                assert abs(float(out[q, k]) - want) <= 1e-6
                written[q, k] = True
                if plan.symmetric:
                    assert abs(float(out[k, q]) - want) <= 1e-6
                    written[k, q] = True
    assert np.array_equal(np.asarray(out)[~written], np.asarray(a)[~written])


class TestMeans:
    def test_uniform_value(self):
        a = np.full((8, 8), 0.125, dtype=np.float32)
        c = [(0, 1), (1, 3)]
        assert mean_temporal_attention(a, c, 4) == pytest.approx(0.125)

    def test_pair_closed_form(self):
        rng = SeededRng(0)
        a = random_attention(rng, 8)
        c = [(0, 2), (1, 1)]
        g1, g2 = 0 * 4 + 2, 1 * 4 + 1
        want = (float(a[g1, g2]) + float(a[g2, g1])) / 2
        assert mean_temporal_attention(a, c, 4) == pytest.approx(want, abs=1e-9)

    def test_triple_brute_force(self):
        rng = SeededRng(1)
        a = random_attention(rng, 6)
        c = [(0, 0), (1, 2), (2, 1)]
        idx = [0, 1 * 2 + 2, 2 * 2 + 1]
        assert mean_temporal_attention(a, c, 2) == pytest.approx(brute_mean(a, idx), abs=1e-9)

    def test_spatial_uniform(self):
        a = np.full((8, 8), 0.125, dtype=np.float32)
        assert mean_spatial_attention(a, [0, 1, 3], 1, 4) == pytest.approx(0.125)

    def test_spatial_brute_force(self):
        rng = SeededRng(2)
        a = random_attention(rng, 12)
        s = [0, 2, 3, 5]
        idx = [1 * 6 + t for t in s]
        assert mean_spatial_attention(a, s, 1, 6) == pytest.approx(brute_mean(a, idx), abs=1e-9)

    def test_insufficient(self):
        a = random_attention(SeededRng(3), 8)
        with pytest.raises(InsufficientCorrespondences):
            mean_temporal_attention(a, [(0, 1)], 4)
        with pytest.raises(InsufficientCorrespondences):
            mean_spatial_attention(a, [2], 0, 4)

    def test_duplicate_frame_rejected(self):
        a = random_attention(SeededRng(4), 8)
        with pytest.raises(ShapeError):
            mean_temporal_attention(a, [(0, 0), (0, 1)], 4)


class TestApply:
    def test_empty_plan_identity(self):
        a = random_attention(SeededRng(5), 16)
        plan = make_plan([], 4, 4)
        assert plan.is_empty
        assert np.array_equal(apply_temporal_guidance(a, plan), a)
        assert np.array_equal(apply_spatial_guidance(a, plan), a)

    def test_uniform_fixed_point(self):
        n_total = 12
        a = np.full((n_total, n_total), np.float32(1.0 / n_total))
        plan = random_plan(SeededRng(6), 3, 4)
        assert np.array_equal(apply_temporal_guidance(a, plan), a)
        assert np.array_equal(apply_spatial_guidance(a, plan), a)

    def test_input_not_mutated(self):
        a = random_attention(SeededRng(7), 12)
        saved = a.copy()
        plan = random_plan(SeededRng(8), 3, 4)
        apply_temporal_guidance(a, plan)
        apply_spatial_guidance(a, plan)
        assert np.array_equal(a, saved)

    def test_random_instances_temporal(self):
        rng = SeededRng(9)
        for trial in range(30):
            frames = int(rng.integers(2, 5))
            n = int(rng.integers(2, 17))
            a = random_attention(rng, frames * n)
            plan = random_plan(rng, frames, n, n_queries=int(rng.integers(1, 5)))
            out = apply_temporal_guidance(a, plan)
            check_writes(a, out, plan, spatial=False)

    def test_random_instances_spatial(self):
        rng = SeededRng(10)
        for trial in range(30):
            frames = int(rng.integers(2, 5))
            n = int(rng.integers(3, 17))
            a = random_attention(rng, frames * n)
            plan = random_plan(rng, frames, n, n_queries=int(rng.integers(1, 5)))
            out = apply_spatial_guidance(a, plan)
            check_writes(a, out, plan, temporal=False)

    def test_symmetric_writes_mirror(self):
        rng = SeededRng(11)
        a = random_attention(rng, 12)
        plan = random_plan(rng, 3, 4, n_queries=2, symmetric=True)
        out = apply_temporal_guidance(a, plan)
        check_writes(a, out, plan, spatial=False)

    def test_renormalized_rows_sum_one(self):
        rng = SeededRng(12)
        a = random_attention(rng, 20)
        plan = random_plan(rng, 4, 5, n_queries=3, renormalize_rows=True)
        out = apply_temporal_guidance(a, plan)
        for q in plan.temporal_queries:
            assert abs(float(out[q].sum()) - 1.0) <= 1e-6
        untouched = sorted(set(range(20)) - set(plan.temporal_queries))
        assert np.array_equal(out[untouched], a[untouched])

    def test_shape_mismatch(self):
        plan = random_plan(SeededRng(13), 3, 4)
        with pytest.raises(ShapeError):
            apply_temporal_guidance(np.zeros((8, 8), dtype=np.float32), plan)


class TestHook:
    def test_matches_sequential_composition(self):
        rng = SeededRng(14)
        for trial in range(10):
            a = random_attention(rng, 16)
            plan = random_plan(rng, 4, 4, n_queries=3)
            want = apply_spatial_guidance(apply_temporal_guidance(a, plan), plan)
            hook = make_guidance_hook(plan)
            got = hook(0, 0, a.copy())
            assert np.array_equal(got, want)

    def test_none_plans_identity(self):
        hook = make_guidance_hook(None)
        assert hook(0, 0, np.zeros((4, 4), dtype=np.float32)) is None

    def test_temporal_only_leaves_surround_untouched(self):
        rng = SeededRng(15)
        a = random_attention(rng, 12)
        tcs = [
            TokenCorrespondence(query=(0, 1), background=[(1, 2), (2, 3)], surround=[0, 2, 3]),
            TokenCorrespondence(query=(1, 0), background=[(0, 1), (2, 0)], surround=[1, 2]),
        ]
        plan_t = make_plan(tcs, 3, 4, use_spatial=False)
        assert not plan_t.spatial_queries
        hook = make_guidance_hook(plan_t)
        got = hook(0, 0, a.copy())
        assert np.array_equal(got, apply_temporal_guidance(a, plan_t))

    def test_per_layer_plans(self):
        rng = SeededRng(16)
        a = random_attention(rng, 12)
        plan = random_plan(rng, 3, 4)
        hook = make_guidance_hook({1: plan})
        assert hook(0, 0, a.copy()) is None
        assert hook(1, 0, a.copy()) is not None


class TestPlanBuilding:
    def test_global_index_arithmetic(self):
        tcs = [TokenCorrespondence(query=(2, 5), background=[(0, 1), (1, 7)], surround=[4, 6])]
        plan = make_plan(tcs, 4, 16)
        assert plan.temporal_queries == [2 * 16 + 5]
        assert plan.temporal_sets == [[1, 23]]
        assert plan.spatial_queries == [37]
        assert plan.spatial_sets == [[36, 38]]

    def test_small_sets_dropped(self):
        tcs = [TokenCorrespondence(query=(0, 0), background=[(1, 1)], surround=[1])]
        plan = make_plan(tcs, 2, 4)
        assert plan.is_empty

    def test_invalid_indices_rejected(self):
        with pytest.raises(ConfigError):
            GuidancePlan(
                tokens_per_frame=4,
                total_tokens=8,
                temporal_queries=[9],
                temporal_sets=[[0, 1]],
            )

    def test_save_load_round_trip(self, tmp_path):
        rng = SeededRng(17)
        plan = random_plan(rng, 3, 5, n_queries=3, renormalize_rows=True)
        plan.save(tmp_path / "plan")
        back = GuidancePlan.load(tmp_path / "plan")
        assert back.temporal_queries == plan.temporal_queries
        assert back.temporal_sets == plan.temporal_sets
        assert back.spatial_sets == plan.spatial_sets
        assert back.renormalize_rows and not back.symmetric
        a = random_attention(rng, 15)
        assert np.array_equal(
            apply_temporal_guidance(a, back), apply_temporal_guidance(a, plan)
        )
