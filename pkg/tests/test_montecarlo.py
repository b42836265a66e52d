import math
from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from contiguity.complex import boundary, circle, make_complex, pinched_sphere, point, torus
from contiguity.errors import CapExceededError, ComplexError, MapError
from contiguity.maps import SimplicialMap, enumerate_maps, exact_class_count, mutually_contiguous
from contiguity.montecarlo import (ClosedWalkSampler, WalkCertificate, WalkConfig,
                                   circle_walk_partition, closed_walk_total,
                                   estimate_class_count, estimator_report,
                                   exact_circle_class_count, graph_distances, map_distance,
                                   same_class_walk, trial_rng, uniform_closed_walk, walk_seed)

from oracles import closed_walk_total_oracle

B2 = boundary(2)
PATH = make_complex([(0, 1), (1, 2), (2, 3)])


def test_map_distance_examples():
    assert map_distance((0, 0, 0), (3, 3, 3), PATH) == 9
    assert map_distance((0, 1, 2), (0, 1, 2), PATH) == 0
    assert map_distance((0, 1), (1, 0), B2) == 2
    apart = make_complex([(0, 1), (2,)])
    assert map_distance((0,), (2,), apart) == math.inf
    f = SimplicialMap(point(), PATH, (0,))
    assert map_distance(f, (2,)) == 2
    with pytest.raises(MapError):
        map_distance((0, 1), (0,), PATH)
    with pytest.raises(MapError):
        map_distance((0,), (1,))


def test_graph_distances_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("CONTIG_CACHE_DIR", str(tmp_path))
    first = graph_distances(torus())
    files = list(tmp_path.glob("bfs-*.npy"))
    assert len(files) == 1
    assert np.array_equal(graph_distances(torus()), first)
    assert first.max() == 2  # the 3x3 grid torus has diameter 2


def test_walk_config_validation():
    with pytest.raises(ValueError):
        WalkConfig(kappa=2)
    with pytest.raises(ValueError):
        WalkConfig(max_iters=0)
    with pytest.raises(ValueError):
        WalkConfig(step_soundness="loose")


def test_walk_seed_streams_differ():
    assert walk_seed(0, 1, 2) == walk_seed(0, 1, 2)
    assert len({walk_seed(0, t) for t in range(100)}) == 100


def test_same_class_walk_finds_certified_chain():
    x = circle(6)
    f = SimplicialMap(x, B2, (0, 1, 1, 0, 0, 0))
    g = SimplicialMap(x, B2, (0, 2, 2, 2, 0, 0))
    res = same_class_walk(f, g, WalkConfig(seed=3), based=0)
    assert res.found and res.certificate.verified
    assert res.certificate.steps[0] == f.assignment
    assert res.certificate.steps[-1] == g.assignment
    assert all(s[0] == 0 for s in res.certificate.steps)


def test_same_class_walk_never_crosses_degree():
    x = circle(6)
    f = SimplicialMap(x, B2, (0, 1, 2, 0, 0, 0))
    g = SimplicialMap(x, B2, (0, 0, 0, 0, 0, 0))
    assert not same_class_walk(f, g, WalkConfig(max_iters=20_000), based=0).found


def test_certificates_are_sound_on_random_pairs():
    x, y = circle(5), torus()
    maps = enumerate_maps(x, y, based=(0, 0))
    part = exact_class_count(x, y, based=(0, 0))
    rng = np.random.default_rng(2)
    found = 0
    for t in range(40):
        i, j = rng.integers(len(maps), size=2)
        res = same_class_walk(maps[i], maps[j], WalkConfig(seed=t, max_iters=50_000),
                              based=0, stream=(t,))
        if res.found:
            found += 1
            assert res.certificate.verified
            assert part.labels[i] == part.labels[j]
    assert found > 0


def test_certificate_rejects_bad_chain():
    cert = WalkCertificate([(0, 1, 2), (0, 0, 0)])
    assert not cert.verify(B2, B2)
    assert WalkCertificate([(0, 0, 1), (0, 0, 0)]).verify(B2, B2)
    # one changed vertex is not enough: {0, 2} would cover the whole triangle
    assert not WalkCertificate([(0, 1, 2), (0, 1, 1)]).verify(B2, B2)


@pytest.mark.parametrize("y", [B2, torus()], ids=["bd2", "T"])
@pytest.mark.parametrize("k", range(3, 10))
def test_closed_walk_totals(y, k):
    assert closed_walk_total(y, 0, k) == closed_walk_total_oracle(y, 0, k)
    if k <= 5:
        assert closed_walk_total(y, 0, k) == len(enumerate_maps(circle(k), y, based=(0, 0)))


def test_sampler_is_uniform():
    sampler = ClosedWalkSampler(B2, 0, 3)
    walks = enumerate_maps(circle(3), B2, based=(0, 0))
    assert sampler.total == len(walks) == 9
    draws = Counter(sampler.sample(trial_rng(7, t)) for t in range(9000))
    assert set(draws) == {m.assignment for m in walks}
    observed = [draws[m.assignment] for m in walks]
    assert chisquare(observed).pvalue > 0.001


def test_sampler_outputs_are_maps():
    rng = trial_rng(0, 0)
    sampler = ClosedWalkSampler(pinched_sphere(), 3, 9)
    for _ in range(50):
        w = sampler.sample(rng)
        assert w[0] == 3
        assert mutually_contiguous([w], circle(9), pinched_sphere())
    assert uniform_closed_walk(torus(), 0, 6, seed=1).assignment[0] == 0


def test_sampler_rejects_bad_input():
    with pytest.raises(ComplexError):
        ClosedWalkSampler(B2, 0, 2)
    with pytest.raises(ComplexError):
        ClosedWalkSampler(B2, 5, 4)
    with pytest.raises(ComplexError):
        ClosedWalkSampler(make_complex([(0,), (1,)]), 0, 3, collapse=False)


def test_big_totals_stay_exact():
    t = closed_walk_total(torus(), 0, 60)
    assert t == closed_walk_total_oracle(torus(), 0, 60) and t > 2 ** 64
    sampler = ClosedWalkSampler(torus(), 0, 60)
    assert len(sampler.sample(trial_rng(0, 1))) == 60


@pytest.mark.parametrize("y,k", [(torus(), 4), (torus(), 5), (pinched_sphere(), 5),
                                 (B2, 6), (circle(4), 6)])
def test_compiled_exact_count_matches_generic(y, k):
    walks, classes = exact_circle_class_count(y, k)
    part = exact_class_count(circle(k), y, based=(0, 0))
    assert walks == len(part.maps)
    assert classes == part.class_count


def test_walk_partition_labels_match_generic():
    codes, labels = circle_walk_partition(torus(), 5)
    part = exact_class_count(circle(5), torus(), based=(0, 0))
    ny = torus().vertex_count
    lookup = {m.assignment: c for m, c in zip(part.maps, part.labels)}
    pairs = set()
    for code, lab in zip(codes.tolist(), labels.tolist()):
        walk = tuple(code // ny ** (4 - i) % ny for i in range(5))
        pairs.add((lab, lookup[walk]))
    assert len(pairs) == part.class_count == labels.max() + 1


def test_exact_count_limit():
    with pytest.raises(CapExceededError):
        exact_circle_class_count(torus(), 8, limit=100)


def test_point_target_has_one_class():
    state = estimate_class_count(point(), 6)
    assert state.class_count == 1 and state.walks == 0


@pytest.mark.parametrize("y,k", [(B2, 3), (B2, 5), (torus(), 5), (pinched_sphere(), 5),
                                 (pinched_sphere(), 6)])
def test_estimate_matches_exact(y, k):
    state = estimate_class_count(y, k, WalkConfig(seed=1))
    assert state.stabilized
    assert state.class_count == exact_circle_class_count(y, k)[1]


def test_estimate_never_overcounts_with_literal_steps():
    exact = exact_circle_class_count(torus(), 5)[1]
    state = estimate_class_count(torus(), 5, WalkConfig(step_soundness="literal"),
                                 schedule=(500, 2000))
    assert state.class_count <= exact


def test_catalog_entries_are_pairwise_distinct_classes():
    state = estimate_class_count(torus(), 6, WalkConfig(seed=4), schedule=(500, 2000))
    part = exact_class_count(circle(6), torus(), based=(0, 0))
    lookup = {m.assignment: c for m, c in zip(part.maps, part.labels)}
    labels = [lookup[c] for c in state.catalog]
    assert len(set(labels)) == len(labels)


def test_replay_is_deterministic():
    cfg = WalkConfig(seed=11)
    a = estimate_class_count(pinched_sphere(), 6, cfg, schedule=(300, 1500))
    b = estimate_class_count(pinched_sphere(), 6, cfg, schedule=(300, 1500))
    assert a.catalog == b.catalog and a.history == b.history and a.walks == b.walks


def test_workers_agree_on_small_case():
    serial = estimate_class_count(torus(), 5, WalkConfig(seed=2))
    threaded = estimate_class_count(torus(), 5, WalkConfig(seed=2), workers=2, batch_size=64)
    assert serial.class_count == threaded.class_count == 7


def test_estimator_validation():
    with pytest.raises(ValueError):
        estimate_class_count(B2, 4, schedule=(100, 50))
    with pytest.raises(ValueError):
        estimate_class_count(B2, 4, workers=0)
    with pytest.raises(ComplexError):
        estimate_class_count(make_complex([(0, 1), (2,)]), 4)


def test_time_limit_stops_early():
    state = estimate_class_count(torus(), 9, schedule=(10 ** 9, 2 * 10 ** 9), time_limit=0.5)
    assert not state.stabilized and state.trials < 10 ** 9


def test_report_fields():
    cfg = WalkConfig()
    state = estimate_class_count(B2, 4, cfg)
    rep = estimator_report(state, "boundary2", 4, cfg)
    assert rep["class_count"] == state.class_count
    assert rep["class_count_over_k2"] == pytest.approx(state.class_count / 16)
    assert len(rep["class_representatives"]) == state.class_count
