import dataclasses

import numpy as np
import pytest

from dynpagerank.engines import (
    APPROACHES,
    dynamic_frontier,
    dynamic_traversal,
    naive_dynamic,
    run_approach,
    static_pagerank,
)
from dynpagerank.errors import InputError
from dynpagerank.frontier import AffectedFlags, mark_reachable, traversal_seeds
from dynpagerank.graph import BatchUpdate, add_self_loops, apply_batch, build_csr, transpose
from dynpagerank.harness import compute_reference_ranks
from dynpagerank.ranks import EngineConfig, PartitionStrategy, l1_norm_delta
from dynpagerank.workload import generate_random_batch, random_digraph
from oracles import dense_pagerank, random_edges, with_loops

CFG = EngineConfig()


def pair(edges, n):
    g = add_self_loops(build_csr(edges, n))
    return g, transpose(g)


def test_static_two_cycle():
    g, gt = pair([(0, 1), (1, 0)], 2)
    res = static_pagerank(gt, g)
    assert res.converged
    np.testing.assert_allclose(res.ranks, [0.5, 0.5], atol=1e-12)


def test_static_single_vertex():
    g, gt = pair([], 1)
    res = static_pagerank(gt, g)
    assert res.ranks.tolist() == [1.0]
    assert res.iterations <= 2


def test_static_matches_dense_oracle():
    rng = np.random.default_rng(100)
    edges = random_edges(rng, 100, 500)
    g, gt = pair(edges, 100)
    res = static_pagerank(gt, g)
    expected = dense_pagerank(with_loops(set(edges), 100), 100, tol=1e-14)
    assert np.max(np.abs(res.ranks - expected)) <= 1e-8
    assert res.converged and res.final_delta <= CFG.tolerance
    assert res.affected_vertex_iterations == res.iterations * 100


def test_static_rejects_mismatched_pair():
    g, _ = pair([(0, 1)], 3)
    other = transpose(add_self_loops(build_csr([(1, 2)], 3)))
    with pytest.raises(InputError):
        static_pagerank(other, g)


def test_max_iterations_exhaustion_reports_not_converged():
    rng = np.random.default_rng(1)
    g, gt = pair(random_edges(rng, 50, 200), 50)
    res = static_pagerank(gt, g, dataclasses.replace(CFG, max_iterations=3))
    assert res.iterations == 3 and not res.converged
    assert res.final_delta > CFG.tolerance


def test_nd_from_converged_ranks_is_one_iteration():
    rng = np.random.default_rng(2)
    g, gt = pair(random_edges(rng, 80, 400), 80)
    converged = static_pagerank(gt, g).ranks
    res = naive_dynamic(gt, g, converged)
    assert res.iterations == 1
    assert np.max(np.abs(res.ranks - converged)) <= CFG.tolerance


def test_nd_from_uniform_is_static_bitwise():
    rng = np.random.default_rng(3)
    g, gt = pair(random_edges(rng, 80, 400), 80)
    a = static_pagerank(gt, g)
    b = naive_dynamic(gt, g, np.full(80, 1 / 80))
    assert a.ranks.tobytes() == b.ranks.tobytes() and a.iterations == b.iterations


def test_nd_after_flip_matches_oracle():
    rng = np.random.default_rng(4)
    edges = random_edges(rng, 100, 500)
    g, gt = pair(edges, 100)
    prev = static_pagerank(gt, g).ranks
    u, v = next(e for e in sorted(set(edges)) if e[0] != e[1])
    g2 = apply_batch(g, BatchUpdate(deletions=[(u, v)], insertions=[(v, u)] if not g.has_edge(v, u) else []))
    res = naive_dynamic(transpose(g2), g2, prev)
    expected = dense_pagerank(g2.edges(), 100, tol=1e-14)
    assert np.max(np.abs(res.ranks - expected)) <= 1e-8


def test_nd_rejects_wrong_length():
    g, gt = pair([], 3)
    with pytest.raises(InputError):
        naive_dynamic(gt, g, [0.5, 0.5])


def test_dt_empty_batch_returns_previous():
    rng = np.random.default_rng(5)
    g, gt = pair(random_edges(rng, 40, 100), 40)
    prev = rng.random(40)
    res = dynamic_traversal(g, gt, [], [], prev)
    assert res.iterations == 1 and res.converged and res.affected_vertex_iterations == 0
    assert res.ranks.tobytes() == prev.tobytes()


def test_dt_unreachable_vertices_keep_previous_bitwise():
    # Two disjoint components; the batch only touches the second.
    g0, _ = pair([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], 6)
    prev = static_pagerank(transpose(g0), g0).ranks
    batch = BatchUpdate(insertions=[(3, 5)])
    g = apply_batch(g0, batch)
    res = dynamic_traversal(g, transpose(g), batch.deletions, batch.insertions, prev)
    assert res.ranks[:3].tobytes() == prev[:3].tobytes()
    assert res.affected_vertex_iterations == 3 * res.iterations


def test_dt_accuracy_on_medium_graph():
    g0 = add_self_loops(build_csr(random_digraph(1250, 10_000, seed=6), 1250))
    prev = static_pagerank(transpose(g0), g0).ranks
    batch = generate_random_batch(g0, 11, seed=6)
    g = apply_batch(g0, batch)
    gt = transpose(g)
    res = dynamic_traversal(g, gt, batch.deletions, batch.insertions, prev)
    ref = dense_pagerank(g.edges(), g.vertex_count, tol=1e-14)
    assert l1_norm_delta(res.ranks, ref) <= 1e-5


def test_df_empty_batch_converges_immediately():
    rng = np.random.default_rng(7)
    g, gt = pair(random_edges(rng, 40, 100), 40)
    prev = rng.random(40)
    for pruning in (False, True):
        res = dynamic_frontier(g, gt, [], [], prev, pruning=pruning)
        assert res.iterations == 1 and res.converged
        assert res.ranks.tobytes() == prev.tobytes()


def test_df_full_frontier_equals_nd():
    rng = np.random.default_rng(8)
    g0, _ = pair(random_edges(rng, 120, 600), 120)
    prev = static_pagerank(transpose(g0), g0).ranks
    g = apply_batch(g0, generate_random_batch(g0, 6, seed=80))
    gt = transpose(g)
    cfg = dataclasses.replace(CFG, frontier_tolerance=0.0)
    nd_iters, df_iters = [], []
    nd = naive_dynamic(gt, g, prev, cfg, callback=lambda i, r: nd_iters.append(r.copy()))
    df = dynamic_frontier(g, gt, [], [], prev, cfg, pruning=False,
                          callback=lambda i, r: df_iters.append(r.copy()),
                          initial_flags=AffectedFlags.all_affected(120))
    assert len(nd_iters) == len(df_iters)
    for a, b in zip(nd_iters, df_iters):
        assert np.max(np.abs(a - b)) <= 1e-12
    assert np.max(np.abs(nd.ranks - df.ranks)) <= 1e-12


def test_dfp_accuracy_and_work():
    g0 = add_self_loops(build_csr(random_digraph(1250, 10_000, seed=9), 1250))
    prev = static_pagerank(transpose(g0), g0).ranks
    batch = generate_random_batch(g0, 1, seed=9)
    g = apply_batch(g0, batch)
    gt = transpose(g)
    ref = dense_pagerank(g.edges(), g.vertex_count, tol=1e-14)
    dfp = dynamic_frontier(g, gt, batch.deletions, batch.insertions, prev, pruning=True)
    nd = naive_dynamic(gt, g, prev)
    assert l1_norm_delta(dfp.ranks, ref) <= 1e-5
    assert dfp.affected_vertex_iterations < nd.affected_vertex_iterations


@pytest.mark.parametrize("strategy", list(PartitionStrategy))
def test_partition_strategies_give_identical_ranks(strategy):
    g0 = add_self_loops(build_csr(random_digraph(400, 6000, seed=10, kind="powerlaw"), 400))
    prev = static_pagerank(transpose(g0), g0).ranks
    batch = generate_random_batch(g0, 20, seed=10)
    g = apply_batch(g0, batch)
    gt = transpose(g)
    base = dataclasses.replace(CFG, low_degree_threshold=8)
    cfg = dataclasses.replace(base, partition_strategy=strategy)
    for approach in APPROACHES:
        want = run_approach(approach, g, gt, batch, prev, base)
        got = run_approach(approach, g, gt, batch, prev, cfg)
        assert got.ranks.tobytes() == want.ranks.tobytes(), approach
        assert got.affected_vertex_iterations == want.affected_vertex_iterations


def test_skipped_vertices_keep_previous_ranks():
    g0 = add_self_loops(build_csr(random_digraph(500, 1500, seed=11), 500))
    prev = static_pagerank(transpose(g0), g0).ranks
    batch = generate_random_batch(g0, 3, seed=11)
    g = apply_batch(g0, batch)
    gt = transpose(g)
    dt_set = mark_reachable(g, traversal_seeds(batch.deletions, batch.insertions)).vertex_affected
    res = dynamic_traversal(g, gt, batch.deletions, batch.insertions, prev)
    assert np.array_equal(res.ranks[dt_set == 0], prev[dt_set == 0])

    touched = np.zeros(500, dtype=bool)
    for pruning in (False, True):
        seen = []
        res = dynamic_frontier(g, gt, batch.deletions, batch.insertions, prev, pruning=pruning,
                               callback=lambda i, r: seen.append(r.copy()))
        for r in seen:
            touched |= r != prev
        assert np.array_equal(res.ranks[~touched], prev[~touched])


def test_result_invariants_and_work_ordering():
    g0 = add_self_loops(build_csr(random_digraph(2000, 16_000, seed=12, kind="powerlaw"), 2000))
    prev = static_pagerank(transpose(g0), g0).ranks
    batch = generate_random_batch(g0, 2, seed=12)
    g = apply_batch(g0, batch)
    gt = transpose(g)
    ref = compute_reference_ranks(gt, g).ranks
    results = {a: run_approach(a, g, gt, batch, prev) for a in APPROACHES}
    for res in results.values():
        assert res.iterations <= CFG.max_iterations
        assert res.affected_vertex_iterations <= res.iterations * g.vertex_count
        assert not res.converged or res.final_delta <= CFG.tolerance
        assert l1_norm_delta(res.ranks, ref) <= 1e-5
    work = {a: r.affected_vertex_iterations for a, r in results.items()}
    assert work["dfp"] <= work["df"] <= work["nd"]


def test_engines_are_deterministic():
    g0 = add_self_loops(build_csr(random_digraph(600, 5000, seed=13, kind="powerlaw"), 600))
    prev = static_pagerank(transpose(g0), g0).ranks
    batch = generate_random_batch(g0, 10, seed=13)
    g = apply_batch(g0, batch)
    gt = transpose(g)
    for approach in APPROACHES:
        a = run_approach(approach, g, gt, batch, prev)
        b = run_approach(approach, g, gt, batch, prev)
        assert a.ranks.tobytes() == b.ranks.tobytes()


def test_unknown_approach():
    g, gt = pair([], 2)
    with pytest.raises(InputError):
        run_approach("pr", g, gt, BatchUpdate(), None)
