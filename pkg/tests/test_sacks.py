"""Horizon trees, refinement maps, and the fusion chain machinery."""

from __future__ import annotations

import itertools
import random

import pytest

from gen import rand_hpt, rand_rmap
from shrinkwrap.sacks import (
    FusionReport,
    HorizonPerfectTree,
    RMap,
    fusion_intersect,
    fusion_union,
    hpt_branching_nodes,
    hpt_leq_n,
    hpt_stem,
    stem_or_path,
    verify_fusion_helper,
)


def single_path(horizon, path=()):
    """Branchless tree following ``path`` then all zeros."""
    bits = tuple(path) + (0,) * (horizon - len(path))
    return HorizonPerfectTree(
        horizon, frozenset(bits[:l] for l in range(horizon + 1))
    )


def stem_then_full(horizon, stem):
    full = HorizonPerfectTree.full(horizon)
    return full.below(tuple(stem))


class TestHorizonPerfectTree:
    def test_full_tree_size(self):
        p = HorizonPerfectTree.full(3)
        assert len(p.nodes) == 15
        assert p.paths() == frozenset(itertools.product((0, 1), repeat=3))

    def test_prefix_closure_required(self):
        with pytest.raises(ValueError):
            HorizonPerfectTree(2, frozenset({(), (0, 1)}))

    def test_extendibility_required(self):
        # (1,) stops short of the horizon
        with pytest.raises(ValueError):
            HorizonPerfectTree(2, frozenset({(), (0,), (1,), (0, 0)}))

    def test_binary_words_required(self):
        with pytest.raises(ValueError):
            HorizonPerfectTree(2, frozenset({(), (2,), (2, 0)}))
        with pytest.raises(ValueError):
            HorizonPerfectTree(1, frozenset({(), (0,), (0, 0)}))

    def test_below_keeps_comparables(self):
        p = HorizonPerfectTree.full(3)
        q = p.below((0, 1))
        assert q.nodes == frozenset(
            {(), (0,), (0, 1), (0, 1, 0), (0, 1, 1)}
        )
        with pytest.raises(ValueError):
            p.below((0, 1, 0, 1))

    def test_gap_of_full_tree_is_one(self):
        assert HorizonPerfectTree.full(4).gap() == 1

    def test_gap_of_branchless_tree_spans_the_horizon(self):
        assert single_path(3).gap() == 4

    def test_gap_sees_the_last_split(self):
        # splits at the root only; below that, single paths of length 2
        p = HorizonPerfectTree(
            3,
            frozenset(
                {(), (0,), (1,), (0, 0), (1, 1), (0, 0, 0), (1, 1, 0)}
            ),
        )
        assert p.gap() == 3


class TestStem:
    def test_full_tree_stems_at_the_root(self):
        assert hpt_stem(HorizonPerfectTree.full(3)) == ()

    def test_fixed_prefix_then_full(self):
        assert hpt_stem(stem_then_full(4, (0, 1))) == (0, 1)

    def test_branchless_tree_is_an_error_but_has_a_path(self):
        p = single_path(3, (1, 0))
        with pytest.raises(ValueError):
            hpt_stem(p)
        assert stem_or_path(p) == (1, 0, 0)


class TestBranchingNodes:
    def test_full_depth_three(self):
        p = HorizonPerfectTree.full(3)
        assert hpt_branching_nodes(p, 0) == {()}
        assert hpt_branching_nodes(p, 1) == {(0,), (1,)}
        assert hpt_branching_nodes(p, 2) == set(
            itertools.product((0, 1), repeat=2)
        )
        assert hpt_branching_nodes(p, 3) == frozenset()

    def test_stem_tree(self):
        assert hpt_branching_nodes(stem_then_full(3, (0,)), 0) == {(0,)}

    def test_orders_partition_the_branching_nodes(self):
        rng = random.Random(5)
        for _ in range(20):
            p = rand_hpt(rng, 8)
            seen = set()
            for k in range(9):
                level = hpt_branching_nodes(p, k)
                assert not (level & seen)
                seen |= level
            assert seen == p.branching_nodes()


class TestLeqN:
    def test_reflexive(self):
        rng = random.Random(6)
        for _ in range(10):
            p = rand_hpt(rng, 6)
            assert hpt_leq_n(p, p, rng.randrange(5))

    def test_cutting_the_root_split_breaks_order_zero(self):
        p = HorizonPerfectTree.full(3)
        q = p.below((0,))
        assert not hpt_leq_n(q, p, 0)

    def test_thinning_deeper_levels_breaks_higher_orders_only(self):
        p = HorizonPerfectTree.full(3)
        q = HorizonPerfectTree(
            3, frozenset(t for t in p.nodes if t[:2] != (0, 0))
        )
        assert hpt_leq_n(q, p, 0)
        assert not hpt_leq_n(q, p, 1)  # (0,) no longer splits

    def test_non_subset_fails(self):
        p = HorizonPerfectTree.full(2).below((0,))
        q = HorizonPerfectTree.full(2)
        assert not hpt_leq_n(q, p, 0)

    def test_horizon_mismatch_rejected(self):
        with pytest.raises(ValueError):
            hpt_leq_n(HorizonPerfectTree.full(2), HorizonPerfectTree.full(3), 0)


class TestRMap:
    def test_needs_every_word(self):
        full = HorizonPerfectTree.full(4)
        with pytest.raises(ValueError):
            RMap(1, {(): full, (0,): full})

    def test_needs_one_horizon(self):
        with pytest.raises(ValueError):
            RMap(1, {
                (): HorizonPerfectTree.full(3),
                (0,): HorizonPerfectTree.full(3),
                (1,): HorizonPerfectTree.full(4),
            })

    def test_lookup(self):
        rng = random.Random(7)
        rmap = rand_rmap(rng, 2, 8)
        assert rmap.at((0, 1)).nodes <= rmap.at((0,)).nodes
        with pytest.raises(ValueError):
            rmap.at((0, 1, 0))


class TestFusionUnion:
    def test_constant_map_returns_the_root_tree(self):
        full = HorizonPerfectTree.full(3)
        rmap = RMap(1, {(): full, (0,): full, (1,): full})
        assert fusion_union(rmap, 0) == full
        assert fusion_union(rmap, 1) == full

    def test_union_contains_both_stems(self):
        rng = random.Random(8)
        rmap = rand_rmap(rng, 1, 8)
        p1 = fusion_union(rmap, 1)
        assert stem_or_path(rmap.at((0,))) in p1.nodes
        assert stem_or_path(rmap.at((1,))) in p1.nodes

    def test_levels_shrink(self):
        rng = random.Random(9)
        for _ in range(10):
            rmap = rand_rmap(rng, 3, 10)
            unions = [fusion_union(rmap, n) for n in range(4)]
            for small, big in zip(unions[1:], unions):
                assert small.nodes <= big.nodes

    def test_level_bounds(self):
        rmap = rand_rmap(random.Random(10), 2, 8)
        with pytest.raises(ValueError):
            fusion_union(rmap, 3)
        with pytest.raises(ValueError):
            fusion_union(rmap, -1)


class TestVerifyFusionHelper:
    def test_generated_maps_pass(self):
        rng = random.Random(11)
        for _ in range(25):
            report = verify_fusion_helper(rand_rmap(rng, 4, 12))
            assert report.passed, report.failures
            assert len(report.chain) == 5

    def test_equal_successor_stems_reported(self):
        full = HorizonPerfectTree.full(4)
        sub = full.below((0,))
        rmap = RMap(1, {(): full, (0,): sub, (1,): sub})
        report = verify_fusion_helper(rmap)
        assert not report.passed
        assert any("stems" in f for f in report.failures)

    def test_non_monotone_reported(self):
        full = HorizonPerfectTree.full(4)
        rmap = RMap(1, {(): full.below((0,)), (0,): full.below((0, 0)), (1,): full})
        report = verify_fusion_helper(rmap)
        assert not report.passed
        assert any("refinement" in f for f in report.failures)

    def test_comparable_but_unequal_stems_reported(self):
        full = HorizonPerfectTree.full(4)
        rmap = RMap(
            1, {(): full, (0,): full.below((0,)), (1,): full.below((0, 1))}
        )
        report = verify_fusion_helper(rmap)
        assert not report.passed
        assert any("stems" in f for f in report.failures)


def lcp(u, v):
    out = []
    for a, b in zip(u, v):
        if a != b:
            break
        out.append(a)
    return tuple(out)


class TestLargestCommonSegmentClaim:
    def test_branching_nodes_come_from_successor_stems(self):
        rng = random.Random(12)
        for _ in range(10):
            rmap = rand_rmap(rng, 4, 12)
            report = verify_fusion_helper(rmap)
            assert report.passed
            for n in range(1, rmap.depth + 1):
                p_n = report.chain[n]
                for k in range(n):
                    meets = {
                        lcp(
                            stem_or_path(rmap.at(s + (0,))),
                            stem_or_path(rmap.at(s + (1,))),
                        )
                        for s in itertools.product((0, 1), repeat=k)
                    }
                    for t in hpt_branching_nodes(p_n, k):
                        assert t in meets


class TestFusionIntersect:
    def test_constant_chain(self):
        p = HorizonPerfectTree.full(3)
        assert fusion_intersect([p, p, p]) == p

    def test_helper_chains_collapse_to_the_last_link(self):
        rng = random.Random(13)
        for _ in range(10):
            report = verify_fusion_helper(rand_rmap(rng, 4, 12))
            assert report.passed
            tail = report.chain[1:]
            out = fusion_intersect(tail)
            assert out == tail[-1]
            for p in tail:
                assert out.nodes <= p.nodes
            assert out.gap() <= max(p.gap() for p in tail)

    def test_broken_chain_rejected(self):
        p = HorizonPerfectTree.full(3)
        with pytest.raises(ValueError):
            fusion_intersect([p, p.below((0,))])  # loses the root split

    def test_empty_chain_rejected(self):
        with pytest.raises(ValueError):
            fusion_intersect([])
