import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modonet.core import to_tuples
from modonet.network import Network, validate
from modonet.oracle import brute_force_frontier
from modonet.problems import build_model, generate, packing_example
from modonet.recursion import compile_model
from modonet.solver import to_canonical
from modonet.vpo import (
    _out_signature,
    apply_vpos,
    is_isolating,
    local_arc_removal,
    node_merge,
    prune_parallel_arcs,
    reduce_sweep,
    weight_shift,
)

from conftest import T, U42, U61, U62, U63, U71, U72, R, path_weight_multiset, random_network


def arcs_between(net: Network, u: int, v: int) -> list[tuple[int, ...]]:
    return sorted(tuple(int(x) for x in net.arc_weight[a]) for a in net.out_arcs(u) if net.arc_term[a] == v)


def bundle(weights) -> Network:
    """Two-stage network whose first stage is a bundle of parallel arcs."""
    arcs = [(0, 1, w, i) for i, w in enumerate(weights)] + [(1, 2, (0,) * len(weights[0]), 0)]
    return Network.from_layers([1, 1, 1], arcs)


def sizes(net: Network) -> tuple[int, int]:
    return net.num_nodes, net.num_arcs


class TestWeightShift:
    def test_shift_moves_terminal_weight_upstream(self, hand_network):
        weight_shift(hand_network, U72, (2, 8, 2))
        assert arcs_between(hand_network, U72, T) == [(0, 0, 0)]
        assert arcs_between(hand_network, U62, U72) == [(2, 8, 2)]
        assert arcs_between(hand_network, U63, U72) == [(2, 8, 2)]

    def test_zero_shift_is_noop(self, hand_network):
        before = hand_network.dump()
        weight_shift(hand_network, U61, (0, 0, 0))
        assert hand_network.dump() == before

    def test_root_rejected(self, hand_network):
        with pytest.raises(ValueError):
            weight_shift(hand_network, R, (1, 1, 1))

    def test_overflow(self):
        big = np.iinfo(np.int64).max
        net = Network.from_layers([1, 1, 1], [(0, 1, (big,), 0), (1, 2, (0,), 0)])
        with pytest.raises(OverflowError):
            weight_shift(net, 1, (1,))

    @settings(max_examples=40)
    @given(st.integers(0, 100_000))
    def test_path_multiset_preserved(self, seed):
        rng = np.random.default_rng(seed)
        net = random_network(rng, int(rng.integers(2, 8)), 3)
        before = path_weight_multiset(net)
        inner = [u for u in range(len(net.node_layer)) if u not in (net.root, net.terminal)]
        for u in rng.choice(inner, size=min(3, len(inner)), replace=False):
            weight_shift(net, int(u), rng.integers(-20, 20, 3))
        assert path_weight_multiset(net) == before


class TestNodeMerge:
    def test_merge_after_shift(self, hand_network):
        before = path_weight_multiset(hand_network)
        weight_shift(hand_network, U72, (2, 8, 2))
        assert node_merge(hand_network, U71, U72)
        assert hand_network.layer_sizes() == [1, 2, 3, 2, 2, 3, 1, 1]
        assert arcs_between(hand_network, U62, U71) == [(1, 3, 5), (2, 8, 2)]
        assert path_weight_multiset(hand_network) == before
        assert validate(hand_network) == []

    def test_parallel_arcs_incomparable_kept(self, hand_network):
        weight_shift(hand_network, U72, (2, 8, 2))
        node_merge(hand_network, U71, U72)
        assert prune_parallel_arcs(hand_network) == 0
        assert arcs_between(hand_network, U62, U71) == [(1, 3, 5), (2, 8, 2)]

    def test_signature_mismatch_no_mutation(self, hand_network):
        before = hand_network.dump()
        assert not node_merge(hand_network, U61, U62)  # one out-arc vs two
        assert hand_network.dump() == before

    def test_different_layers_rejected(self, hand_network):
        with pytest.raises(ValueError):
            node_merge(hand_network, U61, U71)


class TestReduceSweep:
    def test_packing_network_reduced(self):
        net = compile_model(build_model(packing_example()))
        reduce_sweep(net)
        prune_parallel_arcs(net)
        assert net.layer_sizes() == [1, 2, 3, 2, 2, 3, 2, 1]
        assert net.count_paths() == 14
        assert validate(net) == []

    def test_idempotent(self):
        for seed in range(10):
            net = compile_model(build_model(generate("knapsack", 10, 3, seed)))
            reduce_sweep(net)
            again = reduce_sweep(net)
            assert again.merges_applied == 0 and again.shifts_applied == 0

    def test_no_mergeable_pairs_left(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            net = random_network(rng, 6, 2, width=4, lo=0, hi=2)
            reduce_sweep(net)
            for j in range(2, net.n + 1):
                ids = [int(u) for u in net.layer(j)]
                sigs = [_out_signature(net, u) for u in ids]
                assert len(set(map(tuple, sigs))) == len(ids)

    @pytest.mark.parametrize("seed", range(50))
    def test_knapsack_frontier_preserved(self, seed):
        inst = generate("knapsack", 6 + seed % 7, 2 + seed % 3, seed)
        net = compile_model(build_model(inst))
        before = path_weight_multiset(net)
        n0, a0 = sizes(net)
        reduce_sweep(net)
        assert path_weight_multiset(net) == before
        assert np.array_equal(net.enumerated_frontier(), to_canonical(brute_force_frontier(inst), inst.sense))
        n1, a1 = sizes(net)
        assert n1 <= n0 and a1 <= a0


class TestPruneParallel:
    def test_dominated_removed(self):
        net = bundle([(1, 1), (2, 2)])
        assert prune_parallel_arcs(net) == 1
        assert arcs_between(net, 0, 1) == [(2, 2)]

    def test_incomparable_kept(self):
        net = bundle([(1, 3, 5), (2, 8, 2)])
        assert prune_parallel_arcs(net) == 0

    def test_equal_one_survivor(self):
        net = bundle([(3, 3), (3, 3)])
        assert prune_parallel_arcs(net) == 1
        assert int(net.arc_decision[net.out_arcs(0)[0]]) == 0  # lowest id survives

    @settings(max_examples=40)
    @given(st.integers(0, 100_000))
    def test_frontier_preserved(self, seed):
        rng = np.random.default_rng(seed)
        net = random_network(rng, 5, 2, lo=0, hi=4)
        before = to_tuples(net.enumerated_frontier())
        prune_parallel_arcs(net)
        assert to_tuples(net.enumerated_frontier()) == before
        assert validate(net) == []


class TestIsolating:
    def test_chain_all_pairs(self):
        net = Network.from_layers([1] * 6, [(j, j + 1, (j, 0), 0) for j in range(5)])
        for u, v in itertools.combinations(range(6), 2):
            assert is_isolating(net, u, v)

    def test_side_entry_breaks_isolation(self, hand_network):
        # the node after U42 also receives an arc from U41
        assert not is_isolating(hand_network, U42, T)

    def test_root_terminal(self, hand_network):
        assert is_isolating(hand_network, R, T)

    def test_diamond(self):
        net = Network.from_layers([1, 2, 1, 1], [(0, 1, (0,)), (0, 2, (1,)), (1, 3, (0,)), (2, 3, (0,)), (3, 4, (0,))])
        assert is_isolating(net, 0, 3)
        assert not is_isolating(net, 1, 3)

    def test_layer_order_required(self, hand_network):
        with pytest.raises(ValueError):
            is_isolating(hand_network, T, R)


class TestArcRemoval:
    def test_dominated_private_path_removed(self):
        arcs = [(0, 1, (0, 0), 0), (1, 3, (1, 1), 0), (0, 2, (0, 0), 1), (2, 3, (2, 2), 1)]
        net = Network.from_layers([1, 2, 1], arcs)
        stats = local_arc_removal(net)
        assert stats.arcs_removed == 2 and stats.nodes_removed == 1
        assert to_tuples(net.all_path_weights()) == [(2, 2)]
        assert validate(net) == []

    def test_all_unique_nondominated_untouched(self):
        arcs = [(0, 1, (0, 0), 0), (1, 3, (1, 3), 0), (0, 2, (0, 0), 1), (2, 3, (3, 1), 1)]
        net = Network.from_layers([1, 2, 1], arcs)
        assert local_arc_removal(net).arcs_removed == 0

    def test_delta_must_be_positive(self, hand_network):
        with pytest.raises(ValueError):
            local_arc_removal(hand_network, delta=0)

    @pytest.mark.parametrize("seed", range(50))
    def test_setpack_frontier_preserved(self, seed):
        inst = generate("setpack", 6 + seed % 7, 2 + seed % 3, seed, rows=3, row_size=3)
        net = compile_model(build_model(inst))
        n0, a0 = sizes(net)
        local_arc_removal(net)
        assert np.array_equal(net.enumerated_frontier(), to_canonical(brute_force_frontier(inst), inst.sense))
        n1, a1 = sizes(net)
        assert n1 <= n0 and a1 <= a0
        assert validate(net) == []

    @settings(max_examples=60)
    @given(st.integers(0, 100_000), st.integers(1, 3))
    def test_random_network_frontier_preserved(self, seed, delta):
        rng = np.random.default_rng(seed)
        net = random_network(rng, int(rng.integers(2, 7)), 2, lo=0, hi=5)
        before = to_tuples(net.enumerated_frontier())
        local_arc_removal(net, delta=delta)
        assert to_tuples(net.enumerated_frontier()) == before
        assert validate(net) == []


class TestPipeline:
    @settings(max_examples=40)
    @given(st.integers(0, 100_000), st.booleans(), st.booleans(), st.booleans())
    def test_any_subset_preserves_frontier(self, seed, reduce, prune, removal):
        rng = np.random.default_rng(seed)
        net = random_network(rng, int(rng.integers(2, 7)), 3, lo=-3, hi=4)
        before = to_tuples(net.enumerated_frontier())
        n0, a0 = sizes(net)
        apply_vpos(net, reduce=reduce, prune=prune, arc_removal=removal)
        assert to_tuples(net.enumerated_frontier()) == before
        assert validate(net) == []
        n1, a1 = sizes(net)
        assert n1 <= n0 and a1 <= a0
