from __future__ import annotations

import random
from dataclasses import dataclass

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairjoin import CandidateMatch, ContractViolation, MatchingTree, clause, rule, sorted_merge
from fairjoin.matchers import GuardChecker, MatcherStats
from fairjoin.tree import BACKINGS, split_evenly


@dataclass(frozen=True)
class A:
    v: int = 0


@dataclass(frozen=True)
class B:
    v: int = 0


DEPTH_FIRST_ORDER = [(), (1,), (1, 2), (1, 2, 3), (1, 3), (2,), (2, 3), (3,)]


@pytest.mark.parametrize("backing", BACKINGS)
def test_unconstrained_growth_order(backing):
    tree = MatchingTree.unconstrained(backing)
    for i in (1, 2, 3):
        assert tree.ramify_eager(i, A) == []
    assert tree.nodes() == DEPTH_FIRST_ORDER


def _tree_with(r, messages, backing="ordered"):
    tree = MatchingTree.for_rule(r, backing=backing)
    for idx, msg in messages:
        assert tree.ramify_eager(idx, type(msg)) == []
    return tree


def never(*_):
    return None


@pytest.mark.parametrize("backing", BACKINGS)
def test_capacity_blocks_second_message_of_a_type(backing):
    tree = _tree_with(rule(A, B), [(1, A())], backing)
    assert tree.ramify_eager(2, A) == []
    assert tree.nodes() == [(), (1,), (2,)]


@pytest.mark.parametrize("backing", BACKINGS)
def test_complete_child_reported_not_stored(backing):
    tree = _tree_with(rule(A, B), [(1, A())], backing)
    complete = tree.ramify_eager(2, B)
    assert complete == [((1, 2), ((1,), (2,)))]
    assert tree.nodes() == [(), (1,), (2,)]


def test_zero_capacity_type_leaves_tree_unchanged():
    tree = _tree_with(rule(A, A), [(1, A())])
    before = tree.nodes()
    assert tree.ramify_eager(2, B) == []
    assert tree.nodes() == before


def test_non_monotonic_index_rejected():
    tree = _tree_with(rule(A, B), [(5, A())])
    with pytest.raises(ContractViolation):
        tree.ramify_eager(5, B)
    with pytest.raises(ContractViolation):
        tree.ramify_lazy(3, B, never)


def _checker(r, store):
    return GuardChecker(r, 0, store, MatcherStats())


@pytest.mark.parametrize("backing", BACKINGS)
def test_lazy_stops_at_first_valid_child(backing):
    r = rule(A, B)
    store = {1: A(), 2: B()}
    tree = _tree_with(r, [(1, store[1])], backing)
    found = tree.ramify_lazy(2, B, _checker(r, store))
    assert found == CandidateMatch((1, 2), (1, 2), 0)
    # the root's child {2} comes before {1,2} in traversal order but is not kept
    assert tree.nodes() == [(), (1,)]


@pytest.mark.parametrize("backing", BACKINGS)
def test_lazy_with_failing_guard_equals_eager(backing):
    r = rule(A, B, guard=[clause(lambda: False)])
    lazy = _tree_with(r, [(1, A())], backing)
    eager = _tree_with(r, [(1, A())], backing)
    assert lazy.ramify_lazy(2, B, _checker(r, {1: A(), 2: B()})) is None
    eager.ramify_eager(2, B)
    assert lazy.nodes() == eager.nodes() == [(), (1,), (2,)]


def test_lazy_picks_fairest_valid_completion():
    r = rule(A, B, guard=[clause(lambda a, b: a.v == b.v, 0, 1)])
    store = {1: A(5), 3: B(7), 4: B(5)}
    tree = _tree_with(r, [(1, store[1])])
    assert tree.ramify_lazy(3, B, _checker(r, store)) is None
    found = tree.ramify_lazy(4, B, _checker(r, store))
    assert found.node == (1, 4)


@pytest.mark.parametrize("backing", BACKINGS)
def test_prune(backing):
    tree = MatchingTree.unconstrained(backing)
    tree._reset_entries([((), ((),)), ((1,), ((1,),)), ((1, 3), ((1, 3),)), ((2,), ((2,),)), ((3,), ((3,),))])
    assert tree.prune(()) == 0
    assert tree.prune({1, 2}) == 3
    assert tree.nodes() == [(), (3,)]
    tree.prune({3, 99})
    assert tree.nodes() == [()]


def test_partition_examples():
    tree = MatchingTree.unconstrained()
    for i in (1, 2, 3):
        tree.ramify_eager(i, A)
    segs = tree.partition(2)
    assert [len(s) for s in segs] == [4, 4]
    assert segs[0][-1] < segs[1][0]
    single = MatchingTree.unconstrained()
    assert [len(s) for s in single.partition(8)] == [1]
    seven = split_evenly(list(range(7)), 2)
    assert sorted(len(s) for s in seven) == [3, 4]
    assert sum(seven, []) == list(range(7))
    with pytest.raises(ContractViolation):
        tree.partition(0)


@given(st.integers(0, 50), st.integers(1, 12))
def test_split_evenly_balanced(n, k):
    segs = split_evenly(list(range(n)), k)
    assert sum(segs, []) == list(range(n))
    assert len(segs) <= k
    sizes = [len(s) for s in segs]
    assert max(sizes) - min(sizes) <= 1


def _two_pointer_merge(xs, ys):
    out, i, j = [], 0, 0
    while i < len(xs) and j < len(ys):
        if ys[j] < xs[i]:
            out.append(ys[j])
            j += 1
        else:
            out.append(xs[i])
            i += 1
    return out + xs[i:] + ys[j:]


def test_sorted_merge_examples():
    assert sorted_merge([], [((1,), ())]) == [((1,), ())]
    got = sorted_merge([((1,), ())], [((1, 2), ()), ((2,), ())])
    assert [n for n, _ in got] == [(1,), (1, 2), (2,)]


@given(st.sets(st.lists(st.integers(1, 9), max_size=4, unique=True).map(lambda xs: tuple(sorted(xs))), max_size=40))
def test_sorted_merge_matches_two_pointer_oracle(node_set):
    nodes = list(node_set)
    random.Random(len(nodes)).shuffle(nodes)
    cut = len(nodes) // 2
    xs = sorted((n, ()) for n in nodes[:cut])
    ys = sorted((n, ()) for n in nodes[cut:])
    assert sorted_merge(xs, ys) == _two_pointer_merge(xs, ys)


ops = st.lists(st.tuples(st.sampled_from(["A", "B", "prune"]), st.integers(0, 3)), max_size=25)


@settings(max_examples=80)
@given(ops)
def test_random_operations_keep_order_and_no_complete_nodes(seq):
    r = rule(A, A, B)
    trees = {b: MatchingTree.for_rule(r, backing=b) for b in BACKINGS}
    idx = 0
    for op, k in seq:
        if op == "prune":
            for t in trees.values():
                t.prune({max(1, idx - k)})
            continue
        idx += 1
        tag = A if op == "A" else B
        for t in trees.values():
            t.ramify_eager(idx, tag)
    for t in trees.values():
        nodes = t.nodes()
        assert nodes == sorted(nodes) and len(set(nodes)) == len(nodes)
        assert nodes[0] == ()
        assert all(len(n) < r.size for n in nodes)
        for node, bins in t:
            assert tuple(sorted(sum(bins, ()))) == node
    assert trees["ordered"].nodes() == trees["array"].nodes()


@pytest.mark.parametrize("backing", BACKINGS)
def test_stepwise_and_two_pass_match_eager(backing):
    r = rule(A, A, B)
    kinds = [A, B, A, A, B, A, B, B, A]
    trees = {name: MatchingTree.for_rule(r, backing=backing) for name in ("eager", "step", "two", "lazy", "lazystep")}
    for i, tag in enumerate(kinds, 1):
        c1 = trees["eager"].ramify_eager(i, tag)
        c2 = trees["step"].ramify_eager_stepwise(i, tag)
        c3 = trees["two"].ramify_two_pass(i, tag)
        trees["lazy"].ramify_lazy(i, tag, never)
        trees["lazystep"].ramify_lazy_stepwise(i, tag, never)
        assert c1 == c2 == c3
    reference = trees["eager"].nodes()
    assert all(t.nodes() == reference for t in trees.values())
