"""Interchangeable matching algorithms.

Every matcher consumes messages from a mailbox one at a time, numbering them
from 1 in arrival order, until some rule fires; it then runs that rule's body
and returns the body's result.  All variants select exactly the same matches
(the fairest one available after each arrival) and differ only in how much
work they perform to find it.
"""

from __future__ import annotations

import enum
import itertools
import os
import threading
from collections import Counter
from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from .core import (
    CandidateMatch,
    Continue,
    JoinDefinition,
    ReactionRule,
    Result,
    assignments_from_bins,
)
from .filtering import DefinitionFilters
from .tree import Entry, MatchingTree, grow_segment, search_segment, split_evenly

__all__ = [
    "AlgorithmId",
    "BruteForceMatcher",
    "Firing",
    "GuardChecker",
    "Matcher",
    "MatcherStats",
    "brute_force_match",
    "default_workers",
    "parallel_lazy_search",
    "receive",
]


@dataclass
class MatcherStats:
    messages_taken: int = 0
    matches: int = 0
    guard_evaluations: int = 0
    discarded: int = 0
    peak_nodes: int = 0


@dataclass(frozen=True, slots=True)
class Firing:
    rule_index: int
    node: tuple[int, ...]
    assignment: tuple[int, ...]
    messages: tuple = field(compare=False)

    @property
    def key(self) -> tuple:
        return self.rule_index, self.node, self.assignment


class GuardChecker:
    """Finds the fairest guard-satisfying assignment of a complete node.

    Called with ``(node, bins)``; returns a :class:`CandidateMatch` or
    ``None``.  Each tested assignment counts as one guard evaluation.
    """

    __slots__ = ("rule", "rule_index", "messages", "counter", "_simple", "_checks")

    def __init__(self, rule: ReactionRule, rule_index: int, messages: Mapping[int, Any], counter) -> None:
        self.rule = rule
        self.rule_index = rule_index
        self.messages = messages
        self.counter = counter
        self._simple = all(c == 1 for c in rule.capacity)
        self._checks = rule.compiled_guard

    def fork(self) -> GuardChecker:
        return GuardChecker(self.rule, self.rule_index, self.messages, MatcherStats())

    def __call__(self, node, bins) -> CandidateMatch | None:
        messages = self.messages
        checks = self._checks
        counter = self.counter
        if self._simple:
            # distinct types: slot s is position s
            assignment = tuple([b[0] for b in bins])
            counter.guard_evaluations += 1
            if checks:
                msgs = [messages[i] for i in assignment]
                for check in checks:
                    if not check(msgs):
                        return None
            return CandidateMatch(node, assignment, self.rule_index)
        for assignment in assignments_from_bins(bins, self.rule):
            counter.guard_evaluations += 1
            msgs = [messages[i] for i in assignment]
            for check in checks:
                if not check(msgs):
                    break
            else:
                return CandidateMatch(node, assignment, self.rule_index)
        return None


# --------------------------------------------------------------------------
# Worker lanes for the parallel variants

_pool: ThreadPoolExecutor | None = None
_pool_lock = threading.Lock()
_CANCEL_POLL = 64


def worker_pool() -> ThreadPoolExecutor:
    global _pool
    with _pool_lock:
        if _pool is None:
            _pool = ThreadPoolExecutor(max_workers=max(32, os.cpu_count() or 1), thread_name_prefix="fairjoin-worker")
        return _pool


def default_workers() -> int:
    """Smallest power of two not below the available parallelism."""
    try:
        cpus = len(os.sched_getaffinity(0))
    except AttributeError:
        cpus = os.cpu_count() or 1
    n = 1
    while n < cpus:
        n *= 2
    return n


def _lazy_worker(segment: list[Entry], idx, slot, cap, size, checker: GuardChecker, cancel: threading.Event):
    additions: list[Entry] = []
    for start in range(0, len(segment), _CANCEL_POLL):
        if cancel.is_set():
            return None, []
        found, adds = search_segment(segment[start : start + _CANCEL_POLL], idx, slot, cap, size, checker)
        if found is not None:
            return found, adds
        additions.extend(adds)
    return None, additions


def parallel_lazy_search(
    tree: MatchingTree,
    idx: int,
    tag: type,
    n_workers: int,
    validate: GuardChecker,
    *,
    threshold: int = 0,
) -> CandidateMatch | None:
    """Lazy ramification split over ``n_workers`` segments of the tree.

    Workers are awaited in segment order; the first reported match cancels
    the remaining workers and is returned with the tree untouched.  With no
    match, every worker's additions are merged into the tree.  Trees with at
    most ``threshold`` nodes are searched on the calling lane.
    """
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    slot = tree.slot_for(idx, tag)
    if slot is None:
        return None
    cap, size = tree.capacity[slot], tree.size
    if n_workers == 1 or len(tree) <= threshold:
        found, additions = search_segment(tree, idx, slot, cap, size, validate)
        if found is None:
            tree.insert(additions)
        return found
    segments = tree.partition(n_workers)
    cancel = threading.Event()
    forks = [validate.fork() for _ in segments]
    pool = worker_pool()
    futures = [pool.submit(_lazy_worker, seg, idx, slot, cap, size, fk, cancel) for seg, fk in zip(segments, forks)]
    additions: list[Entry] = []
    try:
        for fut, fk in zip(futures, forks):
            found, adds = fut.result()
            validate.counter.guard_evaluations += fk.counter.guard_evaluations
            if found is not None:
                return found
            additions.extend(adds)
    finally:
        cancel.set()
        for fut in futures:
            fut.cancel()
    tree.insert(additions)
    return None


def parallel_eager_grow(tree: MatchingTree, idx: int, tag: type, n_workers: int, *, threshold: int = 0) -> list[Entry]:
    """Full ramification split over worker lanes; returns complete children in node order."""
    slot = tree.slot_for(idx, tag)
    if slot is None:
        return []
    cap, size = tree.capacity[slot], tree.size
    if n_workers == 1 or len(tree) <= threshold:
        complete, additions = grow_segment(tree, idx, slot, cap, size)
    else:
        pool = worker_pool()
        futures = [pool.submit(grow_segment, seg, idx, slot, cap, size) for seg in tree.partition(n_workers)]
        complete, additions = [], []
        for fut in futures:
            c, a = fut.result()
            complete.extend(c)
            additions.extend(a)
    tree.insert(additions)
    return complete


# --------------------------------------------------------------------------
# Matchers


class Matcher:
    """Common store handling, match firing and the blocking ``apply`` loop."""

    def __init__(self, definition: JoinDefinition | Iterable[ReactionRule], *, trace: bool = False) -> None:
        if not isinstance(definition, JoinDefinition):
            definition = JoinDefinition(tuple(definition))
        self.definition = definition
        self.stats = MatcherStats()
        self.trace: list[Firing] | None = [] if trace else None
        self.discarded: list | None = [] if trace else None
        self._rules_of: dict[type, tuple[int, ...]] = {}
        for i, r in enumerate(definition.rules):
            for t in dict.fromkeys(r.types):
                self._rules_of[t] = self._rules_of.get(t, ()) + (i,)
        self.reset()

    def reset(self) -> None:
        """Forget every taken message and all partial matches."""
        self._store: dict[int, Any] = {}
        self._next_index = 1

    def apply(self, mailbox, self_ref=None) -> Result:
        while True:
            found = self.step(mailbox.take())
            if found is not None:
                return self.fire(found, self_ref)

    def step(self, msg) -> CandidateMatch | None:
        """Take one message; return the fairest match now available, if any."""
        raise NotImplementedError

    def _assign(self, msg) -> int:
        idx = self._next_index
        self._next_index = idx + 1
        self.stats.messages_taken += 1
        return idx

    def fire(self, match: CandidateMatch, self_ref=None) -> Result:
        rule = self.definition.rules[match.rule_index]
        store = self._store
        msgs = tuple([store[i] for i in match.assignment])
        for i in match.node:
            del store[i]
        self._consumed(match, msgs)
        self.stats.matches += 1
        if self.trace is not None:
            self.trace.append(Firing(match.rule_index, match.node, match.assignment, msgs))
        result = rule.body(msgs, self_ref)
        return Continue if result is None else result

    def _consumed(self, match: CandidateMatch, msgs: tuple) -> None:
        pass

    def stored_messages(self) -> list:
        return list(self._store.values())

    def stored_indices(self) -> list[int]:
        return list(self._store)

    @property
    def algorithm(self) -> AlgorithmId:
        return _ID_OF_CLASS[type(self)]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self.definition)} rules, {len(self._store)} stored)"


def brute_force_match(store: Mapping[int, Any], definition: JoinDefinition, stats=None) -> CandidateMatch | None:
    """Fairest valid match over all stored messages, by exhaustive enumeration.

    ``stats``, when given, has its ``guard_evaluations`` bumped once per
    tested assignment.
    """
    best: CandidateMatch | None = None
    for ri, rule in enumerate(definition.rules):
        need = Counter(rule.types)
        types = rule.types
        by_type = {t: sorted(i for i, m in store.items() if type(m) is t) for t in need}
        if any(len(by_type[t]) < c for t, c in need.items()):
            continue
        # every index set with the right count of each type, in ascending node order
        nodes = sorted(
            tuple(sorted(itertools.chain.from_iterable(parts)))
            for parts in itertools.product(*(itertools.combinations(by_type[t], c) for t, c in need.items()))
        )
        for node in nodes:
            perms = sorted(
                p for p in itertools.permutations(node) if all(type(store[i]) is t for i, t in zip(p, types))
            )
            if stats is not None:
                stats.guard_evaluations += len(perms)
            valid = [p for p in perms if all(c.evaluate([store[i] for i in p]) for c in rule.guard)]
            if valid:
                cand = CandidateMatch(node, valid[0], ri)
                if best is None or cand < best:
                    best = cand
                break
    return best


class BruteForceMatcher(Matcher):
    def step(self, msg) -> CandidateMatch | None:
        idx = self._assign(msg)
        self._store[idx] = msg
        return brute_force_match(self._store, self.definition, self.stats)


class TreeMatcher(Matcher):
    """Base of the matching-tree algorithms: one tree per rule."""

    backing = "ordered"
    filtering = False

    def reset(self) -> None:
        super().reset()
        defn = self.definition
        self._trees = [MatchingTree.for_rule(r, i, self.backing) for i, r in enumerate(defn.rules)]
        self._checkers = [GuardChecker(r, i, self._store, self.stats) for i, r in enumerate(defn.rules)]
        self._filters = DefinitionFilters(defn) if self.filtering else None

    @property
    def trees(self) -> list[MatchingTree]:
        return self._trees

    def tree_node_count(self) -> int:
        return sum(len(t) for t in self._trees)

    def step(self, msg) -> CandidateMatch | None:
        idx = self._assign(msg)
        tag = type(msg)
        if self._filters is not None:
            rules = self._filters.admitting_rules(msg)
            if rules is None:
                rules = ()
            elif not rules:
                self.stats.discarded += 1
                if self.discarded is not None:
                    self.discarded.append(msg)
                return None
        else:
            rules = self._rules_of.get(tag, ())
        self._store[idx] = msg
        best = None
        trees, checkers = self._trees, self._checkers
        for i in rules:
            found = self._search(trees[i], checkers[i], idx, tag)
            if found is not None and (best is None or found < best):
                best = found
        if best is None and rules:
            n = self.tree_node_count()
            if n > self.stats.peak_nodes:
                self.stats.peak_nodes = n
        return best

    def _search(self, tree: MatchingTree, checker: GuardChecker, idx: int, tag: type) -> CandidateMatch | None:
        raise NotImplementedError

    def _consumed(self, match: CandidateMatch, msgs: tuple) -> None:
        touched = set()
        for m in msgs:
            touched.update(self._rules_of.get(type(m), ()))
        for i in touched:
            self._trees[i].prune(match.node)


def _first_valid(complete: list[Entry], checker: GuardChecker) -> CandidateMatch | None:
    for node, bins in complete:
        found = checker(node, bins)
        if found is not None:
            return found
    return None


class StatefulTreeMatcher(TreeMatcher):
    """Baseline: full ramification, then a separate scan for complete nodes."""

    def _search(self, tree, checker, idx, tag):
        return _first_valid(tree.ramify_two_pass(idx, tag), checker)


class MutableStatefulMatcher(TreeMatcher):
    """Single traversal that reports complete children while ramifying."""

    def _search(self, tree, checker, idx, tag):
        return _first_valid(tree.ramify_eager_stepwise(idx, tag), checker)


class LazyMutableMatcher(TreeMatcher):
    """Stops ramifying at the first complete child with a valid assignment."""

    def _search(self, tree, checker, idx, tag):
        return tree.ramify_lazy_stepwise(idx, tag, checker)


class WhileLazyMatcher(TreeMatcher):
    """Lazy ramification with the per-node work inlined into one tight loop."""

    def _search(self, tree, checker, idx, tag):
        return tree.ramify_lazy(idx, tag, checker)


class WhileEagerMatcher(TreeMatcher):
    def _search(self, tree, checker, idx, tag):
        return _first_valid(tree.ramify_eager(idx, tag), checker)


class _ParallelTreeMatcher(TreeMatcher):
    def __init__(
        self,
        definition,
        *,
        trace: bool = False,
        workers: int | None = None,
        parallel_threshold: int = 256,
    ) -> None:
        self.workers = workers if workers is not None else default_workers()
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.parallel_threshold = parallel_threshold
        super().__init__(definition, trace=trace)


class EagerParallelMatcher(_ParallelTreeMatcher):
    def _search(self, tree, checker, idx, tag):
        complete = parallel_eager_grow(tree, idx, tag, self.workers, threshold=self.parallel_threshold)
        return _first_valid(complete, checker)


class LazyParallelMatcher(_ParallelTreeMatcher):
    def _search(self, tree, checker, idx, tag):
        return parallel_lazy_search(tree, idx, tag, self.workers, checker, threshold=self.parallel_threshold)


class FilteringWhileMatcher(WhileLazyMatcher):
    filtering = True


class FilteringParallelMatcher(LazyParallelMatcher):
    filtering = True


class ArrayWhileMatcher(WhileLazyMatcher):
    backing = "array"


class ArrayParallelMatcher(LazyParallelMatcher):
    backing = "array"


class AlgorithmId(enum.Enum):
    BRUTE_FORCE = "brute-force"
    STATEFUL_TREE = "stateful"
    MUTABLE_STATEFUL = "mutable"
    LAZY_MUTABLE = "lazy-mutable"
    WHILE_LAZY = "while-lazy"
    WHILE_EAGER = "while-eager"
    EAGER_PARALLEL = "eager-parallel"
    LAZY_PARALLEL = "lazy-parallel"
    FILTERING_WHILE = "filtering-while"
    FILTERING_PARALLEL = "filtering-parallel"
    ARRAY_WHILE = "array-while"
    ARRAY_PARALLEL = "array-parallel"

    @classmethod
    def parse(cls, name: str | AlgorithmId) -> AlgorithmId:
        if isinstance(name, cls):
            return name
        key = name.strip().lower()
        for alg in cls:
            if key in (alg.value, alg.name.lower()):
                return alg
        raise ValueError(f"unknown algorithm {name!r}; valid names: {', '.join(a.value for a in cls)}")

    @property
    def matcher_class(self) -> type[Matcher]:
        return _CLASS_OF_ID[self]

    @property
    def parallel(self) -> bool:
        return issubclass(self.matcher_class, _ParallelTreeMatcher)

    def __str__(self) -> str:
        return self.value


_CLASS_OF_ID: dict[AlgorithmId, type[Matcher]] = {
    AlgorithmId.BRUTE_FORCE: BruteForceMatcher,
    AlgorithmId.STATEFUL_TREE: StatefulTreeMatcher,
    AlgorithmId.MUTABLE_STATEFUL: MutableStatefulMatcher,
    AlgorithmId.LAZY_MUTABLE: LazyMutableMatcher,
    AlgorithmId.WHILE_LAZY: WhileLazyMatcher,
    AlgorithmId.WHILE_EAGER: WhileEagerMatcher,
    AlgorithmId.EAGER_PARALLEL: EagerParallelMatcher,
    AlgorithmId.LAZY_PARALLEL: LazyParallelMatcher,
    AlgorithmId.FILTERING_WHILE: FilteringWhileMatcher,
    AlgorithmId.FILTERING_PARALLEL: FilteringParallelMatcher,
    AlgorithmId.ARRAY_WHILE: ArrayWhileMatcher,
    AlgorithmId.ARRAY_PARALLEL: ArrayParallelMatcher,
}
_ID_OF_CLASS = {cls: alg for alg, cls in _CLASS_OF_ID.items()}

_PARALLEL_OPTIONS = ("workers", "parallel_threshold")


def receive(
    *rules: ReactionRule | JoinDefinition,
    algorithm: AlgorithmId | str = AlgorithmId.WHILE_LAZY,
    **options,
) -> Matcher:
    """Build a matcher for the given rules (or a ready join definition).

    ``workers`` and ``parallel_threshold`` apply to the parallel algorithms
    and are ignored by the others.
    """
    if len(rules) == 1 and isinstance(rules[0], JoinDefinition):
        definition = rules[0]
    else:
        definition = JoinDefinition(rules)
    alg = AlgorithmId.parse(algorithm)
    if not alg.parallel:
        options = {k: v for k, v in options.items() if k not in _PARALLEL_OPTIONS}
    return alg.matcher_class(definition, **options)
