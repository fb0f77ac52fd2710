"""Matching trees: ordered storage of partial matches for one rule.

A tree is never built explicitly.  Its nodes are kept in a collection sorted
by node order, so in-order iteration is the depth-first, left-to-right
traversal of the conceptual tree.  Each stored entry is ``(node, bins)``
where ``bins[s]`` lists the node's indices of the rule's type slot ``s``.

Two backings are available: ``"ordered"`` (a balanced ordered collection)
and ``"array"`` (a plain sorted list grown by sorted merges).
"""

from __future__ import annotations

import sys
from collections.abc import Callable, Iterable, Sequence

from sortedcontainers import SortedList

from .core import CandidateMatch, ContractViolation, Node, ReactionRule

Bins = tuple[tuple[int, ...], ...]
Entry = tuple[Node, Bins]
Validator = Callable[[Node, Bins], "CandidateMatch | None"]

BACKINGS = ("ordered", "array")


def sorted_merge(existing: Sequence[Entry], additions: Sequence[Entry]) -> list[Entry]:
    """Merge two node-ordered runs into one sorted list.

    The concatenation holds exactly two ascending runs; CPython's list sort
    detects them and performs a single linear galloping merge.
    """
    merged = list(existing)
    merged.extend(additions)
    merged.sort()
    return merged


def grow_segment(entries: Iterable[Entry], idx: int, slot: int, cap: int, size: int) -> tuple[list[Entry], list[Entry]]:
    """Eagerly ramify ``entries`` with message ``idx``.

    Returns ``(complete, additions)``: complete children in node order, and
    incomplete children to insert.
    """
    complete: list[Entry] = []
    additions: list[Entry] = []
    add_complete = complete.append
    add = additions.append
    for node, bins in entries:
        b = bins[slot]
        if len(b) < cap:
            child = node + (idx,)
            cbins = bins[:slot] + (b + (idx,),) + bins[slot + 1 :]
            if len(child) == size:
                add_complete((child, cbins))
            else:
                add((child, cbins))
    return complete, additions


def search_segment(
    entries: Iterable[Entry], idx: int, slot: int, cap: int, size: int, validate: Validator
) -> tuple[CandidateMatch | None, list[Entry]]:
    """Lazily ramify ``entries``: stop at the first complete child that validates."""
    additions: list[Entry] = []
    add = additions.append
    for node, bins in entries:
        b = bins[slot]
        if len(b) < cap:
            child = node + (idx,)
            cbins = bins[:slot] + (b + (idx,),) + bins[slot + 1 :]
            if len(child) == size:
                found = validate(child, cbins)
                if found is not None:
                    return found, additions
            else:
                add((child, cbins))
    return None, additions


class _AnySlot:
    """Slot lookup for an unconstrained tree: every type maps to slot 0."""

    def get(self, tag, default=None):
        return 0


class MatchingTree:
    def __init__(
        self,
        capacity: Sequence[int],
        slot_of_type,
        size: float,
        *,
        rule_index: int = 0,
        backing: str = "ordered",
    ) -> None:
        if backing not in BACKINGS:
            raise ValueError(f"unknown backing {backing!r}; expected one of {BACKINGS}")
        self.capacity = tuple(capacity)
        self.slot_of_type = slot_of_type
        self.size = size
        self.rule_index = rule_index
        self.backing = backing
        self._last_index = 0
        self.root: Entry = ((), tuple(() for _ in self.capacity))
        self._entries: SortedList | list
        self._reset_entries([self.root])

    @classmethod
    def for_rule(cls, rule: ReactionRule, rule_index: int = 0, backing: str = "ordered") -> MatchingTree:
        return cls(rule.capacity, rule.slot_of_type, rule.size, rule_index=rule_index, backing=backing)

    @classmethod
    def unconstrained(cls, backing: str = "ordered") -> MatchingTree:
        """A tree that accepts every message and never completes a node."""
        return cls((sys.maxsize,), _AnySlot(), float("inf"), backing=backing)

    def _reset_entries(self, entries: list[Entry]) -> None:
        if self.backing == "ordered":
            self._entries = SortedList(entries)
        else:
            self._entries = sorted(entries)

    # -- inspection -------------------------------------------------------

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def nodes(self) -> list[Node]:
        return [node for node, _ in self._entries]

    def entries(self) -> list[Entry]:
        return list(self._entries)

    def is_complete(self, entry: Entry) -> bool:
        return len(entry[0]) == self.size

    # -- mutation ---------------------------------------------------------

    def slot_for(self, idx: int, tag: type) -> int | None:
        if idx <= self._last_index:
            raise ContractViolation(f"message index {idx} is not greater than {self._last_index}")
        self._last_index = idx
        return self.slot_of_type.get(tag)

    def insert(self, additions: list[Entry]) -> None:
        """Insert new incomplete entries (any order)."""
        if not additions:
            return
        if self.backing == "ordered":
            self._entries.update(additions)
        else:
            additions.sort()
            self._entries = sorted_merge(self._entries, additions)

    def ramify_eager(self, idx: int, tag: type) -> list[Entry]:
        """Ramify every eligible node; return complete children in node order."""
        slot = self.slot_for(idx, tag)
        if slot is None:
            return []
        complete, additions = grow_segment(self._entries, idx, slot, self.capacity[slot], self.size)
        self.insert(additions)
        return complete

    def ramify_lazy(self, idx: int, tag: type, validate: Validator) -> CandidateMatch | None:
        """Ramify in node order until a complete child validates.

        On success the tree is left untouched: every child would contain
        ``idx``, which the caller consumes and prunes anyway.  On failure all
        incomplete children are inserted, exactly as :meth:`ramify_eager`.
        """
        slot = self.slot_for(idx, tag)
        if slot is None:
            return None
        found, additions = search_segment(self._entries, idx, slot, self.capacity[slot], self.size, validate)
        if found is None:
            self.insert(additions)
        return found

    # Step-wise variants: one helper call per visited node.

    def _extend(self, entry: Entry, idx: int, slot: int) -> Entry | None:
        node, bins = entry
        b = bins[slot]
        if len(b) >= self.capacity[slot]:
            return None
        return node + (idx,), bins[:slot] + (b + (idx,),) + bins[slot + 1 :]

    def ramify_eager_stepwise(self, idx: int, tag: type) -> list[Entry]:
        slot = self.slot_for(idx, tag)
        if slot is None:
            return []
        complete: list[Entry] = []
        additions: list[Entry] = []
        for entry in self._entries:
            child = self._extend(entry, idx, slot)
            if child is None:
                continue
            if self.is_complete(child):
                complete.append(child)
            else:
                additions.append(child)
        self.insert(additions)
        return complete

    def ramify_lazy_stepwise(self, idx: int, tag: type, validate: Validator) -> CandidateMatch | None:
        slot = self.slot_for(idx, tag)
        if slot is None:
            return None
        additions: list[Entry] = []
        for entry in self._entries:
            child = self._extend(entry, idx, slot)
            if child is None:
                continue
            if self.is_complete(child):
                found = validate(*child)
                if found is not None:
                    return found
            else:
                additions.append(child)
        self.insert(additions)
        return None

    def ramify_two_pass(self, idx: int, tag: type) -> list[Entry]:
        """Unoptimised ramification: insert every child, then scan for complete nodes.

        Complete children live in the tree only between the two passes.
        """
        slot = self.slot_for(idx, tag)
        if slot is None:
            return []
        for entry in list(self._entries):
            child = self._extend(entry, idx, slot)
            if child is not None:
                if self.backing == "ordered":
                    self._entries.add(child)
                else:
                    self._entries = sorted_merge(self._entries, [child])
        complete = [e for e in self._entries if self.is_complete(e)]
        if complete:
            self._reset_entries([e for e in self._entries if not self.is_complete(e)])
        return complete

    def prune(self, consumed: Iterable[int]) -> int:
        """Drop every node holding a consumed index; return how many were removed."""
        consumed = frozenset(consumed)
        if not consumed:
            return 0
        isdisjoint = consumed.isdisjoint
        kept = [e for e in self._entries if isdisjoint(e[0])]
        removed = len(self._entries) - len(kept)
        if removed:
            if self.backing == "ordered":
                self._entries = SortedList(kept)
            else:
                self._entries = kept
        return removed

    def partition(self, n: int) -> list[list[Entry]]:
        """Split the in-order entries into at most ``n`` contiguous, balanced segments."""
        if n < 1:
            raise ContractViolation("partition count must be >= 1")
        entries = list(self._entries)
        return split_evenly(entries, n)


def split_evenly(items: list, n: int) -> list[list]:
    n = min(n, len(items)) or 1
    q, r = divmod(len(items), n)
    out = []
    start = 0
    for k in range(n):
        end = start + q + (1 if k < r else 0)
        out.append(items[start:end])
        start = end
    return out
