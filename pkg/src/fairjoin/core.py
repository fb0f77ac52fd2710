"""Join definitions, fairness orderings and permutation enumeration.

Messages are plain Python objects; a message's type tag is its class and its
payloads are the attributes named by ``__match_args__`` (dataclasses and
named tuples provide this automatically).  Guards are conjunctions of
:class:`GuardClause` objects, each declaring which pattern positions it
reads.  A clause predicate is called with the matched messages at those
positions, in declaration order.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

# A node of a matching tree: strictly ascending message indices.  Python's
# tuple comparison is exactly the depth-first, left-to-right order of the
# conceptual matching tree (a strict prefix sorts before its extensions).
Node = tuple[int, ...]
Assignment = tuple[int, ...]


class ContractViolation(ValueError):
    """Raised when an operation's precondition does not hold."""


def index_sequence(indices: Iterable[int]) -> Node:
    """Build a node from message indices, checking they are positive and strictly ascending."""
    node = tuple(indices)
    prev = 0
    for i in node:
        if not isinstance(i, int) or i <= prev:
            raise ContractViolation(f"not a strictly ascending positive index sequence: {node!r}")
        prev = i
    return node


def node_order(a: Sequence[int], b: Sequence[int]) -> int:
    """Three-way comparison of two nodes: -1, 0 or 1."""
    a, b = tuple(a), tuple(b)
    return (a > b) - (a < b)


def payloads(msg: Any) -> tuple:
    return tuple(getattr(msg, name) for name in getattr(type(msg), "__match_args__", ()))


def arity_of(tag: type) -> int:
    return len(getattr(tag, "__match_args__", ()))


# --------------------------------------------------------------------------
# Results returned by rule bodies


class _Continue:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Continue"

    def __reduce__(self):
        return "Continue"


Continue = _Continue()


@dataclass(frozen=True, slots=True)
class Stop:
    value: Any = None


@dataclass(frozen=True, slots=True)
class Switch:
    matcher: Any


Result = _Continue | Stop | Switch


# --------------------------------------------------------------------------
# Join definitions


@dataclass(frozen=True, slots=True)
class ConstructorPattern:
    type_tag: type
    arity: int
    position: int

    def __post_init__(self) -> None:
        if self.arity != arity_of(self.type_tag):
            raise ContractViolation(
                f"{self.type_tag.__name__} carries {arity_of(self.type_tag)} payloads, pattern declares {self.arity}"
            )


@dataclass(frozen=True, slots=True)
class GuardClause:
    dependencies: tuple[int, ...]
    predicate: Callable[..., bool]
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "dependencies", tuple(self.dependencies))

    def evaluate(self, matched: Sequence[Any]) -> bool:
        return bool(self.predicate(*[matched[p] for p in self.dependencies]))

    def __repr__(self) -> str:
        return f"GuardClause({self.label or self.predicate!r}, deps={self.dependencies})"


def clause(predicate: Callable[..., bool], *dependencies: int, label: str = "") -> GuardClause:
    return GuardClause(tuple(dependencies), predicate, label)


Body = Callable[[tuple, Any], Result]


def _compile_clause(c: GuardClause) -> Callable[[Sequence[Any]], Any]:
    pred, deps = c.predicate, c.dependencies
    if not deps:
        return lambda msgs: pred()
    if len(deps) == 1:
        (d0,) = deps
        return lambda msgs: pred(msgs[d0])
    if len(deps) == 2:
        d0, d1 = deps
        return lambda msgs: pred(msgs[d0], msgs[d1])
    if len(deps) == 3:
        d0, d1, d2 = deps
        return lambda msgs: pred(msgs[d0], msgs[d1], msgs[d2])
    return lambda msgs: pred(*[msgs[d] for d in deps])


@dataclass(frozen=True)
class ReactionRule:
    """Constructor patterns, a guard conjunction, and a body.

    Besides the declared fields the rule precomputes its type layout: every
    distinct type gets a *slot* in first-occurrence order, ``capacity[s]`` is
    the number of positions of that type, ``slot_of_position[p]`` maps a
    position to its slot.
    """

    patterns: tuple[ConstructorPattern, ...]
    guard: tuple[GuardClause, ...]
    body: Body
    name: str = ""
    slot_of_type: dict = field(init=False, repr=False, compare=False)
    capacity: tuple[int, ...] = field(init=False, repr=False, compare=False)
    slot_of_position: tuple[int, ...] = field(init=False, repr=False, compare=False)
    positions_by_slot: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    compiled_guard: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        patterns = tuple(self.patterns)
        if not patterns:
            raise ContractViolation("a reaction rule needs at least one constructor pattern")
        for i, p in enumerate(patterns):
            if p.position != i:
                raise ContractViolation(f"pattern positions must be 0..n-1, got {p.position} at {i}")
        guard = tuple(self.guard)
        for c in guard:
            for d in c.dependencies:
                if not 0 <= d < len(patterns):
                    raise ContractViolation(f"clause {c!r} reads position {d} outside the rule")
        slots: dict[type, int] = {}
        by_slot: list[list[int]] = []
        for p in patterns:
            s = slots.setdefault(p.type_tag, len(slots))
            if s == len(by_slot):
                by_slot.append([])
            by_slot[s].append(p.position)
        object.__setattr__(self, "patterns", patterns)
        object.__setattr__(self, "guard", guard)
        object.__setattr__(self, "slot_of_type", slots)
        object.__setattr__(self, "capacity", tuple(len(b) for b in by_slot))
        object.__setattr__(self, "slot_of_position", tuple(slots[p.type_tag] for p in patterns))
        object.__setattr__(self, "positions_by_slot", tuple(tuple(b) for b in by_slot))
        object.__setattr__(self, "compiled_guard", tuple(_compile_clause(c) for c in guard))

    @property
    def size(self) -> int:
        return len(self.patterns)

    @property
    def types(self) -> tuple[type, ...]:
        return tuple(p.type_tag for p in self.patterns)

    def guard_holds(self, matched: Sequence[Any]) -> bool:
        for check in self.compiled_guard:
            if not check(matched):
                return False
        return True

    def __repr__(self) -> str:
        inner = " & ".join(t.__name__ for t in self.types)
        return f"ReactionRule({self.name or inner})"


def rule(
    *types: type,
    guard: Iterable[GuardClause] | Callable[..., bool] = (),
    body: Body | None = None,
    name: str = "",
) -> ReactionRule:
    """Builder for a reaction rule.

    ``guard`` is either a sequence of clauses or one callable taking every
    matched message (which then becomes a single clause reading all positions).

    >>> r = rule(int, float, guard=lambda a, b: a < b)
    >>> r.guard[0].dependencies
    (0, 1)
    """
    patterns = tuple(ConstructorPattern(t, arity_of(t), i) for i, t in enumerate(types))
    if callable(guard):
        clauses: tuple[GuardClause, ...] = (GuardClause(tuple(range(len(types))), guard),)
    else:
        clauses = tuple(guard)
    return ReactionRule(patterns, clauses, body if body is not None else _continue_body, name)


def _continue_body(matched, self_ref):
    return Continue


@dataclass(frozen=True)
class JoinDefinition:
    rules: tuple[ReactionRule, ...]

    def __post_init__(self) -> None:
        rules = tuple(self.rules)
        if not rules:
            raise ContractViolation("a join definition needs at least one rule")
        object.__setattr__(self, "rules", rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __getitem__(self, i: int) -> ReactionRule:
        return self.rules[i]

    @property
    def type_tags(self) -> frozenset:
        return frozenset(t for r in self.rules for t in r.types)


# --------------------------------------------------------------------------
# Candidate matches and fairness


@dataclass(frozen=True, order=True, slots=True)
class CandidateMatch:
    """A fully bound match of one rule.

    Field order makes the generated comparisons the fairness order: node
    first, then the assignment tuple, then declaration order of the rule.
    """

    node: Node
    assignment: Assignment
    rule_index: int


def match_fairness_order(a: CandidateMatch, b: CandidateMatch) -> int:
    return (a > b) - (a < b)


def assignments_from_bins(bins: Sequence[Sequence[int]], rule: ReactionRule):
    """Yield every type-respecting assignment in ascending tuple order.

    ``bins[s]`` holds the ascending message indices of slot ``s``.  Positions
    are filled left to right, each trying the unused indices of its slot in
    ascending order; since every partial choice can be completed, this
    depth-first enumeration is lexicographic on the full tuple.
    """
    slot_of = rule.slot_of_position
    n = len(slot_of)
    if all(c == 1 for c in rule.capacity):
        yield tuple(bins[s][0] for s in slot_of)
        return
    chosen = [0] * n
    used: list[set[int]] = [set() for _ in bins]

    def fill(p: int):
        if p == n:
            yield tuple(chosen)
            return
        s = slot_of[p]
        for i in bins[s]:
            if i not in used[s]:
                used[s].add(i)
                chosen[p] = i
                yield from fill(p + 1)
                used[s].discard(i)

    yield from fill(0)


def enumerate_permutations(
    node: Sequence[int], type_of: Mapping[int, type], rule: ReactionRule
) -> list[Assignment]:
    node = index_sequence(node)
    bins: list[list[int]] = [[] for _ in rule.capacity]
    for i in node:
        s = rule.slot_of_type.get(type_of[i])
        if s is None:
            raise ContractViolation(f"message {i} of type {type_of[i].__name__} does not occur in {rule!r}")
        bins[s].append(i)
    counts = Counter({s: len(b) for s, b in enumerate(bins)})
    if any(counts[s] != c for s, c in enumerate(rule.capacity)):
        raise ContractViolation(f"node {node} does not hold the per-type counts {rule!r} requires")
    return list(assignments_from_bins(bins, rule))
