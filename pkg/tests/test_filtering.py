from __future__ import annotations

import logging
from dataclasses import dataclass

from fairjoin import (
    DefinitionFilters,
    JoinDefinition,
    admit_message,
    brute_force_match,
    clause,
    extract_filtering_clauses,
    receive,
    rule,
)
from fairjoin.matchers import AlgorithmId
from instances import drive, matcher_for, random_instance


@dataclass(frozen=True)
class A:
    x: int


@dataclass(frozen=True)
class B:
    y: int
    z: int


@dataclass(frozen=True)
class C:
    p: int


@dataclass(frozen=True)
class D:
    pass


x_gt_1 = clause(lambda a: a.x > 1, 0, label="x>1")
y_eq_z = clause(lambda b: b.y == b.z, 1, label="y==z")
x_le_y = clause(lambda a, b: a.x <= b.y, 0, 1, label="x<=y")
p_eq_1 = clause(lambda c: c.p == 1, 2, label="p==1")
FOUR_CLAUSE_RULE = rule(A, B, C, C, guard=[x_gt_1, y_eq_z, x_le_y, p_eq_1])


def test_four_clause_rule_bins():
    assert extract_filtering_clauses(FOUR_CLAUSE_RULE) == {A: (x_gt_1,), B: (y_eq_z,)}


def test_two_type_clause_gives_nothing():
    assert extract_filtering_clauses(rule(A, C, guard=[clause(lambda a, c: a.x == c.p, 0, 1)])) == {}


def test_dependency_free_clause_lands_in_every_single_type_bin():
    flag = clause(lambda: True, label="flag")
    assert extract_filtering_clauses(rule(A, C, guard=[flag])) == {A: (flag,), C: (flag,)}
    assert extract_filtering_clauses(rule(C, C, A, guard=[flag])) == {A: (flag,)}


def test_admission():
    filters = extract_filtering_clauses(FOUR_CLAUSE_RULE)
    assert admit_message(filters, A, A(0)) is False
    assert admit_message(filters, A, A(2)) is True
    assert admit_message(filters, D, D()) is True
    assert admit_message(filters, B, B(1, 2)) is False


def test_raising_clause_rejects_and_logs(caplog):
    bad = clause(lambda a: 1 / a.x > 0, 0)
    filters = extract_filtering_clauses(rule(A, C, guard=[bad]))
    with caplog.at_level(logging.WARNING):
        assert admit_message(filters, A, A(0)) is False
    assert "raised" in caplog.text


def test_multi_rule_drop_needs_every_rule_to_reject():
    defn = JoinDefinition(
        (
            rule(A, C, guard=[clause(lambda a: a.x > 5, 0)]),
            rule(A, B, guard=[clause(lambda a: a.x < 3, 0)]),
        )
    )
    filters = DefinitionFilters(defn)
    assert filters.admitting_rules(A(9)) == (0,)
    assert filters.admitting_rules(A(1)) == (1,)
    assert filters.admitting_rules(A(4)) == ()
    assert filters.admitting_rules(D()) is None


def test_filtering_matcher_drops_rejected_messages():
    m = receive(FOUR_CLAUSE_RULE, algorithm="filtering-while", trace=True)
    for msg in (A(0), B(1, 2), A(2), D()):
        m.step(msg)
    assert m.stats.discarded == 2
    assert m.discarded == [A(0), B(1, 2)]
    assert m.stored_messages() == [A(2), D()]
    assert all(1 not in node and 2 not in node for t in m.trees for node in t.nodes())
    assert any(3 in node for t in m.trees for node in t.nodes())


def test_rejected_messages_never_matter_to_the_oracle():
    """A dropped message can be removed from the stream without changing any match."""
    for seed in range(80):
        definition, messages = random_instance(seed)
        filters = DefinitionFilters(definition)
        kept = [m for m in messages if filters.admitting_rules(m) != ()]
        with_all, _ = drive(matcher_for(AlgorithmId.BRUTE_FORCE, definition), messages)
        without, _ = drive(matcher_for(AlgorithmId.BRUTE_FORCE, definition), kept)
        # indices shift once messages are removed, so compare consumed messages instead
        assert len(with_all) == len(without)


def test_filtering_and_plain_matchers_consume_identical_messages():
    for seed in range(80):
        definition, messages = random_instance(seed)
        plain = matcher_for(AlgorithmId.WHILE_LAZY, definition)
        filt = matcher_for(AlgorithmId.FILTERING_WHILE, definition)
        drive(plain, messages)
        drive(filt, messages)
        assert [f.messages for f in plain.trace] == [f.messages for f in filt.trace]


def test_oracle_unaffected_by_single_dropped_message():
    defn = JoinDefinition((FOUR_CLAUSE_RULE,))
    store = {1: A(0), 2: A(3), 3: B(4, 4), 4: C(1), 5: C(1)}
    with_reject = brute_force_match(store, defn)
    del store[1]
    assert brute_force_match(store, defn) == with_reject
