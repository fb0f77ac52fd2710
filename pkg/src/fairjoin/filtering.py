"""Per-message admission tests derived from rule guards.

A clause is a filtering clause for type ``t`` when ``t`` occurs exactly once
in the rule and the clause reads no position of any other type.  Such a
clause can be falsified by a single message of type ``t``, which then cannot
take part in any match of that rule.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Mapping

from .core import GuardClause, JoinDefinition, ReactionRule

log = logging.getLogger(__name__)

FilterSet = Mapping[type, tuple[GuardClause, ...]]


def extract_filtering_clauses(rule: ReactionRule) -> dict[type, tuple[GuardClause, ...]]:
    occurrences = Counter(rule.types)
    single = [(p.type_tag, p.position) for p in rule.patterns if occurrences[p.type_tag] == 1]
    bins: dict[type, list[GuardClause]] = {}
    for tag, position in single:
        for c in rule.guard:
            if all(d == position for d in c.dependencies):
                bins.setdefault(tag, []).append(c)
    return {tag: tuple(cs) for tag, cs in bins.items()}


def admit_message(filters: FilterSet, msg_type: type, msg) -> bool:
    for c in filters.get(msg_type, ()):
        try:
            ok = c.predicate(*[msg] * len(c.dependencies))
        except Exception:
            log.warning("filtering clause %r raised on %r; message not admitted", c, msg, exc_info=True)
            return False
        if not ok:
            return False
    return True


class DefinitionFilters:
    """Filter sets of every rule in a join definition."""

    def __init__(self, definition: JoinDefinition) -> None:
        self.per_rule = [extract_filtering_clauses(r) for r in definition.rules]
        self._rules_of: dict[type, tuple[int, ...]] = {}
        for i, r in enumerate(definition.rules):
            for t in dict.fromkeys(r.types):
                self._rules_of[t] = self._rules_of.get(t, ()) + (i,)

    def admitting_rules(self, msg) -> tuple[int, ...] | None:
        """Rules whose filters admit ``msg``.

        ``None`` means the type occurs in no rule: the message is kept but
        ramifies nothing.  An empty tuple means every relevant rule rejects
        it, so it must be dropped.
        """
        tag = type(msg)
        rules = self._rules_of.get(tag)
        if rules is None:
            return None
        return tuple(i for i in rules if admit_message(self.per_rule[i], tag, msg))
