"""Fair join-pattern matching for actors.

Quick start::

    from fairjoin import Actor, Stop, rule, receive

    matcher = receive(rule(Ping, Pong, body=lambda msgs, me: Stop(msgs)))
    future, ref = Actor(matcher).start()
"""

from .actors import Actor, ActorRef, Mailbox, MailboxClosed
from .core import (
    CandidateMatch,
    ConstructorPattern,
    Continue,
    ContractViolation,
    GuardClause,
    JoinDefinition,
    ReactionRule,
    Stop,
    Switch,
    assignments_from_bins,
    clause,
    enumerate_permutations,
    index_sequence,
    match_fairness_order,
    node_order,
    rule,
)
from .filtering import DefinitionFilters, admit_message, extract_filtering_clauses
from .matchers import AlgorithmId, Matcher, brute_force_match, parallel_lazy_search, receive
from .tree import MatchingTree, sorted_merge

__all__ = [
    "Actor",
    "ActorRef",
    "AlgorithmId",
    "CandidateMatch",
    "ConstructorPattern",
    "Continue",
    "ContractViolation",
    "DefinitionFilters",
    "GuardClause",
    "JoinDefinition",
    "Mailbox",
    "MailboxClosed",
    "Matcher",
    "MatchingTree",
    "ReactionRule",
    "Stop",
    "Switch",
    "admit_message",
    "assignments_from_bins",
    "brute_force_match",
    "clause",
    "enumerate_permutations",
    "extract_filtering_clauses",
    "index_sequence",
    "match_fairness_order",
    "node_order",
    "parallel_lazy_search",
    "receive",
    "rule",
    "sorted_merge",
]
