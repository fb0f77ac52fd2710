"""Pattern-size benchmarks: one rule joining ``n`` distinct message types."""

from __future__ import annotations

import random
from dataclasses import dataclass, make_dataclass

from ..core import ContractViolation, JoinDefinition, Stop, clause, rule
from ..matchers import AlgorithmId
from .base import BenchmarkFactory, Counter, Feed, MatcherOptions, run_feed, start_feed

MAX_SIZE = 6
VARIANTS = ("normal", "noisy", "non-satisfying")


def _message_type(name: str, fields: list) -> type:
    cls = make_dataclass(name, fields, frozen=True, slots=True)
    cls.__module__ = __name__
    return cls


def _plain(name: str) -> type:
    return _message_type(name, [])


def _valued(name: str) -> type:
    return _message_type(name, [("v", int)])


A, B, C, D, E, F = (_plain(n) for n in "ABCDEF")
PLAIN_TYPES = (A, B, C, D, E, F)
NOISE_TYPES = tuple(_plain(f"Noise{k}") for k in range(1, MAX_SIZE + 1))

GA, GB, GC, GD, GE, GF = (_valued(f"G{n}") for n in "ABCDEF")
VALUED_TYPES = (GA, GB, GC, GD, GE, GF)


def _check_size(n: int) -> None:
    if not 1 <= n <= MAX_SIZE:
        raise ContractViolation(f"pattern size must be in 1..{MAX_SIZE}, got {n}")


def _stop_after(counter: Counter):
    def body(matched, self_ref):
        counter.count += 1
        if counter.count >= counter.limit:
            return Stop(counter.count)
        return None

    return body


def interleave_noise(messages: list, rng: random.Random, noise_types=NOISE_TYPES) -> list:
    """Put a random noise message before roughly half of ``messages``."""
    out = []
    for msg in messages:
        if rng.random() < 0.5:
            out.append(rng.choice(noise_types)())
        out.append(msg)
    return out


@dataclass
class SizeConfig(MatcherOptions):
    matches: int = 100
    noise: bool = False


def size_definition(n: int, counter: Counter) -> JoinDefinition:
    _check_size(n)
    return JoinDefinition((rule(*PLAIN_TYPES[:n], body=_stop_after(counter), name=f"size-{n}"),))


def size_messages(n: int, matches: int, noise: bool, seed: int) -> list:
    _check_size(n)
    messages = [t() for _ in range(matches) for t in PLAIN_TYPES[:n]]
    if noise:
        messages = interleave_noise(messages, random.Random(seed))
    return messages


class SizeBenchmark:
    def __init__(self, algorithm: AlgorithmId, config: SizeConfig) -> None:
        self.algorithm = algorithm
        self.config = config

    def prepare(self, param: int) -> Feed:
        cfg = self.config
        counter = Counter(cfg.matches)
        matcher = cfg.make_matcher(self.algorithm, size_definition(param, counter))
        messages = size_messages(param, cfg.matches, cfg.noise, cfg.seed)
        return start_feed(matcher, messages, cfg.matches, record=cfg.record, counter=counter)

    def run(self, feed: Feed):
        return run_feed(feed)


@dataclass
class SizeWithGuardsConfig(MatcherOptions):
    matches: int = 100
    variant: str = "normal"

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {', '.join(VARIANTS)}")


def _same_value(x, y) -> bool:
    return x.v == y.v


def guarded_size_definition(n: int, counter: Counter) -> JoinDefinition:
    _check_size(n)
    clauses = [clause(_same_value, i, i + 1, label=f"v{i}==v{i + 1}") for i in range(n - 1)]
    return JoinDefinition((rule(*VALUED_TYPES[:n], guard=clauses, body=_stop_after(counter), name=f"guarded-{n}"),))


def guarded_size_messages(n: int, matches: int, variant: str, seed: int) -> list:
    """Cycle ``k`` carries payload ``k`` on every type.

    The non-satisfying variant precedes each cycle with a full set of
    type-correct decoys whose payloads are unique negative numbers, so no
    decoy ever passes an equality clause.  With ``n == 1`` there is no clause
    to fail, hence no decoys.
    """
    _check_size(n)
    types = VALUED_TYPES[:n]
    messages = []
    decoy = -1
    for k in range(matches):
        if variant == "non-satisfying" and n > 1:
            for t in types:
                messages.append(t(decoy))
                decoy -= 1
        messages.extend(t(k) for t in types)
    if variant == "noisy":
        messages = interleave_noise(messages, random.Random(seed))
    return messages


class SizeWithGuardsBenchmark:
    def __init__(self, algorithm: AlgorithmId, config: SizeWithGuardsConfig) -> None:
        self.algorithm = algorithm
        self.config = config

    def prepare(self, param: int) -> Feed:
        cfg = self.config
        counter = Counter(cfg.matches)
        matcher = cfg.make_matcher(self.algorithm, guarded_size_definition(param, counter))
        messages = guarded_size_messages(param, cfg.matches, cfg.variant, cfg.seed)
        return start_feed(matcher, messages, cfg.matches, record=cfg.record, counter=counter)

    def run(self, feed: Feed):
        return run_feed(feed)


SIZE = BenchmarkFactory("size", SizeConfig, SizeBenchmark, "pattern size", 1, MAX_SIZE)
SIZE_WITH_GUARDS = BenchmarkFactory(
    "size-with-guards", SizeWithGuardsConfig, SizeWithGuardsBenchmark, "pattern size", 1, MAX_SIZE
)
