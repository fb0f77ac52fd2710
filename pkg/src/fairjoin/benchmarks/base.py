from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import Future
from dataclasses import dataclass, field
from typing import Any, Protocol

from ..actors import Actor, ActorRef
from ..core import JoinDefinition
from ..matchers import AlgorithmId, Matcher, receive

RUN_TIMEOUT = 120.0


class Benchmark(Protocol):
    def prepare(self, param: int) -> Any: ...

    def run(self, prereqs: Any) -> Any: ...


@dataclass(frozen=True)
class BenchmarkFactory:
    """Names a benchmark archetype and builds instances for one algorithm."""

    name: str
    config_type: type
    build: Callable[[AlgorithmId, Any], Benchmark]
    param_name: str
    default_min: int
    default_max: int

    def __call__(self, algorithm: AlgorithmId | str, config: Any = None) -> Benchmark:
        return self.build(AlgorithmId.parse(algorithm), config if config is not None else self.config_type())


@dataclass
class MatcherOptions:
    """Settings shared by every benchmark config."""

    seed: int = 42
    workers: int | None = None
    parallel_threshold: int = 256
    trace: bool = False
    record: bool = False

    def make_matcher(self, algorithm: AlgorithmId, definition: JoinDefinition) -> Matcher:
        return receive(
            definition,
            algorithm=algorithm,
            trace=self.trace,
            workers=self.workers,
            parallel_threshold=self.parallel_threshold,
        )


@dataclass
class Feed:
    """A started actor together with the messages a run will send it."""

    actor: Actor
    future: Future
    ref: ActorRef
    messages: list
    expected_matches: int
    info: dict = field(default_factory=dict)

    @property
    def matcher(self) -> Matcher:
        return self.actor.matcher


def start_feed(matcher: Matcher, messages: list, expected_matches: int, *, record: bool = False, **info) -> Feed:
    from ..actors import Mailbox

    actor = Actor(matcher, mailbox=Mailbox(record=record))
    future, ref = actor.start()
    return Feed(actor, future, ref, messages, expected_matches, info)


def run_feed(feed: Feed, timeout: float = RUN_TIMEOUT) -> Any:
    send = feed.ref.send
    for msg in feed.messages:
        send(msg)
    return feed.future.result(timeout)


class Counter:
    """Firing counter shared by rule bodies; stops after ``limit`` firings."""

    __slots__ = ("count", "limit")

    def __init__(self, limit: int) -> None:
        self.count = 0
        self.limit = limit
