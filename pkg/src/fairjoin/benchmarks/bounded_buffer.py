"""Bounded buffer: producers and consumers on their own threads, one buffer actor.

The buffer holds ``bound`` Free tokens.  A Put consumes a Free and leaves a
Full carrying the item; a Get consumes a Full and leaves a Free, so at most
``bound`` items are ever buffered.
"""

from __future__ import annotations

import queue
import threading
from dataclasses import dataclass, field
from typing import Any

from ..core import JoinDefinition, Stop, rule
from ..matchers import AlgorithmId
from .base import RUN_TIMEOUT, BenchmarkFactory, MatcherOptions, start_feed


class BufferDeadlock(RuntimeError):
    pass


@dataclass(frozen=True, slots=True)
class Put:
    ref: Any = field(compare=False)
    item: Any


@dataclass(frozen=True, slots=True)
class Get:
    ref: Any = field(compare=False)


@dataclass(frozen=True, slots=True)
class Free:
    pass


@dataclass(frozen=True, slots=True)
class Full:
    item: Any


@dataclass(frozen=True, slots=True)
class Terminate:
    pass


ACK = "ack"


class BufferState:
    """Occupancy bookkeeping done by the buffer's rule bodies."""

    def __init__(self) -> None:
        self.full = 0
        self.high_water = 0
        self.puts = 0
        self.gets = 0


def buffer_definition(state: BufferState) -> JoinDefinition:
    def put(matched, self_ref):
        p, _ = matched
        state.puts += 1
        state.full += 1
        if state.full > state.high_water:
            state.high_water = state.full
        self_ref.send(Full(p.item))
        p.ref.put(ACK)

    def get(matched, self_ref):
        g, full = matched
        state.gets += 1
        state.full -= 1
        self_ref.send(Free())
        g.ref.put(full.item)

    def terminate(matched, self_ref):
        return Stop(state.gets)

    return JoinDefinition(
        (
            rule(Put, Free, body=put, name="put"),
            rule(Get, Full, body=get, name="get"),
            rule(Terminate, body=terminate, name="terminate"),
        )
    )


@dataclass
class BoundedBufferConfig(MatcherOptions):
    buffer_bound: int = 100
    count: int = 100
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.buffer_bound < 1 or self.count < 1:
            raise ValueError("bufferBound and count must be >= 1")


@dataclass
class BufferRun:
    feed: Any
    state: BufferState
    producers: int
    items: list[list[tuple[int, int]]]
    delivered: list = field(default_factory=list)

    @property
    def matcher(self):
        return self.feed.matcher

    @property
    def actor(self):
        return self.feed.actor


class BoundedBuffer:
    def __init__(self, algorithm: AlgorithmId, config: BoundedBufferConfig) -> None:
        self.algorithm = algorithm
        self.config = config

    def prepare(self, param: int) -> BufferRun:
        if param < 0:
            raise ValueError("producer count must be >= 0")
        cfg = self.config
        state = BufferState()
        matcher = cfg.make_matcher(self.algorithm, buffer_definition(state))
        frees = [Free() for _ in range(cfg.buffer_bound)]
        feed = start_feed(matcher, frees, 2 * param * cfg.count + 1, record=cfg.record)
        items = [[(p, k) for k in range(cfg.count)] for p in range(param)]
        return BufferRun(feed, state, param, items)

    def run(self, br: BufferRun):
        cfg = self.config
        ref = br.feed.ref
        for msg in br.feed.messages:
            ref.send(msg)
        errors: list[BaseException] = []
        lock = threading.Lock()

        def producer(items):
            reply: queue.SimpleQueue = queue.SimpleQueue()
            try:
                for item in items:
                    ref.send(Put(reply, item))
                    reply.get(timeout=cfg.timeout)
            except BaseException as exc:
                errors.append(exc)

        def consumer(n):
            reply: queue.SimpleQueue = queue.SimpleQueue()
            got = []
            try:
                for _ in range(n):
                    ref.send(Get(reply))
                    got.append(reply.get(timeout=cfg.timeout))
            except BaseException as exc:
                errors.append(exc)
            with lock:
                br.delivered.extend(got)

        threads = [threading.Thread(target=producer, args=(items,), daemon=True) for items in br.items]
        threads += [threading.Thread(target=consumer, args=(cfg.count,), daemon=True) for _ in range(br.producers)]
        for t in threads:
            t.start()
        for t in threads:
            t.join(cfg.timeout)
        if errors or any(t.is_alive() for t in threads):
            raise BufferDeadlock(f"bounded buffer stalled: {errors[:1] or 'threads still waiting'}")
        ref.send(Terminate())
        return br.feed.future.result(RUN_TIMEOUT)


BOUNDED_BUFFER = BenchmarkFactory(
    "bounded-buffer", BoundedBufferConfig, BoundedBuffer, "producers and consumers", 0, 8
)
