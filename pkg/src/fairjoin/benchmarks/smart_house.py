"""Smart-house coordinator benchmarks.

Sensor events are joined in threes: rooms must agree, each sensor must be in
a particular state, and timestamps must fit in a ``WINDOW``-unit window.
Noise events get timestamps far from every other event, so no guard that
involves one can ever hold.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass

from ..core import JoinDefinition, ReactionRule, Stop, clause, rule
from ..matchers import AlgorithmId
from .base import BenchmarkFactory, Counter, Feed, MatcherOptions, run_feed, start_feed

WINDOW = 60
LUX_DARK = 40
WATTS_HIGH = 1000
ROOMS = ("living", "kitchen", "bedroom", "bath")
HEATING_KINDS = ("failure", "ok", "idle")
NOISE_TS_BASE = 10_000
NOISE_TS_GAP = 100


@dataclass(frozen=True, slots=True)
class Motion:
    id: int
    on: bool
    room: str
    ts: int


@dataclass(frozen=True, slots=True)
class AmbientLight:
    id: int
    lux: int
    room: str
    ts: int


@dataclass(frozen=True, slots=True)
class Light:
    id: int
    on: bool
    room: str
    ts: int


@dataclass(frozen=True, slots=True)
class Contact:
    id: int
    open: bool
    room: str
    ts: int


@dataclass(frozen=True, slots=True)
class Consumption:
    id: int
    watts: int
    ts: int


@dataclass(frozen=True, slots=True)
class HeatingF:
    id: int
    kind: str
    ts: int


@dataclass(frozen=True, slots=True)
class ShutOff:
    pass


SENSOR_TYPES = (Motion, AmbientLight, Light, Contact, Consumption, HeatingF)


def within_window(*events) -> bool:
    lo = hi = events[0].ts
    for e in events[1:]:
        if e.ts < lo:
            lo = e.ts
        elif e.ts > hi:
            hi = e.ts
    return hi - lo <= WINDOW


def same_room(*events) -> bool:
    room = events[0].room
    return all(e.room == room for e in events[1:])


def busy_guard(delay_us: float):
    """A clause predicate that spins for ``delay_us`` microseconds and holds."""
    delay = delay_us / 1e6

    def spin(*_):
        end = time.perf_counter() + delay
        while time.perf_counter() < end:
            pass
        return True

    return spin


def _counting(counter: Counter):
    def body(matched, self_ref):
        counter.count += 1

    return body


def _shutdown(counter: Counter):
    def body(matched, self_ref):
        return Stop(counter.count)

    return body


def lights_on_rule(counter: Counter, heavy_guard_us: float = 0.0) -> ReactionRule:
    """Motion in a dark room with the light off."""
    clauses = [
        clause(lambda m: m.on, 0, label="motion on"),
        clause(lambda a: a.lux <= LUX_DARK, 1, label="dark"),
        clause(lambda light: not light.on, 2, label="light off"),
        clause(same_room, 0, 1, 2, label="same room"),
        clause(within_window, 0, 1, 2, label="window"),
    ]
    if heavy_guard_us > 0:
        clauses.insert(0, clause(busy_guard(heavy_guard_us), 0, 1, 2, label="heavy"))
    return rule(Motion, AmbientLight, Light, guard=clauses, body=_counting(counter), name="lights-on")


def lights_off_rule(counter: Counter) -> ReactionRule:
    """Light left on, no motion, door open."""
    clauses = [
        clause(lambda light: light.on, 0, label="light on"),
        clause(lambda m: not m.on, 1, label="motion off"),
        clause(lambda c: c.open, 2, label="door open"),
        clause(same_room, 0, 1, 2, label="same room"),
        clause(within_window, 0, 1, 2, label="window"),
    ]
    return rule(Light, Motion, Contact, guard=clauses, body=_counting(counter), name="lights-off")


def heating_alarm_rule(counter: Counter) -> ReactionRule:
    """High consumption with a heating failure and the door closed."""
    clauses = [
        clause(lambda c: c.watts >= WATTS_HIGH, 0, label="high consumption"),
        clause(lambda h: h.kind == "failure", 1, label="heating failure"),
        clause(lambda c: not c.open, 2, label="door closed"),
        clause(within_window, 0, 1, 2, label="window"),
    ]
    return rule(Consumption, HeatingF, Contact, guard=clauses, body=_counting(counter), name="heating-alarm")


def shutdown_rule(counter: Counter) -> ReactionRule:
    return rule(ShutOff, body=_shutdown(counter), name="shutdown")


def simple_definition(counter: Counter, heavy_guard_us: float = 0.0) -> JoinDefinition:
    return JoinDefinition((lights_on_rule(counter, heavy_guard_us), shutdown_rule(counter)))


def complex_definition(counter: Counter) -> JoinDefinition:
    return JoinDefinition(
        (lights_on_rule(counter), lights_off_rule(counter), heating_alarm_rule(counter), shutdown_rule(counter))
    )


def simple_messages(prefixes: int, matches: int) -> list:
    """Per cycle ``k``: ``prefixes`` (Motion, AmbientLight) pairs, then one
    more pair and a Light that completes a match with any stored pair.

    Every event of cycle ``k`` has timestamp ``k``; the Light consumes the
    oldest stored pair.  Ends with one ShutOff.
    """
    if prefixes < 0 or matches < 1:
        raise ValueError("need prefixes >= 0 and matches >= 1")
    ids = itertools.count()
    room = ROOMS[0]
    messages: list = []
    for k in range(matches):
        for _ in range(prefixes + 1):
            messages.append(Motion(next(ids), True, room, k))
            messages.append(AmbientLight(next(ids), LUX_DARK // 2, room, k))
        messages.append(Light(next(ids), False, room, k))
    messages.append(ShutOff())
    return messages


def noise_event(rng: random.Random, ident: int, ts: int):
    kind = rng.choice(SENSOR_TYPES)
    room = rng.choice(ROOMS)
    if kind is Motion:
        return Motion(ident, rng.random() < 0.5, room, ts)
    if kind is AmbientLight:
        return AmbientLight(ident, rng.randrange(0, 101), room, ts)
    if kind is Light:
        return Light(ident, rng.random() < 0.5, room, ts)
    if kind is Contact:
        return Contact(ident, rng.random() < 0.5, room, ts)
    if kind is Consumption:
        return Consumption(ident, rng.randrange(0, 2001), ts)
    return HeatingF(ident, rng.choice(HEATING_KINDS), ts)


def matching_triple(which: int, ids, ts: int) -> list:
    room = ROOMS[0]
    if which == 0:
        return [
            Motion(next(ids), True, room, ts),
            AmbientLight(next(ids), LUX_DARK // 2, room, ts),
            Light(next(ids), False, room, ts),
        ]
    if which == 1:
        return [Light(next(ids), True, room, ts), Motion(next(ids), False, room, ts), Contact(next(ids), True, room, ts)]
    return [
        Consumption(next(ids), 2 * WATTS_HIGH, ts),
        HeatingF(next(ids), "failure", ts),
        Contact(next(ids), False, room, ts),
    ]


def complex_messages(noise: int, matches: int, seed: int) -> list:
    """Round ``i``: ``noise`` random events, then a triple for sensor rule ``i % 3``.

    Triples carry timestamp ``i``; the ``k``-th noise event gets
    ``NOISE_TS_BASE + NOISE_TS_GAP * k``.  Ends with one ShutOff.
    """
    rng = random.Random(seed)
    ids = itertools.count()
    noise_count = itertools.count()
    messages: list = []
    for i in range(matches):
        for _ in range(noise):
            messages.append(noise_event(rng, next(ids), NOISE_TS_BASE + NOISE_TS_GAP * next(noise_count)))
        messages.extend(matching_triple(i % 3, ids, i))
    messages.append(ShutOff())
    return messages


@dataclass
class SimpleSmartHouseConfig(MatcherOptions):
    matches: int = 25
    heavy_guard: bool = False
    heavy_guard_us: float = 100.0


class SimpleSmartHouse:
    def __init__(self, algorithm: AlgorithmId, config: SimpleSmartHouseConfig) -> None:
        self.algorithm = algorithm
        self.config = config

    def prepare(self, param: int) -> Feed:
        cfg = self.config
        counter = Counter(cfg.matches)
        delay = cfg.heavy_guard_us if cfg.heavy_guard else 0.0
        matcher = cfg.make_matcher(self.algorithm, simple_definition(counter, delay))
        messages = simple_messages(param, cfg.matches)
        return start_feed(matcher, messages, cfg.matches + 1, record=cfg.record, counter=counter)

    def run(self, feed: Feed):
        return run_feed(feed)


@dataclass
class ComplexSmartHouseConfig(MatcherOptions):
    matches: int = 10


class ComplexSmartHouse:
    def __init__(self, algorithm: AlgorithmId, config: ComplexSmartHouseConfig) -> None:
        self.algorithm = algorithm
        self.config = config

    def prepare(self, param: int) -> Feed:
        cfg = self.config
        counter = Counter(cfg.matches)
        matcher = cfg.make_matcher(self.algorithm, complex_definition(counter))
        messages = complex_messages(param, cfg.matches, cfg.seed)
        return start_feed(matcher, messages, cfg.matches + 1, record=cfg.record, counter=counter)

    def run(self, feed: Feed):
        return run_feed(feed)


SIMPLE_SMART_HOUSE = BenchmarkFactory(
    "simple-smart-house", SimpleSmartHouseConfig, SimpleSmartHouse, "prefix pairs per match", 0, 20
)
COMPLEX_SMART_HOUSE = BenchmarkFactory(
    "complex-smart-house", ComplexSmartHouseConfig, ComplexSmartHouse, "noise events per match", 0, 25
)
