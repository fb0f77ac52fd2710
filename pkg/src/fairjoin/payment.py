"""Four microservices coordinating token and payment flows through joins.

The core service stamps each external request with a random 64-bit
correlation id.  The token service joins a TokenGenerationRequested with the
CustomerValidated of the same id; the payment service waits for a
PaymentRequested, a MerchantValidated and a CustomerValidated all carrying
the same id.
"""

from __future__ import annotations

import queue
import random
import threading
from dataclasses import dataclass

from .actors import Actor, ActorRef
from .core import Stop, clause, rule
from .matchers import AlgorithmId, receive


class FlowTimeout(RuntimeError):
    pass


@dataclass(frozen=True, slots=True)
class ExternalTokenGenerationRequest:
    request: int


@dataclass(frozen=True, slots=True)
class ExternalPaymentRequest:
    request: int


@dataclass(frozen=True, slots=True)
class TokenGenerationRequested:
    cid: int


@dataclass(frozen=True, slots=True)
class CustomerValidated:
    cid: int


@dataclass(frozen=True, slots=True)
class TokenGenerated:
    cid: int


@dataclass(frozen=True, slots=True)
class PaymentRequested:
    cid: int


@dataclass(frozen=True, slots=True)
class MerchantValidated:
    cid: int


@dataclass(frozen=True, slots=True)
class TokenConsumed:
    cid: int


@dataclass(frozen=True, slots=True)
class PaymentSucceeded:
    cid: int


@dataclass(frozen=True, slots=True)
class Shutdown:
    pass


def _same_cid(a, b) -> bool:
    return a.cid == b.cid


def _stop(matched, self_ref):
    return Stop(None)


class PaymentSystem:
    """Starts the four services and drives requests through them.

    ``transcript`` collects one line per handled event, in handling order.
    """

    SERVICES = ("core", "account", "token", "payment")

    def __init__(self, *, algorithm: AlgorithmId | str = AlgorithmId.WHILE_LAZY, seed: int = 42, timeout: float = 10.0):
        self.algorithm = AlgorithmId.parse(algorithm)
        self.timeout = timeout
        self.transcript: list[str] = []
        self.issued: dict[tuple[str, int], int] = {}
        self.results: queue.SimpleQueue = queue.SimpleQueue()
        self.refs: dict[str, ActorRef] = {}
        self._rng = random.Random(seed)
        self._rng_lock = threading.Lock()
        self._next_request = 0
        self.actors: dict[str, Actor] = {}
        builders = {
            "core": self._core_rules,
            "account": self._account_rules,
            "token": self._token_rules,
            "payment": self._payment_rules,
        }
        for name in self.SERVICES:
            matcher = receive(*builders[name](), algorithm=self.algorithm, trace=True)
            self.actors[name] = Actor(matcher, name=name)

    def _log(self, service: str, text: str) -> None:
        self.transcript.append(f"{service:>7}: {text}")

    def _new_cid(self) -> int:
        with self._rng_lock:
            while True:
                cid = self._rng.getrandbits(64)
                if cid not in self.issued.values():
                    return cid

    # -- services -----------------------------------------------------------

    def _core_rules(self):
        refs = self.refs

        def token_request(m, _):
            (req,) = m
            cid = self._new_cid()
            self.issued["token", req.request] = cid
            self._log("core", f"token request #{req.request} -> cid {cid:016x}")
            refs["account"].send(TokenGenerationRequested(cid))
            refs["token"].send(TokenGenerationRequested(cid))

        def payment_request(m, _):
            (req,) = m
            cid = self._new_cid()
            self.issued["payment", req.request] = cid
            self._log("core", f"payment request #{req.request} -> cid {cid:016x}")
            for service in ("account", "token", "payment"):
                refs[service].send(PaymentRequested(cid))

        def token_generated(m, _):
            self._log("core", f"TokenGenerated {m[0].cid:016x}")
            self.results.put(m[0])

        def payment_succeeded(m, _):
            self._log("core", f"PaymentSucceeded {m[0].cid:016x}")
            self.results.put(m[0])

        return (
            rule(ExternalTokenGenerationRequest, body=token_request),
            rule(ExternalPaymentRequest, body=payment_request),
            rule(TokenGenerated, body=token_generated),
            rule(PaymentSucceeded, body=payment_succeeded),
            rule(Shutdown, body=_stop),
        )

    def _account_rules(self):
        refs = self.refs

        def customer_for_token(m, _):
            cid = m[0].cid
            self._log("account", f"customer validated for token {cid:016x}")
            refs["token"].send(CustomerValidated(cid))

        def merchant(m, _):
            cid = m[0].cid
            self._log("account", f"merchant validated {cid:016x}")
            refs["payment"].send(MerchantValidated(cid))

        def customer_for_payment(m, _):
            cid = m[0].cid
            self._log("account", f"customer validated for payment {cid:016x}")
            refs["payment"].send(CustomerValidated(cid))

        return (
            rule(TokenGenerationRequested, body=customer_for_token),
            rule(PaymentRequested, body=merchant),
            rule(TokenConsumed, body=customer_for_payment),
            rule(Shutdown, body=_stop),
        )

    def _token_rules(self):
        refs = self.refs

        def generate(m, _):
            cid = m[0].cid
            self._log("token", f"token generated {cid:016x}")
            refs["core"].send(TokenGenerated(cid))

        def consume(m, _):
            cid = m[0].cid
            self._log("token", f"token consumed {cid:016x}")
            refs["account"].send(TokenConsumed(cid))

        return (
            rule(TokenGenerationRequested, CustomerValidated, guard=[clause(_same_cid, 0, 1)], body=generate),
            rule(PaymentRequested, body=consume),
            rule(Shutdown, body=_stop),
        )

    def _payment_rules(self):
        return payment_service_rules(self.refs, self._log)

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> PaymentSystem:
        for name, actor in self.actors.items():
            self.refs[name] = actor.ref
        for actor in self.actors.values():
            actor.start()
        return self

    def shutdown(self) -> None:
        for name, actor in self.actors.items():
            if not actor.mailbox.closed:
                actor.ref.send(Shutdown())
        for actor in self.actors.values():
            actor.future.result(self.timeout)

    def __enter__(self) -> PaymentSystem:
        return self.start()

    def __exit__(self, *exc) -> None:
        self.shutdown()

    def _collect(self, n: int, kind: type) -> list[int]:
        cids = []
        for _ in range(n):
            try:
                event = self.results.get(timeout=self.timeout)
            except queue.Empty:
                raise FlowTimeout(f"only {len(cids)} of {n} {kind.__name__} events arrived") from None
            if not isinstance(event, kind):
                raise RuntimeError(f"unexpected terminal event {event!r}")
            cids.append(event.cid)
        return cids

    def _requests(self, n: int) -> range:
        start = self._next_request
        self._next_request += n
        return range(start, start + n)

    def request_tokens(self, n: int) -> list[int]:
        for r in self._requests(n):
            self.refs["core"].send(ExternalTokenGenerationRequest(r))
        return self._collect(n, TokenGenerated)

    def request_payments(self, n: int) -> list[int]:
        for r in self._requests(n):
            self.refs["core"].send(ExternalPaymentRequest(r))
        return self._collect(n, PaymentSucceeded)


def payment_service_rules(refs: dict[str, ActorRef], log=None):
    """The payment service: a three-way join on equal correlation ids."""

    def succeed(m, _):
        cid = m[0].cid
        if log:
            log("payment", f"payment succeeded {cid:016x}")
        refs["core"].send(PaymentSucceeded(cid))

    guard = [clause(_same_cid, 0, 1), clause(_same_cid, 1, 2)]
    return (
        rule(PaymentRequested, MerchantValidated, CustomerValidated, guard=guard, body=succeed),
        rule(Shutdown, body=_stop),
    )


def run_token_flow(requests: int, **kwargs) -> list[int]:
    """Issue ``requests`` token requests; return the TokenGenerated cids in arrival order."""
    with PaymentSystem(**kwargs) as system:
        return system.request_tokens(requests)


def run_payment_flow(requests: int, **kwargs) -> list[int]:
    """Issue ``requests`` payment requests; return the PaymentSucceeded cids in arrival order."""
    with PaymentSystem(**kwargs) as system:
        return system.request_payments(requests)
