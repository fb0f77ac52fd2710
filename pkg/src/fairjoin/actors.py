"""A minimal actor runtime with a prependable mailbox and matcher switching."""

from __future__ import annotations

import itertools
import queue
import threading
from collections import deque
from collections.abc import Iterable
from concurrent.futures import Future
from typing import Any

from .core import Continue, Stop, Switch

__all__ = ["Actor", "ActorRef", "Mailbox", "MailboxClosed"]


class MailboxClosed(Exception):
    """Raised by ``put`` on a closed mailbox and by ``take`` once it is drained."""


_CLOSED = object()


class Mailbox:
    """Multi-producer queue plus a consumer-private backlog that is read first.

    ``put`` may be called from any thread; ``take``, ``prepend_all`` and
    ``drain`` belong to the consuming thread.  With ``record=True`` every
    accepted message is also appended to :attr:`received`.
    """

    def __init__(self, *, record: bool = False) -> None:
        self._main: queue.SimpleQueue = queue.SimpleQueue()
        self._backlog: deque = deque()
        self._lock = threading.Lock()
        self._closed = False
        self.received: list | None = [] if record else None

    @property
    def closed(self) -> bool:
        return self._closed

    def put(self, msg: Any) -> None:
        with self._lock:
            if self._closed:
                raise MailboxClosed(f"cannot deliver {msg!r}: mailbox closed")
            if self.received is not None:
                self.received.append(msg)
            self._main.put(msg)

    def prepend_all(self, msgs: Iterable[Any]) -> None:
        # a later batch goes in front of whatever backlog is left
        self._backlog.extendleft(reversed(list(msgs)))

    def take(self, timeout: float | None = None) -> Any:
        """Next message; blocks on the main queue when the backlog is empty.

        Raises ``queue.Empty`` on timeout and :class:`MailboxClosed` once
        the mailbox is closed and nothing is left before the close marker.
        """
        if self._backlog:
            return self._backlog.popleft()
        msg = self._main.get(timeout=timeout)
        if msg is _CLOSED:
            self._main.put(_CLOSED)
            raise MailboxClosed("mailbox closed")
        return msg

    def close(self) -> None:
        with self._lock:
            if not self._closed:
                self._closed = True
                self._main.put(_CLOSED)

    def drain(self) -> list:
        """Remove and return every message not yet taken."""
        out = list(self._backlog)
        self._backlog.clear()
        saw_marker = False
        while True:
            try:
                msg = self._main.get_nowait()
            except queue.Empty:
                break
            if msg is _CLOSED:
                saw_marker = True
            else:
                out.append(msg)
        if saw_marker:
            self._main.put(_CLOSED)
        return out

    def __len__(self) -> int:
        return len(self._backlog) + self._main.qsize()


class ActorRef:
    __slots__ = ("mailbox", "name")

    def __init__(self, mailbox: Mailbox, name: str = "") -> None:
        self.mailbox = mailbox
        self.name = name

    def send(self, msg: Any) -> None:
        self.mailbox.put(msg)

    def __repr__(self) -> str:
        return f"ActorRef({self.name})"


_ids = itertools.count(1)


class Actor:
    """Runs a matcher on its own thread until a rule body returns ``Stop``.

    ``start()`` returns ``(future, ref)``; the future resolves to the stop
    value, or to the exception that ended the loop.  A ``Switch(m)`` result
    hands every taken but unconsumed message back to the mailbox, in
    arrival order, before ``m`` takes over.
    """

    def __init__(self, matcher, *, mailbox: Mailbox | None = None, name: str | None = None) -> None:
        self.matcher = matcher
        self.mailbox = mailbox if mailbox is not None else Mailbox()
        self.name = name or f"actor-{next(_ids)}"
        self.ref = ActorRef(self.mailbox, self.name)
        self.future: Future = Future()
        self.switches = 0
        self._thread: threading.Thread | None = None

    def start(self) -> tuple[Future, ActorRef]:
        if self._thread is not None:
            raise RuntimeError(f"{self.name} already started")
        self._thread = threading.Thread(target=self._run, name=self.name, daemon=True)
        self._thread.start()
        return self.future, self.ref

    def join(self, timeout: float | None = None) -> None:
        if self._thread is not None:
            self._thread.join(timeout)

    def _run(self) -> None:
        future = self.future
        future.set_running_or_notify_cancel()
        try:
            while True:
                result = self.matcher.apply(self.mailbox, self.ref)
                if result is Continue:
                    continue
                if isinstance(result, Stop):
                    future.set_result(result.value)
                    return
                if isinstance(result, Switch):
                    old = self.matcher
                    stored = old.stored_messages()
                    old.reset()
                    self.mailbox.prepend_all(stored)
                    self.matcher = result.matcher
                    self.switches += 1
                    continue
                raise TypeError(f"rule body returned {result!r}, expected Continue, Stop or Switch")
        except BaseException as exc:
            future.set_exception(exc)
        finally:
            self.mailbox.close()
