"""Event-driven propagation engine with a policy-ordered queue.

Propagators subscribe to (variable, event class) pairs and are run to a
fixpoint.  All propagators are monotone and contracting, so the fixpoint
reached is unique regardless of the queue policy; only the amount of work
to get there differs.
"""

from __future__ import annotations

from collections import deque

from .domain import FAILED

# Propagator outcomes.
AT_FIXPOINT = 0
RESCHEDULE = 1
PROP_FAILED = 2
SUBSUMED = 3

NUM_PRIORITIES = 8


class Propagator:
    """Monotone, contracting filtering function for one constraint."""

    priority = 4

    def subscriptions(self):
        """Yield (VarId, EventClass) wake-up conditions."""
        return ()

    def propagate(self, eng):
        raise NotImplementedError


class PropQueue:
    """Pending-propagator queue; a propagator appears at most once.

    ``fifo`` ignores priorities; ``priority`` pops the lowest priority
    value first; ``reversed`` pops the highest first.  Within equal
    priority, FIFO order breaks ties.
    """

    POLICIES = ("fifo", "priority", "reversed")

    def __init__(self, policy="fifo"):
        if policy not in self.POLICIES:
            raise ValueError(f"unknown queue policy {policy!r}")
        self.policy = policy
        self._pending = set()
        self._buckets = [deque() for _ in range(NUM_PRIORITIES)]
        if policy == "reversed":
            self._order = range(NUM_PRIORITIES - 1, -1, -1)
        else:
            self._order = range(NUM_PRIORITIES)

    def push(self, pid, priority):
        if pid in self._pending:
            return
        self._pending.add(pid)
        self._buckets[0 if self.policy == "fifo" else priority].append(pid)

    def pop(self):
        for p in self._order:
            bucket = self._buckets[p]
            if bucket:
                pid = bucket.popleft()
                self._pending.discard(pid)
                return pid
        return None

    def clear(self):
        self._pending.clear()
        for bucket in self._buckets:
            bucket.clear()

    def __len__(self):
        return len(self._pending)

    def __contains__(self, pid):
        return pid in self._pending


class Engine:
    """Owns the propagators, their subscriptions, and the fixpoint loop."""

    def __init__(self, store, queue=None):
        self.store = store
        self.queue = queue if queue is not None else PropQueue()
        self.props = []
        self.subs = {}  # var index -> list of (pid, min event class)
        self.subsumed = {}  # pid -> search depth at which it became entailed
        self.running = None

    def add(self, prop):
        pid = len(self.props)
        self.props.append(prop)
        for var, klass in prop.subscriptions():
            self.subs.setdefault(var[0], []).append((pid, klass))
        return pid

    def narrow(self, var, op, value):
        """Single mutation entry point for propagators: narrow + schedule."""
        r = self.store.narrow(var, op, value)
        if r is not None and r is not FAILED:
            self.dispatch(r)
        return r

    def dispatch(self, event):
        subs = self.subs.get(event[0][0])
        if not subs:
            return
        strength = event[1]
        queue = self.queue
        props = self.props
        running = self.running
        subsumed = self.subsumed
        for pid, min_class in subs:
            if strength >= min_class and pid != running and pid not in subsumed:
                queue.push(pid, props[pid].priority)

    def schedule_pid(self, pid):
        if pid not in self.subsumed:
            self.queue.push(pid, self.props[pid].priority)

    def schedule_all(self):
        for pid in range(len(self.props)):
            self.schedule_pid(pid)

    def unsubsume_above(self, depth):
        """Re-enable propagators subsumed deeper than ``depth``."""
        subsumed = self.subsumed
        if subsumed:
            stale = [pid for pid, d in subsumed.items() if d > depth]
            for pid in stale:
                del subsumed[pid]

    def fixpoint(self):
        """Run pending propagators until quiescence.

        Returns True at the (unique) fixpoint, False when some domain
        emptied; the queue is drained in both cases.
        """
        queue = self.queue
        props = self.props
        while True:
            pid = queue.pop()
            if pid is None:
                return True
            self.running = pid
            outcome = props[pid].propagate(self)
            self.running = None
            if outcome == AT_FIXPOINT:
                continue
            if outcome == PROP_FAILED:
                queue.clear()
                return False
            if outcome == SUBSUMED:
                self.subsumed[pid] = self.store.depth
            elif outcome == RESCHEDULE:
                queue.push(pid, props[pid].priority)
