"""Depth-first search with binary branching, pluggable backtrack memory,
and two branch-and-bound modes.

Branching picks the first unassigned variable in the static order and
tries x = v (smallest value) then x != v.  Every action applied at a node
is recorded in that node's frame, so recomputation backends can replay the
exact path, including any objective-bound actions taken during
branch-and-bound.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .constraints import UpperBoundProp
from .domain import FAILED, Op
from .propagate import PropQueue
from .restore import RestoreMode, RestoreStats, make_backend

# Node actions (also the recomputation replay alphabet).
A_ASSIGN = 0
A_REMOVE = 1
A_MAX = 2
A_SCHED = 3


@dataclass
class SearchStats:
    nodes: int = 0
    backtracks: int = 0
    solutions: int = 0
    setup_ms: float = 0.0
    solve_ms: float = 0.0
    nps: float = 0.0
    restore: RestoreStats = field(default_factory=RestoreStats)


@dataclass(frozen=True)
class Solution:
    """Values of the decision variables in branch order."""

    values: tuple
    objective: int | None = None


def _apply_actions(eng, actions):
    for act in actions:
        kind = act[0]
        if kind == A_ASSIGN:
            r = eng.narrow(act[1], Op.ASSIGN, act[2])
        elif kind == A_REMOVE:
            r = eng.narrow(act[1], Op.REMOVE, act[2])
        elif kind == A_MAX:
            r = eng.narrow(act[1], Op.MAX, act[2])
        else:  # A_SCHED
            eng.schedule_pid(act[1])
            r = None
        if r is FAILED:
            return False
    return True


class _Search:
    def __init__(self, model, restore, queue, backend=None):
        self.model = model
        self.store = model.store
        self.eng = model.engine
        self.eng.queue = PropQueue(queue)
        if backend is None:
            backend = make_backend(
                restore, self.store, self.eng.unsubsume_above, self._replay
            )
        self.backend = backend
        self.store.backend = backend
        self.stats = SearchStats()
        self.alts = []

    def _replay(self, actions):
        ok = _apply_actions(self.eng, actions) and self.eng.fixpoint()
        # Replaying a previously consistent path with monotone propagators
        # cannot fail.
        assert ok, "recomputation replay failed"

    def root(self):
        self.eng.schedule_all()
        return self.eng.fixpoint()

    def first_unassigned(self):
        size = self.store.size
        for var in self.model.decision_vars:
            if size(var) > 1:
                return var
        return None

    def try_node(self, actions):
        self.backend.open_node(actions)
        self.store.depth += 1
        self.stats.nodes += 1
        if not _apply_actions(self.eng, actions):
            self.eng.queue.clear()
            return False
        return self.eng.fixpoint()

    def unwind(self):
        """Retreat to the nearest open alternative and take it.  Returns
        False when the tree is exhausted."""
        while self.alts:
            depth, actions = self.alts.pop()
            self.backend.backtrack_to(depth)
            if self.try_node(self.prefix_actions() + actions):
                return True
            self.stats.backtracks += 1
        return False

    def prefix_actions(self):
        """Actions to prepend at every node; branch-and-bound overrides."""
        return []

    def branch(self):
        """Expand one node.  Returns False when the subtree under the
        current node is finished and no alternative is left."""
        var = self.first_unassigned()
        if var is None:
            return self.on_solution()
        v = self.store.min(var)
        self.alts.append((self.store.depth, [(A_REMOVE, var, v)]))
        if self.try_node(self.prefix_actions() + [(A_ASSIGN, var, v)]):
            return True
        self.stats.backtracks += 1
        return self.unwind()

    def on_solution(self):
        raise NotImplementedError

    def snapshot_solution(self):
        value = self.store.value
        return tuple(value(v) for v in self.model.decision_vars)

    def run(self, build_ms=0.0):
        t0 = time.perf_counter()
        ok = self.root()
        self.stats.setup_ms = build_ms + (time.perf_counter() - t0) * 1e3
        t1 = time.perf_counter()
        if ok:
            while self.branch():
                pass
        solve_s = time.perf_counter() - t1
        self.stats.solve_ms = solve_s * 1e3
        self.stats.nps = self.stats.nodes / max(solve_s, 1e-9)
        self.stats.restore = self.backend.stats
        return self.stats


class _EnumerateSearch(_Search):
    def __init__(self, model, restore, queue, mode, backend=None):
        super().__init__(model, restore, queue, backend)
        self.mode = mode
        self.solutions = []

    def on_solution(self):
        self.solutions.append(Solution(self.snapshot_solution()))
        self.stats.solutions += 1
        if self.mode == "first":
            return False
        return self.unwind()


class _MinimizeSearch(_Search):
    def __init__(self, model, restore, queue, bnb, backend=None):
        super().__init__(model, restore, queue, backend)
        if model.objective is None:
            raise ValueError("model has no objective variable")
        self.bnb = bnb
        self.best = None
        self.best_value = None
        self.bound_pid = None

    def prefix_actions(self):
        if self.best_value is None:
            return []
        if self.bnb == "tighten":
            return [(A_MAX, self.model.objective, self.best_value - 1)]
        return [(A_SCHED, self.bound_pid)]

    def on_solution(self):
        value = self.store.value(self.model.objective)
        self.best = Solution(self.snapshot_solution(), value)
        self.best_value = value
        self.stats.solutions += 1
        if self.bnb == "post":
            self.bound_pid = self.eng.add(
                UpperBoundProp(self.model.objective, value - 1)
            )
        return self.unwind()


def solve(
    model,
    *,
    mode="first",
    restore=RestoreMode.trail(),
    queue="fifo",
    build_ms=0.0,
    backend=None,
):
    """Run DFS; returns (solutions, stats).  ``mode`` is 'first' or 'all'."""
    if mode not in ("first", "all"):
        raise ValueError(f"unknown search mode {mode!r}")
    search = _EnumerateSearch(model, restore, queue, mode, backend)
    stats = search.run(build_ms)
    return search.solutions, stats


def minimize(
    model,
    *,
    bnb="tighten",
    restore=RestoreMode.trail(),
    queue="fifo",
    build_ms=0.0,
    backend=None,
):
    """Restart-free branch and bound; returns (best solution or None, stats).

    ``bnb='tighten'`` narrows the objective's upper bound below each
    incumbent; ``bnb='post'`` posts a new bounding constraint instead.
    Both prove the same optimum.
    """
    if bnb not in ("tighten", "post"):
        raise ValueError(f"unknown branch-and-bound mode {bnb!r}")
    search = _MinimizeSearch(model, restore, queue, bnb, backend)
    stats = search.run(build_ms)
    return search.best, stats
