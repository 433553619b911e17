"""Pluggable backtrack-memory backends: trailing, copying, recomputation.

All backends maintain the stack of node frames and restore the variable
store to the exact state it had when a frame was opened.  Trailing records
every domain change and undoes them in reverse; copying snapshots the whole
contiguous domain region at every node; copy-with-recomputation snapshots
every ``distance`` nodes and otherwise replays the recorded per-node
actions with full propagation from the nearest snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class RestoreStats:
    bytes_copied: int = 0
    trail_entries: int = 0
    snapshots_taken: int = 0
    recomputations: int = 0
    replayed_decisions: int = 0


@dataclass(frozen=True)
class RestoreMode:
    """Backend selector.  ``copy-recompute`` with distance 1 behaves
    observably identically to ``copy``."""

    variant: str = "trail"
    distance: int = 1
    adaptive: int = 2

    @staticmethod
    def trail():
        return RestoreMode("trail")

    @staticmethod
    def copy():
        return RestoreMode("copy")

    @staticmethod
    def copy_recompute(distance, adaptive=2):
        if distance < 1 or adaptive < 1:
            raise ValueError("recomputation distances must be positive")
        return RestoreMode("copy-recompute", distance, adaptive)


class _Frame:
    __slots__ = ("actions", "snapshot", "trail_mark")

    def __init__(self, actions, snapshot=None, trail_mark=0):
        self.actions = actions
        self.snapshot = snapshot
        self.trail_mark = trail_mark


class Backend:
    """Common frame-stack behaviour; subclasses fill in the strategy."""

    def __init__(self, store, unsubsume):
        self.store = store
        self.frames = []
        self.stats = RestoreStats()
        self._unsubsume = unsubsume

    @property
    def depth(self):
        return len(self.frames)

    def record(self, var, old):
        """Called by the store before a domain mutation becomes visible."""

    def open_node(self, actions):
        raise NotImplementedError

    def backtrack_to(self, target):
        raise NotImplementedError

    def _settle(self, target):
        del self.frames[target:]
        self.store.depth = target
        self._unsubsume(target)


class TrailBackend(Backend):
    def __init__(self, store, unsubsume):
        super().__init__(store, unsubsume)
        self.trail = []

    def record(self, var, old):
        self.trail.append((var, old))
        self.stats.trail_entries += 1

    def open_node(self, actions):
        self.frames.append(_Frame(actions, trail_mark=len(self.trail)))

    def backtrack_to(self, target):
        mark = self.frames[target].trail_mark
        trail = self.trail
        restore = self.store.restore_raw
        for i in range(len(trail) - 1, mark - 1, -1):
            var, old = trail[i]
            restore(var, old)
        del trail[mark:]
        self._settle(target)


class CopyBackend(Backend):
    def open_node(self, actions):
        self.frames.append(_Frame(actions, snapshot=self.store.snapshot_blob()))
        self.stats.snapshots_taken += 1
        self.stats.bytes_copied += self.store.region_bytes

    def backtrack_to(self, target):
        self.store.load_blob(self.frames[target].snapshot)
        self._settle(target)


class RecomputeBackend(Backend):
    """Copying every ``distance`` nodes, otherwise replay with propagation.

    The adaptive rule places one extra snapshot at the midpoint of the
    replayed path whenever the path length reaches ``adaptive``.
    """

    def __init__(self, store, unsubsume, replay, distance, adaptive=2):
        super().__init__(store, unsubsume)
        self._replay = replay
        self.distance = distance
        self.adaptive = adaptive

    def _snap(self, frame):
        frame.snapshot = self.store.snapshot_blob()
        self.stats.snapshots_taken += 1
        self.stats.bytes_copied += self.store.region_bytes

    def open_node(self, actions):
        frame = _Frame(actions)
        if len(self.frames) % self.distance == 0:
            self._snap(frame)
        self.frames.append(frame)

    def backtrack_to(self, target):
        frames = self.frames
        store = self.store
        if frames[target].snapshot is not None:
            store.load_blob(frames[target].snapshot)
            self._settle(target)
            return
        k = target - 1
        while frames[k].snapshot is None:
            k -= 1
        store.load_blob(frames[k].snapshot)
        store.depth = k
        self._unsubsume(k)
        self.stats.recomputations += 1
        self.stats.replayed_decisions += target - k
        mid = k + (target - k) // 2 if target - k >= self.adaptive else None
        for m in range(k, target):
            if m == mid and frames[m].snapshot is None:
                self._snap(frames[m])
            store.depth = m + 1
            self._replay(frames[m].actions)
        self._settle(target)


class ShadowBackend(Backend):
    """Testing aid: runs a primary backend alongside a copy reference and
    verifies bit-identical restoration after every backtrack."""

    def __init__(self, primary, reference):
        self.primary = primary
        self.reference = reference
        self.mismatches = 0

    @property
    def store(self):
        return self.primary.store

    @property
    def stats(self):
        return self.primary.stats

    @property
    def frames(self):
        return self.primary.frames

    def record(self, var, old):
        self.primary.record(var, old)

    def open_node(self, actions):
        self.reference.frames.append(
            _Frame(actions, snapshot=self.primary.store.snapshot_blob())
        )
        self.primary.open_node(actions)

    def backtrack_to(self, target):
        expected = self.reference.frames[target].snapshot
        del self.reference.frames[target:]
        self.primary.backtrack_to(target)
        if not self.primary.store.domains_equal(expected):
            self.mismatches += 1


def make_backend(mode, store, unsubsume, replay):
    if mode.variant == "trail":
        return TrailBackend(store, unsubsume)
    if mode.variant == "copy":
        return CopyBackend(store, unsubsume)
    if mode.variant == "copy-recompute":
        return RecomputeBackend(store, unsubsume, replay, mode.distance, mode.adaptive)
    raise ValueError(f"unknown restore mode {mode.variant!r}")
