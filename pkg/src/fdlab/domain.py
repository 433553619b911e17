"""Variable store with bitset integer domains and specialised Boolean domains.

Every domain mutation goes through :meth:`VariableStore.narrow`, which
invokes the restoration backend's record hook before the change becomes
visible and reports the strongest applicable domain event.  Integer domains
are bitsets over the variable's original bounds with cached lo/hi/size;
Boolean domains are three-state cells.  Boolean variables expose the same
observable semantics as integer variables with domain {0..1}.
"""

from __future__ import annotations

import enum
from typing import NamedTuple


class VarKind(enum.Enum):
    INT = "int"
    BOOL = "bool"


class VarId(NamedTuple):
    index: int
    kind: VarKind


class EventClass(enum.IntEnum):
    """Wake-up granularity, ordered by strength."""

    DOMAIN_CHANGED = 0
    BOUNDS_CHANGED = 1
    INSTANTIATED = 2


class DomainEvent(NamedTuple):
    var: VarId
    klass: EventClass


class Op(enum.IntEnum):
    REMOVE = 0
    MIN = 1
    MAX = 2
    ASSIGN = 3


class _Failed:
    __slots__ = ()

    def __repr__(self):
        return "FAILED"

    def __bool__(self):
        return False


#: Sentinel narrow outcome: the action would empty the domain.  The domain
#: itself is left untouched; the caller must abort the current fixpoint.
FAILED = _Failed()

#: Boolean state for "not yet decided".
UNKNOWN = -1


class DomainError(ValueError):
    """Invalid domain construction (e.g. lo > hi)."""


class VariableStore:
    """All variable domains of one solver instance, indexable by VarId.

    The restorable state is the integer bitset masks plus the Boolean state
    words; cached bounds and sizes are derived.  A copy backend snapshots
    that state as one contiguous region (``snapshot_blob``).
    """

    def __init__(self):
        self.depth = 0
        self.backend = None  # restoration backend; record hook target
        self._kind = []  # per var index
        self._slot = []
        # integer slots
        self._base = []
        self._span = []
        self._mask = []
        self._lo = []
        self._hi = []
        self._size = []
        # boolean slots
        self._bstate = []
        self._region_words = 0

    # -- construction -------------------------------------------------

    def new_int_var(self, lo, hi):
        if lo > hi:
            raise DomainError(f"empty initial domain [{lo}..{hi}]")
        index = len(self._kind)
        slot = len(self._mask)
        span = hi - lo + 1
        self._kind.append(VarKind.INT)
        self._slot.append(slot)
        self._base.append(lo)
        self._span.append(span)
        self._mask.append((1 << span) - 1)
        self._lo.append(lo)
        self._hi.append(hi)
        self._size.append(span)
        self._region_words += -(-span // 64)
        return VarId(index, VarKind.INT)

    def new_bool_var(self):
        index = len(self._kind)
        self._kind.append(VarKind.BOOL)
        self._slot.append(len(self._bstate))
        self._bstate.append(UNKNOWN)
        self._region_words += 1
        return VarId(index, VarKind.BOOL)

    @property
    def num_vars(self):
        return len(self._kind)

    @property
    def num_bool_vars(self):
        return len(self._bstate)

    @property
    def num_int_vars(self):
        return len(self._mask)

    @property
    def region_bytes(self):
        """Size in bytes of the restorable domain region."""
        return 8 * self._region_words

    # -- queries ------------------------------------------------------

    def min(self, var):
        slot = self._slot[var[0]]
        if var[1] is VarKind.INT:
            return self._lo[slot]
        s = self._bstate[slot]
        return 0 if s == UNKNOWN else s

    def max(self, var):
        slot = self._slot[var[0]]
        if var[1] is VarKind.INT:
            return self._hi[slot]
        s = self._bstate[slot]
        return 1 if s == UNKNOWN else s

    def size(self, var):
        slot = self._slot[var[0]]
        if var[1] is VarKind.INT:
            return self._size[slot]
        return 2 if self._bstate[slot] == UNKNOWN else 1

    def is_assigned(self, var):
        return self.size(var) == 1

    def value(self, var):
        if not self.is_assigned(var):
            raise ValueError(f"{var} is not assigned")
        return self.min(var)

    def contains(self, var, v):
        slot = self._slot[var[0]]
        if var[1] is VarKind.INT:
            off = v - self._base[slot]
            return 0 <= off < self._span[slot] and (self._mask[slot] >> off) & 1
        s = self._bstate[slot]
        if v not in (0, 1):
            return False
        return s == UNKNOWN or s == v

    def domain_values(self, var):
        slot = self._slot[var[0]]
        if var[1] is VarKind.BOOL:
            s = self._bstate[slot]
            return [0, 1] if s == UNKNOWN else [s]
        base = self._base[slot]
        m = self._mask[slot]
        out = []
        while m:
            lsb = m & -m
            out.append(base + lsb.bit_length() - 1)
            m ^= lsb
        return out

    # -- mutation -----------------------------------------------------

    def narrow(self, var, op, value):
        """Intersect the domain with the action's allowed set.

        Returns a :class:`DomainEvent` when the domain changed, ``None``
        when it is bit-identical, or :data:`FAILED` when the intersection
        would be empty (the domain is left as-is).
        """
        if var[1] is VarKind.BOOL:
            return self._narrow_bool(var, op, value)
        return self._narrow_int(var, op, value)

    def _narrow_bool(self, var, op, value):
        slot = self._slot[var[0]]
        cur = self._bstate[slot]
        if op is Op.ASSIGN:
            allowed = 1 << value if value in (0, 1) else 0
        elif op is Op.REMOVE:
            allowed = 3 & ~(1 << value if value in (0, 1) else 0)
        elif op is Op.MIN:
            allowed = 3 if value <= 0 else (2 if value == 1 else 0)
        else:  # Op.MAX
            allowed = 3 if value >= 1 else (1 if value == 0 else 0)
        have = 3 if cur == UNKNOWN else 1 << cur
        new = have & allowed
        if new == have:
            return None
        if new == 0:
            return FAILED
        state = 0 if new == 1 else 1
        if self.backend is not None:
            self.backend.record(var, cur)
        self._bstate[slot] = state
        return DomainEvent(var, EventClass.INSTANTIATED)

    def _narrow_int(self, var, op, value):
        slot = self._slot[var[0]]
        base = self._base[slot]
        span = self._span[slot]
        mask = self._mask[slot]
        if op is Op.REMOVE:
            off = value - base
            if not (0 <= off < span):
                return None
            new = mask & ~(1 << off)
        elif op is Op.MIN:
            off = value - base
            if off <= 0:
                off = 0
            new = (mask >> off) << off
        elif op is Op.MAX:
            off = value - base
            if off >= span - 1:
                off = span - 1
            new = mask & ((1 << (off + 1)) - 1) if off >= 0 else 0
        else:  # Op.ASSIGN
            off = value - base
            new = mask & (1 << off) if 0 <= off < span else 0
        if new == mask:
            return None
        if new == 0:
            return FAILED
        if self.backend is not None:
            self.backend.record(var, mask)
        self._mask[slot] = new
        old_lo, old_hi = self._lo[slot], self._hi[slot]
        lo = base + ((new & -new).bit_length() - 1)
        hi = base + new.bit_length() - 1
        size = new.bit_count()
        self._lo[slot] = lo
        self._hi[slot] = hi
        self._size[slot] = size
        if size == 1:
            klass = EventClass.INSTANTIATED
        elif lo != old_lo or hi != old_hi:
            klass = EventClass.BOUNDS_CHANGED
        else:
            klass = EventClass.DOMAIN_CHANGED
        return DomainEvent(var, klass)

    def remove_value(self, var, v):
        return self.narrow(var, Op.REMOVE, v)

    def tighten_min(self, var, m):
        return self.narrow(var, Op.MIN, m)

    def tighten_max(self, var, m):
        return self.narrow(var, Op.MAX, m)

    def assign(self, var, v):
        return self.narrow(var, Op.ASSIGN, v)

    # -- restoration support -------------------------------------------

    def snapshot_blob(self):
        """Copy of the restorable domain region (masks + Boolean states)."""
        return (list(self._mask), list(self._bstate))

    def load_blob(self, blob):
        masks, bstates = blob
        self._mask[: len(masks)] = masks
        self._bstate[: len(bstates)] = bstates
        base = self._base
        lo, hi, size = self._lo, self._hi, self._size
        for slot, m in enumerate(masks):
            lo[slot] = base[slot] + ((m & -m).bit_length() - 1)
            hi[slot] = base[slot] + m.bit_length() - 1
            size[slot] = m.bit_count()

    def restore_raw(self, var, old):
        """Undo hook for trailing: reinstate a recorded pre-change state."""
        slot = self._slot[var[0]]
        if var[1] is VarKind.BOOL:
            self._bstate[slot] = old
            return
        base = self._base[slot]
        self._mask[slot] = old
        self._lo[slot] = base + ((old & -old).bit_length() - 1)
        self._hi[slot] = base + old.bit_length() - 1
        self._size[slot] = old.bit_count()

    def domains_equal(self, blob):
        masks, bstates = blob
        return self._mask == masks and self._bstate == bstates
