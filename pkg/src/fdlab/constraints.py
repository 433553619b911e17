"""Constraint catalog: linear sums, alldifferent, disequalities, Boolean
conjunction, specialised Boolean sums, ordering and lex constraints.

Posting functions maintain two constraint counts on the model: the native
count (sum-equals is one constraint) and the decomposed count (sum-equals
is a less-equal plus a greater-equal pair, and sums a model class declares
as pair-counted are counted the same way).  Which propagators actually get
posted follows the model's sum and Boolean modes; the pruning reached at
the fixpoint is identical in all modes.
"""

from __future__ import annotations

from .domain import FAILED, UNKNOWN, EventClass, Op, VarKind
from .model import BOOL_INT, SUM_DECOMPOSED, ModelError
from .propagate import AT_FIXPOINT, PROP_FAILED, SUBSUMED, Propagator

EQ = "eq"
LEQ = "leq"
GEQ = "geq"

PRIORITY_CHEAP = 2  # arity <= 3: disequalities, orderings, conjunction
PRIORITY_LINEAR = 4  # linear and Boolean sums
PRIORITY_GLOBAL = 6  # alldifferent, lex

INT64_MAX = 2**63 - 1


class PostError(ModelError):
    """Rejected constraint posting."""


class LinearProp(Propagator):
    """Bounds-consistent propagation of sum(coeff * var) rel c.

    Only integer variables participate (Boolean sums route here after
    being remodelled as {0..1} integers).  Variable slots are cached on
    first run so the hot loop reads the store's bound arrays directly.
    """

    __slots__ = ("terms", "rel", "c", "priority", "_slots")

    def __init__(self, terms, rel, c, priority=PRIORITY_LINEAR):
        self.terms = terms
        self.rel = rel
        self.c = c
        self.priority = priority
        self._slots = None

    def subscriptions(self):
        for _, var in self.terms:
            yield var, EventClass.BOUNDS_CHANGED

    def propagate(self, eng):
        s = eng.store
        slots = self._slots
        if slots is None:
            slots = self._slots = [
                (a, v, s._slot[v[0]]) for a, v in self.terms
            ]
        lo = s._lo
        hi = s._hi
        c = self.c
        rel = self.rel
        narrow = eng.narrow
        while True:
            changed = False
            if rel != GEQ:
                lb = 0
                for a, _, sl in slots:
                    lb += a * (lo[sl] if a > 0 else hi[sl])
                if lb > c:
                    return PROP_FAILED
                for a, v, sl in slots:
                    if a > 0:
                        bound = (c - lb) // a + lo[sl]
                        if bound < hi[sl]:
                            if narrow(v, Op.MAX, bound) is FAILED:
                                return PROP_FAILED
                            changed = True
                    else:
                        bound = -((lb - c) // a) + hi[sl]
                        if bound > lo[sl]:
                            if narrow(v, Op.MIN, bound) is FAILED:
                                return PROP_FAILED
                            changed = True
            if rel != LEQ:
                ub = 0
                for a, _, sl in slots:
                    ub += a * (hi[sl] if a > 0 else lo[sl])
                if ub < c:
                    return PROP_FAILED
                for a, v, sl in slots:
                    if a > 0:
                        bound = -((ub - c) // a) + hi[sl]
                        if bound > lo[sl]:
                            if narrow(v, Op.MIN, bound) is FAILED:
                                return PROP_FAILED
                            changed = True
                    else:
                        bound = (c - ub) // a + lo[sl]
                        if bound < hi[sl]:
                            if narrow(v, Op.MAX, bound) is FAILED:
                                return PROP_FAILED
                            changed = True
            if not changed:
                break
        if rel == LEQ:
            ub = sum(a * (hi[sl] if a > 0 else lo[sl]) for a, _, sl in slots)
            return SUBSUMED if ub <= c else AT_FIXPOINT
        if rel == GEQ:
            lb = sum(a * (lo[sl] if a > 0 else hi[sl]) for a, _, sl in slots)
            return SUBSUMED if lb >= c else AT_FIXPOINT
        if all(lo[sl] == hi[sl] for _, _, sl in slots):
            return SUBSUMED
        return AT_FIXPOINT


class BoolSumProp(Propagator):
    """Counter-based sum over Boolean variables, read straight off the
    three-state cells."""

    __slots__ = ("vars", "rel", "c", "priority", "_slots")

    def __init__(self, vars, rel, c, priority=PRIORITY_LINEAR):
        self.vars = list(vars)
        self.rel = rel
        self.c = c
        self.priority = priority
        self._slots = None

    def subscriptions(self):
        for var in self.vars:
            yield var, EventClass.INSTANTIATED

    def propagate(self, eng):
        s = eng.store
        slots = self._slots
        if slots is None:
            slots = self._slots = [(v, s._slot[v[0]]) for v in self.vars]
        bstate = s._bstate
        c = self.c
        rel = self.rel
        narrow = eng.narrow
        while True:
            n_true = 0
            n_unknown = 0
            for _, sl in slots:
                st = bstate[sl]
                if st == UNKNOWN:
                    n_unknown += 1
                else:
                    n_true += st
            ub = n_true + n_unknown
            if rel != LEQ and ub < c:
                return PROP_FAILED
            if rel != GEQ and n_true > c:
                return PROP_FAILED
            if n_unknown == 0:
                break
            if rel != GEQ and n_true == c:
                for v, sl in slots:
                    if bstate[sl] == UNKNOWN:
                        if narrow(v, Op.ASSIGN, 0) is FAILED:
                            return PROP_FAILED
                continue
            if rel != LEQ and ub == c:
                for v, sl in slots:
                    if bstate[sl] == UNKNOWN:
                        if narrow(v, Op.ASSIGN, 1) is FAILED:
                            return PROP_FAILED
                continue
            break
        if rel == LEQ:
            return SUBSUMED if n_true + n_unknown <= c else AT_FIXPOINT
        if rel == GEQ:
            return SUBSUMED if n_true >= c else AT_FIXPOINT
        return SUBSUMED if n_unknown == 0 else AT_FIXPOINT


class AllDiffValueProp(Propagator):
    """Value-consistent alldifferent: an instantiated value is removed
    from every other domain."""

    __slots__ = ("vars", "priority", "_slots")

    def __init__(self, vars, priority=PRIORITY_GLOBAL):
        self.vars = list(vars)
        self.priority = priority
        self._slots = None

    def subscriptions(self):
        for var in self.vars:
            yield var, EventClass.INSTANTIATED

    def propagate(self, eng):
        s = eng.store
        slots = self._slots
        if slots is None:
            slots = self._slots = [(v, s._slot[v[0]]) for v in self.vars]
        size = s._size
        lo = s._lo
        base = s._base
        mask = s._mask
        narrow = eng.narrow
        while True:
            assigned = set()
            free = []
            for v, sl in slots:
                if size[sl] == 1:
                    val = lo[sl]
                    if val in assigned:
                        return PROP_FAILED
                    assigned.add(val)
                else:
                    free.append((v, sl))
            changed = False
            for v, sl in free:
                b = base[sl]
                for val in assigned:
                    off = val - b
                    if off >= 0 and (mask[sl] >> off) & 1:
                        if narrow(v, Op.REMOVE, val) is FAILED:
                            return PROP_FAILED
                        changed = True
            if not changed:
                return SUBSUMED if not free else AT_FIXPOINT


class NeConstProp(Propagator):
    """var != c; prunes once at posting time and is then entailed."""

    __slots__ = ("var", "c")
    priority = PRIORITY_CHEAP

    def __init__(self, var, c):
        self.var = var
        self.c = c

    def propagate(self, eng):
        if eng.narrow(self.var, Op.REMOVE, self.c) is FAILED:
            return PROP_FAILED
        return SUBSUMED


class FixValueProp(Propagator):
    """var = c; prunes once and is then entailed."""

    __slots__ = ("var", "c")
    priority = PRIORITY_CHEAP

    def __init__(self, var, c):
        self.var = var
        self.c = c

    def propagate(self, eng):
        if eng.narrow(self.var, Op.ASSIGN, self.c) is FAILED:
            return PROP_FAILED
        return SUBSUMED


class LeProp(Propagator):
    """x <= y (or x < y) by bounds."""

    __slots__ = ("x", "y", "gap")
    priority = PRIORITY_CHEAP

    def __init__(self, x, y, strict=False):
        self.x = x
        self.y = y
        self.gap = 1 if strict else 0

    def subscriptions(self):
        yield self.x, EventClass.BOUNDS_CHANGED
        yield self.y, EventClass.BOUNDS_CHANGED

    def propagate(self, eng):
        s = eng.store
        if eng.narrow(self.x, Op.MAX, s.max(self.y) - self.gap) is FAILED:
            return PROP_FAILED
        if eng.narrow(self.y, Op.MIN, s.min(self.x) + self.gap) is FAILED:
            return PROP_FAILED
        if s.max(self.x) + self.gap <= s.min(self.y):
            return SUBSUMED
        return AT_FIXPOINT


class BoolAndProp(Propagator):
    """z = x and y, propagated in all directions."""

    __slots__ = ("z", "x", "y")
    priority = PRIORITY_CHEAP

    def __init__(self, z, x, y):
        self.z = z
        self.x = x
        self.y = y

    def subscriptions(self):
        yield self.z, EventClass.INSTANTIATED
        yield self.x, EventClass.INSTANTIATED
        yield self.y, EventClass.INSTANTIATED

    def propagate(self, eng):
        s = eng.store
        z, x, y = self.z, self.x, self.y
        while True:
            changed = False
            if s.min(x) == 1 and s.min(y) == 1:
                r = eng.narrow(z, Op.ASSIGN, 1)
                if r is FAILED:
                    return PROP_FAILED
                changed |= r is not None
            if s.max(x) == 0 or s.max(y) == 0:
                r = eng.narrow(z, Op.ASSIGN, 0)
                if r is FAILED:
                    return PROP_FAILED
                changed |= r is not None
            if s.min(z) == 1:
                r = eng.narrow(x, Op.ASSIGN, 1)
                if r is FAILED:
                    return PROP_FAILED
                changed |= r is not None
                r = eng.narrow(y, Op.ASSIGN, 1)
                if r is FAILED:
                    return PROP_FAILED
                changed |= r is not None
            elif s.max(z) == 0:
                if s.min(x) == 1:
                    r = eng.narrow(y, Op.ASSIGN, 0)
                    if r is FAILED:
                        return PROP_FAILED
                    changed |= r is not None
                if s.min(y) == 1:
                    r = eng.narrow(x, Op.ASSIGN, 0)
                    if r is FAILED:
                        return PROP_FAILED
                    changed |= r is not None
            if not changed:
                break
        if s.size(z) == 1 and s.size(x) == 1 and s.size(y) == 1:
            return SUBSUMED
        if s.max(z) == 0 and (s.max(x) == 0 or s.max(y) == 0):
            return SUBSUMED
        return AT_FIXPOINT


class LexLeqProp(Propagator):
    """xs <=lex ys (or <lex), filtered with the two-pointer scheme: advance
    over the ground-equal prefix, then enforce the order at the first open
    position, strictly when the tail cannot satisfy the remainder."""

    __slots__ = ("xs", "ys", "strict")
    priority = PRIORITY_GLOBAL

    def __init__(self, xs, ys, strict=False):
        self.xs = list(xs)
        self.ys = list(ys)
        self.strict = strict

    def subscriptions(self):
        for var in self.xs:
            yield var, EventClass.BOUNDS_CHANGED
        for var in self.ys:
            yield var, EventClass.BOUNDS_CHANGED

    def _tail_satisfiable(self, s, alpha):
        xs, ys = self.xs, self.ys
        for j in range(alpha + 1, len(xs)):
            if s.min(xs[j]) < s.max(ys[j]):
                return True
            if s.min(xs[j]) > s.max(ys[j]) or s.min(ys[j]) > s.max(xs[j]):
                return False
        return not self.strict

    def propagate(self, eng):
        s = eng.store
        xs, ys = self.xs, self.ys
        n = len(xs)
        a = 0
        while True:
            while (
                a < n
                and s.size(xs[a]) == 1
                and s.size(ys[a]) == 1
                and s.min(xs[a]) == s.min(ys[a])
            ):
                a += 1
            if a == n:
                return PROP_FAILED if self.strict else SUBSUMED
            gap = 0 if self._tail_satisfiable(s, a) else 1
            if eng.narrow(xs[a], Op.MAX, s.max(ys[a]) - gap) is FAILED:
                return PROP_FAILED
            if eng.narrow(ys[a], Op.MIN, s.min(xs[a]) + gap) is FAILED:
                return PROP_FAILED
            if not (
                s.size(xs[a]) == 1
                and s.size(ys[a]) == 1
                and s.min(xs[a]) == s.min(ys[a])
            ):
                break
        if s.max(xs[a]) < s.min(ys[a]):
            return SUBSUMED
        return AT_FIXPOINT


class UpperBoundProp(Propagator):
    """objective <= bound; posted by branch-and-bound, never counted."""

    __slots__ = ("var", "bound")
    priority = PRIORITY_CHEAP

    def __init__(self, var, bound):
        self.var = var
        self.bound = bound

    def propagate(self, eng):
        if eng.narrow(self.var, Op.MAX, self.bound) is FAILED:
            return PROP_FAILED
        return SUBSUMED


# -- posting API -------------------------------------------------------


def _check_terms(model, terms):
    if not terms:
        raise PostError("linear constraint needs at least one term")
    total = 0
    s = model.store
    for coeff, var in terms:
        if coeff == 0:
            raise PostError("zero coefficient in linear term")
        if var[1] is not VarKind.INT:
            raise PostError("linear constraints take integer variables only")
        total += abs(coeff) * max(abs(s.min(var)), abs(s.max(var)))
    if total > INT64_MAX:
        raise PostError("linear constraint exceeds the 64-bit overflow contract")


def _check_rel(rel):
    if rel not in (EQ, LEQ, GEQ):
        raise PostError(f"unknown relation {rel!r}")


def _post_sum(model, rel, c, make, pair_counted):
    """Post the propagator(s) for one sum per the model's sum mode and
    return how many were posted."""
    eng = model.engine
    if rel == EQ:
        if model.sum_mode == SUM_DECOMPOSED:
            eng.add(make(LEQ, c))
            eng.add(make(GEQ, c))
            return 2
        eng.add(make(EQ, c))
        return 1
    eng.add(make(rel, c))
    if model.sum_mode == SUM_DECOMPOSED and pair_counted:
        # The count-fidelity half: a trivially-true bound in the opposite
        # direction (e.g. sum >= 0 next to sum <= 1).
        eng.add(make(GEQ if rel == LEQ else LEQ, None))
        return 2
    return 1


def post_linear(model, terms, rel, c, *, pair_counted=False, priority=PRIORITY_LINEAR):
    """Post sum(coeff*var) rel c; returns the number of propagators posted."""
    _check_rel(rel)
    terms = [(int(a), v) for a, v in terms]
    _check_terms(model, terms)
    model.count_constraint(
        1, 2 if rel == EQ or pair_counted else 1
    )
    s = model.store
    lo0 = sum(a * (s.min(v) if a > 0 else s.max(v)) for a, v in terms)
    hi0 = sum(a * (s.max(v) if a > 0 else s.min(v)) for a, v in terms)

    def make(r, bound):
        if bound is None:
            bound = lo0 if r == GEQ else hi0
        return LinearProp(terms, r, bound, priority)

    return _post_sum(model, rel, c, make, pair_counted)


def post_bool_sum(model, vars, rel, c, *, pair_counted=False, priority=PRIORITY_LINEAR):
    """Sum of Boolean variables rel c; counter-based under the native
    Boolean mode, routed to the linear propagator under the integer mode.
    Returns the number of propagators posted."""
    _check_rel(rel)
    vars = list(vars)
    if not vars:
        raise PostError("boolean sum needs at least one variable")
    model.count_constraint(1, 2 if rel == EQ or pair_counted else 1)
    if model.bool_mode == BOOL_INT or any(v[1] is VarKind.INT for v in vars):
        terms = [(1, v) for v in vars]

        def make(r, bound):
            if bound is None:
                bound = 0 if r == GEQ else len(vars)
            return LinearProp(terms, r, bound, priority)

    else:

        def make(r, bound):
            if bound is None:
                bound = 0 if r == GEQ else len(vars)
            return BoolSumProp(vars, r, bound, priority)

    return _post_sum(model, rel, c, make, pair_counted)


def post_alldifferent(model, vars, *, priority=PRIORITY_GLOBAL):
    vars = list(vars)
    if len(vars) < 2:
        raise PostError("alldifferent needs at least two variables")
    if any(v[1] is not VarKind.INT for v in vars):
        raise PostError("alldifferent takes integer variables only")
    model.count_constraint(1, 1)
    model.engine.add(AllDiffValueProp(vars, priority))


def post_ne_const(model, var, c):
    model.count_constraint(1, 1)
    model.engine.add(NeConstProp(var, c))


def post_fix(model, var, c):
    model.count_constraint(1, 1)
    model.engine.add(FixValueProp(var, c))


def post_le(model, x, y, strict=False):
    model.count_constraint(1, 1)
    model.engine.add(LeProp(x, y, strict))


def post_bool_and(model, z, x, y):
    model.count_constraint(1, 1)
    model.engine.add(BoolAndProp(z, x, y))


def post_lex_leq(model, xs, ys, strict=False):
    xs, ys = list(xs), list(ys)
    if not xs or len(xs) != len(ys):
        raise PostError("lex needs two equal-length non-empty vectors")
    model.count_constraint(1, 1)
    model.engine.add(LexLeqProp(xs, ys, strict))
