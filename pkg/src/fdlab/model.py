"""Model container: variables, posted constraints, branch order, objective.

The model also keeps the declared constraint counts for both sum-constraint
accounting conventions (native sum-equals vs. the decomposed less-equal /
greater-equal pair), independently of which convention is actually posted.
"""

from __future__ import annotations

from .domain import VariableStore
from .propagate import Engine

BOOL_NATIVE = "native"
BOOL_INT = "int"
SUM_NATIVE = "native"
SUM_DECOMPOSED = "decomposed"


class ModelError(ValueError):
    """Invalid model construction or posting."""


class Model:
    def __init__(self, bool_mode=BOOL_NATIVE, sum_mode=SUM_NATIVE):
        if bool_mode not in (BOOL_NATIVE, BOOL_INT):
            raise ModelError(f"unknown bool mode {bool_mode!r}")
        if sum_mode not in (SUM_NATIVE, SUM_DECOMPOSED):
            raise ModelError(f"unknown sum mode {sum_mode!r}")
        self.bool_mode = bool_mode
        self.sum_mode = sum_mode
        self.store = VariableStore()
        self.engine = Engine(self.store)
        self.decision_vars = []
        self.objective = None
        self.count_native = 0
        self.count_decomposed = 0

    def new_int_var(self, lo, hi, decision=False):
        var = self.store.new_int_var(lo, hi)
        if decision:
            self.decision_vars.append(var)
        return var

    def new_bool_var(self, decision=False):
        var = self.store.new_bool_var()
        if decision:
            self.decision_vars.append(var)
        return var

    def new_01_var(self, decision=False):
        """A Boolean-semantics variable in the model's chosen representation."""
        if self.bool_mode == BOOL_NATIVE:
            return self.new_bool_var(decision)
        return self.new_int_var(0, 1, decision)

    def count_constraint(self, native=1, decomposed=1):
        self.count_native += native
        self.count_decomposed += decomposed
