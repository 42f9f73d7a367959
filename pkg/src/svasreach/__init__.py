"""Reachability tools for vector addition systems with a stack.

Submodules:

* :mod:`svasreach.svas` -- program model and text format
* :mod:`svasreach.execution` -- step relation, replay, search, policy runs
* :mod:`svasreach.counterprog` -- counter programs and the bounded halting oracle
* :mod:`svasreach.yardstick` -- compiler from counter programs to SVAS
* :mod:`svasreach.logic` -- leaf-data forests, two-variable logic and the trace encoding
"""

from .counterprog import CounterProgram, bounded_halting, parse_cp, serialize_cp
from .execution import (
    ChoiceAnnotationTable,
    Configuration,
    Inconclusive,
    Outcome,
    Predicate,
    Reachable,
    RunTrace,
    SearchLimits,
    Unreachable,
    count_events,
    replay,
    run_policy,
    search_reach,
    step,
)
from .svas import SvasProgram, parse_svas, serialize_svas, validate
from .yardstick import (
    CompiledUnit,
    compile_program,
    emit_dec_harness,
    emit_ztest_harness,
    tetration,
)

__version__ = "0.1.0"
