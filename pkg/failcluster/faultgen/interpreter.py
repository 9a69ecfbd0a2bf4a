"""Run micro-language programs and record which statements execute."""

import logging
from dataclasses import dataclass
from typing import FrozenSet, Optional

from failcluster.errors import DomainError
from failcluster.faultgen.language import Assign, Branch, Input

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExecutionResult:
    output: Optional[int]
    trace: FrozenSet[int]
    crashed: bool = False

    def path(self, num_statements):
        """Trace as a 0/1 coverage vector over statement ids 1..num_statements."""
        return [sid in self.trace for sid in range(1, num_statements + 1)]


class _Crash(Exception):
    pass


def _truncdiv(a, b):
    if b == 0:
        raise _Crash()
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


_ARITH = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _truncdiv,
}

_RELATIONAL = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def _value(operand, env):
    return operand if isinstance(operand, int) else env.get(operand, 0)


def _run(body, env, inputs, trace):
    for node in body:
        trace.add(node.sid)
        if isinstance(node, Input):
            env.update(zip(node.names, inputs))
        elif isinstance(node, Assign):
            left = _value(node.left, env)
            env[node.target] = left if node.op is None else \
                _ARITH[node.op](left, _value(node.right, env))
        elif isinstance(node, Branch):
            if _RELATIONAL[node.relop](_value(node.left, env), _value(node.right, env)):
                _run(node.then, env, inputs, trace)
            elif node.else_sid is not None and not node.else_deleted:
                trace.add(node.else_sid)
                _run(node.orelse, env, inputs, trace)


def interpret(program, inputs):
    """Run a program on one input tuple; a division by zero ends the run as a crash."""
    inputs = tuple(int(v) for v in inputs)
    if len(inputs) != len(program.inputs):
        raise DomainError(f"program takes {len(program.inputs)} inputs, got {len(inputs)}")

    env = {}
    trace = set()
    try:
        _run(program.body, env, inputs, trace)
    except _Crash:
        return ExecutionResult(None, frozenset(trace), crashed=True)
    return ExecutionResult(env.get(program.output, 0), frozenset(trace))
