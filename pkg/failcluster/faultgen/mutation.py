"""
Single-statement mutation operators.

Assignment faults (AF) change an arithmetic statement: a literal moves by one,
the operator is replaced, or a variable operand is replaced by another
variable. Predicate faults (PF) change a conditional: the relation is negated
or replaced, or its else block is dropped.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Union

from failcluster.errors import DomainError
from failcluster.faultgen.language import (ARITHMETIC_OPS, NEGATED, RELATIONAL_OPS, Assign, Branch,
                                           MicroProgram, walk)

logger = logging.getLogger(__name__)


class FaultKind(str, Enum):
    AF = "AF"
    PF = "PF"


class Operator(str, Enum):
    CONSTANT_CHANGE = "operand-constant-change"
    ARITHMETIC_SWAP = "arithmetic-operator-swap"
    VARIABLE_SUBSTITUTION = "variable-substitution"
    RELATIONAL_NEGATION = "relational-operator-negation"
    RELATIONAL_SWAP = "relational-operator-swap"
    ELSE_DELETION = "else-branch-deletion"

    @property
    def kind(self):
        if self in (Operator.CONSTANT_CHANGE, Operator.ARITHMETIC_SWAP,
                    Operator.VARIABLE_SUBSTITUTION):
            return FaultKind.AF
        return FaultKind.PF


@dataclass(frozen=True)
class Mutation:
    """One change to statement `target`.

    position is "left"/"right" for operand edits; replacement is the new
    operand or operator (None for else-branch deletion).
    """
    target: int
    operator: Operator
    position: Optional[str] = None
    replacement: Optional[Union[str, int]] = None

    @property
    def kind(self):
        return self.operator.kind

    def describe(self):
        where = f" {self.position}" if self.position else ""
        new = f" -> {self.replacement}" if self.replacement is not None else ""
        return f"s{self.target} {self.operator.value}{where}{new}"


def _assign_mutations(node, variables):
    for position in ("left", "right"):
        operand = getattr(node, position)
        if operand is None:
            continue
        if isinstance(operand, int):
            for delta in (1, -1):
                yield Mutation(node.sid, Operator.CONSTANT_CHANGE, position, operand + delta)
        else:
            for name in variables:
                if name != operand:
                    yield Mutation(node.sid, Operator.VARIABLE_SUBSTITUTION, position, name)
    if node.op is not None:
        for op in ARITHMETIC_OPS:
            if op != node.op:
                yield Mutation(node.sid, Operator.ARITHMETIC_SWAP, "op", op)


def _branch_mutations(node):
    yield Mutation(node.sid, Operator.RELATIONAL_NEGATION, "op", NEGATED[node.relop])
    for op in RELATIONAL_OPS:
        if op not in (node.relop, NEGATED[node.relop]):
            yield Mutation(node.sid, Operator.RELATIONAL_SWAP, "op", op)
    if node.else_sid is not None and not node.else_deleted:
        yield Mutation(node.sid, Operator.ELSE_DELETION)


def enumerate_mutations(program):
    """Every single mutation of a program, in statement order."""
    variables = program.variables
    mutations = []
    for node in walk(program.body):
        if isinstance(node, Assign):
            mutations.extend(_assign_mutations(node, variables))
        elif isinstance(node, Branch):
            mutations.extend(_branch_mutations(node))
    return mutations


def _mutate_node(node, mutation):
    op = mutation.operator
    if op.kind is FaultKind.AF:
        if not isinstance(node, Assign):
            raise DomainError(f"{mutation.describe()}: AF operators apply to assignments only")
        if op is Operator.ARITHMETIC_SWAP:
            if node.op is None:
                raise DomainError(f"{mutation.describe()}: statement has no operator")
            return replace(node, op=mutation.replacement)
        if getattr(node, mutation.position) is None:
            raise DomainError(f"{mutation.describe()}: statement has no {mutation.position} operand")
        return replace(node, **{mutation.position: mutation.replacement})

    if not isinstance(node, Branch):
        raise DomainError(f"{mutation.describe()}: PF operators apply to conditionals only")
    if op is Operator.ELSE_DELETION:
        if node.else_sid is None:
            raise DomainError(f"{mutation.describe()}: conditional has no else block")
        return replace(node, else_deleted=True)
    return replace(node, relop=mutation.replacement)


def _rebuild(body, by_target):
    out = []
    for node in body:
        if isinstance(node, Branch):
            node = replace(node, then=_rebuild(node.then, by_target),
                           orelse=_rebuild(node.orelse, by_target))
        if node.sid in by_target:
            node = _mutate_node(node, by_target[node.sid])
        out.append(node)
    return tuple(out)


def apply_mutations(program, mutations):
    """Program with every mutation applied; targets must be distinct."""
    by_target = {}
    for mutation in mutations:
        if mutation.target in by_target:
            raise DomainError(f"two mutations target statement s{mutation.target}")
        by_target[mutation.target] = mutation
    known = {node.sid for node in walk(program.body)}
    missing = set(by_target) - known
    if missing:
        raise DomainError(f"no mutable statement with id {sorted(missing)}")
    return MicroProgram(_rebuild(program.body, by_target), program.output)
