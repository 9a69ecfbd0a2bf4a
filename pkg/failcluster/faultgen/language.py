"""
A tiny branching language over integer variables.

    IN a b c
    SET z = a * b
    IF a < b
      ...
    ELSE
      ...
    END
    OUT z

IN, SET, IF and ELSE lines receive statement ids 1, 2, ... in text order; END
and OUT are structural. A deleted else block is written as `ELSE DELETED` so
ids stay stable when a mutated program is written back out.
"""

import logging
import re
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from failcluster.errors import ProgramSyntaxError
from failcluster.spectrum import text_lines

logger = logging.getLogger(__name__)

Operand = Union[str, int]

ARITHMETIC_OPS = ("+", "-", "*", "/")
RELATIONAL_OPS = ("<", "<=", ">", ">=", "==", "!=")
NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_OPERAND = rf"(?:{_NAME}|-?\d+)"
_IN = re.compile(rf"^IN((?:\s+{_NAME})+)$")
_SET = re.compile(rf"^SET\s+({_NAME})\s*=\s*({_OPERAND})(?:\s*([-+*/])\s*({_OPERAND}))?$")
_IF = re.compile(rf"^IF\s+({_OPERAND})\s*(<=|>=|==|!=|<|>)\s*({_OPERAND})$")
_OUT = re.compile(rf"^OUT\s+({_NAME})$")


def _operand(token):
    return int(token) if re.fullmatch(r"-?\d+", token) else token


def _show(operand):
    return str(operand)


@dataclass(frozen=True)
class Input:
    sid: int
    names: Tuple[str, ...]


@dataclass(frozen=True)
class Assign:
    sid: int
    target: str
    left: Operand
    op: Optional[str] = None
    right: Optional[Operand] = None

    @property
    def operands(self):
        return (self.left,) if self.op is None else (self.left, self.right)


@dataclass(frozen=True)
class Branch:
    sid: int
    left: Operand
    relop: str
    right: Operand
    then: Tuple["Statement", ...]
    else_sid: Optional[int] = None
    orelse: Tuple["Statement", ...] = ()
    else_deleted: bool = False


Statement = Union[Input, Assign, Branch]


@dataclass(frozen=True)
class MicroProgram:
    body: Tuple[Statement, ...]
    output: str

    @property
    def inputs(self):
        return self.body[0].names

    @property
    def num_statements(self):
        return sum(1 for _ in iter_ids(self.body))

    def statement(self, sid):
        for node in walk(self.body):
            if node.sid == sid:
                return node
        raise KeyError(sid)

    @property
    def variables(self):
        names = list(self.inputs)
        for node in walk(self.body):
            if isinstance(node, Assign) and node.target not in names:
                names.append(node.target)
        return tuple(names)


def walk(body):
    """Every Input/Assign/Branch node in text order."""
    for node in body:
        yield node
        if isinstance(node, Branch):
            yield from walk(node.then)
            yield from walk(node.orelse)


def iter_ids(body):
    for node in body:
        yield node.sid
        if isinstance(node, Branch):
            yield from iter_ids(node.then)
            if node.else_sid is not None:
                yield node.else_sid
            yield from iter_ids(node.orelse)


class _Frame:
    def __init__(self, line_no, header):
        self.line_no = line_no
        self.header = header
        self.then = []
        self.orelse = []
        self.else_sid = None
        self.else_deleted = False
        self.in_else = False

    @property
    def current(self):
        return self.orelse if self.in_else else self.then


def parse_program(text):
    lines = text_lines(text, lambda line_no: ProgramSyntaxError(line_no, "invalid UTF-8"))

    top = []
    stack = []
    next_sid = 1
    output = None
    seen_input = False

    def block():
        return stack[-1].current if stack else top

    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if output is not None:
            raise ProgramSyntaxError(line_no, "statement after OUT")

        keyword = line.split()[0]
        if keyword == "IN":
            match = _IN.match(line)
            if not match:
                raise ProgramSyntaxError(line_no, f"malformed IN {line!r}")
            if seen_input or stack or top:
                raise ProgramSyntaxError(line_no, "IN must be the first statement")
            top.append(Input(next_sid, tuple(match.group(1).split())))
            next_sid += 1
            seen_input = True
        elif not seen_input:
            raise ProgramSyntaxError(line_no, "program must start with IN")
        elif keyword == "SET":
            match = _SET.match(line)
            if not match:
                raise ProgramSyntaxError(line_no, f"malformed SET {line!r}")
            target, left, op, right = match.groups()
            block().append(Assign(next_sid, target, _operand(left), op,
                                  _operand(right) if right is not None else None))
            next_sid += 1
        elif keyword == "IF":
            match = _IF.match(line)
            if not match:
                raise ProgramSyntaxError(line_no, f"malformed IF {line!r}")
            stack.append(_Frame(line_no, (next_sid, _operand(match.group(1)), match.group(2),
                                          _operand(match.group(3)))))
            next_sid += 1
        elif keyword == "ELSE":
            if not stack or stack[-1].in_else:
                raise ProgramSyntaxError(line_no, "ELSE without open IF")
            if line not in ("ELSE", "ELSE DELETED"):
                raise ProgramSyntaxError(line_no, f"malformed ELSE {line!r}")
            frame = stack[-1]
            frame.in_else = True
            frame.else_sid = next_sid
            frame.else_deleted = line == "ELSE DELETED"
            next_sid += 1
        elif keyword == "END":
            if line != "END":
                raise ProgramSyntaxError(line_no, f"malformed END {line!r}")
            if not stack:
                raise ProgramSyntaxError(line_no, "END without open IF")
            frame = stack.pop()
            sid, left, relop, right = frame.header
            block().append(Branch(sid, left, relop, right, tuple(frame.then), frame.else_sid,
                                  tuple(frame.orelse), frame.else_deleted))
        elif keyword == "OUT":
            match = _OUT.match(line)
            if not match:
                raise ProgramSyntaxError(line_no, f"malformed OUT {line!r}")
            if stack:
                raise ProgramSyntaxError(line_no, "OUT inside an open IF")
            output = match.group(1)
        else:
            raise ProgramSyntaxError(line_no, f"unknown statement {keyword!r}")

    if stack:
        raise ProgramSyntaxError(stack[-1].line_no, "IF without END")
    if not seen_input:
        raise ProgramSyntaxError(1, "empty program")
    if output is None:
        raise ProgramSyntaxError(line_no, "missing OUT")
    return MicroProgram(tuple(top), output)


def _format_block(body, depth, lines):
    pad = "  " * depth
    for node in body:
        if isinstance(node, Input):
            lines.append(pad + "IN " + " ".join(node.names))
        elif isinstance(node, Assign):
            expr = _show(node.left) if node.op is None else \
                f"{_show(node.left)} {node.op} {_show(node.right)}"
            lines.append(f"{pad}SET {node.target} = {expr}")
        else:
            lines.append(f"{pad}IF {_show(node.left)} {node.relop} {_show(node.right)}")
            _format_block(node.then, depth + 1, lines)
            if node.else_sid is not None:
                lines.append(pad + ("ELSE DELETED" if node.else_deleted else "ELSE"))
                _format_block(node.orelse, depth + 1, lines)
            lines.append(pad + "END")


def format_program(program):
    lines = []
    _format_block(program.body, 0, lines)
    lines.append(f"OUT {program.output}")
    return "\n".join(lines) + "\n"
