"""Toy machine IR: word width, register set, straight-line programs and CFGs.

Text format (``#`` starts a comment)::

    .width 4
    .regs r, s
    inc r
    add r, s

Any ``label:`` switches the file into CFG mode, where ``.edge A -> B`` and a
single ``.entry A`` are also accepted.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

__all__ = [
    "ParseError",
    "WordSpec",
    "Instruction",
    "Program",
    "Cfg",
    "OPCODES",
    "parse_program",
    "format_program",
    "concrete_step",
    "run",
]


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class WordSpec:
    width: int

    def __post_init__(self):
        if not 1 <= self.width <= 64:
            raise ValueError(f"width must be in 1..64, got {self.width}")

    @property
    def modulus(self) -> int:
        return 1 << self.width

    @property
    def mask(self) -> int:
        return self.modulus - 1


# opcode -> operand kinds: "r" register, "i" immediate, "k" shift amount
OPCODES = {
    "inc": ("r",),
    "dec": ("r",),
    "not": ("r",),
    "mov": ("r", "r"),
    "add": ("r", "r"),
    "sub": ("r", "r"),
    "xor": ("r", "r"),
    "and": ("r", "r"),
    "or": ("r", "r"),
    "movi": ("r", "i"),
    "addi": ("r", "i"),
    "shl": ("r", "k"),
    "shr": ("r", "k"),
}


@dataclass(frozen=True)
class Instruction:
    opcode: str
    operands: tuple

    @property
    def dest(self) -> str:
        return self.operands[0]

    def __str__(self):
        return f"{self.opcode} " + ", ".join(str(o) for o in self.operands)


@dataclass(frozen=True)
class Program:
    word_spec: WordSpec
    registers: tuple
    body: tuple = ()

    @property
    def width(self) -> int:
        return self.word_spec.width


@dataclass(frozen=True)
class Cfg:
    word_spec: WordSpec
    registers: tuple
    blocks: Mapping[str, tuple]
    edges: tuple
    entry: str
    # declaration order of labels, kept for printing
    labels: tuple = field(default=())

    @property
    def width(self) -> int:
        return self.word_spec.width

    def successors(self, label):
        return [v for u, v in self.edges if u == label]

    def predecessors(self, label):
        return [u for u, v in self.edges if v == label]

    def block_program(self, label) -> Program:
        return Program(self.word_spec, self.registers, tuple(self.blocks[label]))


_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_LABEL = re.compile(r"^([A-Za-z_][A-Za-z0-9_.]*)\s*:\s*(.*)$")


def _parse_int(tok, lineno):
    try:
        return int(tok, 0)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno) from None


def _parse_instruction(text, regs, spec, lineno):
    parts = text.split(None, 1)
    op = parts[0]
    if op not in OPCODES:
        raise ParseError(f"unknown opcode {op!r}", lineno)
    raw = [t.strip() for t in parts[1].split(",")] if len(parts) > 1 else []
    kinds = OPCODES[op]
    if len(raw) != len(kinds) or any(not t for t in raw):
        raise ParseError(f"{op} expects {len(kinds)} operand(s)", lineno)
    operands = []
    for kind, tok in zip(kinds, raw):
        if kind == "r":
            if tok not in regs:
                raise ParseError(f"undeclared register {tok!r}", lineno)
            operands.append(tok)
        elif kind == "i":
            operands.append(_parse_int(tok, lineno) % spec.modulus)
        else:
            k = _parse_int(tok, lineno)
            if not 0 <= k < spec.width:
                raise ParseError("shift amount out of range", lineno)
            operands.append(k)
    return Instruction(op, tuple(operands))


def parse_program(text: str):
    """Parse IR text into a :class:`Program`, or a :class:`Cfg` if labels appear."""
    spec = None
    regs = None
    body = []
    blocks: dict[str, list] = {}
    labels: list[str] = []
    edges = []
    entry = None
    current = None
    cfg_mode = False
    label_lines = {}
    last = max(1, len(text.splitlines()))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if spec is None:
            if not line.startswith(".width"):
                raise ParseError(".width must be the first directive", lineno)
            toks = line.split()
            if len(toks) != 2:
                raise ParseError("expected '.width <n>'", lineno)
            try:
                spec = WordSpec(_parse_int(toks[1], lineno))
            except ValueError as e:
                if isinstance(e, ParseError):
                    raise
                raise ParseError(str(e), lineno) from None
            continue
        if line.startswith(".width"):
            raise ParseError("duplicate .width", lineno)
        if line.startswith(".regs"):
            if regs is not None:
                raise ParseError("duplicate .regs", lineno)
            names = [t.strip() for t in line[len(".regs"):].split(",")]
            if not names or any(not _IDENT.match(n) for n in names):
                raise ParseError("malformed register list", lineno)
            if len(set(names)) != len(names):
                raise ParseError("duplicate register name", lineno)
            regs = tuple(names)
            continue
        if regs is None:
            raise ParseError(".regs must precede instructions", lineno)
        if line.startswith(".edge"):
            m = re.match(r"^\.edge\s+(\S+)\s*->\s*(\S+)$", line)
            if not m:
                raise ParseError("expected '.edge <label> -> <label>'", lineno)
            edges.append((m.group(1), m.group(2), lineno))
            cfg_mode = True
            continue
        if line.startswith(".entry"):
            toks = line.split()
            if len(toks) != 2:
                raise ParseError("expected '.entry <label>'", lineno)
            if entry is not None:
                raise ParseError("duplicate .entry", lineno)
            entry = (toks[1], lineno)
            cfg_mode = True
            continue
        if line.startswith("."):
            raise ParseError(f"unknown directive {line.split()[0]!r}", lineno)
        m = _LABEL.match(line)
        if m:
            label = m.group(1)
            if label in blocks:
                raise ParseError(f"duplicate label {label!r}", lineno)
            if body:
                raise ParseError("instructions before the first label in CFG mode", lineno)
            cfg_mode = True
            blocks[label] = []
            labels.append(label)
            label_lines[label] = lineno
            current = label
            line = m.group(2).strip()
            if not line:
                continue
        instr = _parse_instruction(line, regs, spec, lineno)
        if current is not None:
            blocks[current].append(instr)
        else:
            body.append(instr)

    if spec is None:
        raise ParseError("missing .width", last)
    if regs is None:
        raise ParseError("missing .regs", last)
    if not cfg_mode:
        return Program(spec, regs, tuple(body))

    if not labels:
        raise ParseError("CFG directives without any labelled block", last)
    for u, v, lineno in edges:
        for end in (u, v):
            if end not in blocks:
                raise ParseError(f"edge endpoint {end!r} is not a declared block", lineno)
    if entry is None:
        raise ParseError("CFG mode requires exactly one .entry", last)
    if entry[0] not in blocks:
        raise ParseError(f"entry {entry[0]!r} is not a declared block", entry[1])
    edge_list = tuple((u, v) for u, v, _ in edges)
    seen = {entry[0]}
    work = deque([entry[0]])
    while work:
        u = work.popleft()
        for a, b in edge_list:
            if a == u and b not in seen:
                seen.add(b)
                work.append(b)
    unreachable = [l for l in labels if l not in seen]
    if unreachable:
        raise ParseError(f"unreachable block(s): {', '.join(unreachable)}", label_lines[unreachable[0]])
    return Cfg(
        spec,
        regs,
        {l: tuple(blocks[l]) for l in labels},
        edge_list,
        entry[0],
        tuple(labels),
    )


def format_program(p) -> str:
    lines = [f".width {p.width}", ".regs " + ", ".join(p.registers)]
    if isinstance(p, Program):
        lines += [str(i) for i in p.body]
    else:
        for label in p.labels:
            lines.append(f"{label}:")
            lines += [f"  {i}" for i in p.blocks[label]]
        lines += [f".edge {u} -> {v}" for u, v in p.edges]
        lines.append(f".entry {p.entry}")
    return "\n".join(lines) + "\n"


def concrete_step(instr: Instruction, state: Mapping[str, int], spec: WordSpec) -> dict:
    """Execute one instruction on unsigned residues; returns a new state."""
    mask = spec.mask
    out = dict(state)
    op, args = instr.opcode, instr.operands
    d = args[0]
    x = state[d]
    if op == "inc":
        out[d] = (x + 1) & mask
    elif op == "dec":
        out[d] = (x - 1) & mask
    elif op == "not":
        out[d] = ~x & mask
    elif op == "mov":
        out[d] = state[args[1]]
    elif op == "movi":
        out[d] = args[1] & mask
    elif op == "add":
        out[d] = (x + state[args[1]]) & mask
    elif op == "addi":
        out[d] = (x + args[1]) & mask
    elif op == "sub":
        out[d] = (x - state[args[1]]) & mask
    elif op == "xor":
        out[d] = x ^ state[args[1]]
    elif op == "and":
        out[d] = x & state[args[1]]
    elif op == "or":
        out[d] = x | state[args[1]]
    elif op == "shl":
        out[d] = (x << args[1]) & mask
    elif op == "shr":
        out[d] = x >> args[1]
    else:
        raise ValueError(f"unknown opcode {op!r}")
    return out


def run(body, state, spec):
    for instr in body:
        state = concrete_step(instr, state, spec)
    return state
