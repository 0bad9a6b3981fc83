"""Bit-blasting of toy instructions into CNF relations, and their composition.

A :class:`Relation` links an input bit-vector per register to an output
bit-vector per register.  Every gate is Tseitin-encoded with a fresh auxiliary,
so each auxiliary is a function of the input bits and the projection of the
CNF's models onto the named bits is exactly the instruction's graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

from .cnf import CnfFormula, to_dimacs
from .machine import Instruction, Program

__all__ = [
    "VarAllocator",
    "Circuit",
    "BitVarMap",
    "Relation",
    "bit_name",
    "blast_instruction",
    "blast_program",
    "identity_relation",
    "compose",
    "relation_dimacs",
]


def bit_name(reg, bit, version=None):
    return f"{reg}[{bit}]" if version is None else f"{reg}[{bit}]@{version}"


class VarAllocator:
    """Dense, never-reused propositional variable indices starting at ``start``."""

    def __init__(self, start=1):
        self.next = start

    def fresh(self) -> int:
        v = self.next
        self.next += 1
        return v

    def fresh_vector(self, n):
        return tuple(self.fresh() for _ in range(n))

    @property
    def num_vars(self):
        return self.next - 1


class Circuit:
    """Clause sink with constant-folding Tseitin gates.

    A signal is a DIMACS literal (nonzero int) or a Python bool constant.
    """

    def __init__(self, allocator: VarAllocator):
        self.alloc = allocator
        self.clauses = []

    @staticmethod
    def neg(a):
        return (not a) if isinstance(a, bool) else -a

    def and_(self, a, b):
        if a is False or b is False:
            return False
        if a is True:
            return b
        if b is True or a == b:
            return a
        if a == -b:
            return False
        g = self.alloc.fresh()
        self.clauses += [[-g, a], [-g, b], [g, -a, -b]]
        return g

    def or_(self, a, b):
        return self.neg(self.and_(self.neg(a), self.neg(b)))

    def xor(self, a, b):
        if isinstance(a, bool):
            return self.neg(b) if a else b
        if isinstance(b, bool):
            return self.neg(a) if b else a
        if a == b:
            return False
        if a == -b:
            return True
        g = self.alloc.fresh()
        self.clauses += [[-g, a, b], [-g, -a, -b], [g, -a, b], [g, a, -b]]
        return g

    def maj(self, a, b, c):
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            if isinstance(z, bool):
                return self.or_(x, y) if z else self.and_(x, y)
        if a == b or a == c:
            return a
        if b == c:
            return b
        if a == -b:
            return c
        if a == -c:
            return b
        if b == -c:
            return a
        g = self.alloc.fresh()
        self.clauses += [
            [-g, a, b], [-g, a, c], [-g, b, c],
            [g, -a, -b], [g, -a, -c], [g, -b, -c],
        ]
        return g

    def any_of(self, signals):
        """Tseitin OR over many signals."""
        lits = []
        for s in signals:
            if s is True:
                return True
            if s is not False:
                lits.append(s)
        if not lits:
            return False
        if len(lits) == 1:
            return lits[0]
        g = self.alloc.fresh()
        self.clauses.append([-g] + lits)
        self.clauses += [[g, -l] for l in lits]
        return g

    def equate(self, var, signal):
        """Constrain ``var`` to equal ``signal``."""
        if signal is True:
            self.clauses.append([var])
        elif signal is False:
            self.clauses.append([-var])
        elif signal != var:
            self.clauses += [[-var, signal], [var, -signal]]

    def add(self, a_bits, b_bits, carry=False):
        """Ripple-carry sum, truncated to ``len(a_bits)`` bits."""
        out = []
        last = len(a_bits) - 1
        for i, (a, b) in enumerate(zip(a_bits, b_bits)):
            out.append(self.xor(self.xor(a, b), carry))
            if i < last:
                carry = self.maj(a, b, carry)
        return out


def const_bits(value, width):
    return [bool((value >> i) & 1) for i in range(width)]


@dataclass(frozen=True)
class BitVarMap:
    version: str
    bits: dict  # register -> tuple of PropVars, LSB first

    def names(self, registers):
        return [bit_name(r, i, self.version) for r in registers for i in range(len(self.bits[r]))]

    def vars(self, registers):
        return [v for r in registers for v in self.bits[r]]

    def renamed(self, mapping, version=None):
        return BitVarMap(version or self.version, {r: tuple(mapping[v] for v in vs) for r, vs in self.bits.items()})


@dataclass(frozen=True)
class Relation:
    """CNF relation between input and output register bits.

    ``temps`` are named intermediate versions (the outputs of inner
    instructions); their variables are also members of ``aux_vars``.
    """

    formula: CnfFormula
    registers: tuple
    width: int
    input_map: BitVarMap
    output_map: BitVarMap
    aux_vars: frozenset
    temps: tuple = field(default=())

    def named_maps(self):
        return (self.input_map,) + tuple(self.temps) + (self.output_map,)

    def order(self, include_temps=True):
        """``(names, vars)`` of the named bits: inputs, temps, outputs."""
        maps = self.named_maps() if include_temps else (self.input_map, self.output_map)
        names, vs = [], []
        for m in maps:
            names += m.names(self.registers)
            vs += m.vars(self.registers)
        return names, vs

    def io_names(self):
        return self.input_map.names(self.registers) + self.output_map.names(self.registers)


def _input_map(registers, width, alloc):
    return BitVarMap("in", {r: alloc.fresh_vector(width) for r in registers})


def _output_signals(instr: Instruction, ins, width, circ: Circuit):
    op, args = instr.opcode, instr.operands
    x = ins[args[0]]
    if op == "inc":
        return circ.add(x, const_bits(1, width))
    if op == "dec":
        return circ.add(x, const_bits((1 << width) - 1, width))
    if op == "addi":
        return circ.add(x, const_bits(args[1], width))
    if op == "movi":
        return const_bits(args[1], width)
    if op == "not":
        return [circ.neg(a) for a in x]
    if op == "shl":
        k = args[1]
        return [False] * k + list(x[: width - k])
    if op == "shr":
        k = args[1]
        return list(x[k:]) + [False] * k
    y = ins[args[1]]
    if op == "mov":
        return list(y)
    if op == "add":
        return circ.add(x, y)
    if op == "sub":
        return circ.add(x, [circ.neg(b) for b in y], carry=True)
    if op == "xor":
        return [circ.xor(a, b) for a, b in zip(x, y)]
    if op == "and":
        return [circ.and_(a, b) for a, b in zip(x, y)]
    if op == "or":
        return [circ.or_(a, b) for a, b in zip(x, y)]
    raise ValueError(f"unknown opcode {op!r}")


def blast_instruction(instr: Instruction, in_map: BitVarMap, allocator: VarAllocator,
                      registers, width) -> Relation:
    registers = tuple(registers)
    out_map = BitVarMap("out", {r: allocator.fresh_vector(width) for r in registers})
    circ = Circuit(allocator)
    signals = _output_signals(instr, in_map.bits, width, circ)
    for r in registers:
        src = signals if r == instr.dest else in_map.bits[r]
        for var, sig in zip(out_map.bits[r], src):
            circ.equate(var, sig)
    named = set(in_map.vars(registers)) | set(out_map.vars(registers))
    aux = frozenset(range(1, allocator.num_vars + 1)) - named
    return Relation(
        CnfFormula(allocator.num_vars, circ.clauses),
        registers, width, in_map, out_map, aux,
    )


def identity_relation(registers, width) -> Relation:
    registers = tuple(registers)
    alloc = VarAllocator()
    in_map = _input_map(registers, width, alloc)
    out_map = BitVarMap("out", {r: alloc.fresh_vector(width) for r in registers})
    circ = Circuit(alloc)
    for r in registers:
        for a, b in zip(in_map.bits[r], out_map.bits[r]):
            circ.equate(b, a)
    return Relation(CnfFormula(alloc.num_vars, circ.clauses), registers, width, in_map, out_map, frozenset())


def compose(r1: Relation, r2: Relation) -> Relation:
    """Relational product: identify ``r2``'s inputs with ``r1``'s outputs.

    ``r2``'s variables are renamed by index substitution; ``r1``'s outputs
    become a temp version and move into the auxiliary set.
    """
    if r1.registers != r2.registers or r1.width != r2.width:
        raise ValueError("cannot compose relations over different registers or widths")
    regs = r1.registers
    mapping = {}
    for r in regs:
        for a, b in zip(r2.input_map.bits[r], r1.output_map.bits[r]):
            mapping[a] = b
    nxt = r1.formula.num_vars + 1
    for v in range(1, r2.formula.num_vars + 1):
        if v not in mapping:
            mapping[v] = nxt
            nxt += 1
    clauses = [[mapping[abs(l)] * (1 if l > 0 else -1) for l in c] for c in r2.formula.clauses]
    k = len(r1.temps) + 1
    mid = BitVarMap(f"t{k}", r1.output_map.bits)
    temps2 = tuple(m.renamed(mapping, f"t{k + i + 1}") for i, m in enumerate(r2.temps))
    aux = (
        r1.aux_vars
        | frozenset(mid.vars(regs))
        | frozenset(mapping[v] for v in r2.aux_vars)
    )
    return Relation(
        CnfFormula(nxt - 1, r1.formula.clauses + clauses),
        regs,
        r1.width,
        r1.input_map,
        r2.output_map.renamed(mapping),
        aux,
        r1.temps + (mid,) + temps2,
    )


def blast_program(p: Program) -> Relation:
    regs, width = p.registers, p.width
    if not p.body:
        return identity_relation(regs, width)

    def one(instr):
        alloc = VarAllocator()
        return blast_instruction(instr, _input_map(regs, width, alloc), alloc, regs, width)

    return reduce(compose, (one(i) for i in p.body))


def relation_dimacs(rel: Relation) -> str:
    """DIMACS text with a ``c var <idx> = <reg>[<bit>]@<version>`` line per named bit."""
    header = []
    for m in rel.named_maps():
        for r in rel.registers:
            for i, v in enumerate(m.bits[r]):
                header.append((v, f"var {v} = {bit_name(r, i, m.version)}"))
    header.sort()
    return to_dimacs(rel.formula, [h for _, h in header])
