"""Congruence abstraction of Boolean relations.

A Boolean function is described by a congruence system through the system's
0-1 solutions only: a model is "described" when its 0-1 vector satisfies every
row.  Points come from SAT models, merge is the affine hull, and
:func:`encode_negation` builds CNF for "some row is violated" so the SAT
solver can look for a model the current system misses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blast import Circuit, VarAllocator
from .cnf import CnfFormula
from .kernels import mask_for
from .modlin import (
    AffineSpace,
    CongruenceSystem,
    embed,
    intersect,
    project,
    space_of,
    constraints_of,
)

__all__ = [
    "NamedBitOrder",
    "from_model",
    "merge",
    "describes",
    "encode_negation",
    "compose_abstract",
]


@dataclass(frozen=True)
class NamedBitOrder:
    names: tuple
    vars: tuple

    def __post_init__(self):
        if len(self.names) != len(self.vars):
            raise ValueError("names and vars differ in length")

    @classmethod
    def of(cls, names, vars):
        return cls(tuple(names), tuple(vars))

    def __len__(self):
        return len(self.names)

    def vector(self, model) -> np.ndarray:
        """0-1 vector of ``model`` restricted to this order."""
        idx = np.asarray(self.vars, dtype=np.int64)
        if idx.size and idx.max() >= len(model):
            missing = [v for v in self.vars if v >= len(model)]
            raise ValueError(f"model does not assign named bit variable(s) {missing[:5]}")
        return np.asarray(model, dtype=np.uint64)[idx]


def from_model(m, order: NamedBitOrder, width: int) -> AffineSpace:
    return AffineSpace.from_point(width, order.names, order.vector(m))


def merge(a: AffineSpace, b: AffineSpace) -> AffineSpace:
    """Affine hull of ``a`` and ``b``: the least space containing both."""
    if a.width != b.width or a.var_names != b.var_names:
        raise ValueError("width or variable order mismatch")
    if a.is_empty:
        return b
    if b.is_empty:
        return a
    diff = (b.point - a.point) & mask_for(a.width)
    return AffineSpace(a.width, a.var_names, a.point, np.vstack([a.gens, b.gens, diff[None, :]]))


def describes(c: CongruenceSystem, m, order: NamedBitOrder) -> bool:
    if tuple(order.names) != c.var_names:
        raise ValueError("order does not match the system's variables")
    return bool(c.holds(order.vector(m))[0])


def _row_sides(coeffs, rhs, width):
    """Split a row into ``left == right`` with positive weights, minimising set bits."""
    mod = 1 << width
    left, right = [], []
    for j, a in enumerate(coeffs):
        a = int(a)
        if not a:
            continue
        if bin(a).count("1") <= bin(mod - a).count("1"):
            left.append((j, a))
        else:
            right.append((j, mod - a))
    return left, right, int(rhs) % mod


def _sum_bits(circ: Circuit, terms, const, width):
    """Width-bit sum of weighted bits plus a constant, via a column-compressor adder tree."""
    cols = [[] for _ in range(width)]
    for lit, weight in terms:
        for k in range(width):
            if (weight >> k) & 1:
                cols[k].append(lit)
    for k in range(width):
        if (const >> k) & 1:
            cols[k].append(True)
    out = []
    for k in range(width):
        col = cols[k]
        while len(col) > 1:
            if len(col) >= 3:
                a, b, c = col.pop(0), col.pop(0), col.pop(0)
                col.append(circ.xor(circ.xor(a, b), c))
                if k + 1 < width:
                    cols[k + 1].append(circ.maj(a, b, c))
            else:
                a, b = col.pop(0), col.pop(0)
                col.append(circ.xor(a, b))
                if k + 1 < width:
                    cols[k + 1].append(circ.and_(a, b))
        out.append(col[0] if col else False)
    return out


def encode_negation(c: CongruenceSystem, order: NamedBitOrder, allocator: VarAllocator) -> CnfFormula:
    """CNF whose models, projected onto ``order``, are the 0-1 vectors violating some row.

    Each row becomes ``left(x) == right(x) + rhs`` with both sides summed by an
    adder tree; the bitwise differences feed one violation indicator per row,
    and a single clause asks for at least one violated row.  A system with no
    rows has no violators, giving the FALSE formula.
    """
    if tuple(order.names) != c.var_names:
        raise ValueError("order does not match the system's variables")
    if c.is_empty_marker() or not c.is_consistent():
        raise ValueError("negation of an inconsistent system is not encoded; every vector violates it")
    if len(c) == 0:
        return CnfFormula.false(allocator.num_vars)
    circ = Circuit(allocator)
    w = c.width
    indicators = []
    for coeffs, rhs in zip(c.coeffs, c.rhs):
        left, right, b = _row_sides(coeffs, rhs, w)
        lbits = _sum_bits(circ, [(order.vars[j], a) for j, a in left], 0, w)
        rbits = _sum_bits(circ, [(order.vars[j], a) for j, a in right], b, w)
        indicators.append(circ.any_of(circ.xor(p, q) for p, q in zip(lbits, rbits)))
    lits = []
    for s in indicators:
        if s is True:
            return CnfFormula(allocator.num_vars, circ.clauses)
        if s is not False:
            lits.append(s)
    circ.clauses.append(lits)
    return CnfFormula(allocator.num_vars, circ.clauses)


def compose_abstract(a: AffineSpace, b: AffineSpace) -> AffineSpace:
    """Relational composition of two affine relations sharing coordinates by name.

    The shared names form the middle vector; the result ranges over ``a``'s
    remaining coordinates followed by ``b``'s.
    """
    if a.width != b.width:
        raise ValueError("width mismatch")
    shared = [v for v in a.var_names if v in set(b.var_names)]
    if not shared:
        raise ValueError("relations share no coordinates to compose over")
    outer = [v for v in a.var_names if v not in shared] + [v for v in b.var_names if v not in shared]
    if a.is_empty or b.is_empty:
        return AffineSpace.empty(a.width, outer)
    full = list(a.var_names) + [v for v in b.var_names if v not in set(a.var_names)]
    both = intersect(embed(constraints_of(a), full), embed(constraints_of(b), full))
    return project(space_of(both), outer)
