"""Most precise congruence description of a CNF relation.

Start from one model, then repeatedly ask the solver for a model outside the
current affine hull and merge it in.  When no model escapes, the hull is the
smallest congruence system covering every model.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .blast import Relation, VarAllocator
from .domain import NamedBitOrder, encode_negation, from_model, merge
from .modlin import AffineSpace, CongruenceSystem, constraints_of, project
from .sat import DEFAULT_MAX_CONFLICTS, Solver

__all__ = ["InferenceStats", "InferenceResult", "infer", "infer_io", "default_order"]


@dataclass
class InferenceStats:
    iterations: int = 0
    sat_calls: int = 0
    conflicts: int = 0
    decisions: int = 0
    clauses: int = 0
    variables: int = 0
    bound: int = 0
    seconds: float = 0.0
    # log2 of the hull size after each merge; strictly increasing
    growth: list = field(default_factory=list)

    def as_dict(self):
        return {
            "iterations": self.iterations,
            "sat_calls": self.sat_calls,
            "conflicts": self.conflicts,
            "decisions": self.decisions,
            "clauses": self.clauses,
            "variables": self.variables,
            "bound": self.bound,
            "seconds": round(self.seconds, 6),
        }


@dataclass
class InferenceResult:
    system: CongruenceSystem
    space: AffineSpace
    stats: InferenceStats


def default_order(rel: Relation, include_temps=True) -> NamedBitOrder:
    names, vs = rel.order(include_temps)
    return NamedBitOrder.of(names, vs)


def infer(rel: Relation, order: NamedBitOrder | None = None, width: int | None = None, *,
          decision_order="asc", vsids=False, max_conflicts=DEFAULT_MAX_CONFLICTS) -> InferenceResult:
    """Smallest affine space mod 2^width containing every model of ``rel`` on ``order``."""
    if order is None:
        order = default_order(rel)
    if width is None:
        width = rel.width
    n = len(order)
    stats = InferenceStats(bound=n * width + 1)
    t0 = time.perf_counter()
    solver = Solver(rel.formula, order=decision_order, vsids=vsids, max_conflicts=max_conflicts)
    alloc = VarAllocator(rel.formula.num_vars + 1)

    def call():
        stats.sat_calls += 1
        return solver.solve()

    res = call()
    if not res:
        space = AffineSpace.empty(width, order.names)
    else:
        space = from_model(res.model, order, width)
        stats.iterations = 1
        stats.growth.append(space.log2_size())
        while True:
            system = constraints_of(space)
            neg = encode_negation(system, order, alloc)
            solver.ensure_vars(neg.num_vars)
            # outside(S_k+1) implies outside(S_k), so earlier negations may stay
            for clause in neg.clauses:
                solver.add_clause(clause)
            res = call()
            if not res:
                break
            bigger = merge(space, from_model(res.model, order, width))
            if bigger == space or not space.issubset(bigger):
                raise AssertionError("merge failed to strictly enlarge the hull")
            space = bigger
            stats.iterations += 1
            stats.growth.append(space.log2_size())
            if stats.iterations > stats.bound:
                raise AssertionError(
                    f"ascending chain exceeded n*width+1 = {stats.bound} iterations")
    stats.conflicts = solver.stats["conflicts"]
    stats.decisions = solver.stats["decisions"]
    stats.clauses = len(solver.clauses)
    stats.variables = solver.num_vars
    stats.seconds = time.perf_counter() - t0
    return InferenceResult(constraints_of(space), space, stats)


def infer_io(rel: Relation, **kw) -> InferenceResult:
    """Infer over inputs, intermediates and outputs, then project onto inputs and outputs."""
    full = infer(rel, default_order(rel, include_temps=True), rel.width, **kw)
    space = project(full.space, rel.io_names())
    return InferenceResult(constraints_of(space), space, full.stats)
