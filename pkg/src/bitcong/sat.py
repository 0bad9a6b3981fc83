"""A small CDCL SAT solver: two watched literals, first-UIP learning, backjumping.

Decisions follow a fixed variable order (ascending by default) and try FALSE
first, so a given formula always yields the same model.  VSIDS is available
behind ``vsids=True``.  Clauses may be added between calls to :meth:`Solver.solve`;
learned clauses are kept.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .cnf import CnfFormula

__all__ = ["SatBudgetExceeded", "SatResult", "Solver", "solve", "add_blocking_clause"]

DEFAULT_MAX_CONFLICTS = 10**7


class SatBudgetExceeded(RuntimeError):
    """The conflict budget of a single solve call ran out."""


@dataclass(frozen=True)
class SatResult:
    # model[v] in {0, 1} for v in 1..num_vars; model[0] is padding
    model: np.ndarray | None = None

    @property
    def sat(self) -> bool:
        return self.model is not None

    def __bool__(self):
        return self.sat

    def __repr__(self):
        return "Unsat" if self.model is None else f"Sat({''.join(map(str, self.model[1:]))})"


UNSAT = SatResult(None)


class Solver:
    def __init__(self, formula: CnfFormula | None = None, *, order="asc", vsids=False,
                 max_conflicts=DEFAULT_MAX_CONFLICTS):
        if order not in ("asc", "desc"):
            raise ValueError("order must be 'asc' or 'desc'")
        self.order = order
        self.vsids = vsids
        self.max_conflicts = max_conflicts
        self.num_vars = 0
        self.ok = True
        self.clauses = []
        self.watches = [[], []]
        self.val = [0, 0]          # per literal code: 1 true, -1 false, 0 unassigned
        self.level = [0]
        self.reason = [-1]
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.seen = [0]
        self._ptr = 0
        self._activity = [0.0]
        self._bump = 1.0
        self._heap = []
        self.stats = {"solves": 0, "conflicts": 0, "decisions": 0, "propagations": 0, "learned": 0}
        if formula is not None:
            self.add_formula(formula)

    # -- variables and clauses ------------------------------------------------

    def new_var(self) -> int:
        self.num_vars += 1
        self.watches += [[], []]
        self.val += [0, 0]
        self.level.append(0)
        self.reason.append(-1)
        self.seen.append(0)
        self._activity.append(0.0)
        if self.vsids:
            heapq.heappush(self._heap, (0.0, self._rank(self.num_vars), self.num_vars))
        if self.order == "desc":
            self._ptr = self.num_vars
        return self.num_vars

    def ensure_vars(self, n):
        while self.num_vars < n:
            self.new_var()

    def add_formula(self, f: CnfFormula):
        self.ensure_vars(f.num_vars)
        for c in f.clauses:
            self.add_clause(c)

    def add_clause(self, clause):
        """Add a clause of DIMACS literals over already-declared variables."""
        for lit in clause:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} out of range for {self.num_vars} variables")
        if not self.ok:
            return
        self._cancel_until(0)
        lits = []
        for lit in dict.fromkeys(clause):
            code = 2 * lit if lit > 0 else -2 * lit + 1
            if code ^ 1 in lits:
                return  # tautology
            v = self.val[code]
            if v == 1:
                return
            if v == 0:
                lits.append(code)
        if not lits:
            self.ok = False
            return
        if len(lits) == 1:
            self._enqueue(lits[0], -1)
            if self._propagate() >= 0:
                self.ok = False
            return
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches[lits[0]].append(ci)
        self.watches[lits[1]].append(ci)

    # -- search ---------------------------------------------------------------

    def _rank(self, v):
        return v if self.order == "asc" else -v

    def _enqueue(self, code, reason):
        self.val[code] = 1
        self.val[code ^ 1] = -1
        v = code >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(code)

    def _cancel_until(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        val = self.val
        asc = self.order == "asc"
        lo = self._ptr
        for code in self.trail[start:]:
            val[code] = 0
            val[code ^ 1] = 0
            v = code >> 1
            self.reason[v] = -1
            if self.vsids:
                heapq.heappush(self._heap, (-self._activity[v], self._rank(v), v))
            elif asc:
                if v < lo:
                    lo = v
            elif v > lo:
                lo = v
        self._ptr = lo
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, start)

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        val = self.val
        clauses = self.clauses
        watches = self.watches
        trail = self.trail
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        self.stats["propagations"] += props
                        return ci
                    self._enqueue(first, ci)
            del ws[j:]
        self.stats["propagations"] += props
        return -1

    def _analyze(self, confl):
        seen = self.seen
        level = self.level
        trail = self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(trail) - 1
        c = self.clauses[confl]
        bumped = []
        while True:
            for q in (c if p < 0 else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    bumped.append(v)
                    if level[v] == cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            seen[p >> 1] = 0
            counter -= 1
            if counter == 0:
                break
            c = self.clauses[self.reason[p >> 1]]
        learnt[0] = p ^ 1
        for q in learnt[1:]:
            seen[q >> 1] = 0
        if self.vsids:
            self._bump_all(bumped)
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _bump_all(self, vs):
        act = self._activity
        for v in vs:
            act[v] += self._bump
            if act[v] > 1e100:
                self._activity = act = [a * 1e-100 for a in act]
                self._bump *= 1e-100
                self._heap = [(-act[u], self._rank(u), u) for u in range(1, self.num_vars + 1)
                              if self.val[2 * u] == 0]
                heapq.heapify(self._heap)
            if self.val[2 * v] == 0:
                heapq.heappush(self._heap, (-act[v], self._rank(v), v))
        self._bump /= 0.95

    def _pick(self) -> int:
        val = self.val
        if self.vsids:
            heap = self._heap
            while heap:
                _, _, v = heapq.heappop(heap)
                if val[2 * v] == 0:
                    return v
            return 0
        if self.order == "asc":
            v = max(self._ptr, 1)
            n = self.num_vars
            while v <= n and val[2 * v] != 0:
                v += 1
            self._ptr = v
            return v if v <= n else 0
        v = self._ptr
        while v >= 1 and val[2 * v] != 0:
            v -= 1
        self._ptr = v
        return v

    def solve(self) -> SatResult:
        """Decide the current clause set; raises :class:`SatBudgetExceeded` past the budget."""
        self.stats["solves"] += 1
        if not self.ok:
            return UNSAT
        self._cancel_until(0)
        if self._propagate() >= 0:
            self.ok = False
            return UNSAT
        conflicts = 0
        while True:
            confl = self._propagate()
            if confl >= 0:
                conflicts += 1
                self.stats["conflicts"] += 1
                if not self.trail_lim:
                    self.ok = False
                    return UNSAT
                if conflicts > self.max_conflicts:
                    self._cancel_until(0)
                    raise SatBudgetExceeded(f"conflict budget of {self.max_conflicts} exceeded")
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watches[learnt[0]].append(ci)
                    self.watches[learnt[1]].append(ci)
                    self._enqueue(learnt[0], ci)
                self.stats["learned"] += 1
                continue
            v = self._pick()
            if v == 0:
                model = np.zeros(self.num_vars + 1, dtype=np.uint8)
                val = self.val
                for u in range(1, self.num_vars + 1):
                    model[u] = 1 if val[2 * u] == 1 else 0
                return SatResult(model)
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(2 * v + 1, -1)


def solve(formula: CnfFormula, **config) -> SatResult:
    return Solver(formula, **config).solve()


def add_blocking_clause(solver: Solver, clause) -> Solver:
    """Add ``clause`` to a live solver; later solves respect it."""
    solver.add_clause(clause)
    return solver


def block_model(solver: Solver, model, variables) -> Solver:
    """Exclude the restriction of ``model`` to ``variables`` from future answers."""
    clause = [-v if model[v] else v for v in variables]
    return add_blocking_clause(solver, clause)
