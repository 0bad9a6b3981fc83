"""CNF formulas and DIMACS reading/writing."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CnfFormula:
    """Clauses over variables ``1..num_vars`` as lists of nonzero DIMACS literals.

    No clauses means TRUE; any empty clause makes the formula FALSE.
    """

    num_vars: int = 0
    clauses: list = field(default_factory=list)

    def __post_init__(self):
        self.clauses = [list(c) for c in self.clauses]
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range for {self.num_vars} variables")

    @classmethod
    def false(cls, num_vars=0):
        return cls(num_vars, [[]])

    @property
    def is_trivially_false(self):
        return any(not c for c in self.clauses)

    def conjoin(self, other: "CnfFormula") -> "CnfFormula":
        return CnfFormula(max(self.num_vars, other.num_vars), self.clauses + other.clauses)

    def evaluate(self, assignment) -> bool:
        """``assignment[v]`` is the truth value of variable ``v`` (index 0 unused)."""
        return all(any((assignment[abs(l)] != 0) == (l > 0) for l in c) for c in self.clauses)


class DimacsError(ValueError):
    pass


def parse_dimacs(text: str):
    """Parse DIMACS CNF.  Returns ``(formula, comments)``."""
    num_vars = num_clauses = None
    clauses, comments, current = [], [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            toks = line.split()
            if len(toks) != 4 or toks[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad problem line")
            num_vars, num_clauses = int(toks[2]), int(toks[3])
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause before problem line")
        try:
            lits = [int(t) for t in line.split()]
        except ValueError:
            raise DimacsError(f"line {lineno}: non-integer literal") from None
        for lit in lits:
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                if abs(lit) > num_vars:
                    raise DimacsError(f"line {lineno}: variable {abs(lit)} exceeds declared {num_vars}")
                current.append(lit)
    if num_vars is None:
        raise DimacsError("missing problem line")
    if current:
        clauses.append(current)
    if num_clauses is not None and len(clauses) != num_clauses:
        raise DimacsError(f"expected {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula(num_vars, clauses), comments


def to_dimacs(f: CnfFormula, comments=()) -> str:
    out = [f"c {c}" for c in comments]
    out.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    out += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(out) + "\n"
