"""Exact linear algebra over Z/2^w with canonical (Howell) forms.

Two dual representations of an affine subset of (Z/2^w)^n live here:

* :class:`CongruenceSystem` -- rows ``sum_j a_j x_j = b (mod 2^w)``;
* :class:`AffineSpace` -- a point plus a module of generators.

Both are kept canonical, so equality of denoted sets is plain equality of
objects.  Merging and projection are done on generators, negation and printing
on constraints.
"""

from __future__ import annotations

import json
import re
from typing import Iterable, Sequence

import numpy as np

from .kernels import as_matrix, howell, mask_for, reduce, rows_hold, to_u64

__all__ = [
    "CongruenceSystem",
    "AffineSpace",
    "howell_form",
    "nullspace",
    "constraints_of",
    "space_of",
    "project",
    "intersect",
    "embed",
    "in_span",
]


def howell_form(rows, width: int, ncols: int | None = None) -> np.ndarray:
    if ncols is None:
        ncols = np.asarray(rows).shape[-1]
    return howell(as_matrix(rows, ncols), width)


def in_span(h: np.ndarray, x, width: int) -> bool:
    """Whether ``x`` is in the row span of the Howell matrix ``h``."""
    return not reduce(h, x, width).any()


def _check_compatible(a, b):
    if a.width != b.width or a.var_names != b.var_names:
        raise ValueError("width or variable order mismatch")


class CongruenceSystem:
    """Conjunction of congruences over named variables, modulo ``2**width``.

    Rows are kept as given; :meth:`canonical` returns the Howell-normalised
    equivalent (a single ``0 = 1`` row when there are no solutions).
    """

    __slots__ = ("width", "var_names", "coeffs", "rhs")

    def __init__(self, width: int, var_names: Sequence[str], coeffs=(), rhs=()):
        mask = mask_for(width)
        self.width = width
        self.var_names = tuple(var_names)
        n = len(self.var_names)
        self.coeffs = as_matrix(coeffs, n) & mask
        self.rhs = to_u64(rhs).reshape(-1) & mask
        if self.rhs.shape[0] != self.coeffs.shape[0]:
            raise ValueError("coefficient rows and right-hand sides differ in count")

    @classmethod
    def empty(cls, width, var_names):
        n = len(var_names)
        return cls(width, var_names, np.zeros((1, n), dtype=np.uint64), [1])

    @classmethod
    def top(cls, width, var_names):
        return cls(width, var_names)

    @property
    def modulus(self) -> int:
        return 1 << self.width

    def __len__(self):
        return self.coeffs.shape[0]

    def rows(self):
        for a, b in zip(self.coeffs, self.rhs):
            yield [int(x) for x in a], int(b)

    def augmented(self) -> np.ndarray:
        return np.hstack([self.coeffs, self.rhs.reshape(-1, 1)])

    def is_empty_marker(self) -> bool:
        return any(not a.any() and b for a, b in zip(self.coeffs, self.rhs))

    def is_consistent(self) -> bool:
        return not space_of(self).is_empty

    def canonical(self) -> "CongruenceSystem":
        if space_of(self).is_empty:
            return CongruenceSystem.empty(self.width, self.var_names)
        h = howell(self.augmented(), self.width)
        return CongruenceSystem(self.width, self.var_names, h[:, :-1], h[:, -1])

    def holds(self, points) -> np.ndarray:
        """Row-wise evaluation of the raw congruences on integer points."""
        return rows_hold(self.coeffs, self.rhs, to_u64(points), self.width)

    def implies(self, coeffs, rhs) -> bool:
        """Whether the congruence ``coeffs . x = rhs`` is a consequence of this system.

        Decided on the canonical form: for a consistent system the implied
        congruences are exactly the row span of the augmented Howell matrix.
        """
        canon = self.canonical()
        if canon.is_empty_marker():
            return True
        row = np.append(to_u64(coeffs), np.uint64(int(rhs) % self.modulus))
        return in_span(canon.augmented(), row, self.width)

    def __eq__(self, other):
        if not isinstance(other, CongruenceSystem):
            return NotImplemented
        return (
            self.width == other.width
            and self.var_names == other.var_names
            and np.array_equal(self.coeffs, other.coeffs)
            and np.array_equal(self.rhs, other.rhs)
        )

    def __hash__(self):
        return hash((self.width, self.var_names, self.coeffs.tobytes(), self.rhs.tobytes()))

    def __repr__(self):
        return f"CongruenceSystem(width={self.width}, rows={len(self)}, vars={len(self.var_names)})"

    # -- printing -----------------------------------------------------------

    def format_row(self, i: int, with_modulus: bool = True) -> str:
        terms = [f"{int(a)}*{v}" for a, v in zip(self.coeffs[i], self.var_names) if a]
        lhs = " + ".join(terms) if terms else "0"
        s = f"{lhs} ≡ {int(self.rhs[i])}"
        return f"{s} (mod 2^{self.width})" if with_modulus else s

    def format(self, with_modulus: bool = True) -> str:
        return "\n".join(self.format_row(i, with_modulus) for i in range(len(self)))

    def __str__(self):
        return self.format()

    def to_json_obj(self) -> dict:
        return {
            "width": self.width,
            "vars": list(self.var_names),
            "rows": [{"coeffs": a, "rhs": b} for a, b in self.rows()],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_obj(), **kw)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CongruenceSystem":
        rows = obj["rows"]
        return cls(
            obj["width"],
            obj["vars"],
            [r["coeffs"] for r in rows],
            [r["rhs"] for r in rows],
        )

    @classmethod
    def parse(cls, text: str, width: int, var_names: Sequence[str]) -> "CongruenceSystem":
        """Parse the printer's text format back into a system."""
        index = {v: i for i, v in enumerate(var_names)}
        coeffs, rhs = [], []
        term_re = re.compile(r"^(\d+)\*(\S+)$")
        for line in text.splitlines():
            line = line.split("(mod")[0].strip()
            if not line:
                continue
            lhs, _, b = line.partition("≡")
            row = [0] * len(var_names)
            lhs = lhs.strip()
            if lhs != "0":
                for term in lhs.split(" + "):
                    m = term_re.match(term.strip())
                    if not m:
                        raise ValueError(f"bad term {term!r}")
                    row[index[m.group(2)]] = int(m.group(1))
            coeffs.append(row)
            rhs.append(int(b))
        return cls(width, var_names, coeffs, rhs)


class AffineSpace:
    """``{point + sum lambda_i g_i}`` over (Z/2^width)^n, or the empty set.

    Instances built through the constructor are canonical: generators in
    Howell form and the point reduced against them.
    """

    __slots__ = ("width", "var_names", "point", "gens")

    def __init__(self, width: int, var_names: Sequence[str], point=None, gens=()):
        self.width = width
        self.var_names = tuple(var_names)
        n = len(self.var_names)
        mask = mask_for(width)
        if point is None:
            self.point = None
            self.gens = np.zeros((0, n), dtype=np.uint64)
            return
        g = howell(as_matrix(gens, n), width) if n else np.zeros((0, 0), dtype=np.uint64)
        p = to_u64(point).reshape(n) & mask
        self.gens = g
        self.point = reduce(g, p, width) if n else p

    @classmethod
    def empty(cls, width, var_names):
        return cls(width, var_names)

    @classmethod
    def full(cls, width, var_names):
        n = len(var_names)
        return cls(width, var_names, np.zeros(n, dtype=np.uint64), np.eye(n, dtype=np.uint64))

    @classmethod
    def from_point(cls, width, var_names, point):
        return cls(width, var_names, point)

    @property
    def is_empty(self) -> bool:
        return self.point is None

    def contains_point(self, x) -> bool:
        if self.is_empty:
            return False
        d = (to_u64(x) - self.point) & mask_for(self.width)
        return in_span(self.gens, d, self.width)

    def issubset(self, other: "AffineSpace") -> bool:
        _check_compatible(self, other)
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        if not other.contains_point(self.point):
            return False
        return all(in_span(other.gens, g, self.width) for g in self.gens)

    def log2_size(self) -> int:
        """log2 of the number of points (the empty set reports -1)."""
        if self.is_empty:
            return -1
        total = 0
        for row in self.gens:
            j = int(np.flatnonzero(row)[0])
            v = (int(row[j]) & -int(row[j])).bit_length() - 1
            total += self.width - v
        return total

    def __eq__(self, other):
        if not isinstance(other, AffineSpace):
            return NotImplemented
        if self.width != other.width or self.var_names != other.var_names:
            return False
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty
        return np.array_equal(self.point, other.point) and np.array_equal(self.gens, other.gens)

    def __hash__(self):
        p = b"" if self.point is None else self.point.tobytes()
        return hash((self.width, self.var_names, p, self.gens.tobytes()))

    def __repr__(self):
        if self.is_empty:
            return f"AffineSpace(empty, vars={len(self.var_names)})"
        return f"AffineSpace(width={self.width}, vars={len(self.var_names)}, gens={self.gens.shape[0]})"


def nullspace(rows, width: int, ncols: int | None = None) -> np.ndarray:
    """Howell basis of ``{c : c . g = 0 mod 2^width for every row g}``."""
    if ncols is None:
        ncols = np.asarray(rows).shape[-1]
    g = as_matrix(rows, ncols)
    m = g.shape[0]
    # rows [g^T | I]: vectors of the span that vanish on the first m columns
    # are exactly the (lambda) with g . lambda = 0
    aug = np.hstack([g.T.copy(), np.eye(ncols, dtype=np.uint64)])
    h = howell(aug, width)
    keep = ~h[:, :m].any(axis=1)
    return np.ascontiguousarray(h[keep][:, m:])


def space_of(c: CongruenceSystem) -> AffineSpace:
    """Solution set of ``c`` over (Z/2^width)^n."""
    n = len(c.var_names)
    m = len(c)
    # columns: [row residues | mu | lambda]; a span vector with zero residues
    # encodes A.lambda = mu.b
    aug = np.zeros((n + 1, m + 1 + n), dtype=np.uint64)
    aug[0, :m] = (-c.rhs.astype(np.uint64)) & mask_for(c.width)
    aug[0, m] = 1
    aug[1:, :m] = c.coeffs.T
    aug[1:, m + 1:] = np.eye(n, dtype=np.uint64)
    h = howell(aug, c.width)
    h = h[~h[:, :m].any(axis=1)]
    if h.shape[0] == 0 or h[0, m] != 1:
        return AffineSpace.empty(c.width, c.var_names)
    return AffineSpace(c.width, c.var_names, h[0, m + 1:], h[1:, m + 1:])


def constraints_of(s: AffineSpace) -> CongruenceSystem:
    """Canonical congruence system whose solution set is exactly ``s``."""
    if s.is_empty:
        return CongruenceSystem.empty(s.width, s.var_names)
    n = len(s.var_names)
    c = nullspace(s.gens, s.width, n)
    mask = mask_for(s.width)
    rhs = (c @ s.point) & mask if c.shape[0] else np.zeros(0, dtype=np.uint64)
    h = howell(np.hstack([c, rhs.reshape(-1, 1)]), s.width) if c.shape[0] else np.zeros((0, n + 1), dtype=np.uint64)
    return CongruenceSystem(s.width, s.var_names, h[:, :-1], h[:, -1])


def project(s: AffineSpace, keep: Iterable[str]) -> AffineSpace:
    """Image of ``s`` under deletion of every coordinate not in ``keep``."""
    keep = list(keep)
    index = {v: i for i, v in enumerate(s.var_names)}
    unknown = [v for v in keep if v not in index]
    if unknown:
        raise KeyError(f"unknown variables: {unknown}")
    if s.is_empty:
        return AffineSpace.empty(s.width, keep)
    cols = [index[v] for v in keep]
    return AffineSpace(s.width, keep, s.point[cols], s.gens[:, cols])


def intersect(c1: CongruenceSystem, c2: CongruenceSystem) -> CongruenceSystem:
    _check_compatible(c1, c2)
    out = CongruenceSystem(
        c1.width,
        c1.var_names,
        np.vstack([c1.coeffs, c2.coeffs]),
        np.concatenate([c1.rhs, c2.rhs]),
    )
    return out.canonical()


def embed(c: CongruenceSystem, var_names: Sequence[str]) -> CongruenceSystem:
    """Re-express ``c`` over a superset of its variables (zero coefficients elsewhere)."""
    index = {v: i for i, v in enumerate(var_names)}
    missing = [v for v in c.var_names if v not in index]
    if missing:
        raise KeyError(f"target order lacks variables: {missing}")
    coeffs = np.zeros((len(c), len(var_names)), dtype=np.uint64)
    for j, v in enumerate(c.var_names):
        coeffs[:, index[v]] = c.coeffs[:, j]
    return CongruenceSystem(c.width, var_names, coeffs, c.rhs)


def rename(obj, var_names: Sequence[str]):
    """Same system or space with its coordinates relabelled positionally."""
    if len(var_names) != len(obj.var_names):
        raise ValueError("rename must preserve arity")
    if isinstance(obj, CongruenceSystem):
        return CongruenceSystem(obj.width, var_names, obj.coeffs, obj.rhs)
    if obj.is_empty:
        return AffineSpace.empty(obj.width, var_names)
    return AffineSpace(obj.width, var_names, obj.point, obj.gens)
