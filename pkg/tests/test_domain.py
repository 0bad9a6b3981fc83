import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bitcong.blast import VarAllocator, blast_program
from bitcong.domain import NamedBitOrder, compose_abstract, describes, encode_negation, from_model, merge
from bitcong.inference import infer_io
from bitcong.machine import parse_program
from bitcong.modlin import AffineSpace, CongruenceSystem, constraints_of, rename, space_of
from bitcong.sat import Solver

import worked_example as P
from oracles import affine_set, zero_one_solutions


def example_order():
    return NamedBitOrder.of(P.ORDER, range(1, 13))


def model(bits):
    return np.array((0,) + tuple(bits), dtype=np.uint8)


def space_set(s):
    if s.is_empty:
        return set()
    return affine_set([int(x) for x in s.point], [[int(x) for x in g] for g in s.gens], s.width, len(s.var_names))


def rows_of(c):
    return [([int(x) for x in a], int(b)) for a, b in zip(c.coeffs, c.rhs)]


def test_from_model_m1_is_s1():
    s = from_model(model(P.M1), example_order(), 4)
    assert s.point.tolist() == list(P.M1) and s.gens.shape[0] == 0
    assert constraints_of(s) == P.S1.canonical()


def test_from_zero_model():
    s = from_model(model([0] * 12), example_order(), 4)
    c = constraints_of(s)
    assert len(c) == 12 and not c.rhs.any()


def test_from_model_m2():
    s = from_model(model(P.M2), example_order(), 4)
    assert s.point.tolist() == list(P.M2)


def test_from_model_rejects_missing_bits():
    with pytest.raises(ValueError):
        from_model(model([1, 0]), example_order(), 4)


def test_merge_m1_m2_is_s2():
    o = example_order()
    s2 = merge(from_model(model(P.M1), o, 4), from_model(model(P.M2), o, 4))
    assert constraints_of(s2) == P.S2.canonical()
    s3 = merge(s2, from_model(model(P.M3), o, 4))
    assert constraints_of(s3) == P.S3.canonical()


def test_merge_idempotent():
    s = space_of(P.S10)
    assert merge(s, s) == s


def test_merge_of_all_models_is_s10():
    rel = blast_program(parse_program(".width 4\n.regs r\ninc r\ninc r\n"))
    names, vs = rel.order()
    order = NamedBitOrder.of(names, vs)
    assert tuple(names) == tuple(P.ORDER)
    solver = Solver(rel.formula)
    points = []
    while True:
        res = solver.solve()
        if not res:
            break
        points.append(from_model(res.model, order, 4))
        solver.add_clause([-v if res.model[v] else v for v in vs])
    assert len(points) == 16
    hull = AffineSpace.empty(4, order.names)
    for p in points:
        hull = merge(hull, p)
    assert hull == space_of(P.S10)
    # M10 is one of the models
    assert tuple(P.M10) in {tuple(int(x) for x in p.point) for p in points}


@st.composite
def point_sets(draw):
    width = draw(st.integers(2, 4))
    n = draw(st.integers(1, 12 // width))
    k = draw(st.integers(1, 4))
    pts = [[draw(st.integers(0, (1 << width) - 1)) for _ in range(n)] for _ in range(k)]
    names = [f"x{i}" for i in range(n)]
    return width, names, pts


def hull_of(width, names, pts):
    s = AffineSpace.empty(width, names)
    for p in pts:
        s = merge(s, AffineSpace.from_point(width, names, p))
    return s


@given(point_sets(), point_sets())
@settings(max_examples=80, deadline=None)
def test_merge_is_exact_affine_hull(a, b):
    width, names, pa = a
    pb = [p[: len(names)] + [0] * (len(names) - len(p)) for p in b[2]]
    sa, sb = hull_of(width, names, pa), hull_of(width, names, pb)
    m = merge(sa, sb)
    # brute force: p0 + span of all differences, enumerated without Howell
    allp = pa + pb
    mod = 1 << width
    diffs = [[(x - y) % mod for x, y in zip(p, allp[0])] for p in allp[1:]]
    assert space_set(m) == affine_set(allp[0], diffs, width, len(names))
    assert space_set(sa) | space_set(sb) <= space_set(m)
    assert merge(sb, sa) == m
    assert sa.issubset(m) and sb.issubset(m)


@given(point_sets())
@settings(max_examples=60, deadline=None)
def test_merge_associative(a):
    width, names, pts = a
    spaces = [AffineSpace.from_point(width, names, p) for p in pts] + [AffineSpace.empty(width, names)]
    x, y, z = (spaces * 3)[:3]
    assert merge(merge(x, y), z) == merge(x, merge(y, z))


def test_describes_examples():
    o = example_order()
    assert describes(P.S1, model(P.M1), o)
    assert not describes(P.S1, model(P.M2), o)
    top = CongruenceSystem.top(4, P.ORDER)
    for bits in itertools.product((0, 1), repeat=4):
        assert describes(top, model(list(bits) + [0] * 8), o)


def double_increment_rows(width, signed):
    """``2 + value(r) = value(r'')`` with unsigned or two's-complement bit weights."""
    mod = 1 << width
    weights = [1 << i for i in range(width)]
    if signed:
        weights[-1] = -(1 << (width - 1))
    coeffs = [w % mod for w in weights] + [(-w) % mod for w in weights]
    return [(coeffs, (-2) % mod)]


def test_signed_and_unsigned_weights_have_same_zero_one_solutions():
    w = 4
    unsigned = zero_one_solutions(double_increment_rows(w, False), w, 2 * w)
    signed = zero_one_solutions(double_increment_rows(w, True), w, 2 * w)
    assert unsigned == signed
    assert len(unsigned) == 16
    for vec in unsigned:
        x = sum(b << i for i, b in enumerate(vec[:w]))
        y = sum(b << i for i, b in enumerate(vec[w:]))
        assert y == (x + 2) % 16


def test_describes_only_sees_zero_one_vectors():
    w = 4
    names = [f"r[{i}]@in" for i in range(w)] + [f"r[{i}]@out" for i in range(w)]
    (coeffs, rhs), = double_increment_rows(w, False)
    c = CongruenceSystem(w, names, [coeffs], [rhs])
    order = NamedBitOrder.of(names, range(1, 2 * w + 1))
    for bits in itertools.product((0, 1), repeat=2 * w):
        direct = (sum(a * b for a, b in zip(coeffs, bits)) - rhs) % 16 == 0
        assert describes(c, model(bits), order) == direct
    # r0 -> 2, r'1 -> 2: satisfies the raw arithmetic, but is no truth assignment
    witness = [2, 0, 0, 0, 0, 2, 0, 0]
    assert c.holds(witness)[0]
    assert witness not in [list(v) for v in zero_one_solutions([(coeffs, rhs)], w, 2 * w)]


def violators(system, order, extra=None):
    """0-1 vectors over ``order`` satisfiable together with encode_negation (and ``extra``)."""
    alloc = VarAllocator(max(order.vars) + 1)
    neg = encode_negation(system, order, alloc)
    out = set()
    for bits in itertools.product((0, 1), repeat=len(order)):
        s = Solver()
        s.ensure_vars(neg.num_vars)
        for c in neg.clauses:
            s.add_clause(c)
        for v, b in zip(order.vars, bits):
            s.add_clause([v if b else -v])
        res = s.solve()
        if res:
            assert neg.evaluate(res.model)
            out.add(bits)
    return out


def test_negation_of_two_bit_row():
    c = CongruenceSystem(2, ["x0", "x1"], [[1, 1]], [1])
    assert violators(c, NamedBitOrder.of(["x0", "x1"], [1, 2])) == {(0, 0), (1, 1)}


def test_negation_of_no_rows_is_false():
    c = CongruenceSystem.top(4, ["a", "b"])
    f = encode_negation(c, NamedBitOrder.of(["a", "b"], [1, 2]), VarAllocator(3))
    assert f.is_trivially_false


def test_negation_rejects_inconsistent_system():
    with pytest.raises(ValueError):
        encode_negation(CongruenceSystem.empty(4, ["a"]), NamedBitOrder.of(["a"], [1]), VarAllocator(2))


@pytest.mark.parametrize("system", [P.S1, P.S2, P.S10, P.FINAL], ids=["S1", "S2", "S10", "final"])
def test_negation_is_exact_complement_on_example_systems(system):
    c = system.canonical()
    n = len(c.var_names)
    order = NamedBitOrder.of(c.var_names, range(1, n + 1))
    sat = zero_one_solutions(rows_of(c), 4, n)
    every = set(itertools.product((0, 1), repeat=n))
    assert violators(c, order) == every - sat


@st.composite
def bit_systems(draw):
    width = draw(st.integers(1, 4))
    n = draw(st.integers(1, 6))
    m = draw(st.integers(1, 3))
    mod = 1 << width
    rows = [[draw(st.integers(0, mod - 1)) for _ in range(n)] for _ in range(m)]
    # right-hand sides taken from a 0-1 point so the system is consistent
    point = [draw(st.integers(0, 1)) for _ in range(n)]
    rhs = [sum(a * b for a, b in zip(r, point)) % mod for r in rows]
    return CongruenceSystem(width, [f"x{i}" for i in range(n)], rows, rhs)


@given(bit_systems(), st.booleans())
@settings(max_examples=40, deadline=None)
def test_negation_is_exact_complement(c, canonical):
    if canonical:
        c = c.canonical()
    n = len(c.var_names)
    order = NamedBitOrder.of(c.var_names, range(1, n + 1))
    every = set(itertools.product((0, 1), repeat=n))
    assert violators(c, order) == every - zero_one_solutions(rows_of(c), c.width, n)


def test_negation_with_relation_finds_an_uncovered_model():
    rel = blast_program(parse_program(".width 4\n.regs r\ninc r\ninc r\n"))
    names, vs = rel.order()
    order = NamedBitOrder.of(names, vs)
    alloc = VarAllocator(rel.formula.num_vars + 1)
    neg = encode_negation(P.S1.canonical(), order, alloc)
    res = Solver(rel.formula.conjoin(neg)).solve()
    assert res
    assert rel.formula.evaluate(res.model)
    assert not describes(P.S1, res.model, order)


def io_space(text):
    return infer_io(blast_program(parse_program(text))).space


def test_compose_abstract_of_increments_covers_double_increment():
    inc = io_space(".width 4\n.regs r\ninc r\n")
    names = list(inc.var_names)
    mid = [n.replace("@out", "@mid") for n in names[4:]]
    first = rename(inc, names[:4] + mid)
    second = rename(inc, mid + names[4:])
    composed = compose_abstract(first, second)
    exact = io_space(".width 4\n.regs r\ninc r\ninc r\n")
    assert exact == space_of(P.FINAL)
    # composing hulls is sound but may lose what the concrete composition keeps
    assert exact.issubset(composed)
    assert composed.log2_size() >= exact.log2_size()


def test_compose_abstract_identity_and_empty():
    rel = io_space(".width 3\n.regs a, b\nadd a, b\nshl b, 1\n")
    names = list(rel.var_names)
    ins, outs = names[:6], names[6:]
    mid = [n.replace("@out", "@mid") for n in outs]
    ident = rename(io_space(".width 3\n.regs a, b\n"), mid + outs)
    assert compose_abstract(rename(rel, ins + mid), ident) == rel
    empty = AffineSpace.empty(3, mid + outs)
    assert compose_abstract(rename(rel, ins + mid), empty).is_empty


def test_compose_abstract_is_exact_relational_product():
    inc = io_space(".width 2\n.regs r\ninc r\n")
    names = list(inc.var_names)
    mid = [n.replace("@out", "@mid") for n in names[2:]]
    first = rename(inc, names[:2] + mid)
    second = rename(inc, mid + names[2:])
    a, b = space_set(first), space_set(second)
    expected = {x[:2] + z[2:] for x in a for z in b if x[2:] == z[:2]}
    assert space_set(compose_abstract(first, second)) == expected
