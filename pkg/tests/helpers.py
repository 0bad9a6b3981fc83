import itertools

from bitcong.sat import Solver


def relation_graph(rel):
    """Map each input tuple of register values to the set of output tuples the CNF allows."""
    regs, w = rel.registers, rel.width
    in_vars = rel.input_map.vars(regs)
    out_vars = rel.output_map.vars(regs)
    graph = {}
    for values in itertools.product(range(1 << w), repeat=len(regs)):
        bits = [(v >> i) & 1 for v in values for i in range(w)]
        s = Solver(rel.formula)
        for var, b in zip(in_vars, bits):
            s.add_clause([var if b else -var])
        outs = set()
        while True:
            res = s.solve()
            if not res:
                break
            assert rel.formula.evaluate(res.model)
            ob = [int(res.model[v]) for v in out_vars]
            outs.add(tuple(sum(ob[k * w + i] << i for i in range(w)) for k in range(len(regs))))
            s.add_clause([-v if res.model[v] else v for v in out_vars])
        graph[values] = outs
    return graph


def pigeonhole(pigeons, holes):
    """PHP: pigeon p in hole h is variable p * holes + h + 1."""
    var = lambda p, h: p * holes + h + 1
    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            clauses.append([-var(p, h), -var(q, h)])
    return pigeons * holes, clauses


def sat_corpus(seed=7, count=300):
    """Deterministic mix of random k-CNFs (<= 16 vars), pigeonhole instances and edge cases."""
    import random

    rnd = random.Random(seed)
    corpus = [(1, [[1], [-1]]), (0, []), (3, [[]]), (2, [[1, 2], [-1, 2], [1, -2], [-1, -2]])]
    corpus.append(pigeonhole(4, 3))
    corpus.append(pigeonhole(3, 3))
    corpus.append(pigeonhole(3, 2))
    for i in range(count):
        n = rnd.randint(1, 16)
        k = rnd.choice([1, 2, 3, 3, 3, 4])
        ratio = rnd.uniform(0.5, 4.5)
        m = max(1, int(ratio * n))
        clauses = []
        for _ in range(m):
            size = rnd.randint(1, min(k, n))
            vs = rnd.sample(range(1, n + 1), size)
            clauses.append([v if rnd.random() < 0.5 else -v for v in vs])
        corpus.append((n, clauses))
    return corpus


def random_program_text(rnd, width, nregs, ninstr):
    """Random straight-line program in IR syntax over registers a, b, ..."""
    from bitcong.machine import OPCODES

    regs = "abcd"[:nregs]
    lines = [f".width {width}", ".regs " + ", ".join(regs)]
    for _ in range(ninstr):
        op = rnd.choice(sorted(OPCODES))
        kinds = OPCODES[op]
        args = [rnd.choice(regs)]
        for k in kinds[1:]:
            if k == "r":
                args.append(rnd.choice(regs))
            elif k == "i":
                args.append(str(rnd.randrange(1 << width)))
            else:
                args.append(str(rnd.randrange(width)))
        lines.append(f"{op} " + ", ".join(args))
    return "\n".join(lines) + "\n"


def hull_of_vectors(vectors, width, names):
    """Affine hull of 0-1 vectors: first point plus the span of all differences."""
    from bitcong.modlin import AffineSpace

    vectors = [list(v) for v in vectors]
    if not vectors:
        return AffineSpace.empty(width, names)
    mod = 1 << width
    p0 = vectors[0]
    diffs = [[(x - y) % mod for x, y in zip(v, p0)] for v in vectors[1:]]
    return AffineSpace(width, names, p0, diffs)
