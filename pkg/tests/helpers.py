"""Seeded random generators shared by the test modules."""

import random

from semicircuit.circuit import Add, BoolGate, BooleanCircuit, Circuit, Const, Mul
from semicircuit.lang import Dfa, Grammar


def rand_circuit(sr, n, rng, p_const=0.2):
    gates, ids = {}, []
    for i in range(n):
        gid = f"g{i}"
        if i < 2 or rng.random() < p_const:
            gates[gid] = Const(rng.randrange(len(sr)))
        else:
            a, b = rng.choice(ids), rng.choice(ids)
            gates[gid] = (Add if rng.random() < 0.5 else Mul)(a, b)
        ids.append(gid)
    return Circuit(sr, gates, ids[-1])


def rand_typed_circuit(sr, n, rng):
    """Random circuit together with a valid type assignment.

    Each gate first draws a type (e, f); additions combine two gates of that
    type, multiplications a gate typed (e, *) with one typed (*, f), and
    constants are drawn from eRf.
    """
    idem = sorted(sr.idempotents)
    slice_of = {}
    for e in idem:
        for f in idem:
            slice_of[(e, f)] = sorted({sr.mul[sr.mul[e][x]][f] for x in range(len(sr))})
    gates, types = {}, {}
    by_type, by_left, by_right = {}, {}, {}
    for i in range(n):
        gid = f"g{i}"
        e, f = rng.choice(idem), rng.choice(idem)
        rhs = None
        roll = rng.random()
        if roll < 0.4 and by_type.get((e, f)):
            rhs = Add(rng.choice(by_type[(e, f)]), rng.choice(by_type[(e, f)]))
        elif roll < 0.8 and by_left.get(e) and by_right.get(f):
            rhs = Mul(rng.choice(by_left[e]), rng.choice(by_right[f]))
        if rhs is None:
            rhs = Const(rng.choice(slice_of[(e, f)]))
        gates[gid] = rhs
        types[gid] = (e, f)
        by_type.setdefault((e, f), []).append(gid)
        by_left.setdefault(e, []).append(gid)
        by_right.setdefault(f, []).append(gid)
    return Circuit(sr, gates, f"g{n - 1}"), types


def rand_boolean(rng, n, monotone=False, max_depth=None):
    """Random Boolean circuit; with ``max_depth`` every gate sits at most that deep."""
    gates, depth, ids = {}, {}, []
    for i in range(n):
        gid = f"b{i}"
        pool = [x for x in ids if max_depth is None or depth[x] < max_depth]
        if len(ids) < 2 or not pool or rng.random() < 0.2:
            gates[gid] = BoolGate("const", (rng.randrange(2),))
            depth[gid] = 1
        else:
            ops = ["and", "or"] if monotone else ["and", "or", "not"]
            op = rng.choice(ops)
            args = (rng.choice(pool),) if op == "not" else (rng.choice(pool), rng.choice(pool))
            gates[gid] = BoolGate(op, args)
            depth[gid] = 1 + max(depth[a] for a in args)
        ids.append(gid)
    return BooleanCircuit(gates, ids[-1])


def rand_dfa(rng, alphabet=("a", "b"), max_states=4):
    k = rng.randint(1, max_states)
    states = tuple(f"q{i}" for i in range(k))
    delta = {(q, a): rng.choice(states) for q in states for a in alphabet}
    finals = frozenset(q for q in states if rng.random() < 0.4)
    return Dfa(tuple(alphabet), states, "q0", finals, delta)


def rand_grammar(rng, alphabet=("a", "b"), max_nts=4, extra=4):
    """Grammar whose marked productions only point to later nonterminals."""
    k = rng.randint(1, max_nts)
    nts = [f"N{i}" for i in range(k)]
    prods, marked = [], {}

    def body(later):
        syms = list(alphabet) + later
        return tuple(rng.choice(syms) for _ in range(rng.randint(0, 3)))

    for i in range(k - 1, -1, -1):
        marked[nts[i]] = len(prods)
        prods.append((nts[i], body(nts[i + 1:])))
    for _ in range(rng.randint(0, extra)):
        prods.append((rng.choice(nts), body(nts)))
    return Grammar("N0", tuple(nts), tuple(alphabet), prods, marked)
