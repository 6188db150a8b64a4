"""Rank functions and the phase-by-phase evaluator for type-admitting circuits."""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .circuit import Add, Circuit, Const, Copy, Mul, eval_naive, normalize


# power semirings of groups up to order 5 are within reach of the full route
FULL_CAP = 32


class PhaseLimitError(RuntimeError):
    pass


@dataclass
class RankStructure:
    preorder: np.ndarray  # preorder[a, b] iff a ⪯ b
    scc_id: dict
    rank: dict

    @property
    def max_rank(self):
        return max(self.rank.values())


def single_steps(sr):
    """Edges a -> a+c, a -> l·a, a -> a·r."""
    n = len(sr)
    adj = np.zeros((n, n), dtype=bool)
    A, M = sr.add_table, sr.mul_table
    rows = np.arange(n)[:, None]
    adj[rows, A] = True
    adj[rows, M] = True  # a·r
    adj[rows, M.T] = True  # l·a
    return adj


def build_rank(sr):
    n = len(sr)
    adj = single_steps(sr)
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(zip(*np.nonzero(adj)))
    reach = np.eye(n, dtype=bool)
    for a in range(n):
        reach[a, list(nx.descendants(graph, a))] = True
    cond = nx.condensation(graph)
    members = cond.graph["mapping"]
    least = {cid: min(m for m, c in members.items() if c == cid) for cid in cond.nodes}
    order = list(nx.lexicographical_topological_sort(cond, key=lambda cid: least[cid]))
    position = {cid: i + 1 for i, cid in enumerate(order)}
    scc = {a: members[a] for a in range(n)}
    rank = {a: position[scc[a]] for a in range(n)}
    return RankStructure(reach, scc, rank)


@dataclass(frozen=True)
class RankViolation:
    clause: int
    witness: tuple

    def describe(self, sr):
        names = " ".join(sr.elements[x] for x in self.witness)
        return f"clause {self.clause} fails at {names}"


def check_rank_axioms(sr, rank):
    """Least violation of each of the three rank clauses (empty list when ok)."""
    n = len(sr)
    r = np.array([rank[a] for a in range(n)])
    A, M = sr.add_table, sr.mul_table
    out = []
    bad = np.argwhere(r[:, None] > r[A])
    if len(bad):
        out.append(RankViolation(1, tuple(int(v) for v in bad[0])))
    bad = np.argwhere((r[:, None] > r[M]) | (r[None, :] > r[M]))
    if len(bad):
        out.append(RankViolation(2, tuple(int(v) for v in bad[0])))
    found = None
    for e in sorted(sr.idempotents):
        for f in sorted(sr.idempotents):
            part = sorted({sr.mul[sr.mul[e][x]][f] for x in range(n)})
            for a in part:
                for b in part:
                    s = sr.add[a][b]
                    if rank[a] == rank[s] and s != a:
                        w = (a, b, e, f)
                        if found is None or w < found:
                            found = w
                        break
    if found is not None:
        out.append(RankViolation(3, found))
    return out


# -- phased evaluation -------------------------------------------------------

@dataclass
class PhaseRecord:
    phase: int
    additive: list  # gates evaluated by the addition-only step
    inner: dict  # addition gate -> chosen inner child
    values: dict  # values in the multiplicative circuit C'
    locally_correct: set
    downward: set  # the set W
    frozen: dict  # gate -> value fixed at the end of the phase


@dataclass
class PhasedResult:
    values: dict
    output: object
    phases: list = field(default_factory=list)


def _additive_oracle(sr, gates, targets):
    sub = Circuit(sr, {g: gates[g] for g in targets})
    return eval_naive(sub).values


def eval_phased(c, types=None, rank=None, tie_break="low", seed=None, start_phase=1,
                diagnostic=False, max_phases=None):
    """Evaluate by repeatedly (1) collapsing addition-only subcircuits and
    (2) evaluating the multiplicative shadow circuit and freezing the
    downward-closed set of locally correct gates."""
    sr = c.semiring
    if not c.is_normal():
        c = normalize(c)
    if rank is None:
        rank = build_rank(sr)
    if max_phases is None:
        max_phases = rank.max_rank
    rng = random.Random(seed)
    position = {g: i for i, g in enumerate(c.gates)}
    order = c.order
    gates = dict(c.gates)
    truth = eval_naive(c).values if diagnostic else None
    phases = []
    k = start_phase - 1
    while any(not isinstance(rhs, Const) for rhs in gates.values()):
        k += 1
        if k > max_phases:
            raise PhaseLimitError(
                f"still unevaluated gates after phase {k - 1}; the rank or the type assignment is invalid")
        # Step 1
        pure = {}
        for g in order:
            rhs = gates[g]
            if isinstance(rhs, Const):
                pure[g] = True
            elif isinstance(rhs, Add):
                pure[g] = pure[rhs.left] and pure[rhs.right]
            else:
                pure[g] = False
        additive = [g for g in order if pure[g] and not isinstance(gates[g], Const)]
        if additive:
            below = set()
            for g in additive:
                below |= _cone(gates, g)
            vals = _additive_oracle(sr, gates, [g for g in order if g in below])
            for g in additive:
                gates[g] = Const(vals[g])
        # Step 2
        inner, shadow = {}, {}
        for g in order:
            rhs = gates[g]
            if isinstance(rhs, Add):
                kids = [x for x in (rhs.left, rhs.right) if not isinstance(gates[x], Const)]
                if len(kids) == 2 and kids[0] != kids[1]:
                    if tie_break == "random":
                        pick = rng.choice(kids)
                    elif tie_break == "high":
                        pick = max(kids, key=position.__getitem__)
                    else:
                        pick = min(kids, key=position.__getitem__)
                else:
                    pick = kids[0]
                inner[g] = pick
                shadow[g] = Copy(pick)
            else:
                shadow[g] = rhs
        cval = eval_naive(Circuit(sr, shadow)).values
        correct = set()
        for g in order:
            rhs = gates[g]
            if not isinstance(rhs, Add) or cval[g] == sr.plus(cval[rhs.left], cval[rhs.right]):
                correct.add(g)
        down = set()
        for g in order:
            rhs = gates[g]
            if g in correct and all(x in down for x in _kids(rhs)):
                down.add(g)
        frozen = {}
        for g in order:
            if g in down and not isinstance(gates[g], Const):
                gates[g] = Const(cval[g])
                frozen[g] = cval[g]
        phases.append(PhaseRecord(k, additive, inner, cval, correct, down, frozen))
        if truth is not None:
            for g in order:
                if rank.rank[truth[g]] <= k and not isinstance(gates[g], Const):
                    raise AssertionError(f"gate {g} of rank <= {k} still open after phase {k}")
    values = {g: gates[g].value for g in order}
    return PhasedResult(values, values[c.output] if c.output is not None else None, phases)


def _kids(rhs):
    if isinstance(rhs, (Add, Mul)):
        return (rhs.left, rhs.right)
    return ()


def _cone(gates, g):
    seen, stack = {g}, [g]
    while stack:
        for x in _kids(gates[stack.pop()]):
            if x not in seen:
                seen.add(x)
                stack.append(x)
    return seen


def identity_types(c):
    """All gates typed (1, 1); valid whenever the multiplication has an identity."""
    one = c.semiring.multiplicative().identity()
    if one is None:
        raise ValueError("multiplication has no identity; a type assignment must be supplied")
    return {g: (one, one) for g in c.gates}


def eval_full(c, threshold=None, strict=False, cap=FULL_CAP):
    """Reduce to a type-admitting circuit, evaluate it phase by phase and read
    off the affine function.  Falls back to naive evaluation (with a warning)
    when the semiring contains a copy of B2 or Z_d."""
    from .classify import is_zero_one_free
    from .reduction import TypedConstruction, step1_pipeline

    sr = c.semiring
    free, witness = is_zero_one_free(sr)
    if not free:
        z, o = witness
        warnings.warn(
            f"{sr.name} is not {{0,1}}-free (witness {sr.elements[z]}, {sr.elements[o]}); "
            "evaluation of its circuits is P-complete, using naive evaluation",
            stacklevel=2,
        )
        return eval_naive(c).output
    res = step1_pipeline(c, threshold=threshold, strict=strict, cap=cap)
    if not isinstance(res, TypedConstruction):
        return res
    ph = eval_phased(res.circuit, res.types, build_rank(sr))
    return res.alpha.apply(sr, [ph.values[g] for g in res.distinguished])
