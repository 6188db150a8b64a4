"""From an arbitrary circuit to a type-admitting one plus an affine read-out.

Pipeline: truncated free evaluation (short words with B(t,p) coefficients and
a flag for long words), the long-part circuit, removal of constants outside
the ideal generated by long products, and finally the boundary-profile
construction that yields typed gates.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

from .algebra import generated_subsemiring, long_threshold, product_powers, stability
from .circuit import Add, Circuit, Const, Copy, Mul, eval_naive, normalize

PIPELINE_CAP = 16


class ReductionError(ValueError):
    pass


def _prod(sr, word):
    acc = word[0]
    for x in word[1:]:
        acc = sr.mul[acc][x]
    return acc


@dataclass
class ShortLong:
    """Per-gate truncated free value.

    ``short[g]`` maps words (tuples of element indices, length < threshold)
    to coefficient classes, or is None for ⊥.  ``long[g]`` tells whether some
    word of length >= threshold occurs.
    """

    threshold: int
    coefficients: object
    short: dict
    long: dict
    cross: dict  # mul gate -> True when two short words combine into a long one


def short_long_analyze(c, threshold=None, strict=False):
    sr = c.semiring
    if not c.is_normal():
        c = normalize(c)
    m = threshold or long_threshold(sr, strict=strict)
    coef = stability(sr).coefficients()
    short, long, cross = {}, {}, {}
    for g in c.order:
        rhs = c.gates[g]
        if isinstance(rhs, Const):
            short[g] = {(rhs.value,): 1} if m > 1 else None
            long[g] = m <= 1
            continue
        b, cc = rhs.left, rhs.right
        sb, sc = short[b], short[cc]
        if isinstance(rhs, Add):
            if sb is None:
                poly = None if sc is None else dict(sc)
            else:
                poly = dict(sb)
                for w, k in (sc or {}).items():
                    poly[w] = coef.plus(poly[w], k) if w in poly else k
            short[g] = poly
            long[g] = long[b] or long[cc]
            continue
        poly, spill = {}, False
        if sb is not None and sc is not None:
            for u, ku in sb.items():
                for v, kv in sc.items():
                    if len(u) + len(v) >= m:
                        spill = True
                        continue
                    w = u + v
                    k = coef.times(ku, kv)
                    poly[w] = coef.plus(poly[w], k) if w in poly else k
        short[g] = poly or None
        cross[g] = spill
        long[g] = spill or long[b] or long[cc]
    return ShortLong(m, coef, short, long, cross)


def long_by_reachability(c, analysis):
    """Long flags via: some mul gate below joins two short words into a long one."""
    m = analysis.threshold
    lengths = {g: {len(w) for w in (p or {})} for g, p in analysis.short.items()}
    witness_gates = set()
    for g, rhs in c.gates.items():
        if isinstance(rhs, Mul):
            lb, lc = lengths[rhs.left], lengths[rhs.right]
            if any(x + y >= m for x in lb for y in lc):
                witness_gates.add(g)
    return {g: bool(c.below(g) & witness_gates) for g in c.gates}


def short_value(sr, poly):
    """h of a short polynomial: Σ k·h(w); None stands for ⊥."""
    if poly is None:
        return None
    acc = None
    for w in sorted(poly):
        term = sr.scalar(poly[w], _prod(sr, w))
        acc = term if acc is None else sr.add[acc][term]
    return acc


def mixed_long_constant(sr, analysis, b, c):
    """m_A for A = B·C: sum of k_u k_v · h(uv) over short u, v with |uv| long."""
    m = analysis.threshold
    coef = analysis.coefficients
    acc = None
    for u, ku in sorted(analysis.short[b].items()):
        for v, kv in sorted(analysis.short[c].items()):
            if len(u) + len(v) < m:
                continue
            term = sr.scalar(coef.times(ku, kv), _prod(sr, u + v))
            acc = term if acc is None else sr.add[acc][term]
    return acc


# -- removing constants outside an ideal ------------------------------------

def _name(sr, x):
    return "" if x is None else sr.elements[x]


def _lmul(sr, l, x):
    return x if l is None else sr.mul[l][x]


def _rmul(sr, x, r):
    return x if r is None else sr.mul[x][r]


@dataclass
class LeafRemoval:
    circuit: Circuit
    gate_of: dict  # (gate, l, r) -> id in the new circuit (l, r None for the adjoined 1)


def leaf_removal(c, ideal):
    """Equivalent circuit all of whose constants lie in the ideal.

    Gates A[l,r] computing l·[A]·r are created on demand from the output
    down; the identity of R¹ is rendered as an empty position.
    """
    sr = c.semiring
    ideal = frozenset(ideal)
    if not c.is_normal():
        raise ReductionError("leaf removal needs a circuit in normal form")
    if c.output is None:
        raise ReductionError("leaf removal needs an output gate")
    inside = {g for g, rhs in c.gates.items()
              if not isinstance(rhs, Const) or rhs.value in ideal}
    if c.output not in inside:
        raise ReductionError(f"output gate {c.output} is a constant outside the ideal")
    for g, rhs in c.gates.items():
        if isinstance(rhs, Add) and not (rhs.left in inside and rhs.right in inside):
            raise ReductionError(f"addition gate {g} has a constant child outside the ideal")
        if isinstance(rhs, Mul) and not (rhs.left in inside or rhs.right in inside):
            raise ReductionError(f"multiplication gate {g} has two constant children outside the ideal")

    gate_of = {}
    gates = {}
    todo = []

    def want(a, l, r):
        key = (a, l, r)
        if key not in gate_of:
            gate_of[key] = f"${a}[{_name(sr, l)},{_name(sr, r)}]"
            todo.append(key)
        return gate_of[key]

    root = want(c.output, None, None)
    while todo:
        a, l, r = key = todo.pop()
        rhs = c.gates[a]
        gid = gate_of[key]
        if isinstance(rhs, Const):
            gates[gid] = Const(_rmul(sr, _lmul(sr, l, rhs.value), r))
        elif isinstance(rhs, Add):
            gates[gid] = Add(want(rhs.left, l, r), want(rhs.right, l, r))
        else:
            b, cc = rhs.left, rhs.right
            if b in inside and cc in inside:
                gates[gid] = Mul(want(b, l, None), want(cc, None, r))
            elif cc not in inside:
                gates[gid] = Copy(want(b, l, _rmul(sr, c.gates[cc].value, r)))
            else:
                gates[gid] = Copy(want(cc, _lmul(sr, l, c.gates[b].value), r))
    out = normalize(Circuit(sr, gates, root))
    return LeafRemoval(out, gate_of)


# -- short/long split of the whole circuit ----------------------------------

@dataclass
class MonomResult:
    case: int
    value: object = None  # case 1: [C]
    circuit: Circuit = None  # cases 2, 3: D over the ideal
    sigma: object = None  # case 3
    analysis: ShortLong = None
    long_circuit: Circuit = None
    mixed: dict = field(default_factory=dict)  # m_A constants


def ideal_of_long_products(sr, threshold):
    return generated_subsemiring(sr, product_powers(sr, threshold))


def monomlength(c, threshold=None, strict=False):
    sr = c.semiring
    if not c.is_normal():
        c = normalize(c)
    if c.output is None:
        raise ReductionError("monomlength needs an output gate")
    an = short_long_analyze(c, threshold, strict)
    out = c.output
    if not an.long[out]:
        return MonomResult(1, value=short_value(sr, an.short[out]), analysis=an)

    lam = {g: f"$L:{g}" for g in c.gates if an.long[g]}
    sval = {}

    def hs(g):
        if g not in sval:
            sval[g] = short_value(sr, an.short[g])
        return sval[g]

    gates, mixed = {}, {}
    for g in c.order:
        if g not in lam:
            continue
        rhs = c.gates[g]
        b, cc = rhs.left, rhs.right
        if isinstance(rhs, Add):
            if not an.long[cc]:
                gates[lam[g]] = Copy(lam[b])
            elif not an.long[b]:
                gates[lam[g]] = Copy(lam[cc])
            else:
                gates[lam[g]] = Add(lam[b], lam[cc])
            continue
        terms = []
        if an.long[b] and an.long[cc]:
            terms.append(Mul(lam[b], lam[cc]))
        if an.short[b] is not None and an.long[cc]:
            terms.append(Mul(Const(hs(b)), lam[cc]))
        if an.long[b] and an.short[cc] is not None:
            terms.append(Mul(lam[b], Const(hs(cc))))
        if an.cross.get(g):
            mixed[g] = mixed_long_constant(sr, an, b, cc)
            terms.append(Const(mixed[g]))
        rhs_l = terms[0]
        for t in terms[1:]:
            rhs_l = Add(rhs_l, t)
        gates[lam[g]] = rhs_l
    cl = Circuit(sr, gates, lam[out])
    cl = cl.restrict(cl.below(lam[out]))
    ideal = ideal_of_long_products(sr, an.threshold)
    d = leaf_removal(normalize(cl), ideal).circuit
    if an.short[out] is None:
        return MonomResult(2, circuit=d, analysis=an, long_circuit=cl, mixed=mixed)
    return MonomResult(3, circuit=d, sigma=hs(out), analysis=an, long_circuit=cl, mixed=mixed)


# -- sums of s·e·t ----------------------------------------------------------

@lru_cache(maxsize=64)
def rer_decompositions(sr):
    """Element -> shortest tuple of triples (s, e, t), e idempotent, summing to it."""
    n = len(sr)
    base = {}
    for s in range(n):
        for e in sorted(sr.idempotents):
            for t in range(n):
                v = sr.mul[sr.mul[s][e]][t]
                base.setdefault(v, (s, e, t))
    best = {v: (tr,) for v, tr in base.items()}
    layer = sorted(best)
    while layer:
        nxt = []
        for y in layer:
            for v in sorted(base):
                z = sr.add[y][v]
                if z not in best:
                    best[z] = best[y] + (base[v],)
                    nxt.append(z)
        layer = sorted(nxt)
    return best


def decompose_RER(sr, x):
    table = rer_decompositions(sr)
    if x not in table:
        raise ReductionError(f"{sr.elements[x]} is not a sum of products s·e·t")
    return list(table[x])


# -- typed construction ------------------------------------------------------

@dataclass
class AffineFunction:
    coefficients: list  # (a_i, b_i)
    constant: object = None

    def __len__(self):
        return len(self.coefficients)

    def apply(self, sr, xs):
        acc = self.constant
        for (a, b), x in zip(self.coefficients, xs):
            term = sr.mul[sr.mul[a][x]][b]
            acc = term if acc is None else sr.add[acc][term]
        return acc

    def describe(self, sr):
        parts = [f"{sr.elements[a]} {sr.elements[b]}" for a, b in self.coefficients]
        if self.constant is not None:
            parts.append(sr.elements[self.constant])
        return "alpha: " + " ".join(parts)


@dataclass
class TypedConstruction:
    circuit: Circuit
    types: dict
    distinguished: list
    alpha: AffineFunction
    profiles: dict = field(default_factory=dict)
    primed: dict = field(default_factory=dict)  # (gate, (s,e,f,t)) -> id
    source: Circuit = None
    mixed: dict = field(default_factory=dict)

    def recompose(self):
        vals = eval_naive(self.circuit).values
        sr = self.circuit.semiring
        return self.alpha.apply(sr, [vals[g] for g in self.distinguished])


def boundary_profiles(c, decomp):
    """P_A by dynamic programming over the circuit."""
    prof = {}
    for g in c.order:
        rhs = c.gates[g]
        if isinstance(rhs, Const):
            prof[g] = frozenset((s, e, e, t) for s, e, t in decomp[g])
        elif isinstance(rhs, Add):
            prof[g] = prof[rhs.left] | prof[rhs.right]
        else:
            heads = {(s, e) for s, e, _, _ in prof[rhs.left]}
            tails = {(f, t) for _, _, f, t in prof[rhs.right]}
            prof[g] = frozenset((s, e, f, t) for s, e in heads for f, t in tails)
    return prof


def boundary_profiles_by_paths(c, decomp):
    """P_A from the path conditions: an input monomial reaching A through
    additions only, or a multiplication gate fed by a left-spine input and a
    right-spine input that reaches A through additions only."""
    left_in, right_in, add_in = {}, {}, {}
    for g in c.order:
        rhs = c.gates[g]
        if isinstance(rhs, Const):
            left_in[g] = right_in[g] = frozenset([g])
            add_in[g] = frozenset([g])
        elif isinstance(rhs, Add):
            left_in[g] = left_in[rhs.left] | left_in[rhs.right]
            right_in[g] = right_in[rhs.left] | right_in[rhs.right]
            add_in[g] = add_in[rhs.left] | add_in[rhs.right] | {g}
        else:
            left_in[g] = left_in[rhs.left]
            right_in[g] = right_in[rhs.right]
            add_in[g] = frozenset([g])
    prof = {}
    for g in c.gates:
        found = set()
        for x in add_in[g]:
            rhs = c.gates[x]
            if isinstance(rhs, Const):
                found |= {(s, e, e, t) for s, e, t in decomp[x]}
            elif isinstance(rhs, Mul):
                heads = {(s, e) for c1 in left_in[x] for s, e, _ in decomp[c1]}
                tails = {(f, t) for c2 in right_in[x] for _, f, t in decomp[c2]}
                found |= {(s, e, f, t) for s, e in heads for f, t in tails}
        prof[g] = frozenset(found)
    return prof


def fsf(d, full=False):
    """Type-admitting circuit C' with [C] = Σ s·e·[A'_{s,e,f,t}]·f·t over P_{A0}.

    Only gates needed below the distinguished ones are built unless ``full``.
    Products B'·(f't's'e')·C' are grouped by (s', e') on the right factor so
    that the sum over P_B is shared among all C' factors.
    """
    sr = d.semiring
    if not d.is_normal():
        d = normalize(d)
    if d.output is None:
        raise ReductionError("fsf needs an output gate")
    table = rer_decompositions(sr)
    decomp = {}
    for g, rhs in d.gates.items():
        if isinstance(rhs, Const):
            if rhs.value not in table:
                raise ReductionError(f"constant {sr.elements[rhs.value]} of gate {g} is outside <RER>")
            decomp[g] = table[rhs.value]
    prof = boundary_profiles(d, decomp)

    need = defaultdict(set)
    if full:
        for g in d.gates:
            need[g] = set(prof[g])
    else:
        need[d.output] = set(prof[d.output])
        for g in reversed(d.order):
            rhs = d.gates[g]
            if not need[g] or isinstance(rhs, Const):
                continue
            b, cc = rhs.left, rhs.right
            if isinstance(rhs, Add):
                for u in need[g]:
                    if u in prof[b]:
                        need[b].add(u)
                    if u in prof[cc]:
                        need[cc].add(u)
            else:
                heads = {(s, e) for s, e, _, _ in need[g]}
                tails = {(f, t) for _, _, f, t in need[g]}
                need[b] |= {u for u in prof[b] if u[:2] in heads}
                need[cc] |= {u for u in prof[cc] if u[2:] in tails}

    name = sr.elements
    gates, types, primed = {}, {}, {}
    counter = [0]

    def fresh(typ, rhs):
        counter[0] += 1
        gid = f"$T{counter[0]}"
        gates[gid] = rhs
        types[gid] = typ
        return gid

    const_gate = {}

    def const(value, typ):
        key = (value, typ)
        if key not in const_gate:
            const_gate[key] = fresh(typ, Const(value))
        return const_gate[key]

    def pid(g, u):
        return f"${g}|{'|'.join(name[x] for x in u)}"

    def total(terms, typ):
        acc = terms[0]
        for t in terms[1:]:
            acc = fresh(typ, Add(acc, t))
        return acc

    for g in d.order:
        if not need[g]:
            continue
        rhs = d.gates[g]
        if isinstance(rhs, Const):
            mult = defaultdict(int)
            for tr in decomp[g]:
                mult[tr] += 1
            for s, e, t in mult:
                u = (s, e, e, t)
                if u in need[g]:
                    gid = pid(g, u)
                    gates[gid] = Const(sr.scalar(mult[(s, e, t)], e))
                    types[gid] = (e, e)
                    primed[(g, u)] = gid
            continue
        b, cc = rhs.left, rhs.right
        if isinstance(rhs, Add):
            for u in sorted(need[g]):
                kids = [primed[(x, u)] for x in (b, cc) if (x, u) in primed and u in prof[x]]
                gid = pid(g, u)
                gates[gid] = Add(*kids) if len(kids) == 2 else Copy(kids[0])
                types[gid] = (u[1], u[2])
                primed[(g, u)] = gid
            continue
        by_head = defaultdict(list)
        for v in sorted(need[b]):
            by_head[v[:2]].append(v)
        by_tail = defaultdict(list)
        for w in sorted(need[cc]):
            by_tail[w[2:]].append(w)
        left_sum = {}

        def left_factor(s, e, s2, e2):
            # Σ over (s,e,f',t') in P_B of B'_{s,e,f',t'} · (f' t' s2 e2), typed (e, e2)
            key = (s, e, s2, e2)
            if key not in left_sum:
                terms = []
                for v in by_head[(s, e)]:
                    f1, t1 = v[2], v[3]
                    k = sr.mul[sr.mul[sr.mul[f1][t1]][s2]][e2]
                    terms.append(fresh((e, e2), Mul(primed[(b, v)], const(k, (f1, e2)))))
                left_sum[key] = total(terms, (e, e2))
            return left_sum[key]

        for u in sorted(need[g]):
            s, e, f, t = u
            terms = []
            for w in by_tail[(f, t)]:
                s2, e2 = w[0], w[1]
                terms.append(fresh((e, f), Mul(left_factor(s, e, s2, e2), primed[(cc, w)])))
            gid = pid(g, u)
            top = total(terms, (e, f))
            gates[gid] = Copy(top)
            types[gid] = (e, f)
            primed[(g, u)] = gid

    dist = [primed[(d.output, u)] for u in sorted(prof[d.output])]
    cprime = normalize(Circuit(sr, gates))
    alpha = AffineFunction([(sr.mul[u[0]][u[1]], sr.mul[u[2]][u[3]]) for u in sorted(prof[d.output])])
    return TypedConstruction(cprime, types, dist, alpha, prof, primed, d)


def step1_pipeline(c, threshold=None, strict=False, cap=PIPELINE_CAP, full=False):
    """Either the bare value of c, or a typed construction whose affine
    read-out of the distinguished gates equals the value of c."""
    sr = c.semiring
    if len(sr) > cap:
        raise ReductionError(f"pipeline supports semirings up to {cap} elements")
    mono = monomlength(c, threshold, strict)
    if mono.case == 1:
        return mono.value
    typed = fsf(mono.circuit, full=full)
    typed.alpha.constant = mono.sigma
    typed.mixed = mono.mixed
    return typed


def validate_type_assignment(c, types, values=None):
    """List of (gate, clause, message); empty when the assignment is valid."""
    sr = c.semiring
    if values is None:
        values = eval_naive(c).values
    idem = sr.idempotents
    slices = {}
    bad = []
    for g, rhs in c.gates.items():
        if g not in types:
            bad.append((g, 0, "no type"))
            continue
        e, f = types[g]
        if e not in idem or f not in idem:
            bad.append((g, 0, "type is not a pair of idempotents"))
            continue
        if (e, f) not in slices:
            slices[(e, f)] = {sr.mul[sr.mul[e][x]][f] for x in range(len(sr))}
        if values[g] not in slices[(e, f)]:
            bad.append((g, 1, f"value {sr.elements[values[g]]} outside eRf"))
        if isinstance(rhs, Add):
            if types.get(rhs.left) != (e, f) or types.get(rhs.right) != (e, f):
                bad.append((g, 2, "addition gate and its inputs have different types"))
        elif isinstance(rhs, Mul):
            tl, tr = types.get(rhs.left), types.get(rhs.right)
            if tl is None or tr is None or (tl[0], tr[1]) != (e, f):
                bad.append((g, 3, "multiplication gate type does not match its inputs"))
    return bad


def profile_identity_holds(typed):
    """[A] = Σ_{P_A} s·e·[A'_u]·f·t for every gate A with all its primed gates built."""
    d = typed.source
    sr = d.semiring
    dv = eval_naive(d).values
    cv = eval_naive(typed.circuit).values
    for g in d.gates:
        us = typed.profiles[g]
        if not all((g, u) in typed.primed for u in us):
            continue
        acc = None
        for s, e, f, t in us:
            x = cv[typed.primed[(g, (s, e, f, t))]]
            term = sr.mul[sr.mul[sr.mul[sr.mul[s][e]][x]][f]][t]
            acc = term if acc is None else sr.add[acc][term]
        if acc != dv[g]:
            return False
    return True

