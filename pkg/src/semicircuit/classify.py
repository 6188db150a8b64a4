"""Dichotomy predicates for finite semirings and semigroups."""

from dataclasses import dataclass, field

from .algebra import idempotents


def is_zero_one_free(sr):
    """Scan for a pair (0, 1) with 0 != 1, 0+0=0, 0+1=1, 0·1=1·0=0·0=0, 1·1=1.

    Returns (free, witness); witness is the least such pair by index.
    """
    add, mul = sr.add, sr.mul
    n = len(sr)
    for z in range(n):
        if add[z][z] != z or mul[z][z] != z:
            continue
        for o in range(n):
            if o == z:
                continue
            if add[z][o] == o and mul[z][o] == z and mul[o][z] == z and mul[o][o] == o:
                return False, (z, o)
    return True, None


@dataclass(frozen=True)
class Embedding:
    """A subsemiring isomorphic to B2 (kind 'B2') or to the ring Z_d (kind 'Z')."""

    elements: tuple  # images of 0, 1, 2, ... in order
    kind: str
    d: int = 2
    shape: tuple = (0, 1)  # the B(k, d) parameters found for {0} ∪ {m·1}

    def describe(self, sr):
        names = ",".join(sr.elements[x] for x in self.elements)
        target = "B2" if self.kind == "B2" else f"Z{self.d}"
        return f"{{{names}}} ~ {target}"


def find_b2_or_zd(sr):
    """Extract a copy of B2 or Z_d from a witness pair, or None when {0,1}-free."""
    free, witness = is_zero_one_free(sr)
    if free:
        return None
    zero, one = witness
    seq, seen = [zero], {zero: 0}
    while True:
        nxt = sr.add[seq[-1]][one]
        if nxt in seen:
            k = seen[nxt]
            d = len(seq) - k
            break
        seen[nxt] = len(seq)
        seq.append(nxt)
    if k == 0:
        return Embedding(tuple(seq), "Z", d, (k, d))
    a = d * k
    top = seq[k + (a - k) % d]
    return Embedding((zero, top), "B2", 2, (k, d))


def check_embedding(sr, emb):
    """True when emb's elements form the advertised subsemiring."""
    xs = emb.elements
    if len(set(xs)) != len(xs):
        return False
    if emb.kind == "B2":
        plus = lambda i, j: max(i, j)
        times = lambda i, j: min(i, j)
    else:
        plus = lambda i, j: (i + j) % emb.d
        times = lambda i, j: (i * j) % emb.d
    r = range(len(xs))
    return all(
        sr.add[xs[i]][xs[j]] == xs[plus(i, j)] and sr.mul[xs[i]][xs[j]] == xs[times(i, j)]
        for i in r for j in r
    )


@dataclass(frozen=True)
class MaximalSubgroup:
    identity: int
    elements: frozenset

    def __len__(self):
        return len(self.elements)


def _op(sg):
    return sg.op if hasattr(sg, "op") else sg.mul


def local_monoid(sg, e):
    op = _op(sg)
    return frozenset(op[op[e][s]][e] for s in range(len(op)))


def maximal_subgroups(sg):
    """Group of units of eSe for every idempotent e, ordered by e."""
    op = _op(sg)
    groups = []
    for e in sorted(idempotents(sg)):
        local = local_monoid(sg, e)
        units = frozenset(x for x in local if any(op[x][y] == e == op[y][x] for y in local))
        groups.append(MaximalSubgroup(e, units))
    return groups


def _inverse(op, e, g, x):
    for y in g:
        if op[x][y] == e:
            return y
    raise ValueError("element has no inverse in the group")


def _closure(op, gens, e):
    group = {e} | set(gens)
    frontier = list(group)
    while frontier:
        fresh = []
        for a in frontier:
            for b in list(group):
                for v in (op[a][b], op[b][a]):
                    if v not in group:
                        group.add(v)
                        fresh.append(v)
        frontier = fresh
    return frozenset(group)


def commutator_subgroup(op, group):
    e = group.identity
    g = group.elements
    inv = {x: _inverse(op, e, g, x) for x in g}
    comms = {op[op[inv[x]][inv[y]]][op[x][y]] for x in g for y in g}
    return MaximalSubgroup(e, _closure(op, comms, e))


def derived_series(sg, group):
    op = _op(sg)
    series = [group]
    while True:
        nxt = commutator_subgroup(op, series[-1])
        if nxt.elements == series[-1].elements:
            return series
        series.append(nxt)


def is_solvable(sg):
    """(True, None) or (False, (maximal subgroup, perfect term of its derived series))."""
    for group in maximal_subgroups(sg):
        if len(group) == 1:
            continue
        last = derived_series(sg, group)[-1]
        if len(last) > 1:
            return False, (group, last)
    return True, None


def is_aperiodic(sg, route="omega"):
    if route == "groups":
        return all(len(g) == 1 for g in maximal_subgroups(sg))
    op = _op(sg)
    n = len(op)
    omega = _omega(op)
    for x in range(n):
        p = x
        for _ in range(omega - 1):
            p = op[p][x]
        if op[p][x] != p:
            return False
    return True


def _omega(op):
    from math import lcm

    n = len(op)
    base, top = 1, 1
    for x in range(n):
        seen, p, k = {}, x, 1
        while p not in seen:
            seen[p] = k
            p = op[p][x]
            k += 1
        base = lcm(base, k - seen[p])
        top = max(top, seen[p])
    return base * -(-top // base)


def is_local_group(sg):
    op = _op(sg)
    for e in idempotents(sg):
        local = local_monoid(sg, e)
        for x in local:
            if not any(op[x][y] == e == op[y][x] for y in local):
                return False
    return True


@dataclass
class ClassificationReport:
    name: str
    size: int
    zero_one_free: bool
    zero_one_witness: tuple = None
    embedding: Embedding = None
    multiplicative_aperiodic: bool = True
    multiplicative_solvable: bool = True
    solvability_witness: tuple = None
    verdict: str = ""
    names: tuple = field(default=(), repr=False)

    def lines(self):
        n = self.names
        out = [
            ("semiring", self.name),
            ("size", str(self.size)),
            ("zero_one_free", str(self.zero_one_free).lower()),
        ]
        if self.zero_one_witness is not None:
            z, o = self.zero_one_witness
            out.append(("zero_one_witness", f"{n[z]} {n[o]}"))
        if self.embedding is not None:
            emb = self.embedding
            target = "B2" if emb.kind == "B2" else f"Z{emb.d}"
            out.append(("subsemiring", " ".join(n[x] for x in emb.elements)))
            out.append(("isomorphic_to", target))
        out.append(("multiplicative_aperiodic", str(self.multiplicative_aperiodic).lower()))
        out.append(("multiplicative_solvable", str(self.multiplicative_solvable).lower()))
        if self.solvability_witness is not None:
            group, perfect = self.solvability_witness
            out.append(("nonsolvable_group_identity", n[group.identity]))
            out.append(("nonsolvable_group_order", str(len(group))))
            out.append(("perfect_subgroup_order", str(len(perfect))))
        out.append(("verdict", self.verdict))
        return out

    def machine(self):
        return "\n".join(f"{k}: {v}" for k, v in self.lines())


def verdict_of(zero_one_free, solvable, aperiodic):
    if not zero_one_free or not solvable:
        return "P-complete"
    return "NL" if aperiodic else "DET"


def classify(sr):
    free, witness = is_zero_one_free(sr)
    mult = sr.multiplicative()
    aperiodic = is_aperiodic(mult)
    if aperiodic:
        solvable, why = True, None
    else:
        solvable, why = is_solvable(mult)
    return ClassificationReport(
        name=sr.name,
        size=len(sr),
        zero_one_free=free,
        zero_one_witness=witness,
        embedding=None if free else find_b2_or_zd(sr),
        multiplicative_aperiodic=aperiodic,
        multiplicative_solvable=solvable,
        solvability_witness=why,
        verdict=verdict_of(free, solvable, aperiodic),
        names=sr.elements,
    )

