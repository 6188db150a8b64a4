"""Regular languages through their syntactic monoid, the ~F quotient of P(M),
and intersection non-emptiness for grammars that come with a uniformizing SLP.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .algebra import FiniteSemigroup, FiniteSemiring
from .circuit import Add, Circuit, Const, Copy, Mul, normalize
from .powerset import build_power, mask_of, members, subset_name

QUOTIENT_CAP = 10
EPS = "_"


class LanguageError(ValueError):
    pass


# -- automata ---------------------------------------------------------------

@dataclass
class Dfa:
    alphabet: tuple
    states: tuple
    initial: str
    finals: frozenset
    delta: dict  # (state, letter) -> state

    def step(self, q, a):
        return self.delta[(q, a)]

    def run(self, word, start=None):
        q = self.initial if start is None else start
        for a in word:
            q = self.delta[(q, a)]
        return q

    def accepts(self, word):
        return self.run(word) in self.finals


def _content(text):
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield num, line.split()


def parse_dfa(text):
    lines = list(_content(text))
    if not lines or lines[0][1] != ["dfa"]:
        raise LanguageError("expected 'dfa' header")
    alphabet = states = initial = None
    finals, delta = [], {}
    for num, tok in lines[1:]:
        key, rest = tok[0], tok[1:]
        if key == "alphabet":
            alphabet = tuple(rest)
        elif key == "states":
            states = tuple(rest)
        elif key == "initial" and len(rest) == 1:
            initial = rest[0]
        elif key == "final":
            finals.extend(rest)
        elif key == "trans" and len(rest) == 3:
            p, a, q = rest
            if (p, a) in delta:
                raise LanguageError(f"line {num}: second transition for ({p}, {a})")
            delta[(p, a)] = q
        else:
            raise LanguageError(f"line {num}: cannot read {' '.join(tok)!r}")
    if not alphabet:
        raise LanguageError("empty alphabet")
    if not states or initial is None:
        raise LanguageError("states and initial state are required")
    known = set(states)
    for q in [initial, *finals]:
        if q not in known:
            raise LanguageError(f"unknown state {q}")
    for (p, a), q in delta.items():
        if p not in known or q not in known:
            raise LanguageError(f"transition ({p}, {a}, {q}) uses an unknown state")
        if a not in alphabet:
            raise LanguageError(f"transition ({p}, {a}, {q}) uses an unknown letter")
    for p in states:
        for a in alphabet:
            if (p, a) not in delta:
                raise LanguageError(f"no transition for ({p}, {a})")
    return Dfa(alphabet, states, initial, frozenset(finals), delta)


def serialize_dfa(d):
    out = ["dfa", "alphabet " + " ".join(d.alphabet), "states " + " ".join(d.states),
           f"initial {d.initial}"]
    if d.finals:
        out.append("final " + " ".join(q for q in d.states if q in d.finals))
    for p in d.states:
        for a in d.alphabet:
            out.append(f"trans {p} {a} {d.delta[(p, a)]}")
    return "\n".join(out) + "\n"


def minimize(d):
    """Reachable part, then Moore refinement; states named after the first
    reachable state of each block."""
    reach, queue = [d.initial], deque([d.initial])
    seen = {d.initial}
    while queue:
        p = queue.popleft()
        for a in d.alphabet:
            q = d.delta[(p, a)]
            if q not in seen:
                seen.add(q)
                reach.append(q)
                queue.append(q)
    block = {q: int(q in d.finals) for q in reach}
    while True:
        sig = {q: (block[q],) + tuple(block[d.delta[(q, a)]] for a in d.alphabet) for q in reach}
        ids = {}
        new = {q: ids.setdefault(sig[q], len(ids)) for q in reach}
        if len(ids) == len(set(block.values())):
            break
        block = new
    rep = {}
    for q in reach:
        rep.setdefault(block[q], q)
    states = tuple(rep[block[q]] for q in reach if rep[block[q]] == q)
    delta = {(rep[block[q]], a): rep[block[d.delta[(q, a)]]] for q in states for a in d.alphabet}
    finals = frozenset(q for q in states if q in d.finals)
    return Dfa(d.alphabet, states, d.initial, finals, delta)


# -- syntactic monoid -------------------------------------------------------

@dataclass
class RecognizedLanguage:
    monoid: FiniteSemigroup
    identity: int
    h: dict  # letter -> element
    accepting: frozenset
    words: dict  # element -> shortest word (tuple of letters)
    dfa: Dfa

    def image(self, word):
        m = self.identity
        for a in word:
            m = self.monoid.op[m][self.h[a]]
        return m

    def accepts(self, word):
        return self.image(word) in self.accepting


def syntactic_monoid(d):
    """Transition monoid of the minimal automaton; elements in BFS order of
    their shortest words (alphabet order breaks ties), identity first."""
    if not d.alphabet:
        raise LanguageError("empty alphabet")
    md = minimize(d)
    index = {q: i for i, q in enumerate(md.states)}
    act = {a: tuple(index[md.delta[(q, a)]] for q in md.states) for a in md.alphabet}
    ident = tuple(range(len(md.states)))
    funcs, words = [ident], {ident: ()}
    queue = deque([ident])
    while queue:
        f = queue.popleft()
        for a in sorted(md.alphabet):
            g = tuple(act[a][x] for x in f)
            if g not in words:
                words[g] = words[f] + (a,)
                funcs.append(g)
                queue.append(g)
    pos = {f: i for i, f in enumerate(funcs)}
    # f·g: first f, then g
    op = [[pos[tuple(g[x] for x in f)] for g in funcs] for f in funcs]
    names = ["".join(words[f]) or "ε" for f in funcs]
    monoid = FiniteSemigroup("M", names, op, check=False)
    start = index[md.initial]
    finals = {index[q] for q in md.finals}
    accepting = frozenset(pos[f] for f in funcs if f[start] in finals)
    h = {a: pos[act[a]] for a in md.alphabet}
    return RecognizedLanguage(monoid, 0, h, accepting, {pos[f]: words[f] for f in funcs}, d)


# -- the ~F congruence ------------------------------------------------------

@dataclass
class FCongruence:
    power: FiniteSemiring  # P(M)
    class_of: np.ndarray  # element of P(M) -> class index
    largest: list  # class -> element of P(M) (the union of the class)
    quotient: FiniteSemiring
    profiles: list


def singleton_profiles(rl):
    op = rl.monoid.op
    n = len(op)
    prof = []
    for m in range(n):
        bits = 0
        for l in range(n):
            lm = op[l][m]
            for r in range(n):
                if op[lm][r] in rl.accepting:
                    bits |= 1 << (l * n + r)
        prof.append(bits)
    return prof


def f_congruence(rl, cap=QUOTIENT_CAP):
    n = len(rl.monoid)
    if n > cap:
        raise LanguageError(f"monoid has {n} elements, above the cap {cap} for the quotient")
    power = build_power(rl.monoid, cap=cap, name="P(M)")
    single = singleton_profiles(rl)
    size = len(power)
    profile = []
    for x in range(size):
        bits = 0
        for m in members(mask_of(x)):
            bits |= single[m]
        profile.append(bits)
    ids, largest_mask = {}, []
    class_of = np.zeros(size, dtype=np.int64)
    for x in range(size):
        key = profile[x]
        if key not in ids:
            ids[key] = len(ids)
            largest_mask.append(0)
        cid = ids[key]
        class_of[x] = cid
        largest_mask[cid] |= mask_of(x)
    largest = [mask - 1 for mask in largest_mask]
    k = len(largest)
    add = [[int(class_of[power.add[largest[i]][largest[j]]]) for j in range(k)] for i in range(k)]
    mul = [[int(class_of[power.mul[largest[i]][largest[j]]]) for j in range(k)] for i in range(k)]
    names = [power.elements[x] for x in largest]
    quotient = FiniteSemiring("P(M)/~F", names, add, mul, check=False)
    cong = FCongruence(power, class_of, largest, quotient, profile)
    if not well_defined(cong):
        raise AssertionError("~F is not compatible with the operations")
    return cong


def well_defined(cong):
    """Every choice of representatives gives the same class for sums and products."""
    cls = cong.class_of
    qa = np.asarray(cong.quotient.add)
    qm = np.asarray(cong.quotient.mul)
    pa, pm = cong.power.add_table, cong.power.mul_table
    return bool(np.array_equal(cls[pa], qa[cls[:, None], cls[None, :]])
                and np.array_equal(cls[pm], qm[cls[:, None], cls[None, :]]))


def implication_holds(rl):
    """st ∈ F implies s·e·t ∈ F for every idempotent e."""
    op = rl.monoid.op
    n = len(op)
    idem = [e for e in range(n) if op[e][e] == e]
    for s in range(n):
        for t in range(n):
            if op[s][t] in rl.accepting:
                for e in idem:
                    if op[op[s][e]][t] not in rl.accepting:
                        return False
    return True


def check_quotient_freeness(rl, cap=QUOTIENT_CAP):
    """(route a, route b); route b is None when the quotient is above the cap."""
    from .classify import is_zero_one_free

    a = implication_holds(rl)
    if len(rl.monoid) > cap:
        return a, None
    b, _ = is_zero_one_free(f_congruence(rl, cap).quotient)
    return a, b


def pcfg_verdict(d, cap=QUOTIENT_CAP):
    from .classify import classify, is_solvable, verdict_of

    rl = syntactic_monoid(d)
    free = implication_holds(rl)
    solvable, _ = is_solvable(rl.monoid)
    report = {"monoid_size": len(rl.monoid), "quotient_zero_one_free": free,
              "monoid_solvable": solvable}
    if not free or not solvable:
        # M sits inside the quotient via m -> [{m}], so a non-solvable group survives
        report["verdict"] = "P-complete"
        return report
    if len(rl.monoid) > cap:
        report["verdict"] = None
        report["note"] = f"monoid above cap {cap}; quotient not built"
        return report
    q = classify(f_congruence(rl, cap).quotient)
    if q.zero_one_free != free:
        raise AssertionError("the two freeness routes disagree")
    report["quotient_size"] = q.size
    report["quotient_aperiodic"] = q.multiplicative_aperiodic
    report["quotient_solvable"] = q.multiplicative_solvable
    report["verdict"] = verdict_of(q.zero_one_free, q.multiplicative_solvable, q.multiplicative_aperiodic)
    return report


# -- grammars ---------------------------------------------------------------

@dataclass
class Grammar:
    start: str
    nonterminals: tuple
    terminals: tuple
    productions: list  # (lhs, rhs tuple)
    marked: dict = field(default_factory=dict)  # lhs -> production index

    def rules_for(self, a):
        return [p for p in self.productions if p[0] == a]

    def has_slp(self):
        return set(self.marked) == set(self.nonterminals)


def parse_grammar(text, require_slp=True):
    lines = list(_content(text))
    if not lines or lines[0][1] != ["grammar"]:
        raise LanguageError("expected 'grammar' header")
    start, alphabet, prods, marks = None, None, [], {}
    for num, tok in lines[1:]:
        if tok[0] == "start" and len(tok) == 2:
            start = tok[1]
            continue
        if tok[0] == "alphabet":
            alphabet = tuple(tok[1:])
            continue
        if len(tok) < 3 or tok[1] != "->":
            raise LanguageError(f"line {num}: expected 'A -> ...'")
        lhs, rhs = tok[0], tok[2:]
        marked = lhs.startswith("!")
        lhs = lhs.lstrip("!")
        if rhs == [EPS]:
            rhs = []
        elif EPS in rhs:
            raise LanguageError(f"line {num}: '{EPS}' must stand alone")
        if marked:
            if lhs in marks:
                raise LanguageError(f"line {num}: second marked production for {lhs}")
            marks[lhs] = len(prods)
        prods.append((lhs, tuple(rhs)))
    if start is None:
        raise LanguageError("missing 'start' line")
    nts = tuple(dict.fromkeys(p[0] for p in prods))
    if start not in nts:
        raise LanguageError(f"start symbol {start} has no productions")
    used = tuple(dict.fromkeys(s for _, rhs in prods for s in rhs if s not in nts))
    if alphabet is not None:
        for s in used:
            if s not in alphabet:
                raise LanguageError(f"unknown symbol {s}")
    terminals = alphabet if alphabet is not None else tuple(sorted(used))
    g = Grammar(start, nts, terminals, prods, marks)
    if require_slp:
        check_slp(g)
    return g


def check_slp(g):
    missing = [a for a in g.nonterminals if a not in g.marked]
    if missing:
        raise LanguageError(f"no marked production for {missing[0]}")
    state = {}
    for root in g.nonterminals:
        if root in state:
            continue
        path = []
        stack = [(root, iter(_nt_refs(g, root)))]
        state[root] = 1
        path.append(root)
        while stack:
            a, it = stack[-1]
            b = next(it, None)
            if b is None:
                stack.pop()
                path.pop()
                state[a] = 2
            elif state.get(b) == 1:
                cycle = path[path.index(b):] + [b]
                raise LanguageError("marked productions form a cycle: " + " -> ".join(cycle))
            elif b not in state:
                state[b] = 1
                path.append(b)
                stack.append((b, iter(_nt_refs(g, b))))
    return True


def _nt_refs(g, a):
    nts = set(g.nonterminals)
    return [s for s in g.productions[g.marked[a]][1] if s in nts]


def slp_order(g):
    order, done = [], set()

    def visit(a):
        if a in done:
            return
        for b in _nt_refs(g, a):
            visit(b)
        done.add(a)
        order.append(a)

    for a in g.nonterminals:
        visit(a)
    return order


def serialize_grammar(g):
    out = ["grammar", f"start {g.start}", "alphabet " + " ".join(g.terminals)]
    for i, (lhs, rhs) in enumerate(g.productions):
        mark = "!" if g.marked.get(lhs) == i else ""
        out.append(f"{mark}{lhs} -> {' '.join(rhs) if rhs else EPS}")
    return "\n".join(out) + "\n"


def slp_images(g, rl):
    """h(val_H(A)) for every nonterminal, composed along the marked productions."""
    op = rl.monoid.op
    nts = set(g.nonterminals)
    img = {}
    for a in slp_order(g):
        m = rl.identity
        for s in g.productions[g.marked[a]][1]:
            m = op[m][img[s] if s in nts else _letter(rl, s)]
        img[a] = m
    return img


def slp_image(g, rl, a):
    return slp_images(g, rl)[a]


def slp_word(g, a, limit=10_000):
    """val_H(A) spelled out, or None when longer than ``limit``."""
    nts = set(g.nonterminals)
    lengths = {}
    for x in slp_order(g):
        lengths[x] = sum(lengths[s] if s in nts else 1 for s in g.productions[g.marked[x]][1])
    if lengths[a] > limit:
        return None
    memo = {}
    for x in slp_order(g):
        w = []
        for s in g.productions[g.marked[x]][1]:
            w.extend(memo[s] if s in nts else [s])
        memo[x] = tuple(w)
    return memo[a]


def _letter(rl, s):
    if s not in rl.h:
        raise LanguageError(f"letter {s} is not in the automaton's alphabet")
    return rl.h[s]


@dataclass
class GrammarAnalysis:
    seeds: dict
    fixpoint: dict
    nonempty: bool
    growth_events: int
    witness: tuple = None


def _set_product(op, left, right, trace=None):
    out = {}
    for x, wx in left.items():
        for y in right:
            z = op[x][y]
            if z not in out:
                out[z] = None if trace is None else wx + (y,)
    return out


def intersect(g, d, witness=False, rl=None):
    """Least fixpoint of the production operator started from the SLP seeds."""
    rl = rl or syntactic_monoid(d)
    op = rl.monoid.op
    nts = set(g.nonterminals)
    seeds = slp_images(g, rl)
    X = {a: {seeds[a]} for a in g.nonterminals}
    how = {(a, seeds[a]): ("slp",) for a in g.nonterminals}
    users = {a: [] for a in g.nonterminals}
    for i, (lhs, rhs) in enumerate(g.productions):
        for s in set(rhs):
            if s in nts:
                users[s].append(i)
    queue = deque(range(len(g.productions)))
    queued = set(queue)
    events = 0
    bound = len(g.nonterminals) * len(op)
    while queue:
        i = queue.popleft()
        queued.discard(i)
        lhs, rhs = g.productions[i]
        # partial products keep, per element, the child elements used
        acc = {rl.identity: ()}
        for s in rhs:
            right = X[s] if s in nts else {_letter(rl, s)}
            acc = _set_product(op, acc, right, trace=True)
            if not acc:
                break
        fresh = [m for m in acc if m not in X[lhs]]
        if not fresh:
            continue
        for m in fresh:
            X[lhs].add(m)
            how[(lhs, m)] = ("rule", i, acc[m])
            events += 1
        if events > bound:
            raise AssertionError("fixpoint iteration exceeded |V|·|M| growth events")
        for j in users[lhs]:
            if j not in queued:
                queued.add(j)
                queue.append(j)
    hit = sorted(X[g.start] & rl.accepting)
    wit = None
    if witness and hit:
        wit = _rebuild(g, rl, how, g.start, hit[0])
    return GrammarAnalysis({a: frozenset([seeds[a]]) for a in seeds},
                           {a: frozenset(v) for a, v in X.items()}, bool(hit), events, wit)


def _rebuild(g, rl, how, a, m, limit=10_000):
    nts = set(g.nonterminals)
    out = []
    stack = [(a, m)]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            if len(out) > limit:
                return None
            continue
        x, val = item
        rec = how[(x, val)]
        if rec[0] == "slp":
            w = slp_word(g, x, limit)
            if w is None:
                return None
            out.extend(w)
            continue
        _, i, chosen = rec
        parts = []
        for s, v in zip(g.productions[i][1], chosen):
            parts.append((s, v) if s in nts else s)
        stack.extend(reversed(parts))
    return tuple(out)


def fixpoint_from_empty(g, rl):
    """The plain Kleene iteration Y(0) = ∅, Y(n+1) = μ(Y(n))."""
    op = rl.monoid.op
    nts = set(g.nonterminals)
    Y = {a: set() for a in g.nonterminals}
    while True:
        nxt = {a: set(v) for a, v in Y.items()}
        for lhs, rhs in g.productions:
            acc = {rl.identity: None}
            for s in rhs:
                right = Y[s] if s in nts else {_letter(rl, s)}
                acc = _set_product(op, acc, right)
            nxt[lhs] |= set(acc)
        if nxt == Y:
            return {a: frozenset(v) for a, v in Y.items()}
        Y = nxt


def product_oracle(g, d):
    """Per nonterminal, the relation {(p, q) : some derived word leads p to q}
    on the given automaton; decides emptiness of L(G) ∩ L(d)."""
    states = d.states
    idx = {q: i for i, q in enumerate(states)}
    n = len(states)
    eye = np.eye(n, dtype=bool)
    letter = {}
    for a in d.alphabet:
        m = np.zeros((n, n), dtype=bool)
        for q in states:
            m[idx[q], idx[d.delta[(q, a)]]] = True
        letter[a] = m
    nts = set(g.nonterminals)
    rel = {a: np.zeros((n, n), dtype=bool) for a in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            acc = eye
            for s in rhs:
                if s in nts:
                    right = rel[s]
                elif s in letter:
                    right = letter[s]
                else:
                    raise LanguageError(f"letter {s} is not in the automaton's alphabet")
                acc = (acc.astype(np.int64) @ right.astype(np.int64)) > 0
            new = rel[lhs] | acc
            if not np.array_equal(new, rel[lhs]):
                rel[lhs] = new
                changed = True
    start = idx[d.initial]
    finals = [idx[q] for q in d.finals]
    nonempty = bool(rel[g.start][start, finals].any()) if finals else False
    return nonempty, rel


def short_words(g, max_len=8):
    """All words of length <= max_len derivable from each nonterminal."""
    nts = set(g.nonterminals)
    W = {a: set() for a in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            acc = {()}
            for s in rhs:
                right = W[s] if s in nts else {(s,)}
                acc = {u + v for u in acc for v in right if len(u) + len(v) <= max_len}
                if not acc:
                    break
            if not acc <= W[lhs]:
                W[lhs] |= acc
                changed = True
    return W


def brute_force_nonempty(g, d, max_len=8):
    return any(d.accepts(w) for w in short_words(g, max_len)[g.start])


def pad_grammar(g, letters):
    """Terminals replaced by a fresh X with X -> ε | aX; L(G') is ∅ or Σ*."""
    x = "X"
    while x in g.nonterminals or x in letters:
        x += "'"
    nts = set(g.nonterminals)
    prods = [(lhs, tuple(s if s in nts else x for s in rhs)) for lhs, rhs in g.productions]
    marked = dict(g.marked)
    marked[x] = len(prods)
    prods.append((x, ()))
    prods.extend((x, (a, x)) for a in letters)
    return Grammar(g.start, g.nonterminals + (x,), tuple(letters), prods, marked)


# -- grammars <-> circuits over P(M) ----------------------------------------

def power_of(rl, cap=QUOTIENT_CAP):
    return build_power(rl.monoid, cap=cap, name="P(M)")


def circuit_to_grammar(c, rl):
    """Gate A evaluates to h(L(A)); nonterminals are the gate ids prefixed with 'G_'."""
    if not c.is_normal():
        c = normalize(c)
    name = {g: f"G_{g}" for g in c.gates}
    prods, marked = [], {}
    for g in c.order:
        rhs = c.gates[g]
        a = name[g]
        if isinstance(rhs, Const):
            first = len(prods)
            for m in members(mask_of(rhs.value)):
                if m not in rl.words:
                    raise AssertionError("monoid element without a preimage word")
                prods.append((a, rl.words[m]))
            marked[a] = first
        elif isinstance(rhs, Add):
            marked[a] = len(prods)
            prods.append((a, (name[rhs.left],)))
            prods.append((a, (name[rhs.right],)))
        else:
            marked[a] = len(prods)
            prods.append((a, (name[rhs.left], name[rhs.right])))
    start = name[c.output]
    nts = tuple(name[g] for g in c.order)
    return Grammar(start, nts, tuple(rl.dfa.alphabet), prods, marked)


def grammar_to_circuit(g, rl, rounds=None, cap=QUOTIENT_CAP):
    """Circuit over P(M) unrolling the iteration from the SLP seeds for
    |V|·|M| rounds; its output is h(L(G))."""
    sr = power_of(rl, cap)
    op_len = len(rl.monoid)
    nts = set(g.nonterminals)
    rounds = len(g.nonterminals) * op_len if rounds is None else rounds
    single = {m: (1 << m) - 1 for m in range(op_len)}  # element of P(M) for {m}
    gates = {}

    def chain(parts):
        acc = parts[0]
        for p in parts[1:]:
            acc = Mul(acc, p)
        return acc

    def letter_const(s):
        return Const(single[_letter(rl, s)])

    for a in slp_order(g):
        rhs = g.productions[g.marked[a]][1]
        parts = [f"{b}@0" if b in nts else letter_const(b) for b in rhs]
        rhs0 = chain(parts) if parts else Const(single[rl.identity])
        gates[f"{a}@0"] = Copy(rhs0) if isinstance(rhs0, str) else rhs0
    for k in range(1, rounds + 1):
        for a in g.nonterminals:
            acc = f"{a}@{k - 1}"
            for lhs, rhs in g.rules_for(a):
                parts = [f"{b}@{k - 1}" if b in nts else letter_const(b) for b in rhs]
                term = chain(parts) if parts else Const(single[rl.identity])
                acc = Add(acc, term)
            gates[f"{a}@{k}"] = Copy(acc) if isinstance(acc, str) else acc
    out = f"{g.start}@{rounds}"
    c = normalize(Circuit(sr, gates, out))
    return c.restrict(c.below(out), out)


def power_value_set(sr, x):
    return frozenset(members(mask_of(x)))


def language_image_by_enumeration(g, rl, max_len=8):
    """h of all derivable words up to a length, per nonterminal."""
    return {a: frozenset(rl.image(w) for w in ws) for a, ws in short_words(g, max_len).items()}
