"""Circuits over table-given algebras: representation, text format, normal form,
and the plain topological evaluator that every other evaluator is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property


class CircuitError(ValueError):
    pass


class CycleError(CircuitError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle through gates " + " -> ".join(self.cycle))


@dataclass(frozen=True)
class Const:
    value: object


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Copy:
    src: str


def term_refs(term):
    """Gate ids referenced by a right-hand side (in order, with repeats)."""
    if isinstance(term, str):
        return [term]
    if isinstance(term, Const):
        return []
    if isinstance(term, Copy):
        return [term.src]
    return term_refs(term.left) + term_refs(term.right)


def is_general(rhs):
    if isinstance(rhs, (Add, Mul)):
        return not (isinstance(rhs.left, str) and isinstance(rhs.right, str))
    return False


def term_has(term, kind):
    if isinstance(term, kind):
        return True
    if isinstance(term, (Add, Mul)):
        return term_has(term.left, kind) or term_has(term.right, kind)
    return False


class Circuit:
    """Gates in declaration order; ``output`` may be None."""

    def __init__(self, semiring, gates, output=None):
        self.semiring = semiring
        self.gates = dict(gates)
        self.output = output
        for gid, rhs in self.gates.items():
            for ref in term_refs(rhs):
                if ref not in self.gates:
                    raise CircuitError(f"gate {gid} refers to unknown gate {ref}")
        if output is not None and output not in self.gates:
            raise CircuitError(f"unknown output gate {output}")
        self.order  # noqa: B018  (detects cycles eagerly)

    def __len__(self):
        return len(self.gates)

    def __repr__(self):
        return f"Circuit({len(self)} gates, output={self.output!r})"

    @cached_property
    def order(self):
        """A topological order (inputs first), stable w.r.t. declaration order."""
        state = {}
        out = []
        for root in self.gates:
            if root in state:
                continue
            stack = [(root, iter(dict.fromkeys(term_refs(self.gates[root]))))]
            state[root] = 1
            path = [root]
            while stack:
                gid, it = stack[-1]
                child = next(it, None)
                if child is None:
                    stack.pop()
                    path.pop()
                    state[gid] = 2
                    out.append(gid)
                    continue
                mark = state.get(child)
                if mark == 1:
                    raise CycleError(path[path.index(child):] + [child])
                if mark is None:
                    state[child] = 1
                    path.append(child)
                    stack.append((child, iter(dict.fromkeys(term_refs(self.gates[child])))))
        return tuple(out)

    def children(self, gid):
        return term_refs(self.gates[gid])

    @cached_property
    def parents(self):
        par = {g: [] for g in self.gates}
        for g, rhs in self.gates.items():
            for ch in dict.fromkeys(term_refs(rhs)):
                par[ch].append(g)
        return par

    def is_normal(self):
        return all(
            isinstance(rhs, Const) or (isinstance(rhs, (Add, Mul)) and not is_general(rhs))
            for rhs in self.gates.values()
        )

    def below(self, gid):
        """All gates B with B <= gid (reflexive)."""
        seen = {gid}
        stack = [gid]
        while stack:
            for ch in term_refs(self.gates[stack.pop()]):
                if ch not in seen:
                    seen.add(ch)
                    stack.append(ch)
        return seen

    def cone(self, roots):
        seen = set()
        for r in roots:
            if r not in seen:
                seen |= self.below(r)
        return seen

    def restrict(self, keep, output=None):
        keep = set(keep)
        gates = {g: rhs for g, rhs in self.gates.items() if g in keep}
        return Circuit(self.semiring, gates, output if output is not None else
                       (self.output if self.output in keep else None))

    def replace(self, updates):
        gates = dict(self.gates)
        gates.update(updates)
        return Circuit(self.semiring, gates, self.output)


@dataclass
class EvalResult:
    values: dict
    output: object = None


def eval_term(sr, term, values):
    if isinstance(term, str):
        return values[term]
    if isinstance(term, Const):
        return term.value
    if isinstance(term, Copy):
        return values[term.src]
    a = eval_term(sr, term.left, values)
    b = eval_term(sr, term.right, values)
    return sr.plus(a, b) if isinstance(term, Add) else sr.times(a, b)


def eval_naive(c):
    """Evaluate every gate once along a topological order."""
    sr = c.semiring
    values = {}
    for g in c.order:
        values[g] = eval_term(sr, c.gates[g], values)
    return EvalResult(values, values[c.output] if c.output is not None else None)


def restrict_check(c, kind):
    """True iff the circuit has no gate of the kind excluded by ``kind``."""
    forbidden = {"additive": Mul, "multiplicative": Add}[kind]
    return not any(term_has(rhs, forbidden) for rhs in c.gates.values())


# -- normal form ------------------------------------------------------------

class FreshIds:
    def __init__(self, taken, prefix="$"):
        self.taken = set(taken)
        self.prefix = prefix
        self.k = 0

    def __call__(self):
        while True:
            self.k += 1
            gid = f"{self.prefix}{self.k}"
            if gid not in self.taken:
                self.taken.add(gid)
                return gid


def normalize(c):
    """Equivalent circuit with only const/add/mul right-hand sides over gate ids.

    Copy gates take over the right-hand side at the end of their copy chain;
    nested terms are split into fresh ``$k`` gates (one shared gate per
    distinct constant).
    """
    terminal = {}

    def resolve(gid):
        seen = []
        while isinstance(c.gates[gid], Copy):
            if gid in terminal:
                break
            seen.append(gid)
            gid = c.gates[gid].src
        end = terminal.get(gid, gid)
        for s in seen:
            terminal[s] = end
        return end

    fresh = FreshIds(c.gates)
    const_gate = {}
    extra = {}

    def ref(term):
        if isinstance(term, str):
            return term
        if isinstance(term, Const):
            if term.value not in const_gate:
                gid = fresh()
                extra[gid] = term
                const_gate[term.value] = gid
            return const_gate[term.value]
        gid = fresh()
        extra[gid] = type(term)(ref(term.left), ref(term.right))
        return gid

    gates = {}
    for gid in c.gates:
        rhs = c.gates[resolve(gid)]
        if isinstance(rhs, Const):
            gates[gid] = rhs
        else:
            gates[gid] = type(rhs)(ref(rhs.left), ref(rhs.right))
    gates.update(extra)
    # fresh gates may be declared after their users; Circuit sorts that out
    return Circuit(c.semiring, gates, c.output)


# -- text format ------------------------------------------------------------

def _lines(text):
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield num, line


def circuit_header(text):
    """The semiring name declared by a circuit file."""
    for _, line in _lines(text):
        parts = line.split()
        if len(parts) != 3 or parts[:2] != ["circuit", "over"]:
            raise CircuitError("expected 'circuit over <semiring>'")
        return parts[2]
    raise CircuitError("empty circuit file")


def parse_circuit(text, semiring):
    lines = list(_lines(text))
    if not lines:
        raise CircuitError("empty circuit file")
    circuit_header(text)
    gates, output = {}, None
    for num, line in lines[1:]:
        tok = line.split()
        if tok[0] == "output":
            if len(tok) != 2 or output is not None:
                raise CircuitError(f"line {num}: bad output declaration")
            output = tok[1]
            continue
        if tok[0] != "gate" or len(tok) < 4 or tok[2] != "=":
            raise CircuitError(f"line {num}: expected 'gate <id> = ...'")
        gid, kind, args = tok[1], tok[3], tok[4:]
        if gid in gates:
            raise CircuitError(f"line {num}: duplicate gate {gid}")
        arity = {"const": 1, "copy": 1, "add": 2, "mul": 2}.get(kind)
        if arity is None or len(args) != arity:
            raise CircuitError(f"line {num}: bad right-hand side {' '.join(tok[3:])!r}")
        if kind == "const":
            try:
                gates[gid] = Const(semiring.parse_element(args[0]))
            except ValueError as exc:
                raise CircuitError(f"line {num}: {exc}") from None
        elif kind == "copy":
            gates[gid] = Copy(args[0])
        elif kind == "add":
            gates[gid] = Add(*args)
        else:
            gates[gid] = Mul(*args)
    return Circuit(semiring, gates, output)


def serialize_circuit(c, name=None):
    sr = c.semiring
    out = [f"circuit over {name or sr.name}"]
    for gid, rhs in c.gates.items():
        if isinstance(rhs, Const):
            body = f"const {sr.format_element(rhs.value)}"
        elif isinstance(rhs, Copy):
            body = f"copy {rhs.src}"
        elif is_general(rhs):
            raise CircuitError(f"gate {gid} has a nested term; normalize first")
        else:
            body = f"{'add' if isinstance(rhs, Add) else 'mul'} {rhs.left} {rhs.right}"
        out.append(f"gate {gid} = {body}")
    if c.output is not None:
        out.append(f"output {c.output}")
    return "\n".join(out) + "\n"


# -- Boolean circuits and the two hardness demos ----------------------------

@dataclass
class BoolGate:
    op: str  # const / and / or / not
    args: tuple
    layer: int = None


class BooleanCircuit:
    def __init__(self, gates, output):
        self.gates = dict(gates)
        self.output = output
        for gid, g in self.gates.items():
            if g.op == "const":
                continue
            for a in g.args:
                if a not in self.gates:
                    raise CircuitError(f"gate {gid} refers to unknown gate {a}")
        if output not in self.gates:
            raise CircuitError(f"unknown output gate {output}")
        # reuse the cycle check of ordinary circuits
        shape = {gid: Copy(g.args[0]) if g.op == "not" else
                 Const(0) if g.op == "const" else Add(*g.args) for gid, g in self.gates.items()}
        self.order = Circuit(None, shape).order

    def evaluate(self):
        val = {}
        for gid in self.order:
            g = self.gates[gid]
            if g.op == "const":
                val[gid] = g.args[0]
            elif g.op == "not":
                val[gid] = 1 - val[g.args[0]]
            elif g.op == "and":
                val[gid] = val[g.args[0]] & val[g.args[1]]
            else:
                val[gid] = val[g.args[0]] | val[g.args[1]]
        return val


def parse_boolean(text):
    lines = list(_lines(text))
    if not lines or lines[0][1] != "boolean":
        raise CircuitError("expected 'boolean' header")
    gates, output = {}, None
    for num, line in lines[1:]:
        tok = line.split()
        if tok[0] == "output" and len(tok) == 2:
            output = tok[1]
            continue
        if tok[0] != "gate" or len(tok) < 4 or tok[2] != "=":
            raise CircuitError(f"line {num}: expected 'gate <id> = ...'")
        gid, body = tok[1], tok[3:]
        layer = None
        if len(body) >= 2 and body[-2] == "layer":
            layer = int(body[-1])
            body = body[:-2]
        op, args = body[0], tuple(body[1:])
        arity = {"const": 1, "not": 1, "and": 2, "or": 2}.get(op)
        if arity is None or len(args) != arity:
            raise CircuitError(f"line {num}: bad gate {' '.join(body)!r}")
        if op == "const":
            if args[0] not in ("0", "1"):
                raise CircuitError(f"line {num}: boolean constants are 0 and 1")
            args = (int(args[0]),)
        if gid in gates:
            raise CircuitError(f"line {num}: duplicate gate {gid}")
        gates[gid] = BoolGate(op, args, layer)
    if output is None:
        raise CircuitError("boolean circuit needs an output gate")
    return BooleanCircuit(gates, output)


def serialize_boolean(bc):
    out = ["boolean"]
    for gid, g in bc.gates.items():
        args = " ".join(str(a) for a in g.args)
        suffix = f" layer {g.layer}" if g.layer is not None else ""
        out.append(f"gate {gid} = {g.op} {args}{suffix}")
    out.append(f"output {bc.output}")
    return "\n".join(out) + "\n"


def reduce_boolean_cvp(bc, target):
    """Translate into a circuit over the ring Z_d: and -> ·, not x -> 1 + (d-1)x.

    ``target`` is the ring as a FiniteSemiring with elements named 0..d-1.
    Or-gates are rewritten as not(and(not, not)).
    """
    d = len(target)
    if d < 2:
        raise CircuitError("the target ring needs d >= 2")
    one, minus = target.index("1"), target.index(str(d - 1))
    zero = target.index("0")

    def neg(x):
        return Add(Const(one), Mul(Const(minus), x))

    gates = {}
    for gid, g in bc.gates.items():
        if g.op == "const":
            gates[gid] = Const(one if g.args[0] else zero)
        elif g.op == "and":
            gates[gid] = Mul(*g.args)
        elif g.op == "not":
            gates[gid] = neg(g.args[0])
        else:
            gates[gid] = neg(Mul(neg(g.args[0]), neg(g.args[1])))
    return normalize(Circuit(target, gates, bc.output))


class MaxPlus:
    """(N, max, +) with Python integers."""

    name = "maxplus"

    def plus(self, a, b):
        return max(a, b)

    def times(self, a, b):
        return a + b

    def parse_element(self, token):
        value = int(token)
        if value < 0:
            raise ValueError("max-plus constants are natural numbers")
        return value

    def format_element(self, x):
        return str(x)


def layered(bc):
    """A copy of bc whose wires all go from layer k to k + 1.

    Existing annotations are kept when they already form such a layering;
    otherwise layers are recomputed as longest-path depth and long wires
    get chains of copy-through gates x ∧ x.  Only the output cone is kept
    and the output ends up alone on the top layer.
    """
    keep = {bc.output}
    stack = [bc.output]
    while stack:
        g = bc.gates[stack.pop()]
        if g.op != "const":
            for a in g.args:
                if a not in keep:
                    keep.add(a)
                    stack.append(a)
    for gid in keep:
        if bc.gates[gid].op == "not":
            raise CircuitError("the max-plus reduction needs a monotone circuit (no not-gates)")
    order = [g for g in bc.order if g in keep]
    given = {g: bc.gates[g].layer for g in order}
    if all(v is not None for v in given.values()) and all(
        (bc.gates[g].op == "const" and given[g] == 1)
        or (bc.gates[g].op != "const" and all(given[a] == given[g] - 1 for a in bc.gates[g].args))
        for g in order
    ) and all(given[g] < given[bc.output] for g in order if g != bc.output):
        return BooleanCircuit({g: bc.gates[g] for g in order}, bc.output)
    depth = {}
    for g in order:
        gate = bc.gates[g]
        depth[g] = 1 if gate.op == "const" else 1 + max(depth[a] for a in gate.args)
    top = depth[bc.output]
    fresh = FreshIds(bc.gates, prefix="$c")
    relay = {}

    def lift(src, level):
        """Gate carrying src's value on the given level."""
        if depth[src] == level:
            return src
        key = (src, level)
        if key not in relay:
            below = lift(src, level - 1)
            gid = fresh()
            gates[gid] = BoolGate("and", (below, below), level)
            relay[key] = gid
        return relay[key]

    gates = {}
    for g in order:
        gate = bc.gates[g]
        level = top if g == bc.output else depth[g]
        if gate.op == "const":
            gates[g] = BoolGate("const", gate.args, 1)
        else:
            gates[g] = BoolGate(gate.op, tuple(lift(a, level - 1) for a in gate.args), level)
    return BooleanCircuit(gates, bc.output)


def reduce_cvp_maxplus(bc):
    """Layered monotone Boolean circuit -> circuit over (N, max, +).

    A gate on layer k evaluates to 2^k - 1 when false and 2^k when true.
    Returns (circuit, number of layers).
    """
    lc = layered(bc)
    gates = {}
    for gid, g in lc.gates.items():
        if g.op == "const":
            gates[gid] = Const(2 if g.args[0] else 1)
            continue
        k = g.layer - 1
        b, c = g.args
        if g.op == "and":
            gates[gid] = Add(Mul(b, c), Const(2 ** (k + 1) - 1))
        else:
            gates[gid] = Mul(Add(b, c), Const(2 ** k))
    n = lc.gates[lc.output].layer
    return normalize(Circuit(MaxPlus(), gates, lc.output)), n
