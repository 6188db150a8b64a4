"""Finite semigroups and semirings given by operation tables.

Elements are referred to by their index in ``elements``; names only matter
when reading or writing files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np


class TableError(ValueError):
    """Raised for malformed tables or files."""


class AxiomError(ValueError):
    """Raised when tables are well-formed but violate an axiom."""

    def __init__(self, report):
        self.report = report
        super().__init__(report.describe())


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def describe(self, elements=None):
        if elements is None:
            names = self.witness
        else:
            names = tuple(elements[i] for i in self.witness)
        return f"{self.axiom} fails at {names}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    elements: tuple = ()

    @property
    def ok(self):
        return not self.violations

    def describe(self):
        if self.ok:
            return "ok"
        return "; ".join(v.describe(self.elements) for v in self.violations)


def _as_table(rows, n, label):
    try:
        table = np.asarray(rows, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise TableError(f"{label} table is not rectangular") from exc
    if table.shape != (n, n):
        raise TableError(f"{label} table has shape {table.shape}, expected {(n, n)}")
    if n and (table.min() < 0 or table.max() >= n):
        raise TableError(f"{label} table refers to an element outside 0..{n - 1}")
    return table


def _first(mask):
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return tuple(int(i) for i in hits[0])


def associativity_witness(table):
    """First triple (a, b, c) with (ab)c != a(bc), or None."""
    n = len(table)
    idx = np.arange(n)
    left = table[table[:, :, None], idx[None, None, :]]
    right = table[idx[:, None, None], table[None, :, :]]
    return _first(left != right)


def commutativity_witness(table):
    return _first(table != table.T)


def validate_semigroup(op):
    table = _as_table(op, len(op), "op")
    report = ValidationReport()
    w = associativity_witness(table)
    if w is not None:
        report.violations.append(Violation("associativity", w))
    return report


def validate_semiring(add, mul, elements=None):
    """Check every semiring axiom exhaustively.

    Returns a report listing each violated axiom with the lexicographically
    least witness.  Malformed tables raise :class:`TableError`.
    """
    n = len(add)
    if n == 0:
        raise TableError("a semiring needs at least one element")
    if elements is not None and len(elements) != n:
        raise TableError("element list and table size disagree")
    A = _as_table(add, n, "add")
    M = _as_table(mul, n, "mul")
    report = ValidationReport(elements=tuple(elements) if elements is not None else ())
    w = associativity_witness(A)
    if w is not None:
        report.violations.append(Violation("additive associativity", w))
    w = commutativity_witness(A)
    if w is not None:
        report.violations.append(Violation("additive commutativity", w))
    w = associativity_witness(M)
    if w is not None:
        report.violations.append(Violation("multiplicative associativity", w))
    idx = np.arange(n)
    # a(b+c) == ab + ac, indexed [a, b, c]
    lhs = M[idx[:, None, None], A[None, :, :]]
    rhs = A[M[:, :, None], M[:, None, :]]
    w = _first(lhs != rhs)
    if w is not None:
        report.violations.append(Violation("left distributivity", w))
    # (b+c)a == ba + ca, indexed [a, b, c]
    lhs = M[A[None, :, :], idx[:, None, None]]
    rhs = A[M.T[:, :, None], M.T[:, None, :]]
    w = _first(lhs != rhs)
    if w is not None:
        report.violations.append(Violation("right distributivity", w))
    return report


def _freeze(table):
    return tuple(tuple(int(v) for v in row) for row in table)


class FiniteSemigroup:
    def __init__(self, name, elements, op, check=True):
        self.name = name
        self.elements = tuple(elements)
        n = len(self.elements)
        if n == 0:
            raise TableError("a semigroup needs at least one element")
        if len(set(self.elements)) != n:
            raise TableError("duplicate element names")
        _as_table(op, n, "op")
        self.op = _freeze(op)
        if check:
            report = validate_semigroup(self.op)
            report.elements = self.elements
            if not report.ok:
                raise AxiomError(report)
        self._index = {e: i for i, e in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FiniteSemigroup({self.name!r}, n={len(self)})"

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise TableError(f"unknown element {name!r} in {self.name}") from None

    def times(self, a, b):
        return self.op[a][b]

    def product(self, xs):
        it = iter(xs)
        acc = next(it)
        for x in it:
            acc = self.op[acc][x]
        return acc

    def power(self, x, k):
        acc = x
        for _ in range(k - 1):
            acc = self.op[acc][x]
        return acc

    @cached_property
    def table(self):
        return np.asarray(self.op, dtype=np.int64)

    def is_commutative(self):
        return commutativity_witness(self.table) is None

    def identity(self):
        n = len(self)
        for e in range(n):
            if all(self.op[e][x] == x == self.op[x][e] for x in range(n)):
                return e
        return None


class FiniteSemiring:
    def __init__(self, name, elements, add, mul, check=True):
        self.name = name
        self.elements = tuple(elements)
        n = len(self.elements)
        if n == 0:
            raise TableError("a semiring needs at least one element")
        if len(set(self.elements)) != n:
            raise TableError("duplicate element names")
        if check:
            report = validate_semiring(add, mul, self.elements)
            if not report.ok:
                raise AxiomError(report)
        else:
            _as_table(add, n, "add")
            _as_table(mul, n, "mul")
        self.add = _freeze(add)
        self.mul = _freeze(mul)
        self._index = {e: i for i, e in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FiniteSemiring({self.name!r}, n={len(self)})"

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise TableError(f"unknown element {name!r} in {self.name}") from None

    def name_of(self, x):
        return self.elements[x]

    # generic algebra protocol used by circuits
    def plus(self, a, b):
        return self.add[a][b]

    def times(self, a, b):
        return self.mul[a][b]

    def parse_element(self, token):
        return self.index(token)

    def format_element(self, x):
        return self.elements[x]

    def total(self, xs):
        it = iter(xs)
        acc = next(it)
        for x in it:
            acc = self.add[acc][x]
        return acc

    def product(self, xs):
        it = iter(xs)
        acc = next(it)
        for x in it:
            acc = self.mul[acc][x]
        return acc

    def scalar(self, m, x):
        """m·x = x + ... + x (m >= 1 copies), by doubling."""
        if m < 1:
            raise ValueError("scalar multiple needs m >= 1")
        result = None
        base = x
        while m:
            if m & 1:
                result = base if result is None else self.add[result][base]
            m >>= 1
            if m:
                base = self.add[base][base]
        return result

    def power(self, x, k):
        acc = x
        for _ in range(k - 1):
            acc = self.mul[acc][x]
        return acc

    def additive(self):
        return FiniteSemigroup(f"{self.name}+", self.elements, self.add, check=False)

    def multiplicative(self):
        return FiniteSemigroup(f"{self.name}*", self.elements, self.mul, check=False)

    @cached_property
    def add_table(self):
        return np.asarray(self.add, dtype=np.int64)

    @cached_property
    def mul_table(self):
        return np.asarray(self.mul, dtype=np.int64)

    @cached_property
    def idempotents(self):
        return frozenset(x for x in range(len(self)) if self.mul[x][x] == x)

    def additive_zero(self):
        n = len(self)
        for z in range(n):
            if all(self.add[z][x] == x for x in range(n)):
                return z
        return None

    def is_commutative(self):
        return commutativity_witness(self.mul_table) is None


def idempotents(sg):
    """Elements e with ee = e (multiplicative ones, for a semiring)."""
    op = sg.op if isinstance(sg, FiniteSemigroup) else sg.mul
    return frozenset(x for x in range(len(op)) if op[x][x] == x)


def _index_and_period(step, start, first_exponent):
    """Index/period of the sequence start, step(start), ... labelled from first_exponent."""
    seen = {}
    value, k = start, first_exponent
    while value not in seen:
        seen[value] = k
        value = step(value)
        k += 1
    i = seen[value]
    return i, k - i


@dataclass(frozen=True)
class StabilityProfile:
    add_index: tuple
    add_period: tuple
    mul_index: tuple
    mul_period: tuple
    omega: int
    threshold: int
    period: int
    exponent: int

    def coefficients(self):
        """The coefficient semiring used for truncated free-semiring values.

        Threshold is raised to at least 1 so that a zero coefficient never
        coincides with a non-zero one.
        """
        return CoefficientSemiring(max(self.threshold, 1), self.period)


def _smallest_multiple_at_least(base, bound):
    if bound <= base:
        return base
    return base * -(-bound // base)


def stability(sr):
    """Per-element index/period data for m ↦ m·x and m ↦ x^m.

    The additive sequence starts at 0·x, read as the additive identity when
    the semiring has one and as a fresh element otherwise.
    """
    n = len(sr)
    zero = sr.additive_zero()
    add_index, add_period, mul_index, mul_period = [], [], [], []
    for x in range(n):
        i, p = _index_and_period(lambda v, x=x: sr.mul[v][x], x, 1)
        mul_index.append(i)
        mul_period.append(p)
        if zero is None:
            i, p = _index_and_period(lambda v, x=x: sr.add[v][x], x, 1)
        else:
            i, p = _index_and_period(lambda v, x=x: sr.add[v][x], zero, 0)
        add_index.append(i)
        add_period.append(p)
    omega = _smallest_multiple_at_least(math.lcm(*mul_period), max(mul_index))
    threshold = max(add_index)
    period = math.lcm(*add_period)
    base = math.lcm(omega, period)
    exponent = _smallest_multiple_at_least(base, max(max(mul_index), threshold, 1))
    return StabilityProfile(
        tuple(add_index), tuple(add_period), tuple(mul_index), tuple(mul_period),
        omega, threshold, period, exponent,
    )


def check_stability(sr):
    """Re-derive the stability data by direct iteration."""
    prof = stability(sr)
    n = len(sr)
    for x in range(n):
        w = sr.power(x, prof.omega)
        if sr.mul[w][w] != w:
            return False
        ax = sr.scalar(prof.exponent, x)
        if sr.add[ax][ax] != ax:
            return False
        k, p = max(prof.threshold, 1), prof.period
        for m in range(k, k + 2 * p + 2):
            if sr.scalar(m, x) != sr.scalar(m + p, x):
                return False
    return True


@dataclass(frozen=True)
class CoefficientSemiring:
    """ℕ modulo i ~ j iff i = j < k, or i, j >= k and d | i - j."""

    k: int
    d: int

    def __post_init__(self):
        if self.k < 0 or self.d < 1:
            raise ValueError("B(k, d) needs k >= 0 and d >= 1")

    @property
    def size(self):
        return self.k + self.d

    def normalize(self, i):
        if i < self.k:
            return i
        return self.k + (i - self.k) % self.d

    def plus(self, i, j):
        return self.normalize(i + j)

    def times(self, i, j):
        return self.normalize(i * j)

    def equivalent(self, i, j):
        return self.normalize(i) == self.normalize(j)

    def as_semiring(self):
        classes = range(self.size)
        add = [[self.plus(i, j) for j in classes] for i in classes]
        mul = [[self.times(i, j) for j in classes] for i in classes]
        return FiniteSemiring(f"B({self.k},{self.d})", [str(i) for i in classes], add, mul)


def act(sr, coefficient, x):
    """Coefficient class acting on an element; the representative is the class itself."""
    return sr.scalar(coefficient, x)


def generated_subsemiring(sr, seed):
    """Least subset containing seed and closed under + and ·."""
    seed = set(seed)
    if not seed:
        raise ValueError("generated subsemiring needs a non-empty seed")
    closed = set(seed)
    frontier = list(closed)
    while frontier:
        fresh = []
        current = list(closed)
        for a in frontier:
            for b in current:
                for v in (sr.add[a][b], sr.mul[a][b], sr.mul[b][a]):
                    if v not in closed:
                        closed.add(v)
                        fresh.append(v)
        frontier = fresh
    return frozenset(closed)


def is_closed(sr, subset):
    s = set(subset)
    return all(sr.add[a][b] in s and sr.mul[a][b] in s for a in s for b in s)


def is_ideal(sr, subset):
    s = set(subset)
    if not s:
        return False
    n = len(sr)
    return all(sr.add[a][b] in s for a in s for b in s) and all(
        sr.mul[r][a] in s and sr.mul[a][r] in s for a in s for r in range(n)
    )


def _setwise_product(sr, left, right):
    return frozenset(sr.mul[a][b] for a in left for b in right)


def product_powers(sr, k):
    """R^k, the set of all k-fold products."""
    if k < 1:
        raise ValueError("k must be positive")
    full = frozenset(range(len(sr)))
    current = full
    for _ in range(k - 1):
        current = _setwise_product(sr, current, full)
    return current


def power_set_products(sr, k):
    """Return (R^k, m) where m is the least exponent with R^m = R^(m+1)."""
    return product_powers(sr, k), stable_power_exponent(sr)


def stable_power_exponent(sr):
    full = frozenset(range(len(sr)))
    current, m = full, 1
    while True:
        nxt = _setwise_product(sr, current, full)
        if nxt == current:
            return m
        current, m = nxt, m + 1


def rer(sr):
    """The set R·E(R)·R."""
    n = len(sr)
    return frozenset(sr.mul[sr.mul[s][e]][t] for s in range(n) for e in sr.idempotents for t in range(n))


def long_threshold(sr, strict=False):
    """Word length from which every product lies in RER.

    ``strict`` uses |R| itself.  Otherwise the least stable exponent is used,
    raised to 2 so that single letters always count as short.
    """
    if strict:
        return max(len(sr), 2)
    return max(stable_power_exponent(sr), 2)


def subsemiring(sr, subset, name=None):
    keep = sorted(subset)
    if not is_closed(sr, keep):
        raise ValueError("subset is not closed under + and ·")
    pos = {x: i for i, x in enumerate(keep)}
    add = [[pos[sr.add[a][b]] for b in keep] for a in keep]
    mul = [[pos[sr.mul[a][b]] for b in keep] for a in keep]
    return FiniteSemiring(name or f"{sr.name}|sub", [sr.elements[x] for x in keep], add, mul, check=False)


def direct_product(r1, r2, name=None):
    pairs = list(product(range(len(r1)), range(len(r2))))
    pos = {p: i for i, p in enumerate(pairs)}
    add = [[pos[(r1.add[a][c], r2.add[b][d])] for (c, d) in pairs] for (a, b) in pairs]
    mul = [[pos[(r1.mul[a][c], r2.mul[b][d])] for (c, d) in pairs] for (a, b) in pairs]
    names = [f"({r1.elements[a]},{r2.elements[b]})" for a, b in pairs]
    return FiniteSemiring(name or f"{r1.name}x{r2.name}", names, add, mul, check=False)


# -- file format ------------------------------------------------------------

def _content_lines(text):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def _read_table(lines, pos, n, index, label):
    rows = []
    for _ in range(n):
        if pos >= len(lines):
            raise TableError(f"{label} table is truncated")
        tokens = lines[pos].split()
        if len(tokens) != n:
            raise TableError(f"{label} row {len(rows) + 1} has {len(tokens)} entries, expected {n}")
        row = []
        for tok in tokens:
            if tok not in index:
                raise TableError(f"unknown element {tok!r} in {label} table")
            row.append(index[tok])
        rows.append(row)
        pos += 1
    return rows, pos


def loads(text, check=True):
    """Parse a semiring or semigroup file."""
    lines = list(_content_lines(text))
    if not lines:
        raise TableError("empty file")
    header = lines[0].split()
    if len(header) != 2 or header[0] not in ("semiring", "semigroup"):
        raise TableError("expected 'semiring <name>' or 'semigroup <name>'")
    kind, name = header
    if len(lines) < 2 or lines[1].split()[0] != "elements":
        raise TableError("expected 'elements' line")
    elements = lines[1].split()[1:]
    if not elements:
        raise TableError("no elements given")
    if len(set(elements)) != len(elements):
        raise TableError("duplicate element names")
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    tables = {}
    pos = 2
    wanted = ("add", "mul") if kind == "semiring" else ("op",)
    for label in wanted:
        if pos >= len(lines) or lines[pos] != label:
            raise TableError(f"expected '{label}' section")
        tables[label], pos = _read_table(lines, pos + 1, n, index, label)
    if pos != len(lines):
        raise TableError(f"unexpected trailing content: {lines[pos]!r}")
    if kind == "semiring":
        return FiniteSemiring(name, elements, tables["add"], tables["mul"], check=check)
    return FiniteSemigroup(name, elements, tables["op"], check=check)


def load(path, check=True):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), check=check)


def _format_table(table, elements):
    width = max(len(e) for e in elements)
    return "\n".join(" ".join(elements[v].ljust(width) for v in row).rstrip() for row in table)


def dumps(structure):
    names = structure.elements
    if isinstance(structure, FiniteSemiring):
        return (
            f"semiring {structure.name}\nelements {' '.join(names)}\n"
            f"add\n{_format_table(structure.add, names)}\n"
            f"mul\n{_format_table(structure.mul, names)}\n"
        )
    return (
        f"semigroup {structure.name}\nelements {' '.join(names)}\n"
        f"op\n{_format_table(structure.op, names)}\n"
    )
