"""Builders for the small algebras used in tests, examples and bundled files."""

from itertools import permutations
from pathlib import Path

from .algebra import FiniteSemigroup, FiniteSemiring, load

FIXTURE_DIR = Path(__file__).resolve().parents[2] / "fixtures"


def trivial_semiring():
    return FiniteSemiring("trivial", ["a"], [[0]], [[0]])


def boolean():
    return FiniteSemiring("B2", ["0", "1"], [[0, 1], [1, 1]], [[0, 0], [0, 1]])


def ring_z(d):
    els = [str(i) for i in range(d)]
    add = [[(i + j) % d for j in range(d)] for i in range(d)]
    mul = [[(i * j) % d for j in range(d)] for i in range(d)]
    return FiniteSemiring(f"Z{d}", els, add, mul)


def cyclic_group(d):
    """(Z_d, +) as a semigroup."""
    return FiniteSemigroup(f"Z{d}", [str(i) for i in range(d)],
                           [[(i + j) % d for j in range(d)] for i in range(d)])


def semilattice():
    """({0,1}, min), the two-element meet semilattice."""
    return FiniteSemigroup("meet2", ["0", "1"], [[0, 0], [0, 1]])


def trivial_semigroup():
    return FiniteSemigroup("one", ["e"], [[0]])


def symmetric_group(n):
    perms = list(permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = p(q(x))
    op = [[pos[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms]
    names = ["".join(str(v) for v in p) for p in perms]
    return FiniteSemigroup(f"S{n}", names, op)


def tropical_chain(k=4):
    """{1..k} with max as addition and truncated sum as multiplication."""
    els = [str(i) for i in range(1, k + 1)]
    add = [[max(i, j) for j in range(k)] for i in range(k)]
    mul = [[min(i + j + 1, k - 1) for j in range(k)] for i in range(k)]
    return FiniteSemiring(f"trop{k}", els, add, mul)


def null_ring(d=4):
    """(Z_d, +) with every product equal to 0."""
    els = [str(i) for i in range(d)]
    add = [[(i + j) % d for j in range(d)] for i in range(d)]
    mul = [[0] * d for _ in range(d)]
    return FiniteSemiring(f"Z{d}null", els, add, mul)


def with_top(sr, top="T", name=None):
    """Adjoin an element absorbing for both operations."""
    n = len(sr)
    add = [list(row) + [n] for row in sr.add] + [[n] * (n + 1)]
    mul = [list(row) + [n] for row in sr.mul] + [[n] * (n + 1)]
    return FiniteSemiring(name or f"{sr.name}+{top}", list(sr.elements) + [top], add, mul)


def max_chain():
    """a < b < c with max for both operations; {c} is an ideal."""
    add = [[max(i, j) for j in range(3)] for i in range(3)]
    return FiniteSemiring("maxchain", ["a", "b", "c"], add, add)


def power_z(d):
    from .powerset import build_power

    return build_power(cyclic_group(d), name=f"P(Z{d})")


def four_element_free():
    """Commutative {0,1}-free semirings with four elements."""
    return [tropical_chain(4), null_ring(4), with_top(power_z(2), name="P(Z2)+T")]


def fixture_path(name):
    return FIXTURE_DIR / name


def load_fixture(name):
    return load(fixture_path(name))
