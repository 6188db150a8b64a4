import pytest

from semicircuit.algebra import dumps, load
from semicircuit.fixtures import (FIXTURE_DIR, boolean, cyclic_group, max_chain, null_ring, power_z,
                                  ring_z, semilattice, symmetric_group, trivial_semiring,
                                  tropical_chain, with_top)
from semicircuit.powerset import build_power

BUILDERS = {
    "b2.semiring": boolean,
    "z2.semiring": lambda: ring_z(2),
    "z3.semiring": lambda: ring_z(3),
    "z4.semiring": lambda: ring_z(4),
    "z6.semiring": lambda: ring_z(6),
    "p_z2.semiring": lambda: power_z(2),
    "p_z3.semiring": lambda: power_z(3),
    "p_z5.semiring": lambda: power_z(5),
    "trop4.semiring": lambda: tropical_chain(4),
    "z4null.semiring": lambda: null_ring(4),
    "pz2_top.semiring": lambda: with_top(power_z(2), name="P(Z2)+T"),
    "maxchain.semiring": max_chain,
    "trivial.semiring": trivial_semiring,
    "p_meet2.semiring": lambda: build_power(semilattice(), name="P(meet2)"),
    "z5.semigroup": lambda: cyclic_group(5),
    "meet2.semigroup": semilattice,
    "s3.semigroup": lambda: symmetric_group(3),
}


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_file_matches_builder(name):
    assert (FIXTURE_DIR / name).read_text() == dumps(BUILDERS[name]())


def test_every_table_file_is_covered():
    files = {p.name for p in FIXTURE_DIR.iterdir() if p.suffix in (".semiring", ".semigroup")}
    assert files == set(BUILDERS)


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_file_loads(name):
    assert len(load(FIXTURE_DIR / name)) == len(BUILDERS[name]())
