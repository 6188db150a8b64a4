from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from semicircuit.algebra import FiniteSemiring, direct_product, generated_subsemiring, subsemiring
from semicircuit.classify import (check_embedding, classify, derived_series, find_b2_or_zd,
                                  is_aperiodic, is_local_group, is_solvable, is_zero_one_free,
                                  maximal_subgroups, verdict_of)
from semicircuit.fixtures import (boolean, cyclic_group, four_element_free, max_chain, power_z,
                                  ring_z, semilattice, symmetric_group, trivial_semigroup,
                                  trivial_semiring)
from semicircuit.lang import parse_dfa, syntactic_monoid
from semicircuit.powerset import build_power, enumerate_semigroups

SAS = """dfa
alphabet a b
states q0 q1
initial q0
final q1
trans q0 a q1
trans q0 b q0
trans q1 a q1
trans q1 b q1
"""

FREE = [trivial_semiring(), max_chain(), power_z(2), power_z(3), *four_element_free()]


def test_zero_one_scan_examples():
    assert is_zero_one_free(boolean()) == (False, (0, 1))
    assert is_zero_one_free(ring_z(2)) == (False, (0, 1))
    assert is_zero_one_free(power_z(5))[0]


def test_b2_extracted_from_b2():
    emb = find_b2_or_zd(boolean())
    assert emb.kind == "B2" and emb.elements == (0, 1)


def test_z6_extracted_whole():
    z6 = ring_z(6)
    emb = find_b2_or_zd(z6)
    assert emb.kind == "Z" and emb.d == 6 and emb.shape == (0, 6)
    assert check_embedding(z6, emb)


def test_idempotent_one_gives_b2_directly():
    # {0, 1, 2} with max as addition, 1 neutral-ish: 0+1=1, 1+1=1
    sr = FiniteSemiring("chain3", ["0", "1", "2"],
                        [[max(i, j) for j in range(3)] for i in range(3)],
                        [[min(i, j) for j in range(3)] for i in range(3)])
    emb = find_b2_or_zd(sr)
    assert emb.kind == "B2" and emb.shape == (1, 1)
    assert check_embedding(sr, emb)


def test_free_semiring_has_no_embedding():
    assert find_b2_or_zd(power_z(3)) is None


def test_maximal_subgroups_examples():
    gs = maximal_subgroups(cyclic_group(5))
    assert len(gs) == 1 and len(gs[0]) == 5
    assert [len(g) for g in maximal_subgroups(semilattice())] == [1, 1]
    pz5 = power_z(5)
    by_id = {pz5.elements[g.identity]: {pz5.elements[x] for x in g.elements}
             for g in maximal_subgroups(pz5.multiplicative())}
    assert by_id["{0}"] == {"{0}", "{1}", "{2}", "{3}", "{4}"}
    assert by_id["{0,1,2,3,4}"] == {"{0,1,2,3,4}"}


def _subgroups_brute(sg):
    """Every subset that is a group under op (any identity)."""
    op = sg.op
    n = len(op)
    found = []
    for size in range(1, n + 1):
        for sub in combinations(range(n), size):
            s = set(sub)
            if not all(op[a][b] in s for a in s for b in s):
                continue
            ids = [e for e in s if all(op[e][x] == x == op[x][e] for x in s)]
            if ids and all(any(op[x][y] == ids[0] for y in s) for x in s):
                found.append((ids[0], s))
    return found


@pytest.mark.parametrize("n", [1, 2, 3])
def test_every_subgroup_inside_a_maximal_one(n):
    for sg in enumerate_semigroups(n):
        maxi = {g.identity: g.elements for g in maximal_subgroups(sg)}
        for e, s in _subgroups_brute(sg):
            assert s <= maxi[e]


def test_solvability_examples():
    assert is_solvable(cyclic_group(6))[0]
    assert is_solvable(trivial_semigroup())[0]
    assert is_solvable(symmetric_group(4))[0]
    ok, (group, perfect) = is_solvable(symmetric_group(5))
    assert not ok and len(group) == 120 and len(perfect) == 60
    series = derived_series(symmetric_group(5), group)
    assert [len(g) for g in series] == [120, 60]


def test_aperiodic_examples():
    assert is_aperiodic(semilattice())
    assert not is_aperiodic(cyclic_group(2))
    rl = syntactic_monoid(parse_dfa(SAS))
    assert is_aperiodic(rl.monoid) and is_aperiodic(rl.monoid, route="groups")


def test_local_group_examples():
    assert is_local_group(cyclic_group(5))
    assert is_local_group(symmetric_group(3))
    assert not is_local_group(semilattice())


def test_classify_examples():
    assert classify(boolean()).verdict == "P-complete"
    rep = classify(power_z(5))
    assert (rep.zero_one_free, rep.multiplicative_solvable, rep.multiplicative_aperiodic) == (True, True, False)
    assert rep.verdict == "DET"
    rl = syntactic_monoid(parse_dfa(SAS))
    assert classify(build_power(rl.monoid)).verdict == "P-complete"
    assert classify(max_chain()).verdict == "NL"


def test_report_lines_are_stable():
    rep = classify(ring_z(4))
    text = rep.machine()
    assert text == classify(ring_z(4)).machine()
    assert "isomorphic_to: Z4" in text and text.endswith("verdict: P-complete")


def test_verdict_table():
    assert verdict_of(False, True, True) == "P-complete"
    assert verdict_of(True, False, False) == "P-complete"
    assert verdict_of(True, True, True) == "NL"
    assert verdict_of(True, True, False) == "DET"


ALL_SEMIGROUPS = [sg for n in (1, 2, 3) for sg in enumerate_semigroups(n)]


@pytest.mark.parametrize("sg", ALL_SEMIGROUPS, ids=lambda s: s.name)
def test_aperiodic_routes_agree(sg):
    assert is_aperiodic(sg) == is_aperiodic(sg, route="groups")


@given(st.sampled_from(FREE), st.sampled_from(FREE))
@settings(max_examples=30, deadline=None)
def test_freeness_survives_products(r1, r2):
    if len(r1) * len(r2) <= 64:
        assert is_zero_one_free(direct_product(r1, r2))[0]


@given(st.sampled_from(FREE), st.data())
@settings(max_examples=40, deadline=None)
def test_freeness_survives_subsemirings(sr, data):
    seed = data.draw(st.sets(st.integers(0, len(sr) - 1), min_size=1, max_size=2))
    sub = subsemiring(sr, generated_subsemiring(sr, seed))
    assert is_zero_one_free(sub)[0]


@given(st.sampled_from([boolean(), ring_z(2), ring_z(3), ring_z(4), ring_z(6), *FREE]))
@settings(max_examples=30, deadline=None)
def test_verdict_invariant(sr):
    rep = classify(sr)
    assert rep.verdict == verdict_of(rep.zero_one_free, rep.multiplicative_solvable,
                                     rep.multiplicative_aperiodic)
    assert (find_b2_or_zd(sr) is None) == rep.zero_one_free
