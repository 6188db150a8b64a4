import subprocess
import sys

import pytest

from semicircuit import cli
from semicircuit.algebra import load
from semicircuit.circuit import eval_naive, parse_circuit
from semicircuit.fixtures import FIXTURE_DIR
from semicircuit.reduction import validate_type_assignment

F = FIXTURE_DIR


def run(capsys, *args):
    code = cli.main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def fields(text):
    out = {}
    for line in text.splitlines():
        key, sep, val = line.partition(":")
        if sep and not line.startswith("#"):
            out[key.strip()] = val.strip()
    return out


def test_check_ok(capsys):
    code, out, _ = run(capsys, "check", F / "z6.semiring")
    assert code == 0 and out.strip() == "Z6: ok"


def test_check_reports_axiom(tmp_path, capsys):
    bad = tmp_path / "bad.semiring"
    bad.write_text("semiring bad\nelements 0 1\nadd\n0 1\n1 1\nmul\n1 0\n0 1\n")
    code, out, _ = run(capsys, "check", bad)
    assert code == 1 and "distributivity" in out


def test_classify_b2(capsys):
    code, out, _ = run(capsys, "classify", F / "b2.semiring")
    info = fields(out)
    assert code == 0 and out.startswith("# {0,1} ~ B2")
    assert info["verdict"] == "P-complete" and info["zero_one_witness"] == "0 1"


def test_classify_pz5(capsys):
    code, out, _ = run(capsys, "--machine", "classify", F / "p_z5.semiring")
    info = fields(out)
    assert info["verdict"] == "DET" and info["zero_one_free"] == "true"


def test_machine_output_is_stable(capsys):
    first = run(capsys, "classify", "--machine", F / "p_z3.semiring")[1]
    second = run(capsys, "classify", "--machine", F / "p_z3.semiring")[1]
    assert first == second
    assert all(": " in line for line in first.splitlines())


def test_machine_flag_in_subprocess():
    cmd = [sys.executable, "-m", "semicircuit.cli", "--machine", "eval", str(F / "rank_phases.circuit"),
           "--mode", "phased", "--trace"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and b"output: {0,1,2,3,4}" in a


@pytest.mark.parametrize("name", ["rank_phases", "small_pz3", "short_long"])
def test_naive_and_full_agree(name, capsys):
    path = F / f"{name}.circuit"
    naive = fields(run(capsys, "eval", path)[1])["output"]
    code, out, err = run(capsys, "eval", path, "--mode", "full")
    assert code == 0 and fields(out)["output"] == naive
    if name == "short_long":
        assert err.startswith("warning:")


def test_phased_trace(capsys):
    code, out, _ = run(capsys, "eval", F / "rank_phases.circuit", "--mode", "phased", "--trace")
    assert code == 0 and "phase 1" in out and "output: {0,1,2,3,4}" in out


def test_eval_all_gates(capsys):
    code, out, _ = run(capsys, "eval", F / "rank_phases.circuit", "--all")
    assert code == 0 and "D = {1,2,3}" in out


def test_reduce_files(tmp_path, capsys):
    code, _, _ = run(capsys, "reduce", F / "small_pz3.circuit", "-o", tmp_path)
    assert code == 0
    assert {p.name for p in tmp_path.iterdir()} == {"typed.circuit", "types.txt", "alpha.txt"}
    sr = load(F / "p_z3.semiring")
    typed = parse_circuit((tmp_path / "typed.circuit").read_text(), sr)
    types = {}
    for line in (tmp_path / "types.txt").read_text().splitlines():
        gate, pair = line[len("type "):].split(" = ")
        e, f = cli._split_pair(pair.strip())
        types[gate] = (sr.index(e), sr.index(f))
    assert validate_type_assignment(typed, types) == []
    code, out, _ = run(capsys, "eval", tmp_path / "typed.circuit", "--semiring", F / "p_z3.semiring",
                       "--mode", "phased", "--types", tmp_path / "types.txt")
    assert code == 0


def test_rank_cardinality_violation(capsys):
    code, out, _ = run(capsys, "rank", F / "p_meet2.semiring", "--rank-by", "cardinality")
    assert code == 1 and "clause 2 fails" in out


def test_rank_computed_ok(capsys):
    code, out, _ = run(capsys, "rank", F / "p_z3.semiring")
    assert code == 0 and "fails" not in out and "max_rank: 3" in out
    # P(meet2) contains B2, so even the computed rank breaks a clause
    code, out, _ = run(capsys, "rank", F / "p_meet2.semiring")
    assert code == 1 and "clause 3 fails" in out


def test_power_verdict(capsys):
    code, out, _ = run(capsys, "power", F / "z5.semigroup")
    info = fields(out)
    assert code == 0 and "DET" in info.values()


def test_power_writes_file(tmp_path, capsys):
    dest = tmp_path / "p.semiring"
    run(capsys, "power", F / "meet2.semigroup", "-o", dest)
    assert len(load(dest)) == 3


def test_syntactic(capsys):
    code, out, _ = run(capsys, "syntactic", F / "sigma_a_sigma.dfa")
    info = fields(out)
    assert code == 0 and info["elements"] == "ε a" and info["zero_one_free_quotient"] == "true"


def test_intersect(capsys):
    code, out, _ = run(capsys, "intersect", F / "nested.grammar", F / "sigma_a_sigma.dfa", "--witness")
    assert code == 0 and out.splitlines() == ["non-empty", "witness: a b b"]
    code, out, _ = run(capsys, "intersect", F / "bstar.grammar", F / "sigma_a_sigma.dfa")
    assert code == 0 and out.strip() == "empty"


def test_pcfg_verdict(capsys):
    assert fields(run(capsys, "pcfg-verdict", F / "piecewise_ab.dfa")[1])["verdict"] == "NL"
    assert fields(run(capsys, "pcfg-verdict", F / "s5.dfa")[1])["verdict"] == "P-complete"


def test_demos(capsys):
    info = fields(run(capsys, "demo-maxplus", F / "monotone.boolean")[1])
    assert info["agree"] == "true" and info["maxplus"] == info["two_to_n"]
    info = fields(run(capsys, "demo-cvp-zd", F / "small.boolean", "-d", "5")[1])
    assert info["agree"] == "true"


def test_figures(tmp_path, capsys):
    a, b = tmp_path / "phases.png", tmp_path / "rank.png"
    run(capsys, "eval", F / "rank_phases.circuit", "--mode", "phased", "--figure", a)
    run(capsys, "rank", F / "p_z3.semiring", "--figure", b)
    assert a.stat().st_size > 0 and b.stat().st_size > 0


def test_domain_errors_exit_1(tmp_path, capsys):
    code, _, err = run(capsys, "eval", tmp_path / "missing.circuit")
    assert code == 1 and err.startswith("error:")
    cyc = tmp_path / "cyc.circuit"
    cyc.write_text("circuit over Z2\ngate g0 = add g0 g0\n")
    code, _, err = run(capsys, "eval", cyc)
    assert code == 1 and "g0 -> g0" in err


def test_usage_errors_exit_2(capsys):
    assert cli.main(["bogus"]) == 2
    assert cli.main(["eval", str(F / "rank_phases.circuit"), "--mode", "fast"]) == 2
    assert "usage:" in capsys.readouterr().err


def test_naive_values_match_library(capsys):
    sr = load(F / "p_z5.semiring")
    c = parse_circuit((F / "rank_phases.circuit").read_text(), sr)
    want = eval_naive(c).output
    assert fields(run(capsys, "eval", F / "rank_phases.circuit")[1])["output"] == sr.elements[want]
