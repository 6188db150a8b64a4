import argparse
import sys
import warnings
from pathlib import Path

from . import algebra, circuit, classify, lang, powerset, rank, reduction
from .fixtures import FIXTURE_DIR

DOMAIN_ERRORS = (ValueError, RuntimeError, OSError, KeyError)


def _read(path):
    return Path(path).read_text(encoding="utf-8")


def _load_structure(path, check=True):
    return algebra.loads(_read(path), check=check)


def _load_semiring(path):
    sr = _load_structure(path)
    if not isinstance(sr, algebra.FiniteSemiring):
        raise algebra.TableError(f"{path} holds a semigroup, not a semiring")
    return sr


def find_semiring(name, near):
    """Semiring file whose header names ``name``, next to ``near`` or in the
    bundled fixtures."""
    for folder in (Path(near).resolve().parent, FIXTURE_DIR):
        for f in sorted(folder.glob("*.semiring")):
            for line in _read(f).splitlines():
                line = line.split("#", 1)[0].split()
                if line:
                    if line == ["semiring", name]:
                        return _load_semiring(f)
                    break
    raise circuit.CircuitError(f"no semiring file named {name}; pass --semiring")


def _load_circuit(args):
    text = _read(args.circuit)
    name = circuit.circuit_header(text)
    sr = _load_semiring(args.semiring) if args.semiring else find_semiring(name, args.circuit)
    return circuit.parse_circuit(text, sr)


def _emit(pairs, machine):
    width = max(len(k) for k, _ in pairs)
    for k, v in pairs:
        print(f"{k}: {v}" if machine else f"{k + ':':<{width + 1}} {v}")


# -- subcommands -------------------------------------------------------------

def cmd_check(args):
    s = _load_structure(args.file, check=False)
    if isinstance(s, algebra.FiniteSemiring):
        report = algebra.validate_semiring(s.add, s.mul, s.elements)
    else:
        report = algebra.validate_semigroup(s.op)
        report.elements = s.elements
    if report.ok:
        print(f"{s.name}: ok")
        return 0
    print(report.describe())
    return 1


def cmd_classify(args):
    s = _load_structure(args.file)
    if isinstance(s, algebra.FiniteSemigroup):
        sol, _ = classify.is_solvable(s)
        pairs = [("semigroup", s.name), ("size", len(s)),
                 ("aperiodic", str(classify.is_aperiodic(s)).lower()),
                 ("solvable", str(sol).lower()),
                 ("local_group", str(classify.is_local_group(s)).lower())]
        _emit(pairs, args.machine)
        return 0
    rep = classify.classify(s)
    if not args.machine and rep.embedding is not None:
        print(f"# {rep.embedding.describe(s)}")
    _emit(rep.lines(), args.machine)
    return 0


def _split_pair(text):
    """'(e,f)' -> ('e', 'f'), commas inside braces do not split."""
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"expected '(<e>,<f>)', got {text!r}")
    depth = 0
    for i, ch in enumerate(text[1:-1], 1):
        depth += {"{": 1, "}": -1}.get(ch, 0)
        if ch == "," and depth == 0:
            return text[1:i], text[i + 1:-1]
    raise ValueError(f"expected '(<e>,<f>)', got {text!r}")


def _read_types(path, c):
    sr = c.semiring
    types = {}
    for num, line in enumerate(_read(path).splitlines(), 1):
        tok = line.split("#", 1)[0].split()
        if not tok:
            continue
        if len(tok) != 4 or tok[0] != "type" or tok[2] != "=":
            raise ValueError(f"types line {num}: expected 'type <gate> = (<e>,<f>)'")
        e, f = _split_pair(tok[3])
        types[tok[1]] = (sr.index(e), sr.index(f))
    return types


def _rank_of(sr, how):
    if how == "cardinality":
        return rank.RankStructure(None, None, powerset.cardinality_rank(sr))
    return rank.build_rank(sr)


def cmd_eval(args):
    c = _load_circuit(args)
    sr = c.semiring
    fmt = sr.format_element
    if args.mode == "naive":
        res = circuit.eval_naive(c)
        if args.all or c.output is None:
            for g in c.order:
                print(f"{g} = {fmt(res.values[g])}")
        if c.output is not None:
            print(f"output: {fmt(res.output)}")
        return 0
    if args.mode == "full":
        if c.output is None:
            raise circuit.CircuitError("full evaluation needs an output gate")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            value = rank.eval_full(c, threshold=args.threshold, strict=args.strict)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        print(f"output: {fmt(value)}")
        return 0
    if not c.is_normal():
        c = circuit.normalize(c)
    types = _read_types(args.types, c) if args.types else rank.identity_types(c)
    bad = reduction.validate_type_assignment(c, types)
    if bad:
        g, clause, msg = bad[0]
        raise ValueError(f"type assignment invalid at gate {g} (clause {clause}): {msg}")
    rk = _rank_of(sr, args.rank_by)
    res = rank.eval_phased(c, types, rk, tie_break=args.tie_break, seed=args.seed,
                           start_phase=args.start_phase)
    if args.trace:
        for p in res.phases:
            print(f"phase {p.phase}")
            print("  additive: " + " ".join(p.additive))
            print("  inner: " + " ".join(f"{g}->{x}" for g, x in p.inner.items()))
            print("  shadow: " + " ".join(f"{g}={fmt(p.values[g])}" for g in c.order))
            print("  locally correct: " + " ".join(g for g in c.order if g in p.locally_correct))
            print("  downward closed: " + " ".join(g for g in c.order if g in p.downward))
            print("  frozen: " + " ".join(f"{g}={fmt(v)}" for g, v in p.frozen.items()))
    if args.all or args.trace or c.output is None:
        for g in c.order:
            print(f"{g} = {fmt(res.values[g])}")
    if c.output is not None:
        print(f"output: {fmt(res.output)}")
    if args.figure:
        from .report import phase_figure

        phase_figure(res, c, args.figure)
    return 0


def cmd_reduce(args):
    c = _load_circuit(args)
    sr = c.semiring
    res = reduction.step1_pipeline(c, threshold=args.threshold, strict=args.strict, full=args.full)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    if not isinstance(res, reduction.TypedConstruction):
        (out / "value.txt").write_text(sr.format_element(res) + "\n")
        print(f"short circuit; value {sr.format_element(res)}")
        return 0
    (out / "typed.circuit").write_text(circuit.serialize_circuit(res.circuit, sr.name))
    lines = [f"type {g} = ({sr.elements[e]},{sr.elements[f]})" for g, (e, f) in res.types.items()]
    (out / "types.txt").write_text("\n".join(lines) + "\n")
    (out / "alpha.txt").write_text(
        "distinguished: " + " ".join(res.distinguished) + "\n" + res.alpha.describe(sr) + "\n")
    print(f"typed circuit with {len(res.circuit)} gates, {len(res.distinguished)} distinguished")
    print(res.alpha.describe(sr))
    return 0


def cmd_rank(args):
    sr = _load_semiring(args.file)
    rk = _rank_of(sr, args.rank_by)
    for x in range(len(sr)):
        print(f"{sr.elements[x]} {rk.rank[x]}")
    print(f"max_rank: {max(rk.rank.values())}")
    bad = rank.check_rank_axioms(sr, rk.rank)
    for v in bad:
        print(v.describe(sr))
    if args.figure:
        from .report import rank_figure

        rank_figure(sr, rk.rank, args.figure)
    return 1 if bad else 0


def cmd_power(args):
    sg = _load_structure(args.file)
    if not isinstance(sg, algebra.FiniteSemigroup):
        raise algebra.TableError(f"{args.file} holds a semiring, not a semigroup")
    res = powerset.power_verdict(sg, cap=args.cap)
    pairs = [(k, str(v).lower() if isinstance(v, bool) else v) for k, v in res.items() if v is not None]
    _emit(pairs, args.machine)
    if args.output:
        Path(args.output).write_text(algebra.dumps(powerset.build_power(sg, cap=args.cap)))
    return 0


def cmd_syntactic(args):
    d = lang.parse_dfa(_read(args.dfa))
    rl = lang.syntactic_monoid(d)
    names = rl.monoid.elements
    pairs = [("monoid_size", len(names)), ("elements", " ".join(names)),
             ("accepting", " ".join(names[m] for m in sorted(rl.accepting))),
             ("letters", " ".join(f"{a}->{names[m]}" for a, m in rl.h.items()))]
    a, b = lang.check_quotient_freeness(rl, cap=args.cap)
    if len(names) <= args.cap:
        q = lang.f_congruence(rl, cap=args.cap).quotient
        pairs.append(("quotient_size", len(q)))
        pairs.append(("quotient_classes", " ".join(q.elements)))
    pairs.append(("zero_one_free_implication", str(a).lower()))
    if b is not None:
        pairs.append(("zero_one_free_quotient", str(b).lower()))
    _emit(pairs, args.machine)
    return 0


def cmd_intersect(args):
    g = lang.parse_grammar(_read(args.grammar))
    d = lang.parse_dfa(_read(args.dfa))
    an = lang.intersect(g, d, witness=args.witness)
    print("non-empty" if an.nonempty else "empty")
    if args.witness and an.nonempty:
        print("witness: " + (" ".join(an.witness) if an.witness is not None else "(too long)"))
    return 0


def cmd_pcfg(args):
    d = lang.parse_dfa(_read(args.dfa))
    rep = lang.pcfg_verdict(d, cap=args.cap)
    pairs = [(k, str(v).lower() if isinstance(v, bool) else v) for k, v in rep.items()]
    _emit(pairs, args.machine)
    return 0 if rep["verdict"] is not None else 1


def cmd_maxplus(args):
    bc = circuit.parse_boolean(_read(args.boolean))
    c, n = circuit.reduce_cvp_maxplus(bc)
    val = circuit.eval_naive(c).output
    truth = bc.evaluate()[bc.output]
    _emit([("layers", n), ("boolean", truth), ("maxplus", val), ("two_to_n", 2 ** n),
           ("agree", str((val == 2 ** n) == bool(truth)).lower())], args.machine)
    return 0


def cmd_cvp_zd(args):
    from .fixtures import ring_z

    bc = circuit.parse_boolean(_read(args.boolean))
    c = circuit.reduce_boolean_cvp(bc, ring_z(args.d))
    val = c.semiring.elements[circuit.eval_naive(c).output]
    truth = bc.evaluate()[bc.output]
    _emit([("d", args.d), ("boolean", truth), ("ring", val),
           ("agree", str(val == str(truth)).lower())], args.machine)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="semicircuit", description="Finite-semiring circuit tools.")
    p.add_argument("--machine", action="store_true", help="key: value output")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="validate a semiring or semigroup table")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("classify", help="dichotomy verdict for a semiring")
    s.add_argument("file")
    s.set_defaults(func=cmd_classify)

    def circuit_args(s):
        s.add_argument("circuit")
        s.add_argument("--semiring", help="semiring file (default: looked up by name)")
        s.add_argument("--threshold", type=int)
        s.add_argument("--strict", action="store_true", help="use |R| as the long-word threshold")

    s = sub.add_parser("eval", help="evaluate a circuit")
    circuit_args(s)
    s.add_argument("--mode", choices=["naive", "phased", "full"], default="naive")
    s.add_argument("--trace", action="store_true")
    s.add_argument("--all", action="store_true", help="print every gate value")
    s.add_argument("--types", help="file with lines 'type <gate> = (<e>,<f>)'")
    s.add_argument("--rank-by", choices=["computed", "cardinality"], default="computed")
    s.add_argument("--tie-break", choices=["low", "high", "random"], default="low")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--start-phase", type=int, default=1)
    s.add_argument("--figure", help="write a phase chart (phased mode)")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("reduce", help="write the type-admitting circuit, types and affine map")
    circuit_args(s)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--full", action="store_true", help="build every primed gate")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("rank", help="rank function of a semiring")
    s.add_argument("file")
    s.add_argument("--rank-by", choices=["computed", "cardinality"], default="computed")
    s.add_argument("--figure")
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("power", help="verdict for the power semiring of a semigroup")
    s.add_argument("file")
    s.add_argument("--cap", type=int, default=powerset.DEFAULT_CAP)
    s.add_argument("-o", "--output", help="write P(S) as a semiring file")
    s.set_defaults(func=cmd_power)

    s = sub.add_parser("syntactic", help="syntactic monoid and quotient of a dfa")
    s.add_argument("dfa")
    s.add_argument("--cap", type=int, default=lang.QUOTIENT_CAP)
    s.set_defaults(func=cmd_syntactic)

    s = sub.add_parser("intersect", help="is L(G) ∩ L(dfa) non-empty")
    s.add_argument("grammar")
    s.add_argument("dfa")
    s.add_argument("--witness", action="store_true")
    s.set_defaults(func=cmd_intersect)

    s = sub.add_parser("pcfg-verdict", help="verdict for intersection with a fixed dfa")
    s.add_argument("dfa")
    s.add_argument("--cap", type=int, default=lang.QUOTIENT_CAP)
    s.set_defaults(func=cmd_pcfg)

    s = sub.add_parser("demo-maxplus", help="monotone boolean circuit to (N, max, +)")
    s.add_argument("boolean")
    s.set_defaults(func=cmd_maxplus)

    s = sub.add_parser("demo-cvp-zd", help="boolean circuit to a circuit over Z_d")
    s.add_argument("boolean")
    s.add_argument("-d", type=int, default=2)
    s.set_defaults(func=cmd_cvp_zd)
    for s in sub.choices.values():
        s.add_argument("--machine", dest="machine_sub", action="store_true", help="key: value output")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    # --machine is accepted before or after the subcommand
    args.machine = args.machine or getattr(args, "machine_sub", False)
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
