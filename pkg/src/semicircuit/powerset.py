"""Power semirings P(S): non-empty subsets under union and setwise product."""

from itertools import permutations, product

from .algebra import FiniteSemigroup, FiniteSemiring

DEFAULT_CAP = 8


class SizeCapError(ValueError):
    pass


def subset_name(sg, mask):
    return "{" + ",".join(sg.elements[i] for i in range(len(sg)) if mask >> i & 1) + "}"


def members(mask):
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def build_power(sg, cap=DEFAULT_CAP, name=None):
    """P(S) with element k standing for the subset with bitmask k + 1."""
    n = len(sg)
    if n > cap:
        raise SizeCapError(f"power semiring of a {n}-element semigroup exceeds cap {cap}")
    size = (1 << n) - 1
    # product of singletons, then extend by union over members
    single = [[1 << sg.op[a][b] for b in range(n)] for a in range(n)]
    masks = range(1, size + 1)
    row_of = {}
    for m in masks:
        elems = members(m)
        row = [0] * n
        for b in range(n):
            acc = 0
            for a in elems:
                acc |= single[a][b]
            row[b] = acc
        row_of[m] = row
    mul = []
    for m1 in masks:
        r = row_of[m1]
        mul.append([_union(r, m2) - 1 for m2 in masks])
    add = [[(m1 | m2) - 1 for m2 in masks] for m1 in masks]
    names = [subset_name(sg, m) for m in masks]
    return FiniteSemiring(name or f"P({sg.name})", names, add, mul, check=False)


def _union(row, mask):
    acc, i = 0, 0
    while mask:
        if mask & 1:
            acc |= row[i]
        mask >>= 1
        i += 1
    return acc


def element_of(mask):
    return mask - 1


def mask_of(x):
    return x + 1


def cardinality_rank(sr):
    """A ↦ |A| for a power semiring built by :func:`build_power`."""
    return {x: bin(mask_of(x)).count("1") for x in range(len(sr))}


def power_verdict(sg, cap=DEFAULT_CAP):
    """Verdict for P(S), from S directly and (when small enough) from P(S) itself."""
    from .classify import classify, is_local_group, is_solvable

    local = is_local_group(sg)
    solvable, _ = is_solvable(sg)
    direct = "DET" if (local and solvable) else "P-complete"
    result = {"semigroup": sg.name, "local_group": local, "solvable": solvable, "route_a": direct}
    try:
        report = classify(build_power(sg, cap=cap))
    except SizeCapError as exc:
        result["route_b"] = None
        result["note"] = str(exc)
        result["verdict"] = direct
        return result
    result["route_b"] = report.verdict
    result["agree"] = (report.verdict == "P-complete") == (direct == "P-complete")
    result["verdict"] = report.verdict
    return result


# -- exhaustive small semigroups -------------------------------------------

def _canonical(table, perms):
    n = len(table)
    best = None
    for p in perms:
        inv = [0] * n
        for i, v in enumerate(p):
            inv[v] = i
        # relabel: new(i,j) = p[ table[inv i][inv j] ]
        t = tuple(p[table[inv[i]][inv[j]]] for i in range(n) for j in range(n))
        if best is None or t < best:
            best = t
    return best


def enumerate_semigroups(n):
    """All semigroups of order n up to isomorphism (not anti-isomorphism)."""
    perms = list(permutations(range(n)))
    seen = set()
    found = []
    cells = list(product(range(n), range(n)))
    table = [[None] * n for _ in range(n)]

    def consistent():
        for a in range(n):
            for b in range(n):
                ab = table[a][b]
                if ab is None:
                    continue
                for c in range(n):
                    bc = table[b][c]
                    if bc is None:
                        continue
                    left = table[ab][c]
                    right = table[a][bc]
                    if left is not None and right is not None and left != right:
                        return False
        return True

    def search(k):
        if k == len(cells):
            key = _canonical(table, perms)
            if key not in seen:
                seen.add(key)
                found.append(key)
            return
        a, b = cells[k]
        for v in range(n):
            table[a][b] = v
            if consistent():
                search(k + 1)
        table[a][b] = None

    search(0)
    out = []
    for idx, key in enumerate(sorted(found)):
        op = [list(key[i * n:(i + 1) * n]) for i in range(n)]
        out.append(FiniteSemigroup(f"sg{n}_{idx}", [f"x{i}" for i in range(n)], op))
    return out

