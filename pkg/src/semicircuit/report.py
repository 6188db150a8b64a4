"""Figures for the CLI report path.  Rendering goes to files only."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def phase_figure(result, circuit, path):
    """One row per gate, one column per phase; a cell is filled from the
    phase in which the gate got its final value."""
    gates = list(circuit.order)
    phases = [p.phase for p in result.phases]
    fixed_at = {}
    for p in result.phases:
        for g in p.additive:
            fixed_at.setdefault(g, p.phase)
        for g in p.frozen:
            fixed_at.setdefault(g, p.phase)
    fig, ax = plt.subplots(figsize=(1.2 + 0.6 * max(len(phases), 1), 0.8 + 0.35 * len(gates)))
    for row, g in enumerate(gates):
        k = fixed_at.get(g)
        for col, ph in enumerate(phases):
            if k is not None and ph >= k:
                ax.add_patch(plt.Rectangle((col, row), 1, 1, color="tab:blue" if ph == k else "lightsteelblue"))
    ax.set_xlim(0, max(len(phases), 1))
    ax.set_ylim(0, len(gates))
    ax.set_xticks([i + 0.5 for i in range(len(phases))], [str(p) for p in phases])
    ax.set_yticks([i + 0.5 for i in range(len(gates))], gates)
    ax.invert_yaxis()
    ax.set_xlabel("phase")
    ax.set_title("gates with a fixed value")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def rank_figure(sr, rank, path):
    """Elements placed by rank, with the single-step relations as arrows."""
    from .rank import single_steps

    adj = single_steps(sr)
    by_rank = {}
    for x in range(len(sr)):
        by_rank.setdefault(rank[x], []).append(x)
    pos = {}
    for r, xs in by_rank.items():
        for i, x in enumerate(xs):
            pos[x] = (i - (len(xs) - 1) / 2, r)
    fig, ax = plt.subplots(figsize=(6, 1 + 0.7 * len(by_rank)))
    for a in range(len(sr)):
        for b in range(len(sr)):
            if a != b and adj[a, b] and rank[a] < rank[b]:
                (x0, y0), (x1, y1) = pos[a], pos[b]
                ax.annotate("", (x1, y1), (x0, y0), arrowprops={"arrowstyle": "->", "color": "0.7", "lw": 0.6})
    for x, (px, py) in pos.items():
        ax.text(px, py, sr.elements[x], ha="center", va="center",
                bbox={"boxstyle": "round", "fc": "white", "ec": "0.3"}, fontsize=8)
    ax.set_ylim(0.5, max(by_rank) + 0.5)
    span = max(len(xs) for xs in by_rank.values())
    ax.set_xlim(-span / 2 - 0.5, span / 2 + 0.5)
    ax.set_ylabel("rank")
    ax.set_xticks([])
    ax.set_title(sr.name)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
