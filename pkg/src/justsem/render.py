"""Matplotlib rendering of game graphs and justifications to image files.

Layouts are deterministic: game graphs use two layers (fact states above rule
states, ordered as exported), justifications use breadth-first depth layers
from the root.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import FancyArrowPatch

from .core import Fact, fact_text
from .frame import Rule
from .game import GameGraph, state_label
from .justif import JustificationGraph


def _draw(ax, positions, labels, boxes, edges):
    for key, (x, y) in positions.items():
        style = "square,pad=0.3" if key in boxes else "round,pad=0.3"
        ax.text(
            x,
            y,
            labels[key],
            ha="center",
            va="center",
            fontsize=9,
            bbox=dict(boxstyle=style, facecolor="white", edgecolor="black"),
        )
    for a, b in edges:
        (x1, y1), (x2, y2) = positions[a], positions[b]
        arrow = FancyArrowPatch(
            (x1, y1),
            (x2, y2),
            arrowstyle="-|>",
            mutation_scale=12,
            shrinkA=18,
            shrinkB=18,
            connectionstyle="arc3,rad=0.12",
            color="dimgray",
            linewidth=0.9,
        )
        ax.add_patch(arrow)
    ax.set_axis_off()
    ax.autoscale()
    ax.margins(0.15)


def render_game(game: GameGraph, path: str) -> None:
    """Fact states on the top layer (rounded), rule states below (boxed)."""
    facts = game.non_isolated_fact_states()
    rules = game.rule_states
    positions = {}
    labels = {}
    for i, f in enumerate(facts):
        positions[("f", i)] = (float(i), 1.0)
        labels[("f", i)] = state_label(f)
    for i, r in enumerate(rules):
        positions[("r", i)] = (float(i) * len(facts) / max(len(rules), 1), 0.0)
        labels[("r", i)] = state_label(r)
    fact_index = {f: i for i, f in enumerate(facts)}
    rule_index = {r: i for i, r in enumerate(rules)}
    edges = []
    for a, b in game.edges():
        ka = ("r", rule_index[a]) if isinstance(a, Rule) else ("f", fact_index[a])
        kb = ("r", rule_index[b]) if isinstance(b, Rule) else ("f", fact_index[b])
        edges.append((ka, kb))
    width = max(6.0, 1.6 * max(len(facts), len(rules)))
    fig, ax = plt.subplots(figsize=(width, 4.0))
    _draw(ax, positions, labels, {k for k in positions if k[0] == "r"}, edges)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)


def render_justification(j: JustificationGraph, root: Fact, path: str) -> None:
    """Breadth-first layers below the root; node labels are fact texts."""
    depth: dict[Fact, int] = {root: 0}
    order = [root]
    frontier = [root]
    while frontier:
        nxt = []
        for v in frontier:
            for y in j.children(v):
                if y not in depth:
                    depth[y] = depth[v] + 1
                    order.append(y)
                    nxt.append(y)
        frontier = nxt
    for v in j.nodes():  # disconnected parts, drawn below the reachable ones
        if v not in depth:
            depth[v] = max(depth.values()) + 1
            order.append(v)
    layers: dict[int, list[Fact]] = {}
    for v in order:
        layers.setdefault(depth[v], []).append(v)
    positions = {}
    labels = {}
    for d, members in sorted(layers.items()):
        for i, v in enumerate(members):
            positions[v] = (float(i) - len(members) / 2.0, -float(d))
            labels[v] = fact_text(v)
    edges = [(a, b) for a, b in j.edges() if a in positions and b in positions]
    width = max(4.0, 1.6 * max(len(m) for m in layers.values()))
    height = max(3.0, 1.2 * (len(layers) + 1))
    fig, ax = plt.subplots(figsize=(width, height))
    _draw(ax, positions, labels, set(), edges)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
