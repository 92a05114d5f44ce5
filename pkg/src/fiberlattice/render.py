"""ASCII dual graphs: multiplicity above each node, field degree below."""

from __future__ import annotations

from collections import deque

from .lattice_core import FiberConfiguration

CELL = 7


def _degree_label(d: int, base: int) -> str:
    if d % base:
        return str(d)
    q = d // base
    return "n" if q == 1 else f"{q}n"


def _adjacency(cfg: FiberConfiguration) -> dict[int, list[int]]:
    return {i: cfg.neighbors(i) for i in range(cfg.size)}


def _bfs(adj, start, allowed):
    dist, prev = {start: 0}, {start: None}
    q = deque([start])
    while q:
        i = q.popleft()
        for j in adj[i]:
            if j in allowed and j not in dist:
                dist[j], prev[j] = dist[i] + 1, i
                q.append(j)
    return dist, prev


def _spine(cfg: FiberConfiguration, nodes: set[int]) -> list[int]:
    """Longest path in a tree component (double sweep); lowest ids win ties."""
    adj = _adjacency(cfg)
    first = min(nodes)
    dist, _ = _bfs(adj, first, nodes)
    far = max(sorted(dist), key=lambda i: dist[i])
    dist, prev = _bfs(adj, far, nodes)
    end = max(sorted(dist), key=lambda i: dist[i])
    path = [end]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path if path[0] <= path[-1] else path[::-1]


def _components(cfg: FiberConfiguration) -> list[set[int]]:
    adj = _adjacency(cfg)
    left, out = set(range(cfg.size)), []
    while left:
        dist, _ = _bfs(adj, min(left), left)
        comp = set(dist)
        out.append(comp)
        left -= comp
    return out


def _node_tag(cfg: FiberConfiguration, i: int) -> str:
    c = cfg.curves[i]
    return "o" if c.is_minus_two else "*"


def diagram(cfg: FiberConfiguration, base: int | None = None) -> str:
    """Render each connected component with its longest path drawn horizontally.

    Nodes off the path hang below their attachment point.  ``*`` marks a
    component that is not a (-2)-curve; its C^2 and K.C are listed after the
    picture.  An edge whose intersection number is not max(n_i, n_j) shows
    that number on the edge.
    """
    if base is None:
        base = min(cfg.degrees)
    lines: list[str] = []
    for comp in _components(cfg):
        comp_edges = sum(1 for i in comp for j in comp if i < j and cfg.pairing[i][j])
        spine = _spine(cfg, comp)
        top, mid, bot, ids = "", "", "", ""
        for k, i in enumerate(spine):
            c = cfg.curves[i]
            top += str(c.multiplicity).ljust(CELL)
            bot += _degree_label(c.field_degree, base).ljust(CELL)
            ids += f"C{i}".ljust(CELL)
            if k + 1 < len(spine):
                j = spine[k + 1]
                x = cfg.pairing[i][j]
                default = max(c.field_degree, cfg.curves[j].field_degree)
                link = "-" * (CELL - 1) if x == default else f"-{x}-".center(CELL - 1, "-")
                mid += _node_tag(cfg, i) + link
            else:
                mid += _node_tag(cfg, i)
        lines += [top.rstrip(), mid.rstrip(), bot.rstrip(), ids.rstrip()]
        on_spine = set(spine)
        adj = _adjacency(cfg)
        hangers = []
        for k, i in enumerate(spine):
            for j in adj[i]:
                if j in comp and j not in on_spine:
                    hangers.append((k, i, j))
        for k, anchor, j in hangers:
            dist, prev = _bfs(adj, j, comp - on_spine)
            pad = " " * (k * CELL)
            branch = sorted(dist, key=lambda v: (dist[v], v))
            desc = "  ".join(
                f"{_node_tag(cfg, v)}[C{v} r={cfg.curves[v].multiplicity} {_degree_label(cfg.curves[v].field_degree, base)}]"
                for v in branch
            )
            lines.append(pad + "|")
            lines.append(pad + desc)
        if comp_edges >= len(comp):
            lines.append(f"(component has a cycle: {comp_edges} edges on {len(comp)} nodes)")
        lines.append("")
    extras = [
        f"*C{c.id}: C^2={c.self_int}, K.C={c.canonical_deg}, deg={_degree_label(c.field_degree, base)}"
        for c in cfg.curves
        if not c.is_minus_two
    ]
    lines.extend(extras)
    return "\n".join(lines).rstrip() + "\n"
