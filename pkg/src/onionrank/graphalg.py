"""Directed-graph ranking and centrality algorithms.

All functions take the :class:`~onionrank.corpus.LinkGraph` view of a
graph (node ids plus a deduplicated directed edge set) and are pure and
deterministic: node order is always resolved by sorting ids, and every
iterative solver exposes ``max_iter`` and ``tol`` and reports whether it
converged instead of truncating silently.

Betweenness is accumulated in exact rational arithmetic and converted
to floats at the very end, so results are independent of accumulation
order and match brute-force path enumeration bit for bit on small
graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .corpus import LinkGraph
from .errors import ConfigError

EIGENVECTOR_TELEPORT = 1e-6


@dataclass(frozen=True)
class RankingResult:
    """Nodes with scores; rank is the 1-based position in ``entries``."""

    entries: tuple[tuple[str, float], ...]
    converged: bool = True

    @classmethod
    def from_scores(cls, scores: dict[str, float], converged: bool = True) -> "RankingResult":
        ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls(entries=tuple(ordered), converged=converged)

    def nodes(self) -> list[str]:
        return [node for node, _ in self.entries]

    def scores(self) -> dict[str, float]:
        return {node: score for node, score in self.entries}

    def rank_of(self, node: str) -> int:
        for i, (n, _) in enumerate(self.entries, start=1):
            if n == node:
                return i
        raise KeyError(node)

    def write_csv(self, path) -> None:
        lines = ["node,score,rank"]
        for i, (node, score) in enumerate(self.entries, start=1):
            lines.append(f"{node},{score:.17g},{i}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


@dataclass(frozen=True)
class HitsScores:
    """Hub and authority scores; authorities define the ranking."""

    hubs: dict[str, float]
    authorities: dict[str, float]
    converged: bool = True

    def ranking(self) -> RankingResult:
        return RankingResult.from_scores(self.authorities, converged=self.converged)


@dataclass(frozen=True)
class CentralityResult:
    """Closeness, betweenness, and eigenvector scores for every node."""

    closeness: dict[str, float]
    betweenness: dict[str, float]
    eigenvector: dict[str, float]
    eigenvector_converged: bool = True


def _adjacency(graph: LinkGraph):
    nodes = sorted(graph.nodes)
    out_nbrs = {v: [] for v in nodes}
    in_nbrs = {v: [] for v in nodes}
    for src, dst in sorted(graph.edges):
        out_nbrs[src].append(dst)
        in_nbrs[dst].append(src)
    return nodes, out_nbrs, in_nbrs


def _require_nonempty(graph: LinkGraph, op: str):
    if not graph.nodes:
        raise ConfigError(f"{op} requires a non-empty graph")


def pagerank(graph: LinkGraph, alpha: float = 0.85, max_iter: int = 1000, tol: float = 1e-9) -> RankingResult:
    """Power iteration with uniform redistribution of dangling mass.

    Stops when the L1 change drops to ``tol``; scores always sum to 1.
    """
    _require_nonempty(graph, "pagerank")
    nodes, out_nbrs, in_nbrs = _adjacency(graph)
    n = len(nodes)
    outdeg = {v: len(out_nbrs[v]) for v in nodes}
    p = {v: 1.0 / n for v in nodes}
    base = (1.0 - alpha) / n
    converged = False
    for _ in range(max_iter):
        dangling = sum(p[v] for v in nodes if outdeg[v] == 0)
        spread = alpha * dangling / n
        new = {}
        for v in nodes:
            inflow = sum(p[u] / outdeg[u] for u in in_nbrs[v])
            new[v] = alpha * inflow + spread + base
        delta = sum(abs(new[v] - p[v]) for v in nodes)
        p = new
        if delta <= tol:
            converged = True
            break
    return RankingResult.from_scores(p, converged=converged)


def hits(graph: LinkGraph, max_iter: int = 1000, tol: float = 1e-9) -> HitsScores:
    """Alternating hub/authority updates with L2 normalization each step."""
    _require_nonempty(graph, "hits")
    nodes, out_nbrs, in_nbrs = _adjacency(graph)
    if not graph.edges:
        zero = {v: 0.0 for v in nodes}
        return HitsScores(hubs=dict(zero), authorities=dict(zero), converged=True)
    n = len(nodes)
    h = {v: 1.0 / math.sqrt(n) for v in nodes}
    a = {v: 0.0 for v in nodes}
    converged = False
    for _ in range(max_iter):
        a_new = {v: sum(h[u] for u in in_nbrs[v]) for v in nodes}
        a_new = _l2_normalized(a_new)
        h_new = {v: sum(a_new[w] for w in out_nbrs[v]) for v in nodes}
        h_new = _l2_normalized(h_new)
        delta = sum(abs(a_new[v] - a[v]) for v in nodes) + sum(abs(h_new[v] - h[v]) for v in nodes)
        a, h = a_new, h_new
        if delta <= tol:
            converged = True
            break
    return HitsScores(hubs=h, authorities=a, converged=converged)


def katz(
    graph: LinkGraph,
    alpha: float = 0.1,
    beta: float = 1.0,
    max_iter: int = 1000,
    tol: float = 1e-9,
) -> RankingResult:
    """Iterate ``x <- alpha * A^T x + beta`` to a fixed point, then L2-normalize."""
    _require_nonempty(graph, "katz")
    nodes, _out, in_nbrs = _adjacency(graph)
    x = {v: beta for v in nodes}
    converged = False
    for _ in range(max_iter):
        new = {v: alpha * sum(x[u] for u in in_nbrs[v]) + beta for v in nodes}
        if max(abs(w) for w in new.values()) > 1e12:
            raise ConfigError(f"katz diverged: alpha={alpha} exceeds 1/spectral-radius of the graph")
        delta = sum(abs(new[v] - x[v]) for v in nodes)
        x = new
        if delta <= tol:
            converged = True
            break
    return RankingResult.from_scores(_l2_normalized(x), converged=converged)


def _l2_normalized(scores: dict[str, float]) -> dict[str, float]:
    norm = math.sqrt(sum(s * s for s in scores.values()))
    if norm == 0.0:
        return {v: 0.0 for v in scores}
    return {v: s / norm for v, s in scores.items()}


def torank(graph: LinkGraph, alpha: float = 0.9, beta: float = 0.2) -> RankingResult:
    """Greedy removal ranking by degree and connectivity damage.

    At each step the remaining node maximizing
    ``alpha * (in + out) / max_degree + beta * dconn`` is assigned the
    next rank and removed, where ``dconn`` is the relative shrink of the
    largest weakly connected component caused by removing the node. The
    degree term is 0 on an edgeless remainder, and removing the final
    node counts as no shrink (there is no component left to measure), so
    fully tied steps fall back to node-id order. Reported scores are the
    selection-time scores.
    """
    _require_nonempty(graph, "torank")
    nodes = sorted(graph.nodes)
    out_nbrs = {v: set() for v in nodes}
    in_nbrs = {v: set() for v in nodes}
    und = {v: set() for v in nodes}
    for src, dst in graph.edges:
        out_nbrs[src].add(dst)
        in_nbrs[dst].add(src)
        und[src].add(dst)
        und[dst].add(src)
    remaining = set(nodes)
    entries: list[tuple[str, float]] = []
    while remaining:
        if len(remaining) == 1:
            v = next(iter(remaining))
            entries.append((v, 0.0))
            break
        degree = {v: len(in_nbrs[v]) + len(out_nbrs[v]) for v in remaining}
        max_degree = max(degree.values())
        comp_of, comp_sizes = _weak_components(remaining, und)
        largest = max(comp_sizes)
        top_two = sorted(comp_sizes, reverse=True)[:2]
        piece_max = _removal_piece_max(remaining, und, comp_of, comp_sizes)
        best_node = None
        best_score = -1.0
        for v in sorted(remaining):
            deg_term = degree[v] / max_degree if max_degree > 0 else 0.0
            size_v = comp_sizes[comp_of[v]]
            if size_v == largest:
                other_max = top_two[1] if len(top_two) > 1 and _count_at(comp_sizes, largest) == 1 else (
                    largest if _count_at(comp_sizes, largest) > 1 else 0
                )
                new_largest = max(other_max, piece_max[v])
                dconn = (largest - new_largest) / largest
            else:
                dconn = 0.0
            score = alpha * deg_term + beta * dconn
            if score > best_score:
                best_score = score
                best_node = v
        assert best_node is not None
        entries.append((best_node, best_score))
        remaining.discard(best_node)
        for nb in und[best_node]:
            und[nb].discard(best_node)
        for nb in out_nbrs[best_node]:
            in_nbrs[nb].discard(best_node)
        for nb in in_nbrs[best_node]:
            out_nbrs[nb].discard(best_node)
        und[best_node] = set()
        out_nbrs[best_node] = set()
        in_nbrs[best_node] = set()
    return RankingResult(entries=tuple(entries), converged=True)


def _count_at(sizes: list[int], value: int) -> int:
    return sum(1 for s in sizes if s == value)


def _weak_components(remaining: set, und: dict):
    comp_of: dict[str, int] = {}
    sizes: list[int] = []
    for start in sorted(remaining):
        if start in comp_of:
            continue
        cid = len(sizes)
        stack = [start]
        comp_of[start] = cid
        count = 0
        while stack:
            v = stack.pop()
            count += 1
            for nb in und[v]:
                if nb in remaining and nb not in comp_of:
                    comp_of[nb] = cid
                    stack.append(nb)
        sizes.append(count)
    return comp_of, sizes


def _removal_piece_max(remaining: set, und: dict, comp_of: dict, comp_sizes: list[int]) -> dict[str, int]:
    """Largest surviving piece of a node's own component if that node is removed.

    One articulation-point DFS per component: a DFS child ``c`` of ``v``
    with ``low(c) >= disc(v)`` falls off as its own piece; whatever is
    left of the component is the remainder piece.
    """
    piece_max: dict[str, int] = {}
    visited: set = set()
    for root in sorted(remaining):
        if root in visited:
            continue
        comp_size = comp_sizes[comp_of[root]]
        disc: dict[str, int] = {}
        low: dict[str, int] = {}
        size: dict[str, int] = {}
        cut_pieces: dict[str, list[int]] = {}
        timer = 0
        disc[root] = low[root] = timer
        timer += 1
        size[root] = 1
        cut_pieces[root] = []
        stack = [(root, None, iter(sorted(und[root] & remaining)))]
        visited.add(root)
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for nb in it:
                if nb not in disc:
                    disc[nb] = low[nb] = timer
                    timer += 1
                    size[nb] = 1
                    cut_pieces[nb] = []
                    visited.add(nb)
                    stack.append((nb, v, iter(sorted(und[nb] & remaining))))
                    advanced = True
                    break
                elif nb != parent:
                    low[v] = min(low[v], disc[nb])
            if not advanced:
                stack.pop()
                if parent is not None:
                    low[parent] = min(low[parent], low[v])
                    size[parent] += size[v]
                    if low[v] >= disc[parent]:
                        cut_pieces[parent].append(size[v])
        for v in cut_pieces:
            pieces = list(cut_pieces[v])
            rest = comp_size - 1 - sum(pieces)
            if rest > 0:
                pieces.append(rest)
            piece_max[v] = max(pieces) if pieces else 0
    return piece_max


def centralities(graph: LinkGraph, max_iter: int = 1000, tol: float = 1e-9) -> CentralityResult:
    """Closeness, betweenness, and eigenvector centrality for every node.

    Closeness uses inbound shortest-path distances with the reachable-set
    size correction ``(r - 1) / (n - 1) * (r - 1) / sum(dist)``; nodes
    nobody can reach score 0. Betweenness counts directed shortest paths
    Brandes-style in exact rational arithmetic. Eigenvector centrality is
    power iteration on the transposed adjacency with a tiny uniform
    teleport so reducible graphs still converge; the result is
    L2-normalized.
    """
    _require_nonempty(graph, "centralities")
    nodes, out_nbrs, in_nbrs = _adjacency(graph)
    n = len(nodes)

    closeness: dict[str, float] = {}
    for v in nodes:
        dist = _bfs_distances(v, in_nbrs)
        reached = len(dist)
        total = sum(dist.values())
        if n > 1 and reached > 1 and total > 0:
            closeness[v] = ((reached - 1) / (n - 1)) * ((reached - 1) / total)
        else:
            closeness[v] = 0.0

    betweenness = _betweenness_exact(nodes, out_nbrs)

    x = {v: 1.0 / math.sqrt(n) for v in nodes}
    teleport = EIGENVECTOR_TELEPORT
    eig_converged = False
    for _ in range(max_iter):
        shared = teleport * sum(x.values()) / n
        new = {v: sum(x[u] for u in in_nbrs[v]) + shared for v in nodes}
        new = _l2_normalized(new)
        delta = sum(abs(new[v] - x[v]) for v in nodes)
        x = new
        if delta <= tol:
            eig_converged = True
            break

    return CentralityResult(
        closeness=closeness,
        betweenness=betweenness,
        eigenvector=x,
        eigenvector_converged=eig_converged,
    )


def _bfs_distances(source: str, nbrs: dict) -> dict[str, int]:
    dist = {source: 0}
    frontier = [source]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for v in frontier:
            for u in nbrs[v]:
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist


def _betweenness_exact(nodes: list[str], out_nbrs: dict) -> dict[str, float]:
    acc = {v: Fraction(0) for v in nodes}
    for s in nodes:
        dist = {s: 0}
        sigma = {s: 1}
        preds: dict[str, list[str]] = {s: []}
        order: list[str] = []
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                order.append(v)
                for w in out_nbrs[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        sigma[w] = 0
                        preds[w] = []
                        nxt.append(w)
                    if dist[w] == dist[v] + 1:
                        sigma[w] += sigma[v]
                        preds[w].append(v)
            frontier = nxt
        delta = {v: Fraction(0) for v in order}
        for w in reversed(order):
            for p in preds[w]:
                delta[p] += Fraction(sigma[p], sigma[w]) * (1 + delta[w])
            if w != s:
                acc[w] += delta[w]
    return {v: float(acc[v]) for v in nodes}


def kshell(nodes, edges) -> dict[str, int]:
    """Iterative-pruning shell index of each node of an undirected graph.

    Shell ``k`` holds the nodes removed while repeatedly deleting every
    node of degree at most ``k``.
    """
    node_list = sorted(set(nodes))
    adj: dict = {v: set() for v in node_list}
    for a, b in edges:
        if a == b:
            continue
        adj[a].add(b)
        adj[b].add(a)
    degree = {v: len(adj[v]) for v in node_list}
    alive = set(node_list)
    shell: dict[str, int] = {}
    k = 0
    while alive:
        peel = sorted(v for v in alive if degree[v] <= k)
        if not peel:
            k += 1
            continue
        while peel:
            v = peel.pop()
            if v not in alive:
                continue
            shell[v] = k
            alive.discard(v)
            for nb in adj[v]:
                if nb in alive:
                    degree[nb] -= 1
                    if degree[nb] <= k:
                        peel.append(nb)
    return shell


def load_edgelist(path) -> LinkGraph:
    """Read a ``src<TAB>dst`` edge-list file into a graph."""
    nodes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ConfigError(f"{path} line {lineno}: expected 'src<TAB>dst'")
        src, dst = parts
        nodes.add(src)
        nodes.add(dst)
        if src != dst:
            edges.add((src, dst))
    return LinkGraph(nodes=frozenset(nodes), edges=frozenset(edges))


def save_edgelist(graph: LinkGraph, path) -> None:
    lines = [f"{src}\t{dst}" for src, dst in sorted(graph.edges)]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8", newline="\n")
