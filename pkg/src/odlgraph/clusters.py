"""Session co-occurrence clustering.

Sessions enter as sets of visited activities.  Counting how many sessions
contain each pair yields a weighted undirected graph; after a frequency cut,
activity clusters fall out either as connected components (fast) or as
maximal cliques (coherent, enumerated with pivoting Bron-Kerbosch search
behind a size guard).  All outputs are deterministically ordered so cluster
files diff cleanly between runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable

from .errors import GraphTooLarge, ParseError
from .paths import erase_cycles
from .sessions import Session

DEFAULT_MIN_COOCCURRENCE = 2  # a single co-visit is noise
MAX_REPORTED_CLIQUES = 1_000_000


@dataclass(frozen=True)
class SessionVisitSet:
    session_key: tuple[str, int]  # (learner_id, session_index)
    visited: frozenset[str]


@dataclass(frozen=True)
class CoOccurrenceGraph:
    """Undirected weighted graph; weights are keyed by sorted node pairs."""

    nodes: frozenset[str]
    weights: dict[tuple[str, str], int]


class ClusterKind(str, Enum):
    CLIQUE = "clique"
    COMPONENT = "component"


@dataclass(frozen=True)
class Cluster:
    members: frozenset[str]
    kind: ClusterKind
    support: int  # minimum pair weight inside the cluster


def session_visit_sets(sessions: Iterable[Session], strategy_paths: bool = False) -> list[SessionVisitSet]:
    """One visit set per session; repeats within a session count once.

    With ``strategy_paths`` the per-session walk is loop-erased first, so
    nodes visited only inside detours drop out.
    """
    out: list[SessionVisitSet] = []
    for session in sessions:
        ids: list[str] = [b.activity_id for b in session.blocks]
        if strategy_paths:
            ids = erase_cycles(ids)
        out.append(SessionVisitSet((session.learner_id, session.session_index), frozenset(ids)))
    return out


def cooccurrence(session_sets: Iterable[SessionVisitSet]) -> CoOccurrenceGraph:
    """weight(a, b) = number of sessions whose visit set contains both."""
    weights: dict[tuple[str, str], int] = {}
    nodes: set[str] = set()
    for svs in session_sets:
        nodes.update(svs.visited)
        for pair in combinations(sorted(svs.visited), 2):
            weights[pair] = weights.get(pair, 0) + 1
    return CoOccurrenceGraph(frozenset(nodes), weights)


def threshold(graph: CoOccurrenceGraph, min_count: int) -> CoOccurrenceGraph:
    """Drop edges below ``min_count`` and any node left without edges."""
    if min_count < 1:
        raise ValueError("min_count must be at least 1")
    weights = {pair: w for pair, w in graph.weights.items() if w >= min_count}
    nodes = {n for pair in weights for n in pair}
    return CoOccurrenceGraph(frozenset(nodes), weights)


def _adjacency(graph: CoOccurrenceGraph) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {n: set() for n in graph.nodes}
    for a, b in graph.weights:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def _min_weight(graph: CoOccurrenceGraph, members: frozenset[str]) -> int:
    return min(w for pair, w in graph.weights.items() if pair[0] in members and pair[1] in members)


def connected_components(graph: CoOccurrenceGraph) -> list[Cluster]:
    """Components over the surviving edges; singletons excluded."""
    adj = _adjacency(graph)
    seen: set[str] = set()
    clusters: list[Cluster] = []
    for start in sorted(graph.nodes):
        if start in seen or not adj[start]:
            continue
        component: set[str] = set()
        frontier = [start]
        while frontier:
            node = frontier.pop()
            if node in component:
                continue
            component.add(node)
            frontier.extend(adj[node] - component)
        seen.update(component)
        members = frozenset(component)
        clusters.append(Cluster(members, ClusterKind.COMPONENT, _min_weight(graph, members)))
    return clusters


def maximal_cliques(graph: CoOccurrenceGraph, max_nodes_guard: int = 2000) -> list[Cluster]:
    """All maximal cliques of size >= 2, via pivoting branch and bound.

    Raises :class:`GraphTooLarge` when the node count exceeds the guard or
    more than ``MAX_REPORTED_CLIQUES`` cliques come out.
    """
    if len(graph.nodes) > max_nodes_guard:
        raise GraphTooLarge(len(graph.nodes), max_nodes_guard, "nodes")
    adj = _adjacency(graph)
    found: list[tuple[str, ...]] = []

    def expand(clique: list[str], candidates: set[str], excluded: set[str]) -> None:
        if not candidates and not excluded:
            if len(clique) >= 2:
                found.append(tuple(sorted(clique)))
                if len(found) > MAX_REPORTED_CLIQUES:
                    raise GraphTooLarge(len(found), MAX_REPORTED_CLIQUES, "cliques")
            return
        pivot = max(sorted(candidates | excluded), key=lambda u: len(adj[u] & candidates))
        for v in sorted(candidates - adj[pivot]):
            expand(clique + [v], candidates & adj[v], excluded & adj[v])
            candidates = candidates - {v}
            excluded = excluded | {v}

    expand([], set(graph.nodes), set())
    return [
        Cluster(frozenset(members), ClusterKind.CLIQUE, _min_weight(graph, frozenset(members)))
        for members in sorted(found)
    ]


def format_clusters(clusters: Iterable[Cluster]) -> str:
    """One cluster per line: ``kind<TAB>support<TAB>member,member,...``."""
    rows = sorted(clusters, key=lambda c: (c.kind.value, tuple(sorted(c.members))))
    lines = [f"{c.kind.value}\t{c.support}\t{','.join(sorted(c.members))}" for c in rows]
    return "\n".join(lines) + ("\n" if lines else "")


def read_clusters(text: str) -> list[Cluster]:
    """Parse :func:`format_clusters` output back into clusters."""
    clusters: list[Cluster] = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        parts = raw.split("\t")
        if len(parts) != 3:
            raise ParseError(line_no, "expected kind<TAB>support<TAB>members")
        kind_text, support_text, member_text = parts
        try:
            kind = ClusterKind(kind_text)
        except ValueError:
            raise ParseError(line_no, f"unknown cluster kind {kind_text!r}") from None
        try:
            support = int(support_text)
        except ValueError:
            raise ParseError(line_no, f"bad support {support_text!r}") from None
        members = frozenset(m for m in member_text.split(",") if m)
        if len(members) < 2:
            raise ParseError(line_no, "cluster needs at least two members")
        clusters.append(Cluster(members, kind, support))
    return clusters
