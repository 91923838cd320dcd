"""Join-tree construction: moralize, triangulate (min-fill), extract
maximal cliques, connect them by a maximum spanning tree over separator
sizes, and assign each variable's CPT to a cluster containing its family.

All tie-breaks are pinned (lowest variable index, lowest cluster id) so
identical networks always produce identical trees.
"""

from __future__ import annotations

from dataclasses import dataclass

from .network import BeliefNetwork


@dataclass(frozen=True)
class Cluster:
    id: int
    scope: frozenset[str]
    families: tuple[str, ...]  # variables whose CPT is attached here


@dataclass(frozen=True)
class JoinTree:
    clusters: tuple[Cluster, ...]
    edges: tuple[tuple[int, int, frozenset[str]], ...]

    def neighbors(self, i: int) -> list[int]:
        out = []
        for a, b, _ in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)

    def separator(self, i: int, j: int) -> frozenset[str]:
        for a, b, sep in self.edges:
            if {a, b} == {i, j}:
                return sep
        raise KeyError(f"no edge between clusters {i} and {j}")

    def adjacency(self) -> dict[int, list[int]]:
        return {c.id: self.neighbors(c.id) for c in self.clusters}

    def pivot_for(self, name: str) -> int:
        """Lowest-id cluster containing the variable."""
        for c in self.clusters:
            if name in c.scope:
                return c.id
        raise KeyError(f"variable {name!r} in no cluster")

    def assigned_cluster(self, name: str) -> int:
        for c in self.clusters:
            if name in c.families:
                return c.id
        raise KeyError(f"CPT of {name!r} assigned to no cluster")


def moralize_and_triangulate(net: BeliefNetwork) -> tuple[dict[str, set[str]], list[str]]:
    """Return the moral graph with min-fill fill-in edges, plus the
    elimination order that produced it.  The filled graph is chordal."""
    names = net.names()
    graph: dict[str, set[str]] = {n: set() for n in names}
    for v in names:
        fam = net.family(v)
        for i in range(len(fam)):
            for j in range(i + 1, len(fam)):
                graph[fam[i]].add(fam[j])
                graph[fam[j]].add(fam[i])

    work = {n: set(adj) for n, adj in graph.items()}
    order: list[str] = []
    remaining = list(names)
    while remaining:
        best = None
        best_key = None
        for n in remaining:
            nbrs = list(work[n])
            fill = 0
            for i in range(len(nbrs)):
                for j in range(i + 1, len(nbrs)):
                    if nbrs[j] not in work[nbrs[i]]:
                        fill += 1
            key = (fill, net.index(n))
            if best_key is None or key < best_key:
                best, best_key = n, key
        order.append(best)
        nbrs = list(work[best])
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                a, b = nbrs[i], nbrs[j]
                if b not in work[a]:
                    work[a].add(b)
                    work[b].add(a)
                    graph[a].add(b)
                    graph[b].add(a)
        del work[best]
        for n in work:
            work[n].discard(best)
        remaining.remove(best)
    return graph, order


def build_jointree(net: BeliefNetwork) -> JoinTree:
    filled, order = moralize_and_triangulate(net)

    # Elimination cliques of a perfect order contain every maximal clique;
    # keep first occurrences after discarding subsets.
    work = {n: set(adj) for n, adj in filled.items()}
    raw: list[frozenset[str]] = []
    for v in order:
        raw.append(frozenset({v} | work[v]))
        del work[v]
        for n in work:
            work[n].discard(v)
    cliques: list[frozenset[str]] = []
    for c in raw:
        if any(c < other for other in raw):
            continue
        if c not in cliques:
            cliques.append(c)

    n = len(cliques)
    # Maximum spanning tree over separator cardinality; the candidate graph
    # is complete so disconnected networks still come out as one tree,
    # linked through empty separators.
    candidates = []
    for i in range(n):
        for j in range(i + 1, n):
            candidates.append((-len(cliques[i] & cliques[j]), i, j))
    candidates.sort()
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for negw, i, j in candidates:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            edges.append((i, j, frozenset(cliques[i] & cliques[j])))
        if len(edges) == n - 1:
            break

    assigned: dict[int, list[str]] = {i: [] for i in range(n)}
    for name in net.names():
        fam = set(net.family(name))
        best = min(
            (i for i in range(n) if fam <= cliques[i]),
            key=lambda i: (len(cliques[i]), i),
        )
        assigned[best].append(name)

    clusters = tuple(
        Cluster(i, cliques[i], tuple(assigned[i])) for i in range(n)
    )
    return JoinTree(clusters, tuple(edges))


def total_table_size(net: BeliefNetwork, jt: JoinTree) -> int:
    total = 0
    for c in jt.clusters:
        size = 1
        for v in c.scope:
            size *= net.cardinality(v)
        total += size
    return total
