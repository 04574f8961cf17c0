"""Seed Stokes matrices whose symmetrizations are the ADE Cartan
matrices, plus exact matching and bounded orbit detection."""

from collections import deque
from fractions import Fraction

from . import braid, exact
from .errors import InvalidRank

FAMILIES = ("A", "D", "E")


def _check_rank(family, rank):
    if family == "A" and rank >= 1:
        return
    if family == "D" and rank >= 4:
        return
    if family == "E" and rank in (6, 7, 8):
        return
    raise InvalidRank(f"no simply-laced type {family}_{rank}")


def dynkin_edges(family, rank):
    """Edges (1-based node pairs) of the Dynkin graph, in the node
    numbering used by the seed matrices."""
    _check_rank(family, rank)
    if family == "A":
        return tuple((i, i + 1) for i in range(1, rank))
    if family == "D":
        # chain 1..n-1 with the extra node n attached at n-2
        edges = [(i, i + 1) for i in range(1, rank - 1)]
        edges.append((rank - 2, rank))
        return tuple(edges)
    # E_n: chain 1..n-1 with the extra node n attached at n-3
    edges = [(i, i + 1) for i in range(1, rank - 1)]
    edges.append((rank - 3, rank))
    return tuple(edges)


def cartan_seed(family, rank):
    """Upper unitriangular seed with -1 at (j, l), j < l, for each edge
    of the Dynkin graph."""
    edges = dynkin_edges(family, rank)
    rows = [
        [Fraction(int(i == j)) for j in range(rank)] for i in range(rank)
    ]
    for a, b in edges:
        j, l = sorted((a, b))
        rows[j - 1][l - 1] = Fraction(-1)
    return tuple(tuple(row) for row in rows)


def symmetrize(s):
    n = len(s)
    return tuple(
        tuple(s[i][j] + s[j][i] for j in range(n)) for i in range(n)
    )


def _graph_from_cartan(m):
    """Adjacency sets of the off-diagonal pattern, or None if the matrix
    is not a symmetric integer matrix with 2s on the diagonal and
    entries in {0, -1} off it."""
    n = len(m)
    adj = {i: set() for i in range(n)}
    for i in range(n):
        if m[i][i] != 2:
            return None
        for j in range(n):
            if i == j:
                continue
            if m[i][j] != m[j][i] or m[i][j] not in (0, -1):
                return None
            if m[i][j] == -1:
                adj[i].add(j)
    return adj


def _classify_tree(adj, nodes):
    """Classify one connected simply-laced diagram by branch profile."""
    k = len(nodes)
    degs = {v: len(adj[v] & nodes) for v in nodes}
    if sum(degs.values()) != 2 * (k - 1):
        return None  # not a tree
    if any(d > 3 for d in degs.values()):
        return None
    forks = [v for v in nodes if degs[v] == 3]
    if not forks:
        return ("A", k)
    if len(forks) > 1:
        return None
    fork = forks[0]
    lengths = []
    for start in adj[fork] & nodes:
        length, prev, cur = 1, fork, start
        while True:
            nxt = (adj[cur] & nodes) - {prev}
            if not nxt:
                break
            prev, cur = cur, nxt.pop()
            length += 1
        lengths.append(length)
    lengths.sort()
    if lengths[0] == 1 and lengths[1] == 1:
        return ("D", k)
    if lengths[:2] == [1, 2] and lengths[2] in (2, 3, 4):
        return ("E", k)
    return None


def classify_forest(m):
    """Component types of a symmetric {2, -1} matrix, or None if any
    component is not an ADE diagram."""
    adj = _graph_from_cartan(m)
    if adj is None:
        return None
    unvisited = set(range(len(m)))
    components = []
    while unvisited:
        seed = next(iter(unvisited))
        comp, stack = {seed}, [seed]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        unvisited -= comp
        kind = _classify_tree(adj, comp)
        if kind is None:
            return None
        components.append(kind)
    return tuple(sorted(components))


def match_cartan(m, up_to_permutation=False):
    """Match a symmetric integer matrix against the ADE catalog.

    Without the flag, only literal equality with a seed symmetrization
    counts; with it, any simultaneous row/column permutation does
    (decided by classifying the Dynkin graph, which determines the
    matrix up to node relabeling)."""
    n = len(m)
    kinds = classify_forest(m)
    if kinds is None or len(kinds) != 1:
        return None
    family, rank = kinds[0]
    if family == "E" and rank not in (6, 7, 8):
        return None
    if family == "D" and rank < 4:
        # a (1,1,k)-fork with rank < 4 cannot occur; A-types already
        # handled by the path branch
        return None
    if up_to_permutation:
        return (family, rank)
    if m == symmetrize(cartan_seed(family, rank)):
        return (family, rank)
    return None


def detect_ade(s, orbit_bound=2, up_to_permutation=False, max_nodes=200000):
    """Bounded breadth-first search over the braid orbit of S for a
    representative whose symmetrization is an ADE Cartan matrix.

    Returns (cartan_type, witness_word) or None (inconclusive)."""
    exact.check_unitriangular(s)
    n = len(s)
    gens = braid._generators(n)
    seen = {s}
    frontier = deque([(s, ())])
    while frontier:
        mat, word = frontier.popleft()
        hit = match_cartan(symmetrize(mat), up_to_permutation)
        if hit is not None:
            return hit, word
        if len(word) >= orbit_bound:
            continue
        for gen in gens:
            nxt = braid.apply_word(mat, (gen,))
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > max_nodes:
                    return None
                frontier.append((nxt, word + (gen,)))
    return None
