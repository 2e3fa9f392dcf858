"""Simple undirected graphs and the structural operations the classifier needs.

Vertices are stored as integers 0..n-1; each carries a string label used for
I/O. Adjacency is kept both as frozensets and as bitmasks.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence


class GraphError(ValueError):
    """Raised for malformed graph input or violated preconditions."""


class GraphFormatError(GraphError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class NotTwoConnected(GraphError):
    def __init__(self, cut_vertex: int | None, msg: str = ""):
        super().__init__(msg or f"graph is not 2-connected (cut vertex {cut_vertex})")
        self.cut_vertex = cut_vertex


@dataclass(frozen=True)
class Graph:
    labels: tuple[str, ...]
    adj: tuple[frozenset[int], ...]

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], vertices: Iterable | None = None) -> "Graph":
        """Build a graph from label pairs. Labels are converted to strings."""
        order: list[str] = []
        index: dict[str, int] = {}

        def vid(x) -> int:
            s = str(x)
            if s not in index:
                index[s] = len(order)
                order.append(s)
            return index[s]

        for v in vertices or ():
            vid(v)
        nbrs: list[set[int]] = []
        pairs = []
        for u, w in edges:
            pairs.append((vid(u), vid(w)))
        nbrs = [set() for _ in order]
        for a, b in pairs:
            if a == b:
                raise GraphError(f"loop at {order[a]}")
            nbrs[a].add(b)
            nbrs[b].add(a)
        return cls(tuple(order), tuple(frozenset(s) for s in nbrs))

    @classmethod
    def from_masks(cls, masks: Sequence[int], labels: Sequence[str] | None = None) -> "Graph":
        n = len(masks)
        labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        adj = tuple(frozenset(u for u in range(n) if m >> u & 1) for m in masks)
        return cls(labels, adj)

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << u for u in nb) for nb in self.adj)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise GraphError(f"unknown vertex {label!r}") from None

    def label(self, v: int) -> str:
        return self.labels[v]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, w) for u in range(self.n) for w in sorted(self.adj[u]) if u < w]

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, w: int) -> bool:
        return w in self.adj[u]

    def subgraph(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph; returns it with the list new index -> old index."""
        keep = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(keep)}
        adj = tuple(frozenset(pos[u] for u in self.adj[v] if u in pos) for v in keep)
        return Graph(tuple(self.labels[v] for v in keep), adj), keep

    def edge_subgraph(self, edges: Iterable[tuple[int, int]]) -> tuple["Graph", list[int]]:
        """Subgraph formed by the given edges (and their ends)."""
        es = [tuple(e) for e in edges]
        keep = sorted({v for e in es for v in e})
        pos = {v: i for i, v in enumerate(keep)}
        nbrs = [set() for _ in keep]
        for u, w in es:
            if w not in self.adj[u]:
                raise GraphError(f"{self.labels[u]}-{self.labels[w]} is not an edge")
            nbrs[pos[u]].add(pos[w])
            nbrs[pos[w]].add(pos[u])
        return Graph(tuple(self.labels[v] for v in keep), tuple(frozenset(s) for s in nbrs)), keep

    def remove_vertices(self, drop: Iterable[int]) -> tuple["Graph", list[int]]:
        d = set(drop)
        return self.subgraph(v for v in range(self.n) if v not in d)

    def relabel(self, labels: Sequence[str]) -> "Graph":
        if len(labels) != self.n or len(set(map(str, labels))) != self.n:
            raise GraphError("relabel needs n distinct labels")
        return Graph(tuple(map(str, labels)), self.adj)

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp = [s]
            seen[s] = True
            i = 0
            while i < len(comp):
                for u in sorted(self.adj[comp[i]]):
                    if not seen[u]:
                        seen[u] = True
                        comp.append(u)
                i += 1
            out.append(sorted(comp))
        return out

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def bfs_path(self, src: int, targets: Iterable[int], avoid: Iterable[int] = ()) -> list[int] | None:
        """Shortest path from src to any target, internal vertices avoiding `avoid`."""
        tset = set(targets)
        bad = set(avoid)
        prev = {src: None}
        q = deque([src])
        while q:
            x = q.popleft()
            if x in tset and x != src:
                path = [x]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            for u in sorted(self.adj[x]):
                if u in prev:
                    continue
                if u in bad and u not in tset:
                    continue
                prev[u] = x
                q.append(u)
        return None

    def __str__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------- edge lists

def parse_edge_list(text: str) -> Graph:
    """Parse 'u v' lines; '#' starts a comment; 'vertex u' declares a vertex."""
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    seen: set[frozenset] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "vertex":
            if len(tok) != 2:
                raise GraphFormatError(lineno, "expected 'vertex <id>'")
            vertices.append(tok[1])
            continue
        if len(tok) != 2:
            raise GraphFormatError(lineno, f"expected two vertex ids, got {line!r}")
        u, w = tok
        if u == w:
            raise GraphFormatError(lineno, f"loop at {u}")
        key = frozenset((u, w))
        if key in seen:
            raise GraphFormatError(lineno, f"duplicate edge {u} {w}")
        seen.add(key)
        edges.append((u, w))
    if not edges and not vertices:
        raise GraphFormatError(0, "empty graph")
    return Graph.from_edges(edges, vertices)


def format_edge_list(G: Graph) -> str:
    lines = []
    touched = set()
    for u, w in G.edges():
        lines.append(f"{G.labels[u]} {G.labels[w]}")
        touched.update((u, w))
    for v in range(G.n):
        if v not in touched:
            lines.append(f"vertex {G.labels[v]}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------- named graphs

def _int_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    return Graph.from_edges(list(edges), range(n))


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return _int_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    """Path on n vertices."""
    if n < 1:
        raise GraphError("a path needs at least one vertex")
    return _int_graph(n, [(i, i + 1) for i in range(n - 1)])


def theta(*lengths: int) -> Graph:
    """Two branch vertices 0 and 1 joined by internally disjoint paths.

    Internal vertices are numbered path by path, in order from vertex 0.
    """
    if len(lengths) < 2:
        raise GraphError("theta needs at least two paths")
    ls = list(lengths)
    if any(x < 1 for x in ls) or ls.count(1) > 1:
        raise GraphError(f"invalid theta path lengths {ls}")
    edges = []
    nxt = 2
    for ell in ls:
        prev = 0
        for _ in range(ell - 1):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
        edges.append((prev, 1))
    return _int_graph(nxt, edges)


def complete_bipartite(p: int, q: int) -> Graph:
    return _int_graph(p + q, [(i, p + j) for i in range(p) for j in range(q)])


def cube_minus_vertex() -> Graph:
    """The 3-cube with vertex 000 removed; vertex i is the bit string i+1."""
    verts = list(range(1, 8))
    edges = [(a - 1, b - 1) for a, b in combinations(verts, 2) if bin(a ^ b).count("1") == 1]
    return _int_graph(7, edges)


def k33_minus_edge() -> Graph:
    """K_{3,3} on sides {0,1,2} and {3,4,5} without the edge 2-5."""
    return _int_graph(6, [(i, j) for i in range(3) for j in range(3, 6) if (i, j) != (2, 5)])


def mixed(extra: int = 0) -> Graph:
    """K_{3,3}-e with the edge 2-3 subdivided `extra` times."""
    G = k33_minus_edge()
    if extra == 0:
        return G
    edges = [e for e in G.edges() if e != (2, 3)]
    prev = 2
    for i in range(extra):
        edges.append((prev, 6 + i))
        prev = 6 + i
    edges.append((prev, 3))
    return _int_graph(6 + extra, edges)


def lollipop(c: int, t: int) -> Graph:
    """Cycle on 0..c-1 with a path of length t hanging from vertex 0."""
    G = cycle(c)
    edges = G.edges()
    prev = 0
    for i in range(t):
        edges.append((prev, c + i))
        prev = c + i
    return _int_graph(c + t, edges)


_IRREDUCIBLE = (
    [(0, 1), (0, 3), (2, 1), (2, 3), (4, 3), (4, 6), (5, 3), (5, 6), (1, 7), (3, 7)],
    [(1, 4), (2, 4), (0, 3), (1, 3), (0, 5), (2, 5), (0, 6), (2, 6), (7, 6), (7, 5)],
    [(0, 1), (0, 3), (2, 1), (2, 3), (4, 3), (4, 6), (5, 3), (5, 6), (0, 7), (2, 7)],
    [(7, 8), (9, 8), (7, 6), (9, 6), (4, 6), (5, 6), (4, 3), (5, 3), (0, 3), (2, 3), (0, 1), (2, 1)],
)


def irreducible(k: int) -> Graph:
    """The k-th (1..4) choosable graph that no degree-2 path or cut-edge contraction shrinks.

    1: theta(2,2,2) and C4 sharing a branch vertex of the theta.
    2: K_{3,3}-e with one path lengthened by two.
    3: theta(2,2,2) and C4 sharing a degree-2 vertex of the theta.
    4: three 4-cycles in a row, the middle one meeting the others at opposite vertices.
    """
    if not 1 <= k <= len(_IRREDUCIBLE):
        raise GraphError("irreducible(k) needs 1 <= k <= 4")
    edges = _IRREDUCIBLE[k - 1]
    return _int_graph(1 + max(max(e) for e in edges), edges)


def glued(A: Graph, B: Graph, path_len: int = 0, a: int = 0, b: int = 0) -> Graph:
    """Join vertex a of A to vertex b of B by a path of the given length.

    With length 0 the two vertices are identified. A keeps indices
    0..n(A)-1, new path vertices come next, then the rest of B in order.
    """
    if path_len < 0:
        raise GraphError("path length must be nonnegative")
    edges = list(A.edges())
    nxt = A.n
    prev = a
    for _ in range(path_len - 1):
        edges.append((prev, nxt))
        prev = nxt
        nxt += 1
    bmap = {}
    if path_len == 0:
        bmap[b] = a
    else:
        bmap[b] = nxt
        edges.append((prev, nxt))
        nxt += 1
    for v in range(B.n):
        if v not in bmap:
            bmap[v] = nxt
            nxt += 1
    edges += [(bmap[u], bmap[w]) for u, w in B.edges()]
    return _int_graph(nxt, edges)


def disjoint_union(A: Graph, B: Graph) -> Graph:
    edges = list(A.edges()) + [(u + A.n, w + A.n) for u, w in B.edges()]
    return _int_graph(A.n + B.n, edges)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_\-]*)|(.))")


def _tokenize(spec: str) -> list[str]:
    out = []
    pos = 0
    spec = spec.strip()
    while pos < len(spec):
        m = _TOKEN.match(spec, pos)
        if not m or m.end() == pos:
            break
        tok = m.group(1) or m.group(2) or m.group(3)
        if tok and not tok.isspace():
            out.append(tok)
        pos = m.end()
    return out


def build_named(spec: str) -> Graph:
    """Build a graph from the small naming language used by the CLI.

    Examples: cycle(6), theta(2,2,4), theta4(2,2,2,2), K(2,3),
    complete_bipartite(2,5), cube_minus_vertex, k33_minus_edge, mixed(2),
    lollipop(4,3), glued(cycle(4),theta(2,2,2),1), figure(S).
    """
    toks = _tokenize(spec)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        if pos >= len(toks):
            raise GraphError(f"unexpected end of graph spec {spec!r}")
        t = toks[pos]
        if expected is not None and t != expected:
            raise GraphError(f"expected {expected!r} in {spec!r}, got {t!r}")
        pos += 1
        return t

    def arg():
        t = peek()
        if t is not None and t.isdigit():
            take()
            return int(t)
        return expr()

    def expr():
        name = take()
        args = []
        if peek() == "(":
            take("(")
            if peek() != ")":
                args.append(arg())
                while peek() == ",":
                    take(",")
                    args.append(arg())
            take(")")
        return _apply(name, args)

    G = expr()
    if pos != len(toks):
        raise GraphError(f"trailing input in graph spec {spec!r}")
    return G


def _apply(name: str, args: list):
    key = name.lower().replace("-", "_")

    def ints(k=None):
        if any(not isinstance(a, int) for a in args) or (k is not None and len(args) != k):
            raise GraphError(f"{name} expects {k if k is not None else 'integer'} integer arguments")
        return args

    if key in ("cycle", "c"):
        return cycle(*ints(1))
    if key == "path":
        return path(*ints(1))
    if key == "theta":
        return theta(*ints())
    if key == "theta4":
        return theta(*ints(4))
    if key in ("complete_bipartite", "k"):
        return complete_bipartite(*ints(2))
    if key in ("cube_minus_vertex", "q3_v"):
        ints(0)
        return cube_minus_vertex()
    if key in ("k33_minus_edge", "k33_e"):
        ints(0)
        return k33_minus_edge()
    if key == "mixed":
        return mixed(*ints()) if args else mixed()
    if key == "lollipop":
        return lollipop(*ints(2))
    if key == "irreducible":
        return irreducible(*ints(1))
    if key == "figure":
        if len(args) != 1:
            raise GraphError("figure expects one name")
        from .witnesses import figure_graph
        return figure_graph(str(args[0]) if isinstance(args[0], int) else args[0])
    if key == "glued":
        if len(args) < 2 or not isinstance(args[0], Graph) or not isinstance(args[1], Graph):
            raise GraphError("glued expects two graphs and optional integers")
        rest = args[2:]
        if any(not isinstance(a, int) for a in rest) or len(rest) > 3:
            raise GraphError("glued expects (graph, graph[, path_len[, a[, b]]])")
        return glued(args[0], args[1], *rest)
    if key == "union":
        if len(args) != 2 or not all(isinstance(a, Graph) for a in args):
            raise GraphError("union expects two graphs")
        return disjoint_union(*args)
    if not args:
        # bare identifiers inside figure(...)
        return name
    raise GraphError(f"unknown graph constructor {name!r}")


# --------------------------------------------------------------- structure

@dataclass
class Bipartition:
    parts: tuple[frozenset[int], frozenset[int]] | None
    odd_cycle: list[int] | None = None

    @property
    def is_bipartite(self) -> bool:
        return self.parts is not None

    def side(self, v: int) -> int:
        assert self.parts is not None
        return 0 if v in self.parts[0] else 1


def bipartition(G: Graph) -> Bipartition:
    """2-colour G by BFS; on failure return an odd cycle as a vertex list."""
    color = [-1] * G.n
    parent = [-1] * G.n
    depth = [0] * G.n
    for s in range(G.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for u in sorted(G.adj[x]):
                if color[u] < 0:
                    color[u] = 1 - color[x]
                    parent[u] = x
                    depth[u] = depth[x] + 1
                    q.append(u)
                elif color[u] == color[x]:
                    a, b = x, u
                    left, right = [a], [b]
                    while a != b:
                        if depth[a] >= depth[b]:
                            a = parent[a]
                            left.append(a)
                        else:
                            b = parent[b]
                            right.append(b)
                    cyc = left + right[-2::-1]
                    return Bipartition(None, cyc)
    A = frozenset(v for v in range(G.n) if color[v] == 0)
    B = frozenset(v for v in range(G.n) if color[v] == 1)
    return Bipartition((A, B))


def core(G: Graph) -> tuple[Graph, list[int]]:
    """Repeatedly delete vertices of degree at most 1.

    Returns the core with the list new index -> old index. If nothing is
    left the core is a single vertex (the last one removed).
    """
    deg = [G.degree(v) for v in range(G.n)]
    alive = [True] * G.n
    stack = [v for v in range(G.n) if deg[v] <= 1]
    last = 0
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        last = v
        for u in G.adj[v]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] <= 1:
                    stack.append(u)
    keep = [v for v in range(G.n) if alive[v]]
    if not keep:
        keep = [last]
    return G.subgraph(keep)


@dataclass
class BlockDecomposition:
    blocks: list[frozenset[int]]
    block_edges: list[list[tuple[int, int]]]
    cut_vertices: frozenset[int]

    def cyclic(self) -> list[int]:
        """Indices of blocks that contain a cycle."""
        return [i for i, b in enumerate(self.blocks) if len(b) >= 3]

    def blocks_of(self, v: int) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if v in b]


def blocks(G: Graph) -> BlockDecomposition:
    """Biconnected components via an iterative Hopcroft-Tarjan DFS."""
    n = G.n
    disc = [-1] * n
    low = [0] * n
    timer = 0
    out_edges: list[list[tuple[int, int]]] = []
    cuts: set[int] = set()
    estack: list[tuple[int, int]] = []
    for root in range(n):
        if disc[root] >= 0:
            continue
        if not G.adj[root]:
            out_edges.append([])
            disc[root] = timer
            timer += 1
            out_edges[-1] = [(root, root)]
            continue
        disc[root] = low[root] = timer
        timer += 1
        children = 0
        stack = [(root, -1, iter(sorted(G.adj[root])))]
        while stack:
            v, par, it = stack[-1]
            advanced = False
            for u in it:
                if disc[u] < 0:
                    disc[u] = low[u] = timer
                    timer += 1
                    estack.append((v, u))
                    stack.append((u, v, iter(sorted(G.adj[u]))))
                    if v == root:
                        children += 1
                    advanced = True
                    break
                elif u != par and disc[u] < disc[v]:
                    estack.append((v, u))
                    low[v] = min(low[v], disc[u])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[v])
                if low[v] >= disc[p]:
                    if p != root:
                        cuts.add(p)
                    comp = []
                    while True:
                        e = estack.pop()
                        comp.append(e)
                        if e == (p, v):
                            break
                    out_edges.append(comp)
        if children > 1:
            cuts.add(root)
    blist = []
    elist = []
    for comp in out_edges:
        if comp and comp[0][0] == comp[0][1]:
            blist.append(frozenset([comp[0][0]]))
            elist.append([])
            continue
        vs = frozenset(x for e in comp for x in e)
        blist.append(vs)
        elist.append(sorted(tuple(sorted(e)) for e in comp))
    order = sorted(range(len(blist)), key=lambda i: (min(blist[i]), sorted(blist[i])))
    return BlockDecomposition([blist[i] for i in order], [elist[i] for i in order], frozenset(cuts))


def is_two_connected(G: Graph) -> bool:
    if G.n < 3:
        return False
    bd = blocks(G)
    return len(bd.blocks) == 1


def ear_decomposition(G: Graph, start: list[int] | None = None) -> list[list[int]]:
    """Ear decomposition of a 2-connected graph.

    The first ear is a closed walk [c0, ..., ck, c0] given as a vertex list
    with the start repeated; later ears are paths whose ends lie on earlier
    ears. If `start` is a cycle (vertex list, not repeated) it is used as the
    first ear.
    """
    if G.n < 3 or not G.is_connected():
        raise NotTwoConnected(None, "graph is not 2-connected")
    bd = blocks(G)
    if len(bd.blocks) != 1:
        cut = min(bd.cut_vertices) if bd.cut_vertices else None
        raise NotTwoConnected(cut)
    if start is None:
        u = 0
        w = min(G.adj[u])
        # shortest w-u path that does not use the edge uw closes a cycle
        prev = {w: None}
        q = deque([w])
        while q and u not in prev:
            x = q.popleft()
            for y in sorted(G.adj[x]):
                if (x == w and y == u) or y in prev:
                    continue
                prev[y] = x
                q.append(y)
        p = [u]
        while prev[p[-1]] is not None:
            p.append(prev[p[-1]])
        # p runs u, ..., w; the cycle is u, w, ..., back to u
        start = [u] + p[1:][::-1]
    cyc = list(start)
    for i in range(len(cyc)):
        if cyc[(i + 1) % len(cyc)] not in G.adj[cyc[i]]:
            raise GraphError("start is not a cycle of the graph")
    ears = [cyc + [cyc[0]]]
    inH = set(cyc)
    used = {frozenset((cyc[i], cyc[(i + 1) % len(cyc)])) for i in range(len(cyc))}
    total = G.m
    while len(used) < total:
        ear = None
        for a in sorted(inH):
            for x in sorted(G.adj[a]):
                if frozenset((a, x)) in used:
                    continue
                if x in inH:
                    ear = [a, x]
                else:
                    rest = G.bfs_path(x, inH - {a}, avoid=inH)
                    if rest is None:
                        raise NotTwoConnected(a)
                    ear = [a] + rest
                break
            if ear:
                break
        if ear is None:
            raise NotTwoConnected(None, "graph is not connected")
        ears.append(ear)
        inH.update(ear)
        for i in range(len(ear) - 1):
            used.add(frozenset((ear[i], ear[i + 1])))
    return ears


# ----------------------------------------------------------- isomorphism

def _refine(G: Graph, init: Sequence[int] | None = None) -> list[int]:
    """Stable colour refinement; returns a colour per vertex (canonical ids)."""
    col = list(init) if init is not None else [0] * G.n
    while True:
        sig = [(col[v], tuple(sorted(col[u] for u in G.adj[v]))) for v in range(G.n)]
        keys = sorted(set(sig))
        rank = {k: i for i, k in enumerate(keys)}
        new = [rank[s] for s in sig]
        if len(keys) == len(set(col)):
            return new
        col = new


def _iso_search(G: Graph, H: Graph, first_only: bool) -> Iterator[list[int]]:
    if G.n != H.n or G.m != H.m:
        return
    # joint refinement on the disjoint union keeps colours comparable
    U = disjoint_union(G, H)
    cu = _refine(U, [U.degree(v) for v in range(U.n)])
    colg = cu[: G.n]
    colh = cu[G.n:]
    if sorted(colg) != sorted(colh):
        return
    order: list[int] = []
    # visit vertices from small colour classes outward, keeping connectivity
    remaining = set(range(G.n))
    while remaining:
        s = min(remaining, key=lambda v: (colg.count(colg[v]), v))
        comp = [s]
        remaining.discard(s)
        i = 0
        while i < len(comp):
            for u in sorted(G.adj[comp[i]], key=lambda u: (colg.count(colg[u]), u)):
                if u in remaining:
                    remaining.discard(u)
                    comp.append(u)
            i += 1
        order.extend(comp)
    by_col: dict[int, list[int]] = {}
    for w in range(H.n):
        by_col.setdefault(colh[w], []).append(w)
    gm, hm = G.masks, H.masks
    mapping = [-1] * G.n
    used = [False] * H.n

    def rec(i: int):
        if i == len(order):
            yield list(mapping)
            return
        v = order[i]
        for w in by_col[colg[v]]:
            if used[w]:
                continue
            ok = True
            for j in range(i):
                x = order[j]
                if ((gm[v] >> x) & 1) != ((hm[w] >> mapping[x]) & 1):
                    ok = False
                    break
            if not ok:
                continue
            mapping[v] = w
            used[w] = True
            yield from rec(i + 1)
            used[w] = False
            mapping[v] = -1

    gen = rec(0)
    if first_only:
        for m in gen:
            yield m
            return
    else:
        yield from gen


def is_isomorphic(G: Graph, H: Graph) -> dict[int, int] | None:
    """Return a vertex mapping G -> H if the graphs are isomorphic."""
    for m in _iso_search(G, H, True):
        return {v: m[v] for v in range(G.n)}
    return None


def automorphisms(G: Graph) -> list[tuple[int, ...]]:
    """All automorphisms of G as permutation tuples (identity first)."""
    auts = [tuple(m) for m in _iso_search(G, G, False)]
    ident = tuple(range(G.n))
    auts.sort(key=lambda p: (p != ident, p))
    return auts


# ----------------------------------------------------------- contractions

def _merge(G: Graph, keep: int, gone: int, drop: Iterable[int] = ()) -> Graph:
    """Identify `gone` into `keep`, delete `drop`, and reindex."""
    dset = set(drop)
    nbrs = [set(a) for a in G.adj]
    for u in nbrs[gone]:
        if u != keep:
            nbrs[keep].add(u)
            nbrs[u].add(keep)
    nbrs[keep].discard(gone)
    alive = [v for v in range(G.n) if v != gone and v not in dset]
    pos = {v: i for i, v in enumerate(alive)}
    adj = tuple(frozenset(pos[u] for u in nbrs[v] if u in pos and u != v) for v in alive)
    return Graph(tuple(G.labels[v] for v in alive), adj)


def contract_cut_edge(G: Graph, e: tuple[int, int]) -> Graph:
    """Contract a cut edge u-w; the merged vertex keeps u's label."""
    u, w = e
    if w not in G.adj[u]:
        raise GraphError("not an edge")
    H = Graph(G.labels, tuple(a - {u} if i == w else (a - {w} if i == u else a) for i, a in enumerate(G.adj)))
    reach = H.bfs_path(u, [w])
    if reach is not None:
        raise GraphError(f"{G.labels[u]}-{G.labels[w]} is not a cut edge")
    return _merge(G, u, w)


def degree2_run(G: Graph, center: int) -> list[int]:
    """The five-vertex path of degree-2 vertices centred at `center`."""
    def bad(v, why):
        raise GraphError(f"{G.labels[v]}: {why}")

    if G.degree(center) != 2:
        bad(center, "centre must have degree 2")
    a, b = sorted(G.adj[center])
    run = [a, center, b]
    for end in (a, b):
        if G.degree(end) != 2:
            bad(end, "neighbour of the centre must have degree 2")
    (c,) = tuple(G.adj[a] - {center})
    (d,) = tuple(G.adj[b] - {center})
    for end in (c, d):
        if G.degree(end) != 2:
            bad(end, "vertex at distance two from the centre must have degree 2")
    run = [c] + run + [d]
    if len(set(run)) != 5:
        bad(center, "the run closes into a cycle shorter than five vertices")
    return run


def contract_degree2_path(G: Graph, center: int) -> Graph:
    """Delete the middle of a five-vertex degree-2 run and identify its neighbours.

    The merged vertex keeps the label of the lower-indexed neighbour.
    """
    p = degree2_run(G, center)
    return _merge(G, p[1], p[3], drop=[p[2]])
