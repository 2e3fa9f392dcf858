"""Catalogue of bad and forcing list assignments, and ways to build new ones.

Bad assignments admit no 2-fold colouring. Forcing assignments restrict the
colourings one vertex can receive. Both transfer to larger graphs through
strong minors (lift_witness) and combine at cut vertices (compose_forcing).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import combinations, permutations
from typing import Mapping, Sequence

from .coloring import (
    FastSolver, ListAssignment, TooManyHighDegree, colors_of, find_bfold_coloring, fmt_set,
    forcing_analysis, parse_set, path_dp_solve, subsets_of_size, to_mask,
)
from .graph import Graph, GraphError


class WitnessError(ValueError):
    pass


# ------------------------------------------------------------ catalogue

@dataclass(frozen=True)
class ForcingClaim:
    vertex: str
    shape: str
    allowed: tuple[int, ...] | None = None


@dataclass(frozen=True)
class CatalogueEntry:
    id: str
    graph: Graph
    lists: ListAssignment
    kind: str                       # "bad" or "forcing"
    start: str | None = None        # vertex whose colourings are checked first
    claims: tuple[ForcingClaim, ...] = ()
    chains: tuple[tuple[tuple[str, int | None], ...], ...] = ()


FIGURES = ("figS", "figQ", "figT", "figN", "figU", "figE", "figP", "figR", "figY", "figZ",
           "theta333", "theta2224",
           "figWW", "figXX", "figUU", "figVV", "figAA", "figBB", "C4lem")


def _parse_entry(name: str, text: str) -> CatalogueEntry:
    kind = None
    start = None
    claims = []
    chains = []
    lists: dict[str, int] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0]
        try:
            if head == "kind":
                kind = tok[1]
            elif head == "start":
                start = tok[1]
            elif head == "list":
                lists[tok[1]] = parse_set(tok[2])
            elif head == "edge":
                edges.append((tok[1], tok[2]))
            elif head == "claim":
                allowed = tuple(sorted(parse_set(t) for t in tok[3:])) or None
                claims.append(ForcingClaim(tok[1], tok[2], allowed))
            elif head == "chain":
                steps = []
                for t in tok[1:]:
                    v, s = t.split("=")
                    steps.append((v, None if s == "-" else parse_set(s)))
                chains.append(tuple(steps))
            else:
                raise ValueError(f"unknown directive {head!r}")
        except (IndexError, ValueError) as e:
            raise WitnessError(f"{name}.txt line {lineno}: {e}") from None
    if kind not in ("bad", "forcing"):
        raise WitnessError(f"{name}.txt: missing kind")
    G = Graph.from_edges(edges, vertices=list(lists))
    L = ListAssignment(tuple(lists[lab] for lab in G.labels))
    return CatalogueEntry(name, G, L, kind, start, tuple(claims), tuple(chains))


@lru_cache(maxsize=None)
def load_entry(name: str) -> CatalogueEntry:
    try:
        text = resources.files("choosekit.data.figures").joinpath(f"{name}.txt").read_text()
    except FileNotFoundError:
        raise WitnessError(f"no catalogue entry named {name!r}") from None
    return _parse_entry(name, text)


def catalogue() -> list[CatalogueEntry]:
    return [load_entry(n) for n in FIGURES]


def figure_graph(name: str) -> Graph:
    return load_entry(name).graph


# ------------------------------------------------------- verification

@dataclass
class EntryResult:
    id: str
    kind: str
    ok: bool
    details: list[str]


@dataclass
class CatalogueReport:
    results: list[EntryResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            out.append(f"{'ok  ' if r.ok else 'FAIL'} {r.id:10s} {r.kind:8s} " + "; ".join(r.details))
        return out


def replay_chain(G: Graph, L: ListAssignment, chain) -> str | None:
    """Check a propagation chain; returns an error message or None.

    The first step fixes a colouring. Each later step must be the only
    choice left once the colours of already coloured neighbours are removed,
    and a final '-' step must leave fewer than two colours.
    """
    phi: dict[int, int] = {}
    for i, (lab, S) in enumerate(chain):
        v = G.index(lab)
        left = L[v]
        for u in G.adj[v]:
            if u in phi:
                left &= ~phi[u]
        if i == 0:
            if S is None or S & ~L[v] or S & ~left:
                return f"start {lab}={fmt_set(S or 0)} is not available"
            phi[v] = S
            continue
        if S is None:
            if bin(left).count("1") >= 2:
                return f"{lab} still has {fmt_set(left)}"
            return None
        if left != S:
            return f"{lab} has {fmt_set(left)} left, expected {fmt_set(S)}"
        phi[v] = S
    return "chain does not end in an uncolourable vertex"


def verify_entry(e: CatalogueEntry) -> EntryResult:
    G, L = e.graph, e.lists
    details = []
    ok = True
    if e.kind == "bad":
        phi = find_bfold_coloring(G, L, 2)
        if phi is None:
            details.append("no 2-fold colouring")
        else:
            ok = False
            details.append("coloured: " + " ".join(f"{G.labels[v]}={fmt_set(S)}" for v, S in enumerate(phi)))
        if e.start is not None:
            rep = forcing_analysis(G, L, 2, G.index(e.start))
            if rep.allowed:
                ok = False
                details.append(f"{e.start} extends with {' '.join(fmt_set(S) for S in rep.allowed)}")
    else:
        for c in e.claims:
            rep = forcing_analysis(G, L, 2, G.index(c.vertex))
            got = tuple(sorted(rep.allowed))
            good = rep.shape == c.shape and (c.allowed is None or got == c.allowed)
            ok &= good
            details.append(f"{c.vertex}: {rep.describe()}" + ("" if good else f" (claimed {c.shape}"
                           + (" " + " ".join(fmt_set(S) for S in c.allowed) if c.allowed else "") + ")"))
    for chain in e.chains:
        err = replay_chain(G, L, chain)
        if err:
            ok = False
            details.append(f"chain {chain[0][0]}={fmt_set(chain[0][1])}: {err}")
    if e.chains:
        details.append(f"{len(e.chains)} chains replayed")
    return EntryResult(e.id, e.kind, ok, details)


def verify_catalogue() -> CatalogueReport:
    return CatalogueReport([verify_entry(e) for e in catalogue()])


# --------------------------------------------------- strong minor lifting

@dataclass
class WitnessBundle:
    graph: Graph
    lists: ListAssignment
    b: int
    provenance: list[str] = field(default_factory=list)

    def check(self) -> bool:
        return _refuted(self.graph, self.lists, self.b)

    def to_json(self) -> dict:
        return {
            "graph": [[self.graph.labels[u], self.graph.labels[w]] for u, w in self.graph.edges()],
            "vertices": list(self.graph.labels),
            "lists": self.lists.to_dict(self.graph),
            "b": self.b,
            "provenance": list(self.provenance),
        }


def _refuted(G: Graph, L: ListAssignment, b: int) -> bool:
    """True when G has no b-fold L-colouring."""
    try:
        return path_dp_solve(G, L, b) is None
    except TooManyHighDegree:
        return find_bfold_coloring(G, L, b) is None


@dataclass
class StrongMinorEmbedding:
    """A strong minor model of target inside source.

    Each target vertex h owns a bag (K_h, D_h) of source vertices. The
    reduction deletes every D vertex and identifies its neighbours in K_h;
    only K-D edges inside a bag and K-K edges between bags of adjacent
    target vertices are kept. Source vertices outside all bags are dropped.
    """

    source: Graph
    target: Graph
    bags: dict[int, tuple[frozenset[int], frozenset[int]]]

    def kept_edges(self) -> list[tuple[int, int]]:
        owner = self._owner()
        out = []
        for u, w in self.source.edges():
            if u not in owner or w not in owner:
                continue
            (hu, ku), (hw, kw) = owner[u], owner[w]
            if hu == hw and ku != kw:
                out.append((u, w))
            elif hu != hw and ku and kw and self.target.has_edge(hu, hw):
                out.append((u, w))
        return out

    def _owner(self) -> dict[int, tuple[int, bool]]:
        owner = {}
        for h, (K, D) in self.bags.items():
            for v in K:
                owner[v] = (h, True)
            for v in D:
                owner[v] = (h, False)
        return owner

    def validate(self) -> list[str]:
        errs = []
        H = self.target
        if sorted(self.bags) != list(range(H.n)):
            errs.append("every target vertex needs exactly one bag")
            return errs
        seen = set()
        for h, (K, D) in self.bags.items():
            if not K:
                errs.append(f"bag of {H.labels[h]} has no K vertex")
            if K & D:
                errs.append(f"bag of {H.labels[h]} has overlapping K and D")
            for v in K | D:
                if not 0 <= v < self.source.n:
                    errs.append(f"bag of {H.labels[h]} has unknown vertex {v}")
                elif v in seen:
                    errs.append(f"vertex {self.source.labels[v]} is in two bags")
                seen.add(v)
        if errs:
            return errs
        kept = self.kept_edges()
        inside = {h: [] for h in self.bags}
        owner = self._owner()
        between = set()
        for u, w in kept:
            hu, hw = owner[u][0], owner[w][0]
            if hu == hw:
                inside[hu].append((u, w))
            else:
                between.add((min(hu, hw), max(hu, hw)))
        for h, (K, D) in self.bags.items():
            verts = K | D
            comp = {min(verts)}
            stack = [min(verts)]
            nb = {v: set() for v in verts}
            for u, w in inside[h]:
                nb[u].add(w)
                nb[w].add(u)
            while stack:
                x = stack.pop()
                for y in nb[x] - comp:
                    comp.add(y)
                    stack.append(y)
            if comp != verts:
                errs.append(f"bag of {H.labels[h]} is not connected through K-D edges")
        for u, w in H.edges():
            if (u, w) not in between:
                errs.append(f"target edge {H.labels[u]}-{H.labels[w]} is not realised")
        return errs

    def steps(self) -> list[tuple[int, tuple[int, ...]]]:
        """Deletion order: (deleted vertex, neighbours it identifies)."""
        out = []
        for h in sorted(self.bags):
            K, D = self.bags[h]
            for d in sorted(D):
                out.append((d, tuple(sorted(u for u in self.source.adj[d] if u in K))))
        return out

    def replay(self) -> Graph:
        """Carry out the reduction and return the resulting graph."""
        kept = self.kept_edges()
        owner = self._owner()
        root = {v: v for v in owner}

        def find(x):
            while root[x] != x:
                root[x] = root[root[x]]
                x = root[x]
            return x

        adj = {v: set() for v in owner}
        for u, w in kept:
            adj[u].add(w)
            adj[w].add(u)
        alive = set(owner)
        for d, _ in self.steps():
            nbrs = {find(u) for u in adj[d] if u in alive}
            alive.discard(d)
            nbrs = sorted(nbrs)
            for x in nbrs[1:]:
                root[x] = nbrs[0]
        edges = set()
        for u, w in kept:
            if u in alive and w in alive:
                a, b = find(u), find(w)
                if a != b:
                    edges.add((min(a, b), max(a, b)))
        reps = sorted({find(v) for v in alive})
        G = Graph.from_edges([(self.source.labels[a], self.source.labels[b]) for a, b in sorted(edges)],
                             vertices=[self.source.labels[r] for r in reps])
        return G

    def describe(self) -> list[str]:
        S, H = self.source, self.target
        out = []
        for h in sorted(self.bags):
            K, D = self.bags[h]
            out.append(f"{H.labels[h]} <- K={{{','.join(S.labels[v] for v in sorted(K))}}}"
                       + (f" D={{{','.join(S.labels[v] for v in sorted(D))}}}" if D else ""))
        return out


def identity_embedding(G: Graph) -> StrongMinorEmbedding:
    return StrongMinorEmbedding(G, G, {v: (frozenset([v]), frozenset()) for v in range(G.n)})


def lift_witness(H: Graph, L_H: ListAssignment, emb: StrongMinorEmbedding, b: int = 2,
                 provenance: Sequence[str] = ()) -> WitnessBundle:
    """Lift a bad assignment of H to the source graph of the embedding."""
    if emb.target is not H and (emb.target.n != H.n or set(emb.target.edges()) != set(H.edges())):
        raise WitnessError("embedding target does not match H")
    errs = emb.validate()
    if errs:
        raise WitnessError("invalid embedding: " + "; ".join(errs))
    a = 2 * b
    if any(bin(m).count("1") != a for m in L_H.lists):
        raise WitnessError(f"lifting needs a {a}-assignment")
    G = emb.source
    base = to_mask(range(1, a + 1))
    lists = [base] * G.n
    for h, (K, D) in emb.bags.items():
        for v in K | D:
            lists[v] = L_H[h]
    L = ListAssignment(tuple(lists))
    bundle = WitnessBundle(G, L, b, list(provenance) + ["lift: " + " ".join(emb.describe())])
    if not bundle.check():
        raise WitnessError("lifted assignment is colourable")
    return bundle


def path_segments(length: int, target: int, even_at: int | None = None) -> list[tuple[int, int]] | None:
    """Split a path with `length` internal vertices into `target` odd segments.

    Returns (start, size) pairs or None when the parity does not allow it.
    Inside each segment the vertices at even offsets form K and the others D.
    When even_at is given, that position must land at an even offset.
    """
    extra = length - target
    if extra < 0 or extra % 2:
        return None
    if target == 0:
        return [] if length == 0 else None
    sizes = [1] * target
    if even_at is None:
        sizes[0] += extra
        return _segs(sizes)
    # choose which segment absorbs the extra vertices so even_at sits at an even offset
    for i in range(target):
        sz = [1] * target
        sz[i] += extra
        segs = _segs(sz)
        for s, n in segs:
            if s <= even_at < s + n and (even_at - s) % 2 == 0:
                return segs
    # split the surplus over two segments
    for i in range(target):
        for j in range(i + 1, target):
            for x in range(0, extra + 1, 2):
                sz = [1] * target
                sz[i] += x
                sz[j] += extra - x
                segs = _segs(sz)
                for s, n in segs:
                    if s <= even_at < s + n and (even_at - s) % 2 == 0:
                        return segs
    return None


def _segs(sizes):
    out = []
    s = 0
    for n in sizes:
        out.append((s, n))
        s += n
    return out


# ------------------------------------------------------- forcing transfer

def shift_forcing(H: Graph, x: int, L_sub) -> ListAssignment:
    """Extend an assignment of H - x to H by copying the list of x's neighbour.

    L_sub is either indexed like H.remove_vertices([x]) or has an entry for
    every vertex of H (the entry at x is ignored). Colourings allowed at x
    are then the complements, within the shared list, of those allowed at
    the neighbour, so 3_in and 3_out swap while 4_out, 2_in and 2_comp stay.
    """
    if H.degree(x) != 1:
        raise WitnessError(f"{H.labels[x]} must have degree 1")
    (w,) = tuple(H.adj[x])
    if len(L_sub) == H.n:
        lists = list(L_sub.lists)
    elif len(L_sub) == H.n - 1:
        _, keep = H.remove_vertices([x])
        lists = [0] * H.n
        for i, v in enumerate(keep):
            lists[v] = L_sub[i]
    else:
        raise WitnessError("assignment size does not match")
    lists[x] = lists[w]
    return ListAssignment(tuple(lists))


def _split_parts(G: Graph, v: int, part1: Sequence[int], part2: Sequence[int]):
    s1, s2 = set(part1), set(part2)
    if v not in s1 or v not in s2 or s1 & s2 != {v} or s1 | s2 != set(range(G.n)):
        raise WitnessError("parts must cover the graph and meet only at the cut vertex")
    for a, c in G.edges():
        if (a in s1 - {v} and c in s2 - {v}) or (c in s1 - {v} and a in s2 - {v}):
            raise WitnessError("an edge joins the two parts away from the cut vertex")


def compose_forcing(G: Graph, v: int, part1: Sequence[int], L1: ListAssignment,
                    part2: Sequence[int], L2: ListAssignment, b: int = 2,
                    provenance: Sequence[str] = ()) -> WitnessBundle | None:
    """Glue two forcing assignments at a cut vertex; None when incompatible.

    L1 and L2 are indexed by the sorted vertex lists of the parts. Colours of
    L2(v) are matched to L1(v) by every bijection until the allowed sets at v
    become disjoint; other colours of L2 are made fresh.
    """
    _split_parts(G, v, part1, part2)
    p1, p2 = sorted(part1), sorted(part2)
    G1, _ = G.subgraph(p1)
    G2, _ = G.subgraph(p2)
    i1, i2 = p1.index(v), p2.index(v)
    if bin(L1[i1]).count("1") != bin(L2[i2]).count("1"):
        raise WitnessError("lists at the cut vertex have different sizes")
    A1 = set(FastSolver(G1, b).allowed_at(L1.lists, i1))
    A2 = FastSolver(G2, b).allowed_at(L2.lists, i2)
    c1, c2 = colors_of(L1[i1]), colors_of(L2[i2])
    fresh_from = max(colors_of(L1.pot())) + 1
    for perm in permutations(c1):
        cmap = dict(zip(c2, perm))
        if any(_map_set(S, cmap) in A1 for S in A2):
            continue
        nxt = fresh_from
        for c in colors_of(L2.pot()):
            if c not in cmap:
                cmap[c] = nxt
                nxt += 1
        lists = [0] * G.n
        for i, u in enumerate(p1):
            lists[u] = L1[i]
        for i, u in enumerate(p2):
            if u != v:
                lists[u] = _map_set(L2[i], cmap)
        L = ListAssignment(tuple(lists))
        desc = " ".join(f"{a}->{cmap[a]}" for a in c2)
        bundle = WitnessBundle(G, L, b, list(provenance) + [f"compose at {G.labels[v]}: {desc}"])
        if not bundle.check():
            raise WitnessError("composed assignment is colourable")
        return bundle
    return None


def _map_set(S: int, cmap: Mapping[int, int]) -> int:
    out = 0
    for c in colors_of(S):
        out |= 1 << cmap[c]
    return out


# ------------------------------------------------------------ construction

MAX_CONSTRUCTION_M = 4


def base_gadget(m: int) -> tuple[Graph, ListAssignment]:
    """4-cycle v1 v2 v3 v4 whose lists block colouring v1 with {1..m}."""
    G = Graph.from_edges([("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v1")])
    full = to_mask(range(1, 2 * m + 1))
    lists = {
        "v1": full,
        "v2": full,
        "v3": to_mask(range(2, 2 * m + 2)),
        "v4": to_mask(list(range(1, 2 * m)) + [2 * m + 1]),
    }
    return G, ListAssignment(tuple(lists[lab] for lab in G.labels))


def blocked_hub_colorings(m: int) -> list[int]:
    """The m-subsets of L(v1) that do not extend in the base gadget."""
    G, L = base_gadget(m)
    v1 = G.index("v1")
    allowed = set(FastSolver(G, m).allowed_at(L.lists, v1))
    return [S for S in subsets_of_size(L[v1], m) if S not in allowed]


def construct_non_2mm(m: int) -> tuple[Graph, ListAssignment]:
    """A bipartite graph with a 2m-assignment that has no m-fold colouring.

    One base gadget per m-subset S of {1..2m}, colours permuted so that the
    gadget blocks S at v1, all glued at v1.
    """
    if m < 1:
        raise WitnessError("m must be positive")
    if m > MAX_CONSTRUCTION_M:
        raise WitnessError(f"m > {MAX_CONSTRUCTION_M} gives graphs that are too large")
    _, L0 = base_gadget(m)
    g1, g2, g3, g4 = L0.lists
    top = list(range(1, 2 * m + 1))
    edges = []
    lists = {"hub": to_mask(top)}
    for i, S in enumerate(combinations(top, m)):
        rest = [c for c in top if c not in S]
        perm = {c: x for c, x in zip(top, list(S) + rest)}
        perm[2 * m + 1] = 2 * m + 1
        a, b, c = f"g{i}a", f"g{i}b", f"g{i}c"
        edges += [("hub", a), (a, b), (b, c), (c, "hub")]
        lists[a] = _map_set(g2, perm)
        lists[b] = _map_set(g3, perm)
        lists[c] = _map_set(g4, perm)
    G = Graph.from_edges(edges)
    return G, ListAssignment(tuple(lists[lab] for lab in G.labels))


# -------------------------------------------------------- gadget helpers

def lollipop_forcing(c: int, t: int) -> tuple[Graph, ListAssignment, int]:
    """Even cycle of length c with a pendant path of t vertices, 4_out at the path end.

    The cycle is reduced to the 4-cycle entry by a strong minor, then the
    pendant path is handled by repeated shifts. Returns (graph, lists, end).
    """
    from .graph import lollipop
    if c % 2 or c < 4:
        raise WitnessError("lollipop needs an even cycle of length at least 4")
    G = lollipop(c, t)
    e = load_entry("C4lem")
    v1 = e.graph.index("v1")
    # cycle 0..c-1 maps onto v1 v2 v3 v4 with the surplus absorbed by v3's bag
    order = [e.graph.index(x) for x in ("v1", "v2", "v3", "v4")]
    lists = [0] * G.n
    cyc_lists = [e.lists[order[0]], e.lists[order[1]]] + [e.lists[order[2]]] * (c - 3) + [e.lists[order[3]]]
    for i in range(c):
        lists[i] = cyc_lists[i]
    for j in range(t):
        lists[c + j] = e.lists[v1]
    L = ListAssignment(tuple(lists))
    end = c + t - 1 if t else 0
    return G, L, end


# ------------------------------------------------- witnesses across blocks

def _relabel_lists(lists: Mapping[int, int], cmap: Mapping[int, int], start: int) -> tuple[dict[int, int], int]:
    """Rename colours by cmap; colours it does not cover get fresh names from `start`."""
    cm = dict(cmap)
    nxt = start
    out = {}
    for v in sorted(lists):
        m = 0
        for c in colors_of(lists[v]):
            if c not in cm:
                cm[c] = nxt
                nxt += 1
            m |= 1 << cm[c]
        out[v] = m
    return out, nxt


def _top_colour(lists: Mapping[int, int]) -> int:
    return max(max(colors_of(m)) for m in lists.values())


def _perm_image(pattern, perm) -> frozenset[int]:
    return frozenset(_map_set(S, perm) for S in pattern)


def _minimal_options(options: list, a: int) -> list:
    """Drop options whose pattern contains a renamed copy of another's."""
    perms = [dict(zip(range(1, a + 1), p)) for p in permutations(range(1, a + 1))]
    options = sorted(options, key=lambda o: (len(o[0]), sorted(o[0])))
    kept: list = []
    for pat, lists in options:
        if any(any(_perm_image(q, p) <= pat for p in perms) for q, _ in kept):
            continue
        kept.append((pat, lists))
    return kept


class _BlockTree:
    """Patterns of allowed colourings at a cut vertex, built bottom-up.

    An option is (pattern, lists): lists is an assignment of the subtree
    hanging below a vertex with that vertex's list equal to {1..a}, and
    pattern is the set of b-subsets still allowed there.
    """

    def __init__(self, G: Graph, b: int, pot_bound: int):
        from .graph import blocks
        self.G = G
        self.b = b
        self.a = 2 * b
        self.full = to_mask(range(1, self.a + 1))
        self.pot_bound = pot_bound
        bd = blocks(G)
        self.blocks = [sorted(B) for B in bd.blocks]
        self.cuts = bd.cut_vertices
        self.perms = [dict(zip(range(1, self.a + 1), p)) for p in permutations(range(1, self.a + 1))]
        self._memo: dict = {}

    def at_vertex(self, v: int, parent: int | None) -> list:
        children = [i for i, B in enumerate(self.blocks) if v in B and i != parent]
        opts = [(frozenset(subsets_of_size(self.full, self.b)), {v: self.full})]
        for bi in children:
            sub = self.block_options(bi, v)
            merged = []
            for pat, lists in opts:
                start = _top_colour(lists) + 1
                for q, m in sub:
                    for perm in self.perms:
                        img = _perm_image(q, perm)
                        m2, _ = _relabel_lists(m, perm, start)
                        merged.append((pat & img, {**lists, **m2}))
                        if not pat & img:
                            return [merged[-1]]
            opts = _minimal_options(merged, self.a)
        return opts

    def block_options(self, bi: int, top: int) -> list:
        key = (bi, top)
        if key in self._memo:
            return self._memo[key]
        from .flat import _Generator, _Symmetry, _key, _locally_flat_classes, from_classes
        from itertools import product
        verts = self.blocks[bi]
        H, keep = self.G.subgraph(verts)
        t = keep.index(top)
        kids = {i: self.at_vertex(keep[i], bi) for i in range(H.n)
                if keep[i] != top and keep[i] in self.cuts}
        sym = _Symmetry(H, [t] + sorted(kids))
        solver = FastSolver(H, self.b)
        a, b = self.a, self.b
        found = []
        for k in range(a, self.pot_bound + 1):
            for cls in _Generator(H, a, k, t).run():
                if not _locally_flat_classes(cls, H.masks) or not sym.is_canonical(cls):
                    continue
                L = from_classes(H.n, _key(cls))
                # every way to hang each child's options on its list, minimal ones only
                choices = []
                for y, opts in kids.items():
                    ycols = colors_of(L[y])
                    seen: dict = {}
                    for q, m in opts:
                        for perm in self.perms:
                            tau = {c: ycols[perm[c] - 1] for c in range(1, a + 1)}
                            img = _perm_image(q, tau)
                            if img not in seen:
                                seen[img] = (m, tau)
                    mins = [s for s in seen if not any(o < s for o in seen)]
                    choices.append([(y, s, *seen[s]) for s in mins])
                for combo in product(*choices):
                    cons = {y: s for y, s, _, _ in combo}
                    allowed = [S for S in subsets_of_size(L[t], b)
                               if solver.solve(L.lists, {**cons, t: (S,)}) is not None]
                    tcols = colors_of(L[t])
                    bmap = {c: i + 1 for i, c in enumerate(tcols)}
                    for c in colors_of(L.pot()):
                        if c not in bmap:
                            bmap[c] = len(bmap) + 1
                    lists = {keep[i]: _map_set(L[i], bmap) for i in range(H.n)}
                    nxt = len(bmap) + 1
                    for y, _, m, tau in combo:
                        cmap = {c: bmap[tau[c]] for c in range(1, a + 1)}
                        m2, nxt = _relabel_lists({v: x for v, x in m.items() if v != keep[y]}, cmap, nxt)
                        lists.update(m2)
                    pat = frozenset(_map_set(S, bmap) for S in allowed)
                    found.append((pat, lists))
        out = _minimal_options(found, a)
        self._memo[key] = out
        return out


def block_tree_witness(G: Graph, b: int = 2, pot_bound: int = 8) -> WitnessBundle | None:
    """A bad assignment for a graph with cut vertices, assembled block by block.

    Each block contributes its flat assignments; options at a cut vertex are
    merged over all colour renamings, and a root whose merged pattern is
    empty gives the witness. Pot bounds are tried from small to large.
    """
    from .graph import blocks
    cuts = sorted(blocks(G).cut_vertices)
    if not cuts:
        return None
    for bound in range(2 * b, pot_bound + 1):
        tree = _BlockTree(G, b, bound)
        for r in cuts:
            for pat, lists in tree.at_vertex(r, None):
                if pat:
                    continue
                L = ListAssignment(tuple(lists[v] for v in range(G.n)))
                bundle = WitnessBundle(G, L, b, [f"blocks assembled at {G.labels[r]} with pot bound {bound}"])
                if not bundle.check():
                    raise WitnessError("internal error: assembled assignment is colourable")
                return bundle
    return None
