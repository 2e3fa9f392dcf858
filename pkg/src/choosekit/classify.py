"""Decide (4:2)- and (2:1)-choosability from the shape of the core.

classify_42 walks the list of choosable core shapes; anything else is
reported with an obstruction that can be checked on its own and, for
2-connected cores, carries a strong-minor model of a catalogue graph so
that a bad assignment can be lifted.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

from .graph import (
    Graph, GraphError, bipartition, blocks, contract_cut_edge, contract_degree2_path, core,
    degree2_run, is_isomorphic,
)
from .coloring import ListAssignment, to_mask
from .witnesses import (
    StrongMinorEmbedding, WitnessBundle, WitnessError, block_tree_witness, figure_graph, lift_witness,
    load_entry, path_segments,
)

CASES = ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix")

OBSTRUCTION_KINDS = ("odd_cycle", "gbad_member", "gcycles_member", "mixed_violation",
                     "block_count", "block_shape", "c4_position", "adjacent_cut_vertices")

GBAD = ("theta333", "theta2224", "figE", "figN", "figQ")
GCYCLES_SHARED = ("figS", "figP", "figR")
GCYCLES_DISJOINT = ("figT", "figU")


class ClassificationError(GraphError):
    pass


# ------------------------------------------------------------ result types

@dataclass
class Obstruction:
    kind: str
    detail: str
    name: str | None = None                       # catalogue graph for embedding kinds
    embedding: StrongMinorEmbedding | None = None  # source is the classified graph
    vertices: tuple[int, ...] = ()                 # odd cycle, or the offending block(s)

    def check(self, G: Graph) -> list[str]:
        """Re-derive the claim from G alone; an empty list means it holds."""
        if self.kind == "odd_cycle":
            cyc = list(self.vertices)
            if len(cyc) % 2 == 0 or len(set(cyc)) != len(cyc):
                return ["not an odd cycle"]
            for i, v in enumerate(cyc):
                if not G.has_edge(v, cyc[i - 1]):
                    return [f"{G.labels[v]}-{G.labels[cyc[i - 1]]} is not an edge"]
            return []
        if self.kind in ("gbad_member", "gcycles_member", "mixed_violation"):
            if self.embedding is None or self.name is None:
                return ["missing embedding"]
            if self.embedding.source.n != G.n or set(self.embedding.source.edges()) != set(G.edges()):
                return ["embedding is for a different graph"]
            errs = self.embedding.validate()
            if errs:
                return errs
            if is_isomorphic(self.embedding.replay(), figure_graph(self.name)) is None:
                return [f"reduction does not give {self.name}"]
            return []
        return _check_block_claim(G, self)

    def to_json(self, G: Graph) -> dict:
        out: dict = {"kind": self.kind, "detail": self.detail}
        if self.name:
            out["name"] = self.name
        if self.vertices:
            out["vertices"] = [G.labels[v] for v in self.vertices]
        if self.embedding is not None:
            out["embedding"] = self.embedding.describe()
        return out


@dataclass
class TraceStep:
    rule: str
    detail: str
    graph: Graph


@dataclass
class ClassificationResult:
    graph: Graph
    choosable: bool
    case: str | None
    params: dict
    obstruction: Obstruction | None
    core: Graph
    core_vertices: list[int]
    trace: list[TraceStep] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "CHOOSABLE" if self.choosable else "NOT_CHOOSABLE"

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "case": self.case,
            "params": dict(self.params),
            "core": [self.graph.labels[v] for v in self.core_vertices],
            "trace": [f"{t.rule}: {t.detail}" for t in self.trace],
        }
        if self.obstruction is not None:
            out["obstruction"] = self.obstruction.to_json(self.graph)
        return out


# -------------------------------------------------------------- recognisers

def branch_paths(G: Graph) -> tuple[list[int], list[list[int]]]:
    """Vertices of degree other than 2 and the paths of degree-2 vertices between them."""
    branch = [v for v in range(G.n) if G.degree(v) != 2]
    bset = set(branch)
    seen: set[tuple[int, int]] = set()
    out = []
    for b in branch:
        for u in sorted(G.adj[b]):
            if (b, u) in seen:
                continue
            walk = [b, u]
            while walk[-1] not in bset:
                x = walk[-1]
                nxt = [y for y in G.adj[x] if y != walk[-2]]
                walk.append(nxt[0])
            seen.add((walk[0], walk[1]))
            seen.add((walk[-1], walk[-2]))
            out.append(walk)
    return branch, out


def recognize_theta(G: Graph) -> tuple[int, ...] | None:
    """Path lengths of a theta graph, sorted, or None."""
    if G.n < 4 or not G.is_connected():
        return None
    branch, paths = branch_paths(G)
    if len(branch) != 2 or G.degree(branch[0]) != G.degree(branch[1]):
        return None
    if G.degree(branch[0]) not in (3, 4):
        return None
    if any({p[0], p[-1]} != set(branch) for p in paths):
        return None
    lengths = sorted(len(p) - 1 for p in paths)
    if lengths.count(1) > 1:
        return None
    return tuple(lengths)


def _is_cycle(G: Graph) -> bool:
    return G.n >= 3 and G.is_connected() and all(G.degree(v) == 2 for v in range(G.n))


def _k4_subdivision(G: Graph):
    """Branch vertices and the six branch paths keyed by endpoint pair, or None."""
    if not G.is_connected():
        return None
    branch, paths = branch_paths(G)
    if len(branch) != 4 or any(G.degree(v) != 3 for v in branch) or len(paths) != 6:
        return None
    by_pair = {}
    for p in paths:
        key = frozenset((p[0], p[-1]))
        if len(key) != 2 or key in by_pair:
            return None
        by_pair[key] = p
    return branch, by_pair


@dataclass
class MixedForm:
    allowed: bool
    diagonals: tuple[list[int], list[int]]
    length: int = 0                          # extra length on the long diagonal
    edge: tuple[int, int] | None = None      # ends of the extended path
    name: str | None = None                  # figY or figZ for the disallowed side
    embedding: StrongMinorEmbedding | None = None

    def describe(self, G: Graph) -> str:
        if self.allowed:
            a, b = self.edge
            return f"allowed_form(path {G.labels[a]}..{G.labels[b]}, length {self.length})"
        return f"disallowed_form({self.name})"


def recognize_mixed(G: Graph) -> MixedForm | None:
    """Recognise strong subdivisions of K_{3,3} minus an edge."""
    k4 = _k4_subdivision(G)
    if k4 is None or not bipartite_parts(G):
        return None
    branch, by_pair = k4
    a = branch[0]
    pairs = []
    for b in branch[1:]:
        c, d = [x for x in branch if x not in (a, b)]
        pairs.append((by_pair[frozenset((a, b))], by_pair[frozenset((c, d))]))
    parity = [tuple((len(p) - 1) % 2 for p in pair) for pair in pairs]
    even = [i for i, par in enumerate(parity) if par == (0, 0)]
    if len(even) != 1 or sorted(parity).count((1, 1)) != 2:
        return None
    diag = pairs[even[0]]
    odd = [p for i, pair in enumerate(pairs) if i != even[0] for p in pair]
    dl = sorted(len(p) - 1 for p in diag)
    if all(len(p) == 2 for p in odd) and dl[0] == 2:
        long = max(diag, key=len)
        return MixedForm(True, diag, dl[1] - 2, (long[0], long[-1]))
    name = "figY" if any(len(p) > 2 for p in odd) else "figZ"
    emb = _match_subdivision(G, figure_graph(name), [[v] for v in branch], list(by_pair.values()))
    return MixedForm(False, diag, name=name, embedding=emb)


def bipartite_parts(G: Graph):
    return bipartition(G).parts


# ------------------------------------------------------ subdivision models

def _match_subdivision(G: Graph, H: Graph, blobs: Sequence[Sequence[int]],
                       src_paths: Sequence[Sequence[int]]) -> StrongMinorEmbedding | None:
    """Model H in G from branch blobs and the paths joining them.

    A blob is a path whose even-offset vertices all stand for one branch
    vertex of H; every source path starts and ends at such a vertex. The
    source paths are matched to the branch paths of H by endpoints, with
    each source path at least as long and of the same parity.
    """
    hb, hp = branch_paths(H)
    if len(hb) != len(blobs) or len(hp) != len(src_paths):
        return None
    kof = {}
    for i, blob in enumerate(blobs):
        for off in range(0, len(blob), 2):
            kof[blob[off]] = i
    ends = []
    for s in src_paths:
        if s[0] not in kof or s[-1] not in kof:
            return None
        ends.append((kof[s[0]], kof[s[-1]]))
    sdeg = Counter(x for e in ends for x in e)
    hdeg = Counter(x for t in hp for x in (t[0], t[-1]))
    order = sorted(range(len(src_paths)), key=lambda k: -len(src_paths[k]))
    for perm in permutations(hb):
        if any(sdeg[i] != hdeg[perm[i]] for i in range(len(blobs))):
            continue
        used = [False] * len(hp)
        choice: list = [None] * len(src_paths)

        def rec(i: int) -> bool:
            if i == len(order):
                return True
            k = order[i]
            ha, hz = perm[ends[k][0]], perm[ends[k][1]]
            ls = len(src_paths[k]) - 1
            for j, t in enumerate(hp):
                lt = len(t) - 1
                if used[j] or lt > ls or (ls - lt) % 2:
                    continue
                if (t[0], t[-1]) == (ha, hz):
                    choice[k] = t
                elif (t[-1], t[0]) == (ha, hz):
                    choice[k] = t[::-1]
                else:
                    continue
                used[j] = True
                if rec(i + 1):
                    return True
                used[j] = False
            return False

        if not rec(0):
            continue
        K = {h: set() for h in range(H.n)}
        D = {h: set() for h in range(H.n)}
        for i, blob in enumerate(blobs):
            for off, v in enumerate(blob):
                (K if off % 2 == 0 else D)[perm[i]].add(v)
        for s, t in zip(src_paths, choice):
            seq, tgt = list(s[:-1]), list(t[:-1])
            for (st, size), h in zip(path_segments(len(seq), len(tgt)), tgt):
                for off in range(size):
                    if st + off:
                        (K if off % 2 == 0 else D)[h].add(seq[st + off])
        emb = StrongMinorEmbedding(G, H, {h: (frozenset(K[h]), frozenset(D[h])) for h in range(H.n)})
        if not emb.validate():
            return emb
    return None


def _route(G: Graph, a: int, z: int, min_len: int, blocked: set[int], budget: list[int]):
    """Simple a-z paths avoiding `blocked`, at least min_len long, right parity."""
    path = [a]
    on = {a}

    def rec(x):
        budget[0] -= 1
        if budget[0] < 0:
            return
        for y in sorted(G.adj[x]):
            if y == z:
                ln = len(path)
                if ln >= min_len and (ln - min_len) % 2 == 0:
                    yield path + [z]
                continue
            if y in on or y in blocked:
                continue
            path.append(y)
            on.add(y)
            yield from rec(y)
            path.pop()
            on.discard(y)

    yield from rec(a)


def find_subdivision(G: Graph, H: Graph, budget: int = 200000) -> StrongMinorEmbedding | None:
    """Search G for a strong subdivision of H (branch paths grown by even amounts)."""
    parts = bipartite_parts(G)
    if parts is None:
        return None
    side = [0 if v in parts[0] else 1 for v in range(G.n)]
    hb, hp = branch_paths(H)
    hdeg = {h: H.degree(h) for h in hb}
    if sum(1 for v in range(G.n) if G.degree(v) >= 3) < sum(1 for h in hb if hdeg[h] >= 3):
        return None
    order = sorted(hb, key=lambda h: -hdeg[h])
    between: dict[int, list[tuple[int, int]]] = {h: [] for h in hb}
    for t in hp:
        between[t[0]].append((t[-1], len(t) - 1))
        between[t[-1]].append((t[0], len(t) - 1))
    left = [budget]
    assign: dict[int, int] = {}

    def routes(k: int, blocked: set[int], acc: list):
        if k == len(hp):
            yield list(acc)
            return
        t = hp[k]
        for p in _route(G, assign[t[0]], assign[t[-1]], len(t) - 1, blocked, left):
            inner = set(p[1:-1])
            acc.append(p)
            yield from routes(k + 1, blocked | inner, acc)
            acc.pop()
            if left[0] < 0:
                return

    def place(i: int):
        if left[0] < 0:
            return None
        if i == len(order):
            for paths in routes(0, set(assign.values()), []):
                inv = {g: h for h, g in assign.items()}
                blobs = [[g] for g in sorted(inv)]
                emb = _match_subdivision(G, H, blobs, paths)
                if emb is not None:
                    return emb
            return None
        h = order[i]
        taken = set(assign.values())
        for g in range(G.n):
            if g in taken or G.degree(g) < hdeg[h]:
                continue
            if any(h2 in assign and (side[g] ^ side[assign[h2]]) != ln % 2 for h2, ln in between[h]):
                continue
            assign[h] = g
            got = place(i + 1)
            del assign[h]
            if got is not None:
                return got
        return None

    return place(0)


# ----------------------------------------------------------- two cycles

def _cycles(G: Graph, limit: int = 20000) -> list[list[int]]:
    """Simple cycles, each once, starting at their least vertex."""
    out: list[list[int]] = []
    for s in range(G.n):
        path = [s]
        on = {s}
        stack = [iter(sorted(u for u in G.adj[s] if u > s))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on.discard(path.pop())
                continue
            if nxt == s:
                if len(path) >= 3 and path[1] < path[-1]:
                    out.append(list(path))
                    if len(out) >= limit:
                        return out
                continue
            if nxt in on:
                continue
            path.append(nxt)
            on.add(nxt)
            stack.append(iter(sorted(u for u in G.adj[nxt] if u >= s)))
    return out


def _disjoint_paths(G: Graph, A: set[int], B: set[int], inner: set[int], count: int) -> list[list[int]] | None:
    """`count` vertex-disjoint A-B paths whose interiors lie in `inner` (unit-capacity max-flow)."""
    # each vertex v becomes (v, 0) -> (v, 1); the source feeds A, B drains to the sink
    orig: dict = {}
    nbr: dict = {}

    def arc(x, y):
        orig[(x, y)] = 1
        orig.setdefault((y, x), 0)
        nbr.setdefault(x, []).append(y)
        nbr.setdefault(y, []).append(x)

    S, T = ("s", 0), ("t", 0)
    usable = sorted(A | B | inner)
    for v in usable:
        arc((v, 0), (v, 1))
    for a in sorted(A):
        arc(S, (a, 0))
    for b in sorted(B):
        arc((b, 1), T)
    for u in usable:
        if u in B:
            continue
        for w in sorted(G.adj[u]):
            if w in A or (w not in inner and w not in B):
                continue
            arc((u, 1), (w, 0))
    cap = dict(orig)
    for _ in range(count):
        prev = {S: None}
        q = deque([S])
        while q and T not in prev:
            x = q.popleft()
            for y in nbr.get(x, ()):
                if y not in prev and cap[(x, y)] > 0:
                    prev[y] = x
                    q.append(y)
        if T not in prev:
            return None
        y = T
        while prev[y] is not None:
            x = prev[y]
            cap[(x, y)] -= 1
            cap[(y, x)] += 1
            y = x

    def used(x, y):
        return orig.get((x, y), 0) == 1 and cap[(x, y)] == 0

    paths = []
    for a in sorted(A):
        if not used(S, (a, 0)):
            continue
        walk = [a]
        node = (a, 1)
        while not used(node, T):
            node = next(y for y in nbr[node] if y[1] == 0 and y != (node[0], 0) and used(node, y))
            walk.append(node[0])
            node = (node[0], 1)
        paths.append(walk)
    return paths


def _arcs(cyc: list[int], a: int, z: int) -> tuple[list[int], list[int]]:
    """The two a-z paths around a cycle."""
    i = cyc.index(a)
    rot = cyc[i:] + cyc[:i]
    j = rot.index(z)
    return rot[:j + 1], [a] + rot[:j - 1:-1]


def two_cycles_model(G: Graph) -> tuple[str, StrongMinorEmbedding] | None:
    """Two cycles meeting in at most one vertex, turned into a model of a Gcycles graph."""
    cycles = sorted(_cycles(G), key=lambda c: (len(c), c))
    masks = [sum(1 << v for v in c) for c in cycles]
    for i in range(len(cycles)):
        for j in range(i + 1, len(cycles)):
            common = masks[i] & masks[j]
            if common & (common - 1):
                continue
            got = _cycles_pair(G, cycles[i], cycles[j], common)
            if got is not None:
                return got
    return None


def _cycles_pair(G: Graph, C1: list[int], C2: list[int], common: int):
    rest = set(range(G.n)) - set(C1) - set(C2)
    if common:
        v = common.bit_length() - 1
        paths = _disjoint_paths(G, set(C1) - {v}, set(C2) - {v}, rest, 1)
        if not paths:
            return None
        P = paths[0]
        return _shared_model(G, [v], C1, C2, v, v, P)
    paths = _disjoint_paths(G, set(C1), set(C2), rest, 2)
    if not paths:
        return None
    P1, P2 = paths
    for hub, other in ((P1, P2), (P2, P1)):
        if (len(hub) - 1) % 2 == 0:
            return _shared_model(G, hub, C1, C2, hub[0], hub[-1], other)
    a1, b1, a2, b2 = P1[0], P1[-1], P2[0], P2[-1]
    srcs = list(_arcs(C1, a1, a2)) + list(_arcs(C2, b1, b2)) + [P1, P2]
    for name in GCYCLES_DISJOINT:
        emb = _match_subdivision(G, figure_graph(name), [[a1], [a2], [b1], [b2]], srcs)
        if emb is not None:
            return name, emb
    return None


def _shared_model(G, hub, C1, C2, v1, v2, P):
    w1, w2 = P[0], P[-1]
    srcs = list(_arcs(C1, v1, w1)) + list(_arcs(C2, v2, w2)) + [P]
    for name in GCYCLES_SHARED:
        emb = _match_subdivision(G, figure_graph(name), [hub, [w1], [w2]], srcs)
        if emb is not None:
            return name, emb
    return None


# ----------------------------------------------------- star merging

def _star_merge(G: Graph, x: int) -> tuple[Graph, list[int], int]:
    """Delete x and identify its neighbours. Returns (graph, old index per new, merged new index)."""
    N = sorted(G.adj[x])
    z = N[0]
    alive = [v for v in range(G.n) if v != x and v not in N[1:]]
    pos = {v: i for i, v in enumerate(alive)}
    rep = {v: z if v in N else v for v in range(G.n)}
    adj = [set() for _ in alive]
    for u, w in G.edges():
        if x in (u, w):
            continue
        a, b = rep[u], rep[w]
        if a != b:
            adj[pos[a]].add(pos[b])
            adj[pos[b]].add(pos[a])
    H = Graph(tuple(G.labels[v] for v in alive), tuple(frozenset(a) for a in adj))
    return H, alive, pos[z]


def _unmerge(G: Graph, x: int, keep: list[int], z: int, emb: StrongMinorEmbedding) -> StrongMinorEmbedding:
    N = frozenset(G.adj[x])
    bags = {}
    for h, (K, D) in emb.bags.items():
        K2 = frozenset(keep[v] for v in K if v != z)
        D2 = frozenset(keep[v] for v in D if v != z)
        if z in K:
            K2, D2 = K2 | N, D2 | {x}
        elif z in D:
            K2, D2 = K2 | {x}, D2 | N
        bags[h] = (K2, D2)
    return StrongMinorEmbedding(G, emb.target, bags)


def gbad_model(G: Graph, merge: bool = True) -> tuple[str, StrongMinorEmbedding] | None:
    """A Gbad graph as a strong subdivision, or after merging one vertex's neighbourhood."""
    for name in GBAD:
        emb = find_subdivision(G, figure_graph(name))
        if emb is not None:
            return name, emb
    if not merge:
        return None
    for x in range(G.n):
        if G.degree(x) < 3:
            continue
        H, keep, z = _star_merge(G, x)
        got = gbad_model(H, merge=False)
        if got is not None:
            name, emb = got
            lifted = _unmerge(G, x, keep, z, emb)
            if not lifted.validate():
                return name, lifted
    return None


def obstruction_2connected(G: Graph) -> Obstruction:
    """Locate an obstruction in a 2-connected bipartite graph that is not choosable."""
    got = two_cycles_model(G)
    if got is not None:
        return Obstruction("gcycles_member", "two cycles meeting in at most one vertex", got[0], got[1])
    mixed = recognize_mixed(G)
    if mixed is not None:
        if mixed.allowed:
            raise ClassificationError("graph has an allowed mixed form")
        if mixed.embedding is not None:
            return Obstruction("mixed_violation", mixed.describe(G), mixed.name, mixed.embedding)
    got = gbad_model(G)
    if got is not None:
        return Obstruction("gbad_member", f"contains {got[0]}", got[0], got[1])
    raise ClassificationError("no obstruction located")


# ------------------------------------------------------ block structure

@dataclass
class _Block:
    vertices: tuple[int, ...]
    graph: Graph
    keep: list[int]
    attach: tuple[int, ...]       # vertices with a neighbour outside the block


def _cyclic_blocks(C: Graph) -> list[_Block]:
    bd = blocks(C)
    out = []
    for i in bd.cyclic():
        vs = tuple(sorted(bd.blocks[i]))
        H, keep = C.subgraph(vs)
        inside = set(vs)
        att = tuple(v for v in vs if C.adj[v] - inside)
        out.append(_Block(vs, H, keep, att))
    return out


def _two_connected_case(H: Graph) -> tuple[str, dict] | None:
    if _is_cycle(H):
        return ("ii", {"s": H.n // 2}) if H.n % 2 == 0 else None
    th = recognize_theta(H)
    if th is not None:
        if th == (2, 2, 2, 2):
            return "v", {}
        if len(th) == 3 and th[0] == 2 and th[1] % 2 == 0 and th[2] % 2 == 0:
            return "iii", {"s": th[1] // 2, "t": th[2] // 2}
        if len(th) == 3 and th[0] == 1 and th[1] % 2 == 1 and th[2] % 2 == 1:
            return "iv", {"s": (th[1] - 1) // 2, "t": (th[2] - 1) // 2}
        return None
    mixed = recognize_mixed(H)
    if mixed is not None and mixed.allowed:
        return "vi", {"length": mixed.length}
    return None


def _block_rule(C: Graph, blks: list[_Block]) -> tuple[str, dict] | Obstruction:
    """Apply the rules for cores with two or more cyclic blocks."""
    def ob(kind, detail, bl):
        return Obstruction(kind, detail, vertices=tuple(sorted({v for b in bl for v in b.vertices})))

    if len(blks) >= 4:
        return ob("block_count", f"{len(blks)} cyclic blocks", blks)
    cyc = [b for b in blks if _is_cycle(b.graph)]
    if len(blks) == 2:
        if len(cyc) == 2:
            s, t = sorted(b.graph.n // 2 for b in blks)
            return "vii", {"s": s, "t": t}
        if len(cyc) == 1:
            other = next(b for b in blks if b not in cyc)
            if recognize_theta(other.graph) == (2, 2, 2):
                return "viii", {"s": cyc[0].graph.n // 2}
            return ob("block_shape", "a block beside a cycle must be theta(2,2,2)", [other])
        return ob("block_shape", "two blocks that are not cycles", blks)
    if len(cyc) != 3:
        return ob("block_shape", "three blocks must all be cycles", [b for b in blks if b not in cyc])
    middle = [b for b in blks if len(b.attach) == 2]
    if len(middle) != 1:
        return ob("c4_position", "no block lies between the other two", blks)
    mid = middle[0]
    if mid.graph.n != 4:
        return ob("c4_position", "the middle block is not a 4-cycle", [mid])
    x, y = mid.attach
    if C.has_edge(x, y):
        return ob("adjacent_cut_vertices", "the middle 4-cycle meets the others at adjacent vertices", [mid])
    s, t = sorted(b.graph.n // 2 for b in blks if b is not mid)
    return "ix", {"s": s, "t": t}


def _check_block_claim(G: Graph, ob: Obstruction) -> list[str]:
    C, keep = core(G)
    back = {old: new for new, old in enumerate(keep)}
    blks = _cyclic_blocks(C)
    if ob.kind == "block_count":
        return [] if len(blks) >= 4 else [f"core has {len(blks)} cyclic blocks"]
    named = {v for v in ob.vertices}
    if any(v not in back for v in named):
        return ["named vertices are not in the core"]
    mine = [b for b in blks if {keep[v] for v in b.vertices} <= named]
    if not mine:
        return ["no block matches the named vertices"]
    if ob.kind == "block_shape":
        if len(blks) not in (2, 3):
            return ["rule applies to two or three blocks"]
        if len(blks) == 2:
            shapes = sorted("cycle" if _is_cycle(b.graph) else
                            "theta222" if recognize_theta(b.graph) == (2, 2, 2) else "other" for b in blks)
            return [] if shapes not in (["cycle", "cycle"], ["cycle", "theta222"]) else ["blocks are allowed"]
        return [] if any(not _is_cycle(b.graph) for b in blks) else ["all blocks are cycles"]
    if len(blks) != 3 or not all(_is_cycle(b.graph) for b in blks):
        return ["rule applies to three cyclic blocks"]
    middle = [b for b in blks if len(b.attach) == 2]
    if ob.kind == "c4_position":
        return [] if len(middle) != 1 or middle[0].graph.n != 4 else ["the middle block is a 4-cycle"]
    if ob.kind == "adjacent_cut_vertices":
        if len(middle) != 1 or middle[0].graph.n != 4:
            return ["no middle 4-cycle"]
        x, y = middle[0].attach
        return [] if C.has_edge(x, y) else ["attachment vertices are not adjacent"]
    return [f"unknown obstruction kind {ob.kind}"]


def _lift_to(G: Graph, keep: list[int], emb: StrongMinorEmbedding) -> StrongMinorEmbedding:
    bags = {h: (frozenset(keep[v] for v in K), frozenset(keep[v] for v in D)) for h, (K, D) in emb.bags.items()}
    return StrongMinorEmbedding(G, emb.target, bags)


# ------------------------------------------------------------- classifiers

def classify_42(G: Graph) -> ClassificationResult:
    """Which choosable core shape G has, or why it has none."""
    if G.n == 0:
        raise ClassificationError("empty graph")
    if not G.is_connected():
        raise ClassificationError("graph is disconnected; use classify_components")
    C, keep = core(G)
    _, trace = reduce_instance(G)

    def done(case, params=None, ob=None):
        return ClassificationResult(G, ob is None, case, params or {}, ob, C, keep, trace)

    if C.n == 1:
        return done("i")
    bp = bipartition(C)
    if not bp.is_bipartite:
        cyc = tuple(keep[v] for v in bp.odd_cycle)
        return done(None, ob=Obstruction("odd_cycle", f"odd cycle of length {len(cyc)}", vertices=cyc))
    blks = _cyclic_blocks(C)
    if len(blks) == 1:
        got = _two_connected_case(C)
        if got is not None:
            return done(*got)
        ob = obstruction_2connected(C)
        ob.embedding = _lift_to(G, keep, ob.embedding)
        return done(None, ob=ob)
    for b in blks:
        if _two_connected_case(b.graph) is None:
            ob = obstruction_2connected(b.graph)
            ob.embedding = _lift_to(G, [keep[b.keep[v]] for v in range(b.graph.n)], ob.embedding)
            ob.detail += " inside one block"
            return done(None, ob=ob)
    got = _block_rule(C, blks)
    if isinstance(got, Obstruction):
        got.vertices = tuple(keep[v] for v in got.vertices)
        return done(None, ob=got)
    return done(*got)


def classify_components(G: Graph) -> list[ClassificationResult]:
    """classify_42 on every component; G is choosable iff all of them are."""
    out = []
    for comp in G.components():
        H, _ = G.subgraph(comp)
        out.append(classify_42(H))
    return out


def find_obstruction(G: Graph) -> Obstruction:
    res = classify_42(G)
    if res.choosable:
        raise ClassificationError(f"graph is (4:2)-choosable (case {res.case})")
    return res.obstruction


@dataclass
class Result21:
    choosable: bool
    form: str
    s: int | None = None


def classify_21(G: Graph) -> Result21:
    """Cores K1, even cycles and theta(2,2,2s) are exactly the (2:1)-choosable ones."""
    if not G.is_connected():
        raise ClassificationError("graph is disconnected")
    C, _ = core(G)
    if C.n == 1:
        return Result21(True, "K1")
    if _is_cycle(C):
        if C.n % 2 == 0:
            return Result21(True, "C", C.n // 2)
        return Result21(False, f"odd cycle C{C.n}")
    th = recognize_theta(C)
    if th is not None and len(th) == 3 and th[:2] == (2, 2) and th[2] % 2 == 0:
        return Result21(True, "theta(2,2,2s)", th[2] // 2)
    return Result21(False, "theta" + str(th) if th else "other")


# ---------------------------------------------------------------- reduction

def _run_center(G: Graph) -> int | None:
    for v in range(G.n):
        try:
            degree2_run(G, v)
        except GraphError:
            continue
        return v
    return None


def _cut_edge(G: Graph) -> tuple[int, int] | None:
    bd = blocks(G)
    for i, b in enumerate(bd.blocks):
        if len(b) == 2:
            u, w = sorted(b)
            return u, w
    return None


def reduce_instance(G: Graph) -> tuple[Graph, list[TraceStep]]:
    """Shrink G without changing its (4:2)-choosability.

    Takes the core, then shortens long runs of degree-2 vertices by two and
    contracts cut edges until neither applies.
    """
    H, _ = core(G)
    trace = []
    if H.n != G.n:
        trace.append(TraceStep("core", f"removed {G.n - H.n} vertices", H))
    while True:
        c = _run_center(H)
        if c is not None:
            lab = H.labels[c]
            H = contract_degree2_path(H, c)
            trace.append(TraceStep("path", f"shortened the run through {lab}", H))
            continue
        e = _cut_edge(H)
        if e is not None:
            detail = f"contracted {H.labels[e[0]]}-{H.labels[e[1]]}"
            H = contract_cut_edge(H, e)
            trace.append(TraceStep("cut_edge", detail, H))
            continue
        return H, trace


# ---------------------------------------------------------------- witnesses

def shorten_runs(G: Graph) -> StrongMinorEmbedding:
    """Shorten every long degree-2 run, recording the result as a strong minor of G."""
    H = G
    bags = {v: ({v}, set()) for v in range(G.n)}
    ids = list(range(G.n))          # current index -> bag key
    while True:
        c = _run_center(H)
        if c is None:
            break
        p = degree2_run(H, c)
        x, d, y = ids[p[1]], ids[p[2]], ids[p[3]]
        Kx, Dx = bags[x]
        Ky, Dy = bags.pop(y)
        Kd, Dd = bags.pop(d)
        bags[x] = (Kx | Ky | Dd, Dx | Dy | Kd)
        H = contract_degree2_path(H, c)
        gone = {p[2], p[3]}
        ids = [i for j, i in enumerate(ids) if j not in gone]
    return StrongMinorEmbedding(G, H, {h: (frozenset(bags[k][0]), frozenset(bags[k][1]))
                                       for h, k in enumerate(ids)})


def witness_for(G: Graph, result: ClassificationResult | None = None, pot_bound: int = 8) -> WitnessBundle:
    """A 4-assignment of G with no 2-fold colouring, built from the obstruction."""
    result = result or classify_42(G)
    ob = result.obstruction
    if ob is None:
        raise ClassificationError("graph is (4:2)-choosable; there is no witness")
    if ob.kind == "odd_cycle":
        L = ListAssignment.constant(G.n, range(1, 5))
        bundle = WitnessBundle(G, L, 2, [f"odd cycle through {', '.join(G.labels[v] for v in ob.vertices)}"])
        if not bundle.check():
            raise WitnessError("odd cycle assignment is colourable")
        return bundle
    if ob.embedding is not None:
        e = load_entry(ob.name)
        return lift_witness(e.graph, e.lists, ob.embedding, 2, [f"{ob.kind} {ob.name}"])
    C, keep = core(G)
    emb = shorten_runs(C)
    small = block_tree_witness(emb.target, 2, pot_bound)
    if small is None:
        raise WitnessError(f"no assignment found for the {ob.kind} obstruction within pot {pot_bound}")
    lifted = lift_witness(emb.target, small.lists, emb, 2, [f"{ob.kind}: {ob.detail}"] + small.provenance)
    lists = [to_mask(range(1, 5))] * G.n
    for i, v in enumerate(keep):
        lists[v] = lifted.lists[i]
    bundle = WitnessBundle(G, ListAssignment(tuple(lists)), 2, lifted.provenance)
    if not bundle.check():
        raise WitnessError("witness is colourable")
    return bundle
