"""List assignments and b-fold list colourings.

Colour sets are int bitmasks with bit c standing for colour c (c >= 1).
A b-fold colouring gives every vertex a b-subset of its list such that
adjacent vertices get disjoint subsets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Mapping, Sequence

from .graph import Graph, GraphError


class ColoringError(ValueError):
    pass


# ------------------------------------------------------------- colour sets

def to_mask(colors: Iterable[int]) -> int:
    m = 0
    for c in colors:
        c = int(c)
        if c < 1:
            raise ColoringError(f"colours are positive integers, got {c}")
        m |= 1 << c
    return m


def colors_of(mask: int) -> list[int]:
    out = []
    c = 0
    while mask:
        if mask & 1:
            out.append(c)
        mask >>= 1
        c += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def fmt_set(mask: int) -> str:
    """'1234' when every colour is a single digit, else '1,2,13'."""
    cs = colors_of(mask)
    if all(c < 10 for c in cs):
        return "".join(map(str, cs))
    return ",".join(map(str, cs))


def parse_set(text: str) -> int:
    text = text.strip()
    if "," in text or " " in text:
        return to_mask(int(t) for t in text.replace(",", " ").split())
    return to_mask(int(ch) for ch in text)


@lru_cache(maxsize=None)
def subsets_of_size(mask: int, b: int) -> tuple[int, ...]:
    """All b-subsets of a colour set, in increasing numeric order."""
    cs = colors_of(mask)
    return tuple(sorted(sum(1 << c for c in combo) for combo in combinations(cs, b)))


# --------------------------------------------------------- list assignments

@dataclass(frozen=True)
class ListAssignment:
    lists: tuple[int, ...]

    @classmethod
    def from_sets(cls, sets: Sequence[Iterable[int]]) -> "ListAssignment":
        return cls(tuple(to_mask(s) for s in sets))

    @classmethod
    def from_strings(cls, strs: Sequence[str]) -> "ListAssignment":
        return cls(tuple(parse_set(s) for s in strs))

    @classmethod
    def from_dict(cls, G: Graph, d: Mapping) -> "ListAssignment":
        lists = [None] * G.n
        for k, v in d.items():
            i = G.index(k)
            lists[i] = parse_set(v) if isinstance(v, str) else to_mask(v)
        missing = [G.labels[i] for i, x in enumerate(lists) if x is None]
        if missing:
            raise ColoringError(f"no list for vertices {missing}")
        return cls(tuple(lists))

    @classmethod
    def constant(cls, n: int, colors: Iterable[int]) -> "ListAssignment":
        m = to_mask(colors)
        return cls((m,) * n)

    def __len__(self) -> int:
        return len(self.lists)

    def __getitem__(self, v: int) -> int:
        return self.lists[v]

    def pot(self) -> int:
        p = 0
        for m in self.lists:
            p |= m
        return p

    def pot_size(self) -> int:
        return popcount(self.pot())

    def sizes(self) -> set[int]:
        return {popcount(m) for m in self.lists}

    def to_dict(self, G: Graph) -> dict[str, list[int]]:
        return {G.labels[v]: colors_of(m) for v, m in enumerate(self.lists)}

    def restrict(self, keep: Sequence[int]) -> "ListAssignment":
        return ListAssignment(tuple(self.lists[v] for v in keep))

    def replace(self, v: int, mask: int) -> "ListAssignment":
        ls = list(self.lists)
        ls[v] = mask
        return ListAssignment(tuple(ls))

    def short(self) -> str:
        return " ".join(fmt_set(m) for m in self.lists)


def relabel_colors(L: ListAssignment, perm: Mapping[int, int]) -> ListAssignment:
    """Apply a colour renaming; colours missing from `perm` are kept."""
    vals = list(perm.values())
    if len(set(vals)) != len(vals):
        raise ColoringError("colour map is not injective")
    out = []
    for m in L.lists:
        new = 0
        for c in colors_of(m):
            new |= 1 << perm.get(c, c)
        if popcount(new) != popcount(m):
            raise ColoringError("colour map merges colours of a list")
        out.append(new)
    return ListAssignment(tuple(out))


def normalize_colors(L: ListAssignment) -> tuple[ListAssignment, dict[int, int]]:
    """Rename pot(L) to 1..k in increasing order; returns (L', old->new)."""
    perm = {c: i + 1 for i, c in enumerate(colors_of(L.pot()))}
    return relabel_colors(L, perm), perm


Coloring = tuple  # tuple of b-subset masks, indexed by vertex


def validate_coloring(G: Graph, L: ListAssignment, b: int, phi: Sequence[int]) -> list[str]:
    """Return a list of violations (empty when phi is a b-fold L-colouring)."""
    errs = []
    if len(phi) != G.n:
        return [f"colouring has {len(phi)} entries for {G.n} vertices"]
    for v in range(G.n):
        if popcount(phi[v]) != b:
            errs.append(f"{G.labels[v]} gets {popcount(phi[v])} colours, expected {b}")
        if phi[v] & ~L[v]:
            errs.append(f"{G.labels[v]} uses colours outside its list")
    for u, w in G.edges():
        if phi[u] & phi[w]:
            errs.append(f"edge {G.labels[u]}-{G.labels[w]} shares colours {fmt_set(phi[u] & phi[w])}")
    return errs


# ----------------------------------------------------------------- solver

@dataclass(frozen=True)
class PartialConstraint:
    """Restrict a vertex to given b-subsets and/or exclude some b-subsets."""

    vertex: int
    allowed: frozenset[int] | None = None
    forbidden: frozenset[int] = frozenset()

    @classmethod
    def fixed(cls, vertex: int, colors) -> "PartialConstraint":
        m = parse_set(colors) if isinstance(colors, str) else to_mask(colors)
        return cls(vertex, frozenset([m]))


def _domains(L: ListAssignment, b: int, constraints) -> list[list[int]]:
    doms = [list(subsets_of_size(m, b)) for m in L.lists]
    if constraints:
        items = constraints.values() if isinstance(constraints, Mapping) else constraints
        for c in items:
            d = doms[c.vertex]
            if c.allowed is not None:
                d = [S for S in d if S in c.allowed]
            if c.forbidden:
                d = [S for S in d if S not in c.forbidden]
            doms[c.vertex] = d
    return doms


def _search(adj: Sequence[Sequence[int]], doms: list[list[int]], count: bool = False, limit: int | None = None):
    """Backtracking with forward checking and smallest-domain-first.

    Returns the first colouring found (or None); with count=True returns the
    number of colourings (stopping at `limit` if given).
    """
    n = len(doms)
    if any(not d for d in doms):
        return 0 if count else None
    phi = [0] * n
    total = 0

    def rec(doms: list[list[int]], remaining: set[int]):
        nonlocal total
        if not remaining:
            if count:
                total += 1
                return limit is not None and total >= limit
            return True
        v = min(remaining, key=lambda x: (len(doms[x]), x))
        remaining.discard(v)
        nbrs = [u for u in adj[v] if u in remaining]
        for S in doms[v]:
            saved = []
            ok = True
            for u in nbrs:
                du = doms[u]
                nd = [T for T in du if not T & S]
                if not nd:
                    ok = False
                    break
                if len(nd) != len(du):
                    saved.append((u, du))
                    doms[u] = nd
            if ok:
                phi[v] = S
                if rec(doms, remaining):
                    for u, du in saved:
                        doms[u] = du
                    remaining.add(v)
                    return True
            for u, du in saved:
                doms[u] = du
        remaining.add(v)
        return False

    found = rec([list(d) for d in doms], set(range(n)))
    if count:
        return total
    return tuple(phi) if found else None


def find_bfold_coloring(G: Graph, L: ListAssignment, b: int, constraints=None) -> Coloring | None:
    """A b-fold L-colouring of G respecting the constraints, or None."""
    if len(L) != G.n:
        raise ColoringError("list assignment does not match the graph")
    for v, m in enumerate(L.lists):
        if popcount(m) < b and not constraints:
            return None
    adj = [sorted(a) for a in G.adj]
    return _search(adj, _domains(L, b, constraints))


def count_bfold_colorings(G: Graph, L: ListAssignment, b: int, constraints=None) -> int:
    """Number of b-fold L-colourings (components counted independently)."""
    doms = _domains(L, b, constraints)
    total = 1
    for comp in G.components():
        pos = {v: i for i, v in enumerate(comp)}
        adj = [[pos[u] for u in G.adj[v]] for v in comp]
        c = _search(adj, [doms[v] for v in comp], count=True)
        total *= c
        if total == 0:
            return 0
    return total


class FastSolver:
    """Reusable solver for many list assignments on one fixed graph."""

    def __init__(self, G: Graph, b: int):
        self.G = G
        self.b = b
        self.adj = [sorted(a) for a in G.adj]

    def solve(self, lists: Sequence[int], constraints: Mapping[int, Iterable[int]] | None = None):
        doms = [list(subsets_of_size(m, self.b)) for m in lists]
        if constraints:
            for v, allowed in constraints.items():
                keep = set(allowed)
                doms[v] = [S for S in doms[v] if S in keep]
        return _search(self.adj, doms)

    def allowed_at(self, lists: Sequence[int], v: int) -> list[int]:
        """The b-subsets of L(v) that extend to a colouring of G."""
        out = []
        for S in subsets_of_size(lists[v], self.b):
            if self.solve(lists, {v: (S,)}) is not None:
                out.append(S)
        return out


# ----------------------------------------------------------------- forcing

SHAPES = ("UNCOLORABLE", "1", "2_in", "2_comp", "3_in", "3_out", "3_path",
          "4_out", "4_other", "5", "6_unforced")


def forcing_shape(allowed: Iterable[int], list_mask: int, b: int = 2) -> str:
    """Name the pattern of allowed 2-subsets of a 4-list.

    For other list sizes the name is just the number of allowed subsets,
    or 'unforced' when nothing is excluded.
    """
    al = sorted(set(allowed))
    k = len(al)
    if k == 0:
        return "UNCOLORABLE"
    total = comb(popcount(list_mask), b)
    if popcount(list_mask) != 4 or b != 2:
        return "unforced" if k == total else str(k)
    if k == 1:
        return "1"
    if k == 2:
        return "2_in" if al[0] & al[1] else "2_comp"
    if k == 3:
        common = al[0] & al[1] & al[2]
        if common:
            return "3_in"
        if popcount(al[0] | al[1] | al[2]) == 3:
            return "3_out"
        return "3_path"
    if k == 4:
        forb = [S for S in subsets_of_size(list_mask, 2) if S not in al]
        return "4_out" if forb[0] & forb[1] else "4_other"
    if k == 5:
        return "5"
    return "6_unforced"


@dataclass
class ForcingReport:
    vertex: int
    list_mask: int
    allowed: tuple[int, ...]
    forbidden: tuple[int, ...]
    shape: str
    witnesses: dict[int, Coloring] = field(default_factory=dict, repr=False)

    def describe(self) -> str:
        al = " ".join(fmt_set(S) for S in self.allowed)
        return f"{self.shape}: allowed {{{al}}}"


def forcing_analysis(G: Graph, L: ListAssignment, b: int, v: int, constraints=None) -> ForcingReport:
    """Which b-subsets of L(v) extend to a b-fold L-colouring of G."""
    allowed = []
    forbidden = []
    wit = {}
    base = list(constraints) if constraints else []
    for S in subsets_of_size(L[v], b):
        phi = find_bfold_coloring(G, L, b, base + [PartialConstraint(v, frozenset([S]))])
        if phi is None:
            forbidden.append(S)
        else:
            allowed.append(S)
            wit[S] = phi
    return ForcingReport(v, L[v], tuple(allowed), tuple(forbidden),
                         forcing_shape(allowed, L[v], b), wit)


# ----------------------------------------------------- path dynamic program

class TooManyHighDegree(ColoringError):
    pass


def path_dp_solve(G: Graph, L: ListAssignment, m: int, C: int = 8) -> Coloring | None:
    """m-fold colouring for lists of size 2m when few vertices have degree >= 3.

    Removing the set X of vertices of degree at least 3 leaves paths. Each
    path is summarised by a reachability table between the colourings of its
    two ends; the colourings of X are then searched with those tables as
    binary constraints, and paths are rebuilt from stored back pointers.
    Pure cycle components get one of their vertices added to X.
    """
    for v in range(G.n):
        if popcount(L[v]) != 2 * m:
            raise ColoringError(f"list of {G.labels[v]} has size {popcount(L[v])}, expected {2 * m}")
    X = [v for v in range(G.n) if G.degree(v) >= 3]
    if len(X) > C:
        raise TooManyHighDegree(f"{len(X)} vertices of degree >= 3 exceeds the bound {C}")
    xset = set(X)
    for comp in G.components():
        if not xset.intersection(comp) and len(comp) >= 3 and all(G.degree(v) == 2 for v in comp):
            X.append(comp[0])
            xset.add(comp[0])
    dom = [subsets_of_size(L[v], m) for v in range(G.n)]

    # split G - X into paths, each listed from one end
    seen = set(xset)
    paths = []
    for s in range(G.n):
        if s in seen:
            continue
        inner = [u for u in G.adj[s] if u not in xset]
        if len(inner) == 2:
            continue  # not an end; reached from an end below
        p = [s]
        seen.add(s)
        prev, cur = None, s
        while True:
            nxt = [u for u in G.adj[cur] if u not in xset and u != prev and u not in seen]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            p.append(cur)
            seen.add(cur)
        paths.append(p)
    if len(seen) != G.n:
        raise ColoringError("internal error: a path component was missed")

    tables = []  # per path: (ends attachments, feasible pairs, pointer tables)
    for p in paths:
        a_first = [x for x in G.adj[p[0]] if x in xset]
        a_last = [x for x in G.adj[p[-1]] if x in xset]
        feas: dict[tuple[int, int], int] = {}
        back: dict[int, list[dict[int, int]]] = {}
        for S1 in dom[p[0]]:
            layers = [{S1: 0}]
            reach = {S1: 0}
            for v in p[1:]:
                nr = {}
                for T in dom[v]:
                    for S in reach:
                        if not T & S:
                            nr[T] = S
                            break
                layers.append(nr)
                reach = nr
                if not reach:
                    break
            back[S1] = layers
            for Sk in reach:
                feas[(S1, Sk)] = S1
        tables.append((p, a_first, a_last, feas, back))

    phi = [0] * G.n
    xorder = sorted(xset, key=lambda x: (-G.degree(x), x))
    where = {x: i for i, x in enumerate(xorder)}
    # constraints to check once all their X vertices are fixed
    checks: list[list] = [[] for _ in xorder]
    free_paths = []
    for t in tables:
        p, af, al, feas, _ = t
        att = set(af) | set(al)
        if not feas:
            return None
        if not att:
            free_paths.append(t)
            continue
        last = max(where[x] for x in att)
        checks[last].append(t)
    xedges = [[] for _ in xorder]
    for x in xorder:
        for y in G.adj[x]:
            if y in xset and where[y] < where[x]:
                xedges[where[x]].append(y)

    def path_ok(t) -> tuple[int, int] | None:
        p, af, al, feas, _ = t
        ban_f = 0
        for x in af:
            ban_f |= phi[x]
        ban_l = 0
        for x in al:
            ban_l |= phi[x]
        for (S1, Sk) in feas:
            if S1 & ban_f:
                continue
            if len(p) == 1:
                if S1 & ban_l:
                    continue
            elif Sk & ban_l:
                continue
            return (S1, Sk)
        return None

    def rec(i: int) -> bool:
        if i == len(xorder):
            return True
        x = xorder[i]
        for S in dom[x]:
            if any(phi[y] & S for y in xedges[i]):
                continue
            phi[x] = S
            if all(path_ok(t) is not None for t in checks[i]) and rec(i + 1):
                return True
        phi[x] = 0
        return False

    if not rec(0):
        return None
    for t in tables:
        p, _, _, _, back = t
        S1, Sk = path_ok(t)
        layers = back[S1]
        cur = Sk
        for j in range(len(p) - 1, -1, -1):
            phi[p[j]] = cur
            cur = layers[j][cur]
    return tuple(phi)


# ------------------------------------------------------ majority projection

def duplicate_lists(L2: ListAssignment, m: int) -> tuple[ListAssignment, dict[int, int]]:
    """Replace each colour c by m copies; returns lists and copy -> original."""
    back = {}
    out = []
    for mask in L2.lists:
        new = 0
        for c in colors_of(mask):
            for i in range(m):
                k = (c - 1) * m + i + 1
                new |= 1 << k
                back[k] = c
        out.append(new)
    return ListAssignment(tuple(out)), back


def majority_project(G: Graph, L2: ListAssignment, phi: Sequence[int], m: int,
                     back: Mapping[int, int] | None = None) -> Coloring:
    """Turn an m-fold colouring of the duplicated 2-lists into a 1-fold one.

    Each vertex takes the original colour holding more than half of its m
    chosen copies; m odd rules out ties.
    """
    if m % 2 == 0:
        raise ColoringError("majority projection needs m odd")
    if any(popcount(x) != 2 for x in L2.lists):
        raise ColoringError("majority projection expects lists of size 2")
    if back is None:
        _, back = duplicate_lists(L2, m)
    out = []
    for v in range(G.n):
        tally: dict[int, int] = {}
        for k in colors_of(phi[v]):
            tally[back[k]] = tally.get(back[k], 0) + 1
        winner = max(tally, key=lambda c: (tally[c], -c))
        out.append(1 << winner)
    return tuple(out)


# ---------------------------------------------------------- pot reduction

@dataclass(frozen=True)
class FlatMove:
    """Replace colour alpha by beta on the given vertex set."""

    alpha: int
    vertices: frozenset[int]
    beta: int


def color_components(G: Graph, L: ListAssignment, alpha: int) -> list[frozenset[int]]:
    """Components of the subgraph induced by vertices whose list has alpha."""
    bit = 1 << alpha
    verts = [v for v in range(G.n) if L[v] & bit]
    vs = set(verts)
    out = []
    seen = set()
    for s in verts:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for u in G.adj[x]:
                if u in vs and u not in comp:
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        out.append(frozenset(comp))
    return out


def _replace(L: ListAssignment, mv: FlatMove) -> ListAssignment:
    ls = list(L.lists)
    for v in mv.vertices:
        ls[v] = (ls[v] & ~(1 << mv.alpha)) | (1 << mv.beta)
    return ListAssignment(tuple(ls))


def check_pot_separator(G: Graph, X: Sequence[int]) -> str | None:
    """Why X fails the separator condition, or None if it holds."""
    xs = set(X)
    H, keep = G.remove_vertices(xs)
    for comp in H.components():
        vs = [keep[i] for i in comp]
        if len(vs) > 3:
            return f"component {[G.labels[v] for v in vs]} has more than 3 vertices"
        if any(H.degree(i) > 2 for i in comp) or (len(vs) == 3 and H.subgraph(comp)[0].m != 2):
            return f"component {[G.labels[v] for v in vs]} is not a path"
        if len(vs) == 3:
            mid = [i for i in comp if H.degree(i) == 2][0]
            if G.degree(keep[mid]) != 2:
                return f"middle vertex {G.labels[keep[mid]]} has neighbours outside its path"
    return None


def find_pot_separator(G: Graph, size: int = 2) -> list[int] | None:
    for X in combinations(range(G.n), size):
        if check_pot_separator(G, X) is None:
            return list(X)
    return None


@dataclass
class PotReduction:
    lists: ListAssignment
    moves: list[FlatMove]
    kept: int  # colour set S retained


def reduce_pot(G: Graph, L: ListAssignment, X: Sequence[int], budget: int = 8) -> PotReduction:
    """Flattening moves that bring a 4-assignment into `budget` colours.

    X must be a set of two vertices whose removal leaves paths on at most
    three vertices, with the middle vertex of a 3-vertex path having no
    other neighbours. Every 2-fold colouring of the result lifts back.
    """
    why = check_pot_separator(G, X)
    if why:
        raise ColoringError(f"separator condition fails: {why}")
    xs = set(X)
    pot = L.pot()
    S = 0
    for x in xs:
        S |= L[x]
    if popcount(S) > budget:
        raise ColoringError("lists on X do not fit in the budget")
    for c in colors_of(pot):
        if popcount(S) >= budget:
            break
        S |= 1 << c
    moves: list[FlatMove] = []

    def apply(mv):
        nonlocal L
        moves.append(mv)
        L = _replace(L, mv)

    # isolated occurrences outside X borrow a colour from a neighbour
    changed = True
    while changed:
        changed = False
        for alpha in colors_of(L.pot()):
            for comp in color_components(G, L, alpha):
                if len(comp) != 1:
                    continue
                (v,) = comp
                if v in xs:
                    continue
                for w in sorted(G.adj[v]):
                    extra = L[w] & ~L[v]
                    if extra:
                        apply(FlatMove(alpha, comp, colors_of(extra)[0]))
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    # colours outside S on small components move into S
    for size in (1, 2, 3):
        changed = True
        while changed:
            changed = False
            for alpha in colors_of(L.pot() & ~S):
                for comp in color_components(G, L, alpha):
                    if len(comp) > size:
                        continue
                    used = 0
                    for v in comp:
                        used |= L[v]
                    free = S & ~used
                    if not free:
                        raise ColoringError("no free colour in S for a component")
                    apply(FlatMove(alpha, comp, colors_of(free)[0]))
                    changed = True
                    break
                if changed:
                    break
    if L.pot() & ~S:
        raise ColoringError("colours outside S remain; separator condition too weak")
    return PotReduction(L, moves, S)


def lift_through_moves(phi: Sequence[int], moves: Sequence[FlatMove]) -> Coloring:
    """Undo moves in reverse: beta goes back to alpha on each moved set."""
    out = list(phi)
    for mv in reversed(moves):
        for v in mv.vertices:
            if out[v] >> mv.beta & 1:
                out[v] = (out[v] & ~(1 << mv.beta)) | (1 << mv.alpha)
    return tuple(out)


# --------------------------------------------------------------------- I/O

def parse_lists(text: str, G: Graph) -> tuple[ListAssignment, int | None]:
    """Read 'v: c1 c2 ...' lines or JSON {"lists": {...}, "b": 2}."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ColoringError(f"bad JSON: {e}") from None
        if "lists" not in data:
            raise ColoringError("JSON lists file needs a 'lists' key")
        return ListAssignment.from_dict(G, data["lists"]), data.get("b")
    d = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ColoringError(f"line {lineno}: expected 'vertex: colours'")
        v, rest = line.split(":", 1)
        v = v.strip()
        try:
            G.index(v)
        except GraphError:
            raise ColoringError(f"line {lineno}: unknown vertex {v!r}") from None
        if v in d:
            raise ColoringError(f"line {lineno}: second list for {v}")
        toks = rest.split()
        try:
            d[v] = [int(t) for t in toks] if len(toks) > 1 else parse_set(toks[0])
        except (ValueError, IndexError):
            raise ColoringError(f"line {lineno}: bad colour list {rest.strip()!r}") from None
    return ListAssignment.from_dict(G, {k: (colors_of(x) if isinstance(x, int) else x) for k, x in d.items()}), None


def format_lists(G: Graph, L: ListAssignment) -> str:
    return "".join(f"{G.labels[v]}: {' '.join(map(str, colors_of(L[v])))}\n" for v in range(G.n))


def lists_json(G: Graph, L: ListAssignment, b: int | None = None) -> dict:
    d = {"lists": L.to_dict(G)}
    if b is not None:
        d["b"] = b
    return d


def coloring_json(G: Graph, phi: Sequence[int]) -> dict:
    return {"phi": {G.labels[v]: colors_of(phi[v]) for v in range(G.n)}}


def parse_coloring(data: Mapping, G: Graph) -> Coloring:
    phi = [0] * G.n
    for k, cs in data["phi"].items():
        phi[G.index(k)] = to_mask(cs)
    return tuple(phi)
