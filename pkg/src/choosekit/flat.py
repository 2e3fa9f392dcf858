"""Flattening moves, flat list assignments and exhaustive choosability checks.

An assignment is handled here mostly through its colour classes: for each
colour, the bitmask of vertices whose list contains it. Up to renaming
colours an assignment is just the multiset of its classes, which makes
canonical forms and move searches cheap.
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Iterator, Sequence

from .coloring import (
    ColoringError, FastSolver, FlatMove, ListAssignment, colors_of, fmt_set,
    forcing_shape, lift_through_moves, popcount, subsets_of_size, validate_coloring,
)
from .graph import Graph, automorphisms, blocks


class MoveError(ValueError):
    pass


# ----------------------------------------------------------- class space

def _components(mask: int, adj: Sequence[int]) -> list[int]:
    out = []
    rem = mask
    while rem:
        comp = rem & -rem
        frontier = comp
        while frontier:
            b = frontier & -frontier
            frontier ^= b
            nb = adj[b.bit_length() - 1] & mask & ~comp
            comp |= nb
            frontier |= nb
        out.append(comp)
        rem &= ~comp
    return out


def _neighbourhood(mask: int, adj: Sequence[int]) -> int:
    r = 0
    m = mask
    while m:
        b = m & -m
        m ^= b
        r |= adj[b.bit_length() - 1]
    return r & ~mask


def class_masks(L: ListAssignment) -> list[tuple[int, int]]:
    """(colour, vertex mask) for each colour of pot(L), by colour."""
    out = []
    for c in colors_of(L.pot()):
        bit = 1 << c
        out.append((c, sum(1 << v for v, m in enumerate(L.lists) if m & bit)))
    return out


def from_classes(n: int, classes: Sequence[int]) -> ListAssignment:
    """Assignment with colour i+1 on the vertices of classes[i]."""
    lists = [0] * n
    for i, cm in enumerate(classes):
        m = cm
        while m:
            b = m & -m
            m ^= b
            lists[b.bit_length() - 1] |= 1 << (i + 1)
    return ListAssignment(tuple(lists))


def objective(G: Graph, L: ListAssignment) -> tuple[int, int]:
    """(|pot|, total number of components over all colour classes)."""
    adj = G.masks
    cls = class_masks(L)
    return len(cls), sum(len(_components(m, adj)) for _, m in cls)


def _state_objective(state: Sequence[int], adj) -> tuple[int, int]:
    return len(state), sum(len(_components(m, adj)) for m in state)


def _state_moves(state: tuple[int, ...], adj) -> Iterator[tuple[int, int, int, tuple[int, ...]]]:
    """Yield (i, C, j, new_state) for every flattening move on a class multiset."""
    k = len(state)
    for i in range(k):
        mi = state[i]
        if i and state[i - 1] == mi:
            continue
        for C in _components(mi, adj):
            seen = set()
            for j in range(k):
                mj = state[j]
                if j == i or mj & C or mj in seen:
                    continue
                seen.add(mj)
                new = list(state)
                new[i] = mi & ~C
                new[j] = mj | C
                yield i, C, j, tuple(sorted((x for x in new if x), reverse=True))


def improving_moves(G: Graph, L: ListAssignment) -> list[FlatMove]:
    """Single flattening moves that strictly lower the objective."""
    base = objective(G, L)
    out = []
    for mv in flattening_moves(G, L):
        if objective(G, _apply(L, mv)) < base:
            out.append(mv)
    return out


def flattening_moves(G: Graph, L: ListAssignment) -> list[FlatMove]:
    adj = G.masks
    cls = class_masks(L)
    pot = L.pot()
    out = []
    for alpha, m in cls:
        for C in _components(m, adj):
            used = 0
            verts = []
            x = C
            while x:
                b = x & -x
                x ^= b
                v = b.bit_length() - 1
                verts.append(v)
                used |= L[v]
            for beta in colors_of(pot & ~used):
                out.append(FlatMove(alpha, frozenset(verts), beta))
    return out


def _apply(L: ListAssignment, mv: FlatMove) -> ListAssignment:
    ls = list(L.lists)
    for v in mv.vertices:
        ls[v] = (ls[v] & ~(1 << mv.alpha)) | (1 << mv.beta)
    return ListAssignment(tuple(ls))


def apply_move(G: Graph, L: ListAssignment, mv: FlatMove) -> ListAssignment:
    """Replace alpha by beta on one component of the alpha class."""
    abit, bbit = 1 << mv.alpha, 1 << mv.beta
    if not L.pot() & bbit:
        raise MoveError(f"colour {mv.beta} is not used by the assignment")
    from .coloring import color_components
    comps = color_components(G, L, mv.alpha)
    if frozenset(mv.vertices) not in comps:
        raise MoveError(f"vertex set is not a component of the class of colour {mv.alpha}")
    for v in mv.vertices:
        if L[v] & bbit:
            raise MoveError(f"colour {mv.beta} already in the list of {G.labels[v]}")
    return _apply(L, mv)


def lift_coloring(G: Graph, L: ListAssignment, moves: Sequence[FlatMove], phi: Sequence[int], b: int) -> tuple:
    """Map a colouring of the flattened assignment back to one of L."""
    Lf = L
    for mv in moves:
        Lf = _apply(Lf, mv)
    errs = validate_coloring(G, Lf, b, phi)
    if errs:
        raise ColoringError("colouring is not valid for the flattened lists: " + errs[0])
    out = lift_through_moves(phi, moves)
    errs = validate_coloring(G, L, b, out)
    if errs:
        raise ColoringError("lifted colouring failed validation: " + errs[0])
    return out


# ------------------------------------------------------------- flatness

def _key(state: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(state, reverse=True))


def is_flat(G: Graph, L: ListAssignment, depth: int | None = None) -> bool:
    """No sequence of at most `depth` moves (any length if None) improves L."""
    adj = G.masks
    start = _key(m for _, m in class_masks(L))
    goal = _state_objective(start, adj)
    seen = {start}
    frontier = [start]
    level = 0
    while frontier and (depth is None or level < depth):
        nxt = []
        for s in frontier:
            for _, _, _, t in _state_moves(s, adj):
                if t in seen:
                    continue
                if _state_objective(t, adj) < goal:
                    return False
                seen.add(t)
                nxt.append(t)
        frontier = nxt
        level += 1
    return True


def locally_flat(G: Graph, L: ListAssignment) -> bool:
    """No single move improves L (a necessary condition for flatness)."""
    return _locally_flat_classes([m for _, m in class_masks(L)], G.masks)


def _locally_flat_classes(cls: Sequence[int], adj) -> bool:
    comps = [_components(m, adj) for m in cls]
    for i, mi in enumerate(cls):
        whole = len(comps[i]) == 1
        for C in comps[i]:
            N = _neighbourhood(C, adj)
            for j, mj in enumerate(cls):
                if j == i or mj & C:
                    continue
                if whole or mj & N:
                    return False
    return True


def flatten(G: Graph, L: ListAssignment, depth: int | None = None) -> tuple[ListAssignment, list[FlatMove]]:
    """Reach a flat assignment by flattening moves; returns it and the moves.

    Improving single moves are taken greedily first; then a breadth-first
    search over move sequences (unbounded when depth is None) looks for a
    strictly better assignment, repeating until none is found.
    """
    adj = G.masks
    moves: list[FlatMove] = []
    cur = L
    while True:
        # greedy descent
        improved = True
        while improved:
            improved = False
            base = objective(G, cur)
            for mv in flattening_moves(G, cur):
                nxt = _apply(cur, mv)
                if objective(G, nxt) < base:
                    moves.append(mv)
                    cur = nxt
                    improved = True
                    break
        # search for a better assignment behind non-improving moves
        base = objective(G, cur)
        start = _key(m for _, m in class_masks(cur))
        parent: dict[tuple, tuple | None] = {start: None}
        rep: dict[tuple, ListAssignment] = {start: cur}
        frontier = [start]
        level = 0
        target = None
        while frontier and target is None and (depth is None or level < depth):
            nxt_frontier = []
            for s in frontier:
                Ls = rep[s]
                for mv in flattening_moves(G, Ls):
                    Lt = _apply(Ls, mv)
                    t = _key(m for _, m in class_masks(Lt))
                    if t in parent:
                        continue
                    parent[t] = (s, mv)
                    rep[t] = Lt
                    if _state_objective(t, adj) < base:
                        target = t
                        break
                    nxt_frontier.append(t)
                if target is not None:
                    break
            frontier = nxt_frontier
            level += 1
        if target is None:
            return cur, moves
        path = []
        t = target
        while parent[t] is not None:
            s, mv = parent[t]
            path.append(mv)
            t = s
        moves.extend(reversed(path))
        cur = rep[target]


# ---------------------------------------------------------- canonical forms

class _Symmetry:
    """Automorphisms as lookup tables on vertex masks."""

    def __init__(self, G: Graph, fix: int | Iterable[int] | None = None):
        auts = automorphisms(G)
        if fix is not None:
            fixed = [fix] if isinstance(fix, int) else list(fix)
            auts = [p for p in auts if all(p[v] == v for v in fixed)]
        self.auts = auts
        n = G.n
        self.tables = []
        for p in auts[1:]:
            tab = [0] * (1 << n)
            for m in range(1, 1 << n):
                low = m & -m
                tab[m] = tab[m ^ low] | (1 << p[low.bit_length() - 1])
            self.tables.append(tab)

    def canonical(self, state: Sequence[int]) -> tuple[int, ...]:
        best = _key(state)
        for tab in self.tables:
            cand = tuple(sorted((tab[m] for m in state), reverse=True))
            if cand > best:
                best = cand
        return best

    def is_canonical(self, state: Sequence[int]) -> bool:
        own = _key(state)
        for tab in self.tables:
            if tuple(sorted((tab[m] for m in state), reverse=True)) > own:
                return False
        return True


def canonical_form(G: Graph, L: ListAssignment) -> tuple[int, ...]:
    """Isomorphism-invariant key (colour renaming and graph automorphisms)."""
    return _Symmetry(G).canonical([m for _, m in class_masks(L)])


# ------------------------------------------------------ orderly generation

class _Generator:
    """Rows are vertices in BFS order, columns are colours.

    Columns stay sorted (identical-so-far columns form blocks and a row puts
    its ones at the left of each block), so each multiset of colour classes
    is produced once. A vertex whose neighbours have all been placed must
    share each of its colours with some neighbour.
    """

    def __init__(self, G: Graph, a: int, k: int, root: int = 0):
        self.G = G
        self.n = G.n
        self.a = a
        self.k = k
        order = [root]
        seen = {root}
        i = 0
        while len(order) < G.n:
            if i == len(order):
                r = min(v for v in range(G.n) if v not in seen)
                order.append(r)
                seen.add(r)
            for u in sorted(G.adj[order[i]], key=lambda u: (-G.degree(u), u)):
                if u not in seen:
                    seen.add(u)
                    order.append(u)
            i += 1
        self.order = order
        pos = {v: i for i, v in enumerate(order)}
        self.nbrows = [[pos[u] for u in G.adj[order[i]]] for i in range(G.n)]
        close = [max([i] + self.nbrows[i]) for i in range(G.n)]
        self.radj = [sum(1 << q for q in nbs) for nbs in self.nbrows]
        self.closers = [[j for j in range(G.n) if close[j] == i and self.nbrows[j]] for i in range(G.n)]

    def _row_choices(self, blocks, remaining=None):
        a = self.a if remaining is None else remaining
        out = []

        def rec(bi, rem, row, nb):
            if bi == len(blocks):
                if rem == 0:
                    out.append((row, nb))
                return
            s, ln = blocks[bi]
            cap = sum(l for _, l in blocks[bi + 1:])
            for t in range(min(ln, rem), -1, -1):
                if rem - t > cap:
                    break
                r = row | (((1 << t) - 1) << s)
                nbk = nb + ([(s, t)] if t else []) + ([(s + t, ln - t)] if ln - t else [])
                rec(bi + 1, rem - t, r, nbk)

        rec(0, a, 0, [])
        return out

    def _ok_after(self, i, rows) -> bool:
        for j in self.closers[i]:
            nb = 0
            for q in self.nbrows[j]:
                nb |= rows[q]
            if rows[j] & ~nb:
                return False
        # a colour component whose neighbours are all placed is final; a
        # colour on a neighbour but missing from the component gives a move
        radj = self.radj
        placed = (1 << (i + 1)) - 1
        touch = (1 << i) | (radj[i] & placed)
        cols = 0
        x = touch
        while x:
            b = x & -x
            x ^= b
            cols |= rows[b.bit_length() - 1]
        while cols:
            cb = cols & -cols
            cols ^= cb
            A = 0
            for j in range(i + 1):
                if rows[j] & cb:
                    A |= 1 << j
            rem = A
            while rem:
                comp = rem & -rem
                frontier = comp
                nbr = 0
                while frontier:
                    b = frontier & -frontier
                    frontier ^= b
                    r = radj[b.bit_length() - 1]
                    nbr |= r
                    new = r & A & ~comp
                    comp |= new
                    frontier |= new
                rem &= ~comp
                if not comp & touch or nbr & ~placed:
                    continue
                U = 0
                y = comp
                while y:
                    b = y & -y
                    y ^= b
                    U |= rows[b.bit_length() - 1]
                y = nbr & ~comp
                while y:
                    b = y & -y
                    y ^= b
                    if rows[b.bit_length() - 1] & ~U:
                        return False
        return True

    def prefixes(self, depth: int) -> list[tuple[int, ...]]:
        """Partial row tuples of the given length (work units)."""
        out = []
        rows = [0] * self.n

        def rec(i, blocks):
            if i == depth:
                out.append(tuple(rows[:depth]))
                return
            for row, nb in self._row_choices(blocks):
                rows[i] = row
                if self._ok_after(i, rows):
                    rec(i + 1, nb)

        rec(0, [(0, self.k)])
        return out

    def _blocks_for(self, prefix):
        blocks = [(0, self.k)]
        for row in prefix:
            nb = []
            for s, ln in blocks:
                seg = (row >> s) & ((1 << ln) - 1)
                t = popcount(seg)
                if t:
                    nb.append((s, t))
                if ln - t:
                    nb.append((s + t, ln - t))
            blocks = nb
        return blocks

    def run(self, prefix: Sequence[int] = ()) -> Iterator[list[int]]:
        """Yield colour-class masks for every completion of the prefix."""
        n, k = self.n, self.k
        rows = [0] * n
        rows[: len(prefix)] = prefix
        full = (1 << k) - 1
        order = self.order

        def rec(i, blocks):
            if i == n:
                used = 0
                for r in rows:
                    used |= r
                if used != full:
                    return
                cls = [0] * k
                for ri, r in enumerate(rows):
                    bit = 1 << order[ri]
                    x = r
                    while x:
                        b = x & -x
                        x ^= b
                        cls[b.bit_length() - 1] |= bit
                yield cls
                return
            # remaining rows must be able to reach every empty column
            if i:
                used = 0
                for r in rows[:i]:
                    used |= r
                if popcount(full & ~used) > (n - i) * self.a:
                    return
            for row, nb in self._row_choices(blocks):
                rows[i] = row
                if self._ok_after(i, rows):
                    yield from rec(i + 1, nb)

        yield from rec(len(prefix), self._blocks_for(prefix))


# ---------------------------------------------------------------- census

@dataclass
class FlatCensus:
    graph: Graph
    a: int
    counts: dict[int, int]
    representatives: list[ListAssignment]
    exact: bool = True

    def to_json(self) -> dict:
        return {
            "graph": [[self.graph.labels[u], self.graph.labels[w]] for u, w in self.graph.edges()],
            "vertices": list(self.graph.labels),
            "a": self.a,
            "counts": {str(k): self.counts[k] for k in sorted(self.counts, reverse=True)},
            "representatives": [
                {"pot": L.pot_size(), "lists": {self.graph.labels[v]: fmt_set(L[v]) for v in range(self.graph.n)}}
                for L in self.representatives
            ],
        }


def _work_units(G: Graph, a: int, pot_bound: int, workers: int, root: int = 0) -> list[tuple[int, tuple]]:
    units = []
    for k in range(a, pot_bound + 1):
        gen = _Generator(G, a, k, root)
        depth = 0
        pre = [()]
        while len(pre) < 4 * max(1, workers) and depth < min(3, G.n - 1):
            depth += 1
            pre = gen.prefixes(depth)
        units.extend((k, p) for p in pre)
    return units


def _census_unit(args):
    G, a, k, prefix, exact, depth, fix = args
    sym = _Symmetry(G, fix)
    gen = _Generator(G, a, k, fix if fix is not None else 0)
    adj = G.masks
    found = []
    candidates = 0
    for cls in gen.run(prefix):
        if not _locally_flat_classes(cls, adj):
            continue
        if not sym.is_canonical(cls):
            continue
        candidates += 1
        state = _key(cls)
        if exact:
            Lc = from_classes(G.n, state)
            if not is_flat(G, Lc, depth):
                continue
        found.append(state)
    return found, candidates


def _map(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("CHOOSEKIT_WORKERS", "1")))
    except ValueError:
        return 1


def enumerate_flat(G: Graph, a: int, pot_bound: int, workers: int | None = None,
                   depth: int | None = None, exact: bool = True) -> FlatCensus:
    """All flat a-assignments of G with at most pot_bound colours, up to isomorphism.

    With exact=False the filter is only "no single improving move", which
    keeps a superset of the flat assignments.
    """
    workers = default_workers() if workers is None else workers
    units = _work_units(G, a, pot_bound, workers)
    results = _map(_census_unit, [(G, a, k, p, exact, depth, None) for k, p in units], workers)
    states = sorted({s for found, _ in results for s in found}, key=lambda s: (-len(s), s))
    counts: dict[int, int] = {}
    for s in states:
        counts[len(s)] = counts.get(len(s), 0) + 1
    reps = [from_classes(G.n, s) for s in states]
    return FlatCensus(G, a, counts, reps, exact)


# ---------------------------------------------------------- verification

@dataclass
class ChoosabilityCertificate:
    graph: Graph
    a: int
    b: int
    pot_bound: int
    choosable: bool
    counterexample: ListAssignment | None
    checked: int
    method: str
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "CERTIFIED_CHOOSABLE" if self.choosable else "COUNTEREXAMPLE"

    def to_json(self) -> dict:
        d = {
            "verdict": self.verdict,
            "a": self.a,
            "b": self.b,
            "pot_bound": self.pot_bound,
            "checked": self.checked,
            "method": self.method,
        }
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample.to_dict(self.graph)
        if self.notes:
            d["notes"] = self.notes
        return d


def _verify_unit(args):
    G, a, b, k, prefix = args
    sym = _Symmetry(G)
    gen = _Generator(G, a, k)
    adj = G.masks
    solver = FastSolver(G, b)
    checked = 0
    for cls in gen.run(prefix):
        if not _locally_flat_classes(cls, adj) or not sym.is_canonical(cls):
            continue
        checked += 1
        L = from_classes(G.n, _key(cls))
        if solver.solve(L.lists) is None:
            return checked, L
    return checked, None


def _verify_direct(G: Graph, a: int, b: int, pot_bound: int, workers: int) -> ChoosabilityCertificate:
    total = 0
    for k in range(a, pot_bound + 1):
        units = [p for kk, p in _work_units(G, a, k, workers) if kk == k]
        jobs = [(G, a, b, k, p) for p in units]
        if workers <= 1:
            for j in jobs:
                c, L = _verify_unit(j)
                total += c
                if L is not None:
                    return ChoosabilityCertificate(G, a, b, pot_bound, False, L, total, "direct")
        else:
            res = _map(_verify_unit, jobs, workers)
            for c, L in res:
                total += c
            for c, L in res:
                if L is not None:
                    return ChoosabilityCertificate(G, a, b, pot_bound, False, L, total, "direct")
    return ChoosabilityCertificate(G, a, b, pot_bound, True, None, total, "direct")


def _pattern_key(pattern: Iterable[int], a: int) -> tuple[int, ...]:
    """Canonical form of a set of subsets of {1..a} under permutations."""
    best = None
    for perm in permutations(range(1, a + 1)):
        img = []
        for S in pattern:
            T = 0
            for c in colors_of(S):
                T |= 1 << perm[c - 1]
            img.append(T)
        cand = tuple(sorted(img))
        if best is None or cand < best:
            best = cand
    return best


def _permuted(pattern: Iterable[int], perm: Sequence[int]) -> set[int]:
    out = set()
    for S in pattern:
        T = 0
        for c in colors_of(S):
            T |= 1 << perm[c - 1]
        out.add(T)
    return out


def _disjoint_perm(pat1: Iterable[int], pat2: Iterable[int], a: int) -> tuple[int, ...] | None:
    """A renaming of 1..a that makes pat2 miss pat1 entirely, if any."""
    s1 = set(pat1)
    for perm in permutations(range(1, a + 1)):
        if not s1 & _permuted(pat2, perm):
            return perm
    return None


def _pattern_jobs(G: Graph, v: int, a: int, b: int, pot_bound: int, against=None) -> list:
    jobs = []
    for k in range(a, pot_bound + 1):
        gen = _Generator(G, a, k, v)
        pre = gen.prefixes(1) if G.n > 1 else [()]
        jobs.extend((G, a, b, k, p, v, against) for p in pre)
    return jobs


def _part_patterns(G: Graph, v: int, a: int, b: int, pot_bound: int, workers: int):
    """Allowed patterns at v over (locally) flat assignments of G.

    Returns ({pattern key: (pattern, assignment)}, assignments checked).
    The pattern is expressed after renaming L(v) to 1..a.
    """
    res = _map(_pattern_unit, _pattern_jobs(G, v, a, b, pot_bound), workers)
    out = {}
    checked = 0
    for found, c, _ in res:
        checked += c
        for key, pat, L in found:
            if key not in out:
                out[key] = (pat, L)
    return out, checked


def _pattern_unit(args):
    """Patterns of one work unit; with `against`, stop at the first one that can avoid a listed pattern."""
    G, a, b, k, prefix, v, against = args
    sym = _Symmetry(G, v)
    gen = _Generator(G, a, k, v)
    adj = G.masks
    solver = FastSolver(G, b)
    found = []
    seen = set()
    checked = 0
    for cls in gen.run(prefix):
        if not _locally_flat_classes(cls, adj) or not sym.is_canonical(cls):
            continue
        checked += 1
        L = from_classes(G.n, _key(cls))
        allowed = solver.allowed_at(L.lists, v)
        ren = {c: i + 1 for i, c in enumerate(colors_of(L[v]))}
        pat = []
        for S in allowed:
            T = 0
            for c in colors_of(S):
                T |= 1 << ren[c]
            pat.append(T)
        key = _pattern_key(pat, a)
        if key in seen:
            continue
        seen.add(key)
        found.append((key, tuple(sorted(pat)), L))
        if against is not None:
            for pat1, L1 in against:
                perm = _disjoint_perm(pat1, pat, a)
                if perm is not None:
                    return found, checked, (pat1, L1, L, perm)
    return found, checked, None


def _choose_split(G: Graph):
    bd = blocks(G)
    best = None
    for v in sorted(bd.cut_vertices):
        H, keep = G.remove_vertices([v])
        comps = [[keep[i] for i in c] for c in H.components()]
        for comp in comps:
            side1 = sorted(comp + [v])
            side2 = sorted(set(range(G.n)) - set(comp))
            score = max(len(side1), len(side2))
            if best is None or score < best[0]:
                best = (score, v, side1, side2)
    return best


def _verify_split(G: Graph, a: int, b: int, pot_bound: int, workers: int) -> ChoosabilityCertificate:
    _, v, side1, side2 = _choose_split(G)
    if len(side1) > len(side2):
        side1, side2 = side2, side1
    G1, keep1 = G.subgraph(side1)
    G2, keep2 = G.subgraph(side2)
    v1, v2 = keep1.index(v), keep2.index(v)
    P1, checked = _part_patterns(G1, v1, a, b, pot_bound, workers)
    against = [P1[key] for key in sorted(P1)]
    jobs = _pattern_jobs(G2, v2, a, b, pot_bound, against)
    seen2 = set()
    head = f"split at {G.labels[v]}: parts of {G1.n} and {G2.n} vertices"
    for found, c, hit in _stream(_pattern_unit, jobs, workers):
        checked += c
        seen2.update(key for key, _, _ in found)
        if hit is not None:
            _, L1, L2, perm = hit
            L = _glue_counterexample(G, keep1, keep2, v1, v2, L1, L2, perm)
            if FastSolver(G, b).solve(L.lists) is not None:
                raise ColoringError("internal error: glued counterexample is colourable")
            note = f"{head}; {len(P1)} patterns on the first, stopped at the first clash on the second"
            return ChoosabilityCertificate(G, a, b, pot_bound, False, L, checked, "split", [note])
    note = f"{head}, {len(P1)} and {len(seen2)} patterns"
    return ChoosabilityCertificate(G, a, b, pot_bound, True, None, checked, "split", [note])


def _stream(fn, jobs, workers: int):
    """Results in job order, computed lazily so the caller can stop early."""
    if workers <= 1 or len(jobs) <= 1:
        for j in jobs:
            yield fn(j)
        return
    ex = ProcessPoolExecutor(max_workers=workers)
    try:
        yield from ex.map(fn, jobs)
    finally:
        ex.shutdown(wait=True, cancel_futures=True)


def _glue_counterexample(G, keep1, keep2, v1, v2, L1, L2, perm) -> ListAssignment:
    # L1 colours stay; L2's list at v is renamed onto L1's via the pattern
    # renamings and perm; its other colours become fresh
    c1 = colors_of(L1[v1])
    c2 = colors_of(L2[v2])
    cmap = {c2[i]: c1[perm[i] - 1] for i in range(len(c2))}
    nxt = max(colors_of(L1.pot())) + 1
    for c in colors_of(L2.pot()):
        if c not in cmap:
            cmap[c] = nxt
            nxt += 1
    lists = [0] * G.n
    for i, v in enumerate(keep1):
        lists[v] = L1[i]
    for i, v in enumerate(keep2):
        m = 0
        for c in colors_of(L2[i]):
            m |= 1 << cmap[c]
        if i == v2 and m != lists[v]:
            raise ColoringError("internal error: lists disagree at the cut vertex")
        lists[v] = m
    return ListAssignment(tuple(lists))


def verify_choosable(G: Graph, a: int, b: int, pot_bound: int, workers: int | None = None,
                     method: str = "auto") -> ChoosabilityCertificate:
    """Check every (locally) flat a-assignment with at most pot_bound colours.

    method 'direct' enumerates assignments of G itself. 'split' cuts G at a
    cut vertex and compares the patterns of allowed colourings at that vertex
    over the flat assignments of both sides: flattening a side only shrinks
    its pattern, so this covers every assignment of G within the bound.
    'auto' splits whenever G has a cut vertex.
    """
    workers = default_workers() if workers is None else workers
    if G.n == 0:
        raise ValueError("empty graph")
    comps = G.components()
    if len(comps) > 1:
        total = 0
        for comp in comps:
            H, keep = G.subgraph(comp)
            cert = verify_choosable(H, a, b, pot_bound, workers, method)
            total += cert.checked
            if not cert.choosable:
                lists = [sum(1 << c for c in range(1, a + 1))] * G.n
                for i, v in enumerate(keep):
                    lists[v] = cert.counterexample[i]
                return ChoosabilityCertificate(G, a, b, pot_bound, False, ListAssignment(tuple(lists)),
                                               total, cert.method, cert.notes)
        return ChoosabilityCertificate(G, a, b, pot_bound, True, None, total, "components")
    if method == "auto":
        method = "split" if G.n > 2 and blocks(G).cut_vertices else "direct"
    if method == "split":
        if not blocks(G).cut_vertices:
            raise ValueError("graph has no cut vertex to split at")
        return _verify_split(G, a, b, pot_bound, workers)
    if method == "direct":
        return _verify_direct(G, a, b, pot_bound, workers)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------- forcing claims

@dataclass
class ForcingClaimReport:
    graph: Graph
    assignments: int
    checks: int
    violations: list[str]
    min_allowed: int

    @property
    def holds(self) -> bool:
        return not self.violations


def verify_forcing_claims(G: Graph, a: int = 4, b: int = 2, min_allowed: int = 4,
                          shared_forbidden: bool = False, opposite_trichotomy: bool = False,
                          pot_bound: int = 8, census: FlatCensus | None = None) -> ForcingClaimReport:
    """Check forcing lower bounds at every vertex over all flat assignments.

    min_allowed: every vertex keeps at least this many extendable colourings.
    shared_forbidden: when exactly C(a,b)-2 colourings survive, the two
    forbidden ones share a colour.
    opposite_trichotomy (4-cycles): after forbidding two colourings of v that
    share a colour, the opposite vertex keeps three colourings or two
    disjoint ones.
    """
    if census is None:
        census = enumerate_flat(G, a, pot_bound, workers=1)
    solver = FastSolver(G, b)
    violations = []
    checks = 0
    for L in census.representatives:
        for v in range(G.n):
            allowed = solver.allowed_at(L.lists, v)
            checks += 1
            desc = f"{L.short()} at {G.labels[v]}"
            if len(allowed) < min_allowed:
                violations.append(f"{desc}: only {len(allowed)} colourings extend")
            subs = subsets_of_size(L[v], b)
            if shared_forbidden and len(allowed) == len(subs) - 2:
                forb = [S for S in subs if S not in allowed]
                if not forb[0] & forb[1]:
                    violations.append(f"{desc}: forbidden {fmt_set(forb[0])} and {fmt_set(forb[1])} are disjoint")
            if opposite_trichotomy:
                if G.n != 4 or any(G.degree(x) != 2 for x in range(4)):
                    raise ValueError("the trichotomy check needs a 4-cycle")
                opp = [x for x in range(4) if x != v and x not in G.adj[v]][0]
                for i, S in enumerate(subs):
                    for T in subs[i + 1:]:
                        if not S & T:
                            continue
                        keep = [X for X in subs if X not in (S, T)]
                        reach = []
                        for Y in subsets_of_size(L[opp], b):
                            if solver.solve(L.lists, {v: keep, opp: (Y,)}) is not None:
                                reach.append(Y)
                        checks += 1
                        ok = len(reach) >= 3 or (len(reach) == 2 and not reach[0] & reach[1])
                        if not ok:
                            violations.append(
                                f"{desc} forbidding {fmt_set(S)},{fmt_set(T)}: opposite vertex gets "
                                + (" ".join(fmt_set(Y) for Y in reach) or "nothing"))
    return ForcingClaimReport(G, len(census.representatives), checks, violations, min_allowed)
