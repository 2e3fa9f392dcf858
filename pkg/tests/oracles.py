"""Slow reference implementations used to cross-check the library."""

from itertools import combinations, product


def subsets(mask, b):
    cols = [c for c in range(mask.bit_length()) if mask >> c & 1]
    return [sum(1 << c for c in S) for S in combinations(cols, b)]


def all_colorings(G, lists, b):
    """Every b-fold colouring, by trying the full product of choices."""
    choices = [subsets(m, b) for m in lists]
    for phi in product(*choices):
        if all(not phi[u] & phi[w] for u, w in G.edges()):
            yield phi


def colorable(G, lists, b):
    return next(all_colorings(G, lists, b), None) is not None


def allowed_at(G, lists, b, v):
    return sorted({phi[v] for phi in all_colorings(G, lists, b)})


def random_lists(rng, n, size, pot):
    return tuple(sum(1 << c for c in rng.sample(range(1, pot + 1), size)) for _ in range(n))


def _pot(lists):
    p = 0
    for m in lists:
        p |= m
    return [c for c in range(p.bit_length()) if p >> c & 1]


def color_class_components(G, lists, c):
    verts = {v for v, m in enumerate(lists) if m >> c & 1}
    comps = []
    while verts:
        stack = [verts.pop()]
        comp = set(stack)
        while stack:
            u = stack.pop()
            for w in G.adj[u]:
                if w in verts:
                    verts.discard(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    return comps


def score(G, lists):
    cols = _pot(lists)
    return len(cols), sum(len(color_class_components(G, lists, c)) for c in cols)


def neighbours_by_moves(G, lists):
    cols = _pot(lists)
    for a in cols:
        for C in color_class_components(G, lists, a):
            used = 0
            for v in C:
                used |= lists[v]
            for b in cols:
                if used >> b & 1:
                    continue
                new = list(lists)
                for v in C:
                    new[v] = new[v] & ~(1 << a) | 1 << b
                yield tuple(new)


def flat_by_search(G, lists):
    """True when no chain of moves from `lists` reaches a better score."""
    goal = score(G, lists)
    seen = {tuple(lists)}
    todo = [tuple(lists)]
    while todo:
        cur = todo.pop()
        for nxt in neighbours_by_moves(G, cur):
            if nxt in seen:
                continue
            if score(G, nxt) < goal:
                return False
            seen.add(nxt)
            todo.append(nxt)
    return True


def vertex_automorphisms(G):
    from itertools import permutations
    E = {frozenset(e) for e in G.edges()}
    return [p for p in permutations(range(G.n)) if all(frozenset((p[u], p[w])) in E for u, w in G.edges())]


def iso_class(G, lists, autos):
    """Invariant of an assignment under vertex automorphisms and colour renaming."""
    best = None
    for p in autos:
        moved = [0] * G.n
        for v in range(G.n):
            moved[p[v]] = lists[v]
        classes = sorted(sum(1 << v for v in range(G.n) if moved[v] >> c & 1) for c in _pot(moved))
        key = tuple(classes)
        if best is None or key < best:
            best = key
    return best


def colorings_by_backtracking(G, lists, b):
    """Every b-fold colouring, extending vertex by vertex with early rejection."""
    choices = [subsets(m, b) for m in lists]
    phi = [0] * G.n

    def rec(v):
        if v == G.n:
            yield tuple(phi)
            return
        for S in choices[v]:
            if all(not S & phi[u] for u in G.adj[v] if u < v):
                phi[v] = S
                yield from rec(v + 1)
        phi[v] = 0

    yield from rec(0)
