import pytest

from choosekit.coloring import (
    ListAssignment, fmt_set, find_bfold_coloring, forcing_analysis, path_dp_solve, to_mask,
)
from choosekit.graph import Graph, build_named, complete_bipartite, glued, is_isomorphic, theta
from choosekit.witnesses import (
    FIGURES, MAX_CONSTRUCTION_M, StrongMinorEmbedding, WitnessError, base_gadget, block_tree_witness,
    blocked_hub_colorings, catalogue, compose_forcing, construct_non_2mm, figure_graph,
    identity_embedding, lift_witness, load_entry, lollipop_forcing, path_segments, replay_chain,
    shift_forcing, verify_catalogue, verify_entry,
)

from oracles import colorable


def test_catalogue_inventory():
    entries = catalogue()
    assert [e.id for e in entries] == list(FIGURES)
    assert sum(e.kind == "bad" for e in entries) >= 9
    assert sum(e.kind == "forcing" for e in entries) >= 7
    S = figure_graph("figS")
    assert (S.n, S.m) == (8, 10)
    assert is_isomorphic(figure_graph("figE"), complete_bipartite(3, 3))
    with pytest.raises(WitnessError):
        load_entry("figNothing")


def test_catalogue_verifies():
    report = verify_catalogue()
    assert report.ok, "\n".join(report.lines())


@pytest.mark.parametrize("name", [n for n in FIGURES if load_entry(n).kind == "bad"])
def test_bad_entries_have_no_colouring(name):
    e = load_entry(name)
    if e.graph.n <= 7:
        assert not colorable(e.graph, e.lists.lists, 2)
    assert find_bfold_coloring(e.graph, e.lists, 2) is None


def test_forcing_claims_reproduced():
    e = load_entry("figAA")
    for vertex, sets in [("w", "14 24"), ("r", "15 25"), ("v", "13 23")]:
        rep = forcing_analysis(e.graph, e.lists, 2, e.graph.index(vertex))
        assert " ".join(fmt_set(S) for S in rep.allowed) == sets


def test_propagation_chains_replay():
    e = load_entry("figY")
    assert e.chains
    for chain in e.chains:
        assert replay_chain(e.graph, e.lists, chain) is None
    broken = ((e.chains[0][0][0], to_mask([1, 2])), (e.chains[0][1][0], to_mask([1, 2])))
    assert replay_chain(e.graph, e.lists, broken) is not None


def test_tampered_entry_fails_loudly():
    e = load_entry("figS")
    bad = type(e)(e.id, e.graph, ListAssignment.constant(e.graph.n, [1, 2, 3, 4]), "bad")
    res = verify_entry(bad)
    assert not res.ok and "coloured:" in res.details[0]


def test_identity_lift():
    e = load_entry("theta333")
    bundle = lift_witness(e.graph, e.lists, identity_embedding(e.graph))
    assert bundle.check() and bundle.lists == e.lists


def test_lift_through_a_subdivision():
    e = load_entry("theta333")
    T = theta(3, 3, 3)
    m = is_isomorphic(T, e.graph)
    G = theta(3, 3, 5)
    ends = [v for v in range(G.n) if G.degree(v) == 3]
    bundle = lift_witness(e.graph, e.lists, _fold_longest_path(G, T, m, ends))
    assert bundle.check()
    assert bundle.provenance[-1].startswith("lift:")


def _fold_longest_path(G, T, m, ends):
    """Embedding of T into G where G has one branch path two edges longer."""
    x, y = ends
    paths = []
    for start in G.adj[x]:
        p = [x, start]
        while p[-1] != y:
            nxt = [u for u in G.adj[p[-1]] if u != p[-2]]
            p.append(nxt[0])
        paths.append(p)
    paths.sort(key=len)
    tx, ty = [v for v in range(T.n) if T.degree(v) == 3]
    tpaths = []
    for start in T.adj[tx]:
        p = [tx, start]
        while p[-1] != ty:
            nxt = [u for u in T.adj[p[-1]] if u != p[-2]]
            p.append(nxt[0])
        tpaths.append(p)
    bags = {m[tx]: (frozenset([x]), frozenset()), m[ty]: (frozenset([y]), frozenset())}
    for gp, tp in zip(paths, tpaths):
        inner_g, inner_t = gp[1:-1], tp[1:-1]
        extra = len(inner_g) - len(inner_t)
        if extra == 0:
            for g, t in zip(inner_g, inner_t):
                bags[m[t]] = (frozenset([g]), frozenset())
        else:
            run = inner_g[:extra + 1]
            bags[m[inner_t[0]]] = (frozenset(run[0::2]), frozenset(run[1::2]))
            for g, t in zip(inner_g[extra + 1:], inner_t[1:]):
                bags[m[t]] = (frozenset([g]), frozenset())
    return StrongMinorEmbedding(G, load_entry("theta333").graph, bags)


def test_embedding_validation_catches_errors():
    H = build_named("C(4)")
    emb = StrongMinorEmbedding(H, H, {0: (frozenset([0]), frozenset()), 1: (frozenset([1]), frozenset())})
    assert emb.validate()
    emb = StrongMinorEmbedding(H, H, {i: (frozenset([0]), frozenset()) for i in range(4)})
    assert any("two bags" in e for e in emb.validate())
    P = build_named("path(4)")
    emb = StrongMinorEmbedding(P, H, {i: (frozenset([i]), frozenset()) for i in range(4)})
    assert any("not realised" in e for e in emb.validate())
    with pytest.raises(WitnessError):
        lift_witness(H, ListAssignment.constant(4, [1, 2, 3, 4]), emb)


def test_replay_contracts_bags():
    G = build_named("C(6)")
    H = build_named("C(4)")
    emb = StrongMinorEmbedding(G, H, {0: (frozenset([0, 2]), frozenset([1])), 1: (frozenset([3]), frozenset()),
                                      2: (frozenset([4]), frozenset()), 3: (frozenset([5]), frozenset())})
    assert emb.validate() == []
    assert is_isomorphic(emb.replay(), H)
    assert emb.steps() == [(1, (0, 2))]


@pytest.mark.parametrize("length,target", [(1, 1), (3, 1), (5, 3), (4, 2), (2, 1), (1, 2)])
def test_path_segments(length, target):
    segs = path_segments(length, target)
    if (length - target) % 2 or length < target:
        assert segs is None
    else:
        assert len(segs) == target and sum(n for _, n in segs) == length
        assert all(n % 2 == 1 for _, n in segs)


def _with_pendant(e, v, count=1):
    """Entry graph with a path of `count` new vertices hung at v."""
    edges = [(e.graph.labels[a], e.graph.labels[b]) for a, b in e.graph.edges()]
    prev = v
    for i in range(count):
        edges.append((prev, f"p{i}"))
        prev = f"p{i}"
    H = Graph.from_edges(edges, vertices=list(e.graph.labels) + [f"p{i}" for i in range(count)])
    return H


SWAP = {"3_in": "3_out", "3_out": "3_in", "4_out": "4_out", "2_in": "2_in", "2_comp": "2_comp"}


@pytest.mark.parametrize("name", ["figWW", "figXX", "figUU", "figVV", "figAA", "C4lem"])
@pytest.mark.parametrize("count", [1, 2, 3, 4])
def test_shift_shape_table(name, count):
    e = load_entry(name)
    for claim in e.claims:
        if claim.shape not in SWAP:
            continue
        H = _with_pendant(e, claim.vertex, count)
        lists = list(e.lists.lists)
        for i in range(count):
            sub, _ = H.subgraph(range(e.graph.n + i + 1))
            lists = list(shift_forcing(sub, sub.index(f"p{i}"), ListAssignment(tuple(lists) + (0,))).lists)
        L = ListAssignment(tuple(lists))
        tip = H.index(f"p{count - 1}")
        shape = forcing_analysis(H, L, 2, tip).shape
        expect = claim.shape
        for _ in range(count):
            expect = SWAP[expect]
        assert shape == expect


def test_shift_needs_a_leaf():
    e = load_entry("figWW")
    with pytest.raises(WitnessError):
        shift_forcing(e.graph, e.graph.index("v1"), e.lists)


def test_lollipop_forcing_is_4_out():
    for c, t in [(4, 0), (4, 3), (6, 1), (8, 2)]:
        G, L, end = lollipop_forcing(c, t)
        assert forcing_analysis(G, L, 2, end).shape == "4_out"


def _glue_entries(e1, x1, e2, x2, L2=None, G2=None):
    """Identify x2 of the second graph with x1 of the first."""
    G2 = G2 or e2.graph
    L2 = L2 or e2.lists
    ren = {lab: (x1 if lab == x2 else f"b.{lab}") for lab in G2.labels}
    edges = [(e1.graph.labels[a], e1.graph.labels[b]) for a, b in e1.graph.edges()]
    edges += [(ren[G2.labels[a]], ren[G2.labels[b]]) for a, b in G2.edges()]
    G = Graph.from_edges(edges, vertices=list(e1.graph.labels) + [ren[x] for x in G2.labels if x != x2])
    part1 = sorted(G.index(x) for x in e1.graph.labels)
    part2 = sorted(G.index(ren[x]) for x in G2.labels)
    L1 = ListAssignment(tuple(e1.lists[e1.graph.index(G.labels[v])] for v in part1))
    back = {G.index(ren[x]): G2.index(x) for x in G2.labels}
    L2s = ListAssignment(tuple(L2[back[v]] for v in part2))
    return G, G.index(x1), part1, L1, part2, L2s


def test_compose_k24_with_c4():
    G, v, p1, L1, p2, L2 = _glue_entries(load_entry("figUU"), "r", load_entry("C4lem"), "v1")
    bundle = compose_forcing(G, v, p1, L1, p2, L2)
    assert bundle is not None and bundle.check()
    assert find_bfold_coloring(G, bundle.lists, 2) is None


def test_compose_two_thetas():
    G, v, p1, L1, p2, L2 = _glue_entries(load_entry("figWW"), "v1", load_entry("figXX"), "v1")
    bundle = compose_forcing(G, v, p1, L1, p2, L2)
    assert bundle is not None and bundle.check()
    assert is_isomorphic(G, glued(theta(2, 2, 2), theta(2, 2, 2))) is not None


def test_compose_with_a_shifted_part():
    ww = load_entry("figWW")
    H = _with_pendant(ww, "v1")
    L = shift_forcing(H, H.index("p0"), ListAssignment(ww.lists.lists + (0,)))
    assert forcing_analysis(H, L, 2, H.index("p0")).shape == "3_out"
    G, v, p1, L1, p2, L2 = _glue_entries(ww, "v1", ww, "p0", L2=L, G2=H)
    bundle = compose_forcing(G, v, p1, L1, p2, L2)
    assert bundle is not None and bundle.check()


def test_two_lollipops_are_incompatible():
    G1, L1, end1 = lollipop_forcing(4, 1)
    c4 = load_entry("C4lem")
    e = type(c4)("lolli", G1, L1, "forcing")
    G, v, p1, La, p2, Lb = _glue_entries(e, G1.labels[end1], e, G1.labels[end1])
    assert compose_forcing(G, v, p1, La, p2, Lb) is None


def test_compose_rejects_bad_parts():
    G, v, p1, L1, p2, L2 = _glue_entries(load_entry("figWW"), "v1", load_entry("figXX"), "v1")
    with pytest.raises(WitnessError):
        compose_forcing(G, v, p1, L1, p1, L1)


def test_base_gadget_blocks_the_first_m_colours():
    for m in (1, 2, 3):
        G, L = base_gadget(m)
        assert to_mask(range(1, m + 1)) in blocked_hub_colorings(m)
        assert L.sizes() == {2 * m}


@pytest.mark.parametrize("m,n", [(1, 7), (2, 19)])
def test_construction_is_refuted(m, n):
    G, L = construct_non_2mm(m)
    assert G.n == n and L.sizes() == {2 * m}
    assert path_dp_solve(G, L, m) is None
    assert find_bfold_coloring(G, L, m) is None


def test_construction_limits():
    with pytest.raises(WitnessError):
        construct_non_2mm(0)
    with pytest.raises(WitnessError):
        construct_non_2mm(MAX_CONSTRUCTION_M + 1)


@pytest.mark.parametrize("spec", [
    "glued(theta(2,2,2),theta(2,2,2))",
    "glued(glued(C(4),C(4)),C(4))",
    "glued(glued(C(4),C(4),0,1,0),C(4),0,4,0)",
])
def test_block_tree_witness(spec):
    G = build_named(spec)
    bundle = block_tree_witness(G)
    assert bundle is not None and bundle.check()
    assert bundle.lists.sizes() == {4}


def test_block_tree_witness_needs_a_cut_vertex():
    assert block_tree_witness(build_named("C(4)")) is None
    assert block_tree_witness(build_named("glued(C(4),C(4))")) is None
