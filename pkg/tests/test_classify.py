import random

import pytest

from choosekit.classify import (
    CASES, OBSTRUCTION_KINDS, ClassificationError, classify_21, classify_42, classify_components,
    find_obstruction, recognize_mixed, recognize_theta, reduce_instance, shorten_runs, witness_for,
)
from choosekit.coloring import find_bfold_coloring
from choosekit.graph import (
    Graph, build_named, complete_bipartite, cycle, glued, irreducible, is_isomorphic, k33_minus_edge, theta,
)
from choosekit.witnesses import figure_graph

from corpus import CORPUS


def two_hexagons_bridged():
    """Two 6-cycles sharing a vertex, with their far vertices joined by a 2-path."""
    G = glued(cycle(6), cycle(6))
    edges = [(G.labels[a], G.labels[b]) for a, b in G.edges()]
    return Graph.from_edges(edges + [("x", G.labels[3]), ("x", G.labels[8])])


@pytest.mark.parametrize("spec,case,params", [
    ("path(5)", "i", {}),
    ("C(8)", "ii", {"s": 4}),
    ("theta(2,4,6)", "iii", {"s": 2, "t": 3}),
    ("theta(1,3,5)", "iv", {"s": 1, "t": 2}),
    ("K(2,4)", "v", {}),
    ("k33_e", "vi", {"length": 0}),
    ("irreducible(2)", "vi", {"length": 2}),
    ("glued(C(4),C(6),3)", "vii", {"s": 2, "t": 3}),
    ("glued(theta(2,2,2),C(6))", "viii", {"s": 3}),
    ("irreducible(4)", "ix", {"s": 2, "t": 2}),
])
def test_choosable_cases(spec, case, params):
    r = classify_42(build_named(spec))
    assert r.choosable and r.verdict == "CHOOSABLE"
    assert r.case == case and r.params == params


def test_k24_is_reported_as_case_v():
    assert classify_42(complete_bipartite(2, 4)).case == "v"


@pytest.mark.parametrize("spec,kind,name", [
    ("theta(3,3,3)", "gbad_member", "theta333"),
    ("theta(2,2,2,4)", "gbad_member", "theta2224"),
    ("K(3,3)", "gbad_member", "figE"),
    ("K(2,5)", "gbad_member", "figN"),
    ("q3_v", "gbad_member", "figQ"),
    ("C(7)", "odd_cycle", None),
    ("glued(glued(glued(C(4),C(4),0,2,0),C(4),0,4,0),C(4),0,6,0)", "block_count", None),
    ("glued(glued(C(4),C(4),0,1,0),C(4),0,4,0)", "adjacent_cut_vertices", None),
    ("glued(glued(C(4),C(4)),C(4))", "c4_position", None),
    ("glued(K(2,4),C(4))", "block_shape", None),
])
def test_obstructions(spec, kind, name):
    G = build_named(spec)
    r = classify_42(G)
    assert not r.choosable and r.case is None
    ob = r.obstruction
    assert ob.kind == kind and ob.kind in OBSTRUCTION_KINDS
    if name:
        assert ob.name == name
    assert ob.check(G) == []


def test_theta2224_has_an_identity_like_embedding():
    G = theta(2, 2, 2, 4)
    ob = find_obstruction(G)
    assert ob.name == "theta2224"
    assert all(not D and len(K) == 1 for K, D in ob.embedding.bags.values())


def test_two_hexagons_give_a_two_cycles_obstruction():
    G = two_hexagons_bridged()
    ob = find_obstruction(G)
    assert ob.kind == "gcycles_member" and ob.check(G) == []
    assert is_isomorphic(ob.embedding.replay(), figure_graph(ob.name))


def test_obstruction_check_rejects_forgeries():
    G = theta(3, 3, 3)
    ob = find_obstruction(G)
    ob.name = "figE"
    assert ob.check(G)
    odd = find_obstruction(cycle(5))
    odd.vertices = odd.vertices[:-1]
    assert odd.check(cycle(5))


def test_find_obstruction_refuses_choosable_graphs():
    with pytest.raises(ClassificationError):
        find_obstruction(cycle(6))


def test_recognize_theta():
    assert recognize_theta(complete_bipartite(2, 3)) == (2, 2, 2)
    assert recognize_theta(complete_bipartite(2, 4)) == (2, 2, 2, 2)
    assert recognize_theta(cycle(6)) is None
    assert recognize_theta(theta(5, 1, 3)) == (1, 3, 5)


def test_recognize_mixed():
    m = recognize_mixed(k33_minus_edge())
    assert m.allowed and m.length == 0
    m = recognize_mixed(irreducible(2))
    assert m.allowed and m.length == 2
    m = recognize_mixed(figure_graph("figY"))
    assert m is not None and not m.allowed
    assert recognize_mixed(cycle(6)) is None


def test_reduce_cycle():
    H, trace = reduce_instance(cycle(12))
    assert is_isomorphic(H, cycle(4))
    assert [t.rule for t in trace] == ["path"] * 4


def test_reduce_theta_and_long_cycle():
    G = glued(theta(2, 2, 2), cycle(8), 3)
    H, trace = reduce_instance(G)
    assert is_isomorphic(H, glued(theta(2, 2, 2), cycle(4)))
    assert {t.rule for t in trace} == {"path", "cut_edge"}


def test_irreducible_graph_stays_put():
    G = irreducible(2)
    H, trace = reduce_instance(G)
    assert trace == [] and H.n == G.n


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_reduction_keeps_the_verdict(name):
    G = build_named(CORPUS[name])
    r = classify_42(G)
    for step in r.trace:
        assert classify_42(step.graph).choosable == r.choosable, step.detail


@pytest.mark.parametrize("spec,ok,form", [
    ("path(4)", True, "K1"),
    ("theta(2,2,4)", True, "theta(2,2,2s)"),
    ("theta(2,2,3)", False, None),
    ("C(6)", True, "C"),
    ("C(5)", False, None),
    ("theta(2,4,4)", False, None),
])
def test_classify_21(spec, ok, form):
    r = classify_21(build_named(spec))
    assert r.choosable == ok
    if form:
        assert r.form == form


def test_disconnected_input():
    G = build_named("union(C(4),C(5))")
    with pytest.raises(ClassificationError):
        classify_42(G)
    verdicts = [r.choosable for r in classify_components(G)]
    assert sorted(verdicts) == [False, True]


def test_result_json_shape():
    out = classify_42(theta(3, 3, 3)).to_json()
    assert out["verdict"] == "NOT_CHOOSABLE" and out["obstruction"]["name"] == "theta333"
    out = classify_42(theta(2, 4, 6)).to_json()
    assert out["case"] == "iii" and out["params"] == {"s": 2, "t": 3}
    assert set(CASES) >= {out["case"]}


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_obstructions_and_witnesses(name):
    G = build_named(CORPUS[name])
    r = classify_42(G)
    if r.choosable:
        with pytest.raises(ClassificationError):
            witness_for(G, r)
        return
    assert r.obstruction.check(G) == []
    w = witness_for(G, r)
    assert w.check() and w.lists.sizes() == {4}
    assert find_bfold_coloring(G, w.lists, 2) is None


def test_shorten_runs_records_a_strong_minor():
    G = glued(cycle(10), theta(2, 2, 6))
    emb = shorten_runs(G)
    assert emb.validate() == []
    assert is_isomorphic(emb.replay(), reduce_instance(G)[0])


def _ear_graph(rng, n_max):
    """Random 2-connected bipartite graph grown by ears."""
    edges = [(i, (i + 1) % 4) for i in range(4)]
    side = {0: 0, 1: 1, 2: 0, 3: 1}
    n = 4
    while n < n_max:
        a, b = rng.sample(range(n), 2)
        need = (side[a] != side[b])        # odd length keeps the graph bipartite
        length = rng.choice([k for k in range(1, 6) if k % 2 == need and (k > 1 or not any(
            {a, b} == {x, y} for x, y in edges))] or [2 + need])
        if n + length - 1 > n_max + 2:
            break
        prev = a
        for _ in range(length - 1):
            side[n] = 1 - side[prev]
            edges.append((prev, n))
            prev = n
            n += 1
        edges.append((prev, b))
    return Graph.from_edges(edges)


@pytest.mark.parametrize("seed", range(60))
def test_random_two_connected_obstructions(seed):
    rng = random.Random(seed)
    G = _ear_graph(rng, rng.randint(6, 14))
    r = classify_42(G)
    if r.choosable:
        return
    assert r.obstruction.check(G) == []
    assert witness_for(G, r).check()
