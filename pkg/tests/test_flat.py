import random
from itertools import product

import pytest

from choosekit.coloring import (
    ColoringError, FastSolver, FlatMove, ListAssignment, find_bfold_coloring, parse_set,
    relabel_colors, subsets_of_size, to_mask, validate_coloring,
)
from choosekit.flat import (
    MoveError, apply_move, canonical_form, enumerate_flat, flatten, flattening_moves, improving_moves,
    is_flat, lift_coloring, locally_flat, objective, verify_choosable, verify_forcing_claims,
)
from choosekit.graph import Graph, build_named, cycle, path

from oracles import all_colorings, flat_by_search, iso_class, random_lists, score, vertex_automorphisms

C4 = cycle(4)


def L_(*lists):
    return ListAssignment.from_strings(list(lists))


def test_apply_move_replaces_on_one_component():
    L = L_("1234", "1234", "1256", "1256")
    out = apply_move(C4, L, FlatMove(5, frozenset({2, 3}), 3))
    assert out == L_("1234", "1234", "1236", "1236")
    assert out.sizes() == {4}


def test_apply_move_can_shrink_the_pot():
    L = L_("1234", "1235", "1234", "1235")
    # colour 5 sits on two isolated vertices; move one copy onto 4
    out = apply_move(C4, L, FlatMove(5, frozenset({1}), 4))
    assert out.pot_size() == L.pot_size()
    out = apply_move(C4, out, FlatMove(5, frozenset({3}), 4))
    assert out.pot_size() == L.pot_size() - 1


@pytest.mark.parametrize("move", [
    FlatMove(5, frozenset({2, 3}), 1),   # beta already present
    FlatMove(5, frozenset({2}), 3),      # not a whole component
    FlatMove(5, frozenset({2, 3}), 9),   # beta outside the pot
])
def test_illegal_moves_raise(move):
    with pytest.raises(MoveError):
        apply_move(C4, L_("1234", "1234", "1256", "1256"), move)


def test_objective_counts_components():
    assert objective(C4, L_("1234", "1234", "1234", "1234")) == (4, 4)
    assert objective(C4, L_("1234", "1256", "1234", "1256")) == (6, 10)


@pytest.mark.parametrize("seed", range(25))
def test_is_flat_matches_move_search(seed):
    rng = random.Random(seed)
    G = build_named(rng.choice(["C(4)", "path(3)", "K(1,3)"]))
    L = ListAssignment(random_lists(rng, G.n, 3, rng.randint(3, 6)))
    assert is_flat(G, L) == flat_by_search(G, L.lists)
    if not locally_flat(G, L):
        assert not is_flat(G, L)


@pytest.mark.parametrize("seed", range(15))
def test_flatten_reaches_a_flat_assignment(seed):
    rng = random.Random(seed)
    G = build_named(rng.choice(["C(4)", "C(6)", "K(2,3)"]))
    L = ListAssignment(random_lists(rng, G.n, 4, rng.randint(5, 9)))
    F, moves = flatten(G, L)
    assert is_flat(G, F)
    assert F.sizes() == {4}
    assert score(G, F.lists) <= score(G, L.lists)
    step = L
    for mv in moves:
        step = apply_move(G, step, mv)
    assert step == F
    if G.n == 4:
        assert F.pot_size() <= 6


def test_flatten_fixes_flat_input():
    L = L_("1234", "1234", "1234", "1234")
    assert flatten(C4, L) == (L, [])


def test_flatten_removes_a_lonely_colour():
    L = L_("1234", "1234", "1234", "1237")
    F, moves = flatten(C4, L)
    assert F.pot_size() == 4 and moves


def test_improving_moves_lower_the_objective():
    L = L_("1235", "1234", "1236", "1234")
    base = objective(C4, L)
    found = improving_moves(C4, L)
    assert found
    for mv in found:
        assert objective(C4, apply_move(C4, L, mv)) < base
    assert set(found) <= set(flattening_moves(C4, L))


def test_lift_coloring_identity_and_swap():
    L = L_("1234", "1234", "1256", "1256")
    phi = find_bfold_coloring(C4, L, 2)
    assert lift_coloring(C4, L, [], phi, 2) == phi
    mv = FlatMove(5, frozenset({2, 3}), 3)
    Lf = apply_move(C4, L, mv)
    lifted = {lift_coloring(C4, L, [mv], p, 2) for p in all_colorings(C4, Lf.lists, 2)}
    assert len(lifted) == sum(1 for _ in all_colorings(C4, Lf.lists, 2))
    for p in lifted:
        assert validate_coloring(C4, L, 2, p) == []


def test_lift_coloring_rejects_invalid_input():
    L = L_("1234", "1234", "1234", "1234")
    with pytest.raises(ColoringError):
        lift_coloring(C4, L, [], (parse_set("12"),) * 4, 2)


def test_canonical_form_is_invariant():
    rng = random.Random(7)
    G = build_named("K(2,3)")
    autos = vertex_automorphisms(G)
    for _ in range(20):
        L = ListAssignment(random_lists(rng, G.n, 4, 7))
        p = rng.choice(autos)
        moved = [0] * G.n
        for v in range(G.n):
            moved[p[v]] = L[v]
        cols = list(range(1, 8))
        rng.shuffle(cols)
        M = relabel_colors(ListAssignment(tuple(moved)), dict(zip(range(1, 8), cols)))
        assert canonical_form(G, L) == canonical_form(G, M)


def _census_by_brute_force(G, pot_bound):
    """Flat classes by pot size, over every assignment with L(v0) = 1234."""
    autos = vertex_automorphisms(G)
    first = to_mask([1, 2, 3, 4])
    rest = subsets_of_size(to_mask(range(1, pot_bound + 1)), 4)
    seen = set()
    for tail in product(rest, repeat=G.n - 1):
        lists = (first,) + tail
        key = iso_class(G, lists, autos)
        if key in seen:
            continue
        seen.add(key)
    counts = {}
    for key in seen:
        L = ListAssignment(tuple(sum(1 << (i + 1) for i, cm in enumerate(key) if cm >> v & 1) for v in range(G.n)))
        if is_flat(G, L):
            counts[len(key)] = counts.get(len(key), 0) + 1
    return counts


@pytest.mark.parametrize("name,bound", [("C(4)", 7), ("path(3)", 8)])
def test_census_matches_brute_force(name, bound):
    G = build_named(name)
    assert enumerate_flat(G, 4, bound, workers=1).counts == _census_by_brute_force(G, bound)


def test_census_representatives_are_flat_and_distinct():
    census = enumerate_flat(build_named("K(2,3)"), 4, 8, workers=1)
    G = census.graph
    autos = vertex_automorphisms(G)
    keys = [iso_class(G, L.lists, autos) for L in census.representatives]
    assert len(set(keys)) == len(keys)
    assert all(is_flat(G, L) for L in census.representatives)
    assert max(census.counts) == 7


def test_local_census_is_a_superset():
    G = cycle(6)
    exact = enumerate_flat(G, 4, 7, workers=1)
    loose = enumerate_flat(G, 4, 7, workers=1, exact=False)
    assert all(loose.counts.get(k, 0) >= v for k, v in exact.counts.items())


def test_verify_choosable_small_cases():
    cert = verify_choosable(C4, 4, 2, 6, workers=1)
    assert cert.choosable and cert.verdict == "CERTIFIED_CHOOSABLE"
    assert cert.checked >= 4
    cert = verify_choosable(build_named("theta(3,3,3)"), 4, 2, 8, workers=1)
    assert not cert.choosable
    assert find_bfold_coloring(cert.graph, cert.counterexample, 2) is None
    assert cert.counterexample.sizes() == {4}


def test_odd_cycle_counterexample():
    cert = verify_choosable(cycle(5), 4, 2, 8, workers=1)
    assert not cert.choosable
    assert FastSolver(cycle(5), 2).solve(cert.counterexample.lists) is None


@pytest.mark.parametrize("spec", ["lollipop(3,1)", "glued(theta(2,2,2),theta(2,2,2))", "glued(C(4),C(4))"])
def test_split_agrees_with_direct(spec):
    G = build_named(spec)
    split = verify_choosable(G, 4, 2, 8, workers=1, method="split")
    direct = verify_choosable(G, 4, 2, 8, workers=1, method="direct")
    assert split.choosable == direct.choosable
    if not split.choosable:
        assert find_bfold_coloring(G, split.counterexample, 2) is None


def test_disconnected_graph_is_checked_per_component():
    G = build_named("union(C(4),C(5))")
    cert = verify_choosable(G, 4, 2, 8, workers=1)
    assert not cert.choosable and len(cert.counterexample) == 9
    assert find_bfold_coloring(G, cert.counterexample, 2) is None


def test_verify_choosable_rejects_bad_method():
    with pytest.raises(ValueError):
        verify_choosable(C4, 4, 2, 6, workers=1, method="split")
    with pytest.raises(ValueError):
        verify_choosable(C4, 4, 2, 6, workers=1, method="sideways")


def test_parallel_and_serial_verdicts_match():
    G = build_named("K(2,3)")
    assert verify_choosable(G, 4, 2, 7, workers=2).choosable == verify_choosable(G, 4, 2, 7, workers=1).choosable


def test_forcing_claims_on_c4():
    rep = verify_forcing_claims(C4, 4, 2, min_allowed=4, shared_forbidden=True, opposite_trichotomy=True)
    assert rep.holds, rep.violations
    assert not verify_forcing_claims(C4, 4, 2, min_allowed=6).holds


def test_trichotomy_needs_a_four_cycle():
    with pytest.raises(ValueError):
        verify_forcing_claims(path(3), 4, 2, opposite_trichotomy=True)
