import random

import pytest

from choosekit.coloring import (
    ColoringError, FastSolver, FlatMove, ListAssignment, PartialConstraint, TooManyHighDegree,
    count_bfold_colorings, find_bfold_coloring, find_pot_separator, forcing_analysis, forcing_shape,
    lift_through_moves, parse_lists, parse_set, path_dp_solve, reduce_pot, to_mask, validate_coloring,
)
from choosekit.graph import build_named, cycle, theta

from oracles import all_colorings, allowed_at, colorable, random_lists


def test_set_helpers():
    assert parse_set("1234") == to_mask([1, 2, 3, 4])
    assert ListAssignment.from_strings(["12", "34"]).pot() == to_mask([1, 2, 3, 4])


@pytest.mark.parametrize("seed", range(40))
def test_solver_agrees_with_exhaustive_search(seed):
    rng = random.Random(seed)
    G = build_named(rng.choice(["C(4)", "C(6)", "K(2,3)", "theta(1,3,3)", "lollipop(4,1)", "C(5)"]))
    L = ListAssignment(random_lists(rng, G.n, 4, rng.randint(4, 7)))
    phi = find_bfold_coloring(G, L, 2)
    assert (phi is not None) == colorable(G, L.lists, 2)
    if phi is not None:
        assert validate_coloring(G, L, 2, phi) == []
    assert count_bfold_colorings(G, L, 2) == sum(1 for _ in all_colorings(G, L.lists, 2))


def test_validate_reports_problems():
    G = cycle(4)
    L = ListAssignment.constant(4, [1, 2, 3, 4])
    bad = (parse_set("12"), parse_set("12"), parse_set("34"), parse_set("34"))
    assert validate_coloring(G, L, 2, bad)


def test_partial_constraints():
    G = cycle(4)
    L = ListAssignment.constant(4, [1, 2, 3, 4])
    phi = find_bfold_coloring(G, L, 2, [PartialConstraint.fixed(0, "13")])
    assert phi[0] == parse_set("13") and phi[1] == parse_set("24")
    assert find_bfold_coloring(G, L, 2, [PartialConstraint(0, frozenset(), frozenset())]) is None


@pytest.mark.parametrize("allowed,shape", [
    ([], "UNCOLORABLE"), (["36"], "1"), (["14", "24"], "2_in"), (["12", "34"], "2_comp"),
    (["14", "24", "34"], "3_in"), (["13", "14", "34"], "3_out"), (["12", "23", "34"], "3_path"),
    (["12", "13", "14", "23"], "4_out"), (["12", "13", "24", "34"], "4_other"),
])
def test_forcing_shapes(allowed, shape):
    lst = parse_set("1234") if shape != "1" else parse_set("1356")
    assert forcing_shape([parse_set(s) for s in allowed], lst) == shape


@pytest.mark.parametrize("seed", range(20))
def test_forcing_analysis_matches_oracle(seed):
    rng = random.Random(50 + seed)
    G = build_named(rng.choice(["C(4)", "K(2,3)", "lollipop(4,1)"]))
    L = ListAssignment(random_lists(rng, G.n, 4, 6))
    v = rng.randrange(G.n)
    rep = forcing_analysis(G, L, 2, v)
    assert sorted(rep.allowed) == allowed_at(G, L.lists, 2, v)
    for S, phi in rep.witnesses.items():
        assert phi[v] == S and validate_coloring(G, L, 2, phi) == []


def test_fast_solver_allowed_at():
    G = theta(2, 2, 2)
    L = ListAssignment(random_lists(random.Random(3), G.n, 4, 6))
    assert FastSolver(G, 2).allowed_at(L.lists, 0) == allowed_at(G, L.lists, 2, 0)


def test_path_dp_needs_full_lists_and_few_branch_vertices():
    with pytest.raises(ColoringError):
        path_dp_solve(cycle(4), ListAssignment.from_strings(["123", "1234", "1234", "1234"]), 2)
    with pytest.raises(TooManyHighDegree):
        path_dp_solve(build_named("K(3,3)"), ListAssignment.constant(6, [1, 2, 3, 4]), 2, C=2)


def test_reduce_pot_lifts_colourings():
    G = build_named("theta(2,2,2)")
    X = find_pot_separator(G)
    assert X is not None
    rng = random.Random(9)
    for _ in range(30):
        L = ListAssignment(random_lists(rng, G.n, 4, 10))
        red = reduce_pot(G, L, X, budget=8)
        assert bin(red.lists.pot()).count("1") <= 8
        phi = find_bfold_coloring(G, red.lists, 2)
        assert phi is not None
        lifted = lift_through_moves(phi, red.moves)
        assert validate_coloring(G, L, 2, lifted) == []


def test_lift_through_moves_undoes_a_move():
    phi = (parse_set("15"),)
    assert lift_through_moves(phi, [FlatMove(2, frozenset([0]), 5)]) == (parse_set("12"),)


def test_parse_lists_formats():
    G = cycle(4)
    L, b = parse_lists("0: 1 2 3 4\n1: 1234\n2: 1 2 3 5\n3: 2 3 4 5\n", G)
    assert L[2] == parse_set("1235") and b is None
    L2, b2 = parse_lists('{"lists": {"0": [1,2,3,4], "1": [1,2,3,4], "2": [1,2,3,4], "3": [1,2,3,4]}, "b": 2}', G)
    assert b2 == 2 and L2[0] == parse_set("1234")
    with pytest.raises(ColoringError, match="line 1"):
        parse_lists("9: 1 2 3 4\n", G)
