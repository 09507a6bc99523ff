import itertools
import time

import networkx as nx
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from modcomp.toricfan import CurveClass, candidate_classes, effective_decompositions
from modcomp.treegen import (
    DecoratedTree,
    Mode,
    canonical_form,
    contract,
    contraction_closure,
    contraction_poset,
    enumerate_trees,
    is_stable,
)


def trees_of(target, beta, n, mode=Mode.MAPS):
    allowed = candidate_classes(target.basis, beta)
    return enumerate_trees(beta, n, allowed, mode, within=set(allowed).__contains__)


def test_enumerate_line_in_plane(p2):
    """Tests that a line with no marks has only the one-vertex tree."""
    trees = trees_of(p2, p2.parse_class("1"), 0)
    assert len(trees) == 1
    assert trees[0].num_vertices == 1


def test_enumerate_conics_in_plane(p2):
    """Tests that conics give the smooth tree and the two-line tree."""
    trees = trees_of(p2, p2.parse_class("2"), 0)
    assert sorted(t.num_vertices for t in trees) == [1, 2]


def test_enumerate_three_marked_line(p2):
    """Tests the eight boundary types of a 3-pointed line in P^2."""
    trees = trees_of(p2, p2.parse_class("1"), 3)
    assert len(trees) == 8
    assert sorted(t.num_vertices for t in trees) == [1, 2, 2, 2, 2, 3, 3, 3]


def test_quasimap_stability_drops_bare_leaves(p2):
    """Tests that quasimaps reject a degree-1 leaf with no marks."""
    beta = p2.parse_class("1")
    assert len(trees_of(p2, beta, 2, Mode.MAPS)) == 2
    assert len(trees_of(p2, beta, 2, Mode.QUASIMAPS)) == 1


def test_enumerate_conics_on_blowup(blp2):
    """Tests the stable trees of 2ℓ on the blow-up: keys are unique and every tree is stable."""
    beta = blp2.parse_class("2ℓ")
    trees = trees_of(blp2, beta, 0)
    keys = [canonical_form(t) for t in trees]
    # 28 rather than 24: e-s-s-e, 0<s,s,e,e>, s<s,e,e> and e<s,s,e> are stable too
    assert len(trees) == 28
    assert keys == sorted(set(keys))
    assert all(is_stable(t, Mode.MAPS) for t in trees)
    assert all(t.class_sum == beta for t in trees)


def test_enumerate_includes_four_part_trees(blp2, chain, star):
    """Tests that the trees with four nonzero parts are generated."""
    keys = {canonical_form(t) for t in trees_of(blp2, blp2.parse_class("2ℓ"), 0)}
    assert canonical_form(chain(blp2, "e", "s", "s", "e")) in keys
    assert canonical_form(star(blp2, "0", "s", "s", "e", "e")) in keys
    assert canonical_form(star(blp2, "s", "s", "e", "e")) in keys
    assert canonical_form(star(blp2, "e", "s", "s", "e")) in keys


@pytest.mark.parametrize("degree, n", [(1, 0), (1, 2), (2, 1), (2, 3), (3, 0)])
def test_zero_vertex_bound(p2, degree, n):
    """Tests #zero <= #nonzero + n - 2 on every enumerated tree with an edge."""
    for t in trees_of(p2, p2.parse_class(str(degree)), n):
        zeros = sum(1 for c in t.classes if c.is_zero)
        if t.num_vertices > 1:
            assert zeros <= t.num_vertices - zeros + n - 2
        assert t.n == n


def test_is_stable():
    """Tests the contracted-component rule and the quasimap leaf rule."""
    zero, line = CurveClass((0,)), CurveClass((1,))
    bare_zero = DecoratedTree((zero, line, line), ((0, 1), (0, 2)))
    assert not is_stable(bare_zero, Mode.MAPS)
    marked_zero = DecoratedTree((zero, line, line), ((0, 1), (0, 2)), (0,))
    assert is_stable(marked_zero, Mode.MAPS)
    assert not is_stable(marked_zero, Mode.QUASIMAPS)
    single = DecoratedTree((line,))
    assert is_stable(single, Mode.QUASIMAPS)


def test_canonical_form_ignores_vertex_order(blp2, chain):
    """Tests that relabelling vertices keeps the key."""
    t = chain(blp2, "s", "2e", "s", marks=(0,))
    s, e2 = t.classes[0], t.classes[1]
    relabelled = DecoratedTree((e2, s, s), ((2, 0), (0, 1)), (1,))
    assert canonical_form(relabelled) == canonical_form(t)


def test_canonical_form_tells_marks_apart(blp2, chain):
    """Tests that moving mark 1 to the other end of a path changes the key only when the ends differ."""
    assert canonical_form(chain(blp2, "s", "2e", marks=(0, 1))) != canonical_form(chain(blp2, "s", "2e", marks=(1, 0)))
    assert canonical_form(chain(blp2, "s", "2e", "s", marks=(0,))) == canonical_form(chain(blp2, "s", "2e", "s", marks=(2,)))


def test_marks_at(blp2, chain):
    """Tests that marks are reported per vertex with 1-based indices."""
    t = chain(blp2, "s", "2e", marks=(0, 1, 0))
    assert t.marks_at == ((1, 3), (2,))
    assert t.n == 3


def test_decorated_tree_validation(blp2):
    """Tests that bad edges, bad marks and a wrong class sum are refused."""
    s = blp2.parse_class("s")
    with pytest.raises(ValueError):
        DecoratedTree((s, s), ())
    with pytest.raises(ValueError):
        DecoratedTree((s, s), ((0, 1),), (2,))
    with pytest.raises(ValueError):
        DecoratedTree((s, s), ((0, 1),), (), blp2.parse_class("2ℓ"))
    with pytest.raises(ValueError):
        DecoratedTree(())


def test_contract_merges_classes_and_marks(blp2, chain):
    """Tests that contracting an edge adds the classes and keeps the marks."""
    t = chain(blp2, "s", "s", "2e", marks=(0, 2))
    merged = contract(t, [(0, 1)])
    assert merged.num_vertices == 2
    assert canonical_form(merged) == canonical_form(chain(blp2, "2s", "2e", marks=(0, 1)))


def test_contract_everything(blp2, chain):
    """Tests that contracting all edges leaves the one-vertex tree of the total class."""
    t = chain(blp2, "s", "2e", "s")
    merged = contract(t, t.edges)
    assert merged.num_vertices == 1
    assert merged.classes == (blp2.parse_class("2ℓ"),)


def test_contraction_closure(blp2, chain):
    """Tests that isomorphic contractions are listed once."""
    assert len(contraction_closure(chain(blp2, "s", "2e", "s"))) == 3
    assert len(contraction_closure(chain(blp2, "2s", "3e", "s"))) == 4


def test_contraction_poset(blp2, chain):
    """Tests the single-edge arrows among a path, its two contractions and the smooth tree."""
    path = chain(blp2, "s", "s", "2e")
    two_s = chain(blp2, "2s", "2e")
    mixed = chain(blp2, "s", "s+2e")
    smooth = chain(blp2, "2ℓ")
    arrows = contraction_poset([path, two_s, mixed, smooth])
    assert len(arrows) == 4
    assert (canonical_form(path), canonical_form(two_s)) in arrows
    assert (canonical_form(mixed), canonical_form(smooth)) in arrows


def test_two_part_conic_stability(blp2, chain):
    """Tests that 2s - 2e is a stable map but not a stable quasimap."""
    t = chain(blp2, "2s", "2e")
    assert is_stable(t, Mode.MAPS)
    assert not is_stable(t, Mode.QUASIMAPS)
    assert is_stable(chain(blp2, "2s", "2e", marks=(0, 1)), Mode.QUASIMAPS)


def relabel(t, rnd):
    """
    The same tree with shuffled vertices, shuffled edge order and flipped edges.
    """
    perm = list(range(t.num_vertices))
    rnd.shuffle(perm)
    classes = [None] * t.num_vertices
    for old, new in enumerate(perm):
        classes[new] = t.classes[old]
    edges = [(perm[b], perm[a]) if rnd.random() < 0.5 else (perm[a], perm[b]) for a, b in t.edges]
    rnd.shuffle(edges)
    return DecoratedTree(tuple(classes), tuple(edges), tuple(perm[v] for v in t.marks))


@pytest.fixture(scope="module")
def conic_trees(blp2):
    """Fixture for every stable 2ℓ tree on the blow-up, unmarked and one-marked."""
    beta = blp2.parse_class("2ℓ")
    return trees_of(blp2, beta, 0) + trees_of(blp2, beta, 1)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.large_base_example])
@given(rnd=st.randoms(use_true_random=False))
def test_canonical_form_invariant_under_relabelling(conic_trees, rnd):
    """Tests that relabelling vertices and reordering edges of any enumerated conic tree keeps its key."""
    for t in conic_trees:
        assert canonical_form(relabel(t, rnd)) == canonical_form(t)


def test_tree_dict_round_trip(conic_trees):
    """Tests that to_dict and from_dict give back the same tree."""
    for t in conic_trees:
        assert DecoratedTree.from_dict(t.to_dict(), t.beta) == t


@pytest.mark.parametrize(
    "label, n, mode",
    [
        ("2ℓ", 0, Mode.MAPS),
        ("3ℓ", 0, Mode.MAPS),
        ("2ℓ", 2, Mode.MAPS),
        ("2ℓ", 2, Mode.QUASIMAPS),
        ("3ℓ", 2, Mode.QUASIMAPS),
    ],
)
def test_single_edge_contractions_stay_enumerated(blp2, label, n, mode):
    """Tests that contracting any edge of a stable tree gives a stable tree the enumeration already holds."""
    trees = trees_of(blp2, blp2.parse_class(label), n, mode)
    keys = {canonical_form(t) for t in trees}
    for t in trees:
        for edge in t.edges:
            merged = contract(t, [edge])
            assert is_stable(merged, mode), (t, edge)
            assert canonical_form(merged) in keys, (t, edge)


def every_placement(target, beta, n, mode):
    """
    Keys of the stable trees found by trying every shape, class arrangement
    and mark placement.
    """
    allowed = candidate_classes(target.basis, beta)
    zero = CurveClass.zero(target.basis.rank)
    keys = set()
    for parts in effective_decompositions(beta, allowed, within=set(allowed).__contains__):
        for zeros in range(max(0, len(parts) + n - 2) + 1):
            size = len(parts) + zeros
            shapes = [nx.empty_graph(1)] if size == 1 else nx.nonisomorphic_trees(size)
            for shape in shapes:
                edges = tuple(shape.edges())
                for classes in set(itertools.permutations(parts + (zero,) * zeros)):
                    for marks in itertools.product(range(size), repeat=n):
                        t = DecoratedTree(classes, edges, marks, beta)
                        if is_stable(t, mode):
                            keys.add(canonical_form(t))
    return keys


@pytest.mark.parametrize(
    "target_name, label, n, mode",
    [
        ("p2", "2", 2, Mode.MAPS),
        ("p2", "2", 2, Mode.QUASIMAPS),
        ("p2", "3", 1, Mode.MAPS),
        ("blp2", "ℓ", 2, Mode.MAPS),
        ("blp2", "ℓ", 3, Mode.MAPS),
        ("blp2", "ℓ", 3, Mode.QUASIMAPS),
    ],
)
def test_enumeration_matches_every_placement(request, target_name, label, n, mode):
    """Tests that the pruned enumeration finds exactly the trees a full search over placements finds."""
    target = request.getfixturevalue(target_name)
    beta = target.parse_class(label)
    trees = trees_of(target, beta, n, mode)
    keys = [canonical_form(t) for t in trees]
    assert len(keys) == len(set(keys))
    assert set(keys) == every_placement(target, beta, n, mode)


@pytest.mark.integration
def test_marked_cubics_enumerate_quickly(blp2):
    """Tests that the one-marked 3ℓ maps enumerate in bounded time with no repeats."""
    start = time.perf_counter()
    trees = trees_of(blp2, blp2.parse_class("3ℓ"), 1)
    elapsed = time.perf_counter() - start
    keys = [canonical_form(t) for t in trees]
    assert len(trees) == 8028
    assert keys == sorted(set(keys))
    assert all(is_stable(t, Mode.MAPS) for t in trees)
    assert elapsed < 20


@pytest.mark.integration
def test_two_marked_cubic_quasimaps_enumerate_quickly(blp2):
    """Tests that two-marked 3ℓ quasimaps enumerate in bounded time with at most two leaves per tree."""
    start = time.perf_counter()
    trees = trees_of(blp2, blp2.parse_class("3ℓ"), 2, Mode.QUASIMAPS)
    elapsed = time.perf_counter() - start
    keys = [canonical_form(t) for t in trees]
    assert keys == sorted(set(keys))
    assert all(is_stable(t, Mode.QUASIMAPS) for t in trees)
    assert all(t.valence.count(1) <= 2 for t in trees if t.num_edges)
    assert elapsed < 20
