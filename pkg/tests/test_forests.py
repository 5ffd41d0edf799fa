import random
from fractions import Fraction

import pytest

from ts_groups.errors import MalformedInputError, PreconditionError
from ts_groups.forests import (
    build_forest_p,
    build_forest_p10,
    decompose_pieces,
    verify_forest,
)
from ts_groups.groups import make_oracle
from ts_groups.tours import RelatedSet, revise, tour_of_order, tsp_exact
from ts_groups.words import first_aperiodic_word, parse_word

from instances import cluster_instance, pair_instance

FREE2 = make_oracle("free:2")


# -- piece decomposition -------------------------------------------------------


def test_two_elements_below_threshold_split():
    xi = first_aperiodic_word(2, 9)
    g = parse_word("b", 2)
    rset = RelatedSet(FREE2, xi, (g, g * xi), ((g, g * xi),))
    tour = tsp_exact(rset)
    decomp = decompose_pieces(rset, tour, Fraction(5))
    assert [len(p) for p in decomp.pieces] == [1, 1]
    assert decomp.wrap_is_cut


def test_chain_single_piece_with_huge_threshold():
    xi = parse_word("a", 2)
    chain = tuple(xi**i for i in range(6))
    rset = RelatedSet(FREE2, xi, chain)
    tour = tsp_exact(rset)
    decomp = decompose_pieces(rset, tour, Fraction(1000))
    assert [len(p) for p in decomp.pieces] == [6]
    assert not decomp.wrap_is_cut


def test_cut_positions_match_rescan():
    rng = random.Random(2)
    xi = first_aperiodic_word(2, 9)
    pts = set()
    while len(pts) < 12:
        g = FREE2.identity()
        from ts_groups.tours import random_element

        g = random_element(FREE2, rng, 5)
        pts.update((g, FREE2.multiply(g, xi)))
    rset = RelatedSet(FREE2, xi, tuple(pts))
    tour = tsp_exact(rset)
    threshold = Fraction(9, 2)
    decomp = decompose_pieces(rset, tour, threshold)
    order = decomp.order
    for j in range(len(order)):
        gap = FREE2.distance(order[j], order[(j + 1) % len(order)])
        assert (j in set(decomp.cuts)) == (gap > threshold)
    assert sum(len(p) for p in decomp.pieces) == rset.size


def test_dedup_log():
    xi = parse_word("a", 2)
    g = FREE2.identity()
    rset = RelatedSet(FREE2, xi, (g, xi))
    tour = tour_of_order(rset, (g, xi, g, xi), "heuristic-upper")
    # a tour repeating elements is deduped exactly once per repeat
    decomp = decompose_pieces(rset, tour, Fraction(3))
    assert len(decomp.order) == 2
    assert len(decomp.dedup_log) == 2


def test_tour_must_cover():
    xi = parse_word("a", 2)
    rset = RelatedSet(FREE2, xi, (FREE2.identity(), xi))
    bad_tour = tour_of_order(RelatedSet(FREE2, xi, (xi,)), (xi,), "exact")
    with pytest.raises(PreconditionError):
        decompose_pieces(rset, bad_tour, Fraction(2))


# -- mode P ---------------------------------------------------------------------


def test_mode_p_single_pair():
    rset, xi = pair_instance(0, 12, n_pairs=1)
    tour = tsp_exact(rset)
    forest = build_forest_p(rset, 12, tour)
    assert len(forest.trees) == 2  # two singleton segments, two trees
    rep = verify_forest(forest, rset, 12)
    assert rep.ok, rep.to_dict()


def test_mode_p_cluster_instances():
    for seed in range(6):
        rset, xi, tour = cluster_instance(seed, 24, deep=(seed % 2 == 0))
        forest = build_forest_p(rset, 24, tour)
        rep = verify_forest(forest, rset, 24)
        assert rep.ok, (seed, rep.to_dict())
        assert not forest.advisory
        assert forest.certified_bound == Fraction(24, 12) * rset.size
        assert Fraction(forest.end_element_count) >= Fraction(rset.size, 6)


def test_mode_p_deep_tree_structure():
    rset, xi, tour = cluster_instance(0, 24, deep=True)
    forest = build_forest_p(rset, 24, tour)
    main = max(forest.trees, key=lambda t: len(t.vertices))
    # root segment expands to the deep segment which expands to two
    # singleton partners
    levels = [v.level for v in main.vertices]
    assert max(levels) >= 2
    for v in main.vertices:
        if v.children:
            assert len(v.elements) == 3


def test_mode_p_requires_revision():
    xi = parse_word("a", 2)
    rset = RelatedSet(FREE2, xi, (FREE2.identity(), xi))
    tour = tsp_exact(rset)
    with pytest.raises(PreconditionError):
        build_forest_p(rset, 4, tour)


def test_mode_p_determinism():
    rset, xi, tour = cluster_instance(3, 24, deep=True)
    f1 = build_forest_p(rset, 24, tour)
    f2 = build_forest_p(rset, 24, tour)
    assert f1.to_dict(FREE2) == f2.to_dict(FREE2)


# -- mode P10 -------------------------------------------------------------------


def test_mode_p10_single_pair():
    rset, xi = pair_instance(1, 12, n_pairs=1)
    tour = tsp_exact(rset)
    forest = build_forest_p10(rset, 12, tour)
    rep = verify_forest(forest, rset, 12)
    assert rep.ok, rep.to_dict()
    counts = {}
    for t in forest.trees:
        for v in t.vertices:
            for x in v.elements:
                counts[x] = counts.get(x, 0) + 1
    assert all(c == 1 for c in counts.values())


def test_mode_p10_cluster_instances():
    for seed in range(6):
        rset, xi, tour = cluster_instance(seed, 24, deep=True, deep_size=4)
        forest = build_forest_p10(rset, 24, tour)
        rep = verify_forest(forest, rset, 24)
        assert rep.ok, (seed, rep.to_dict())
        assert not forest.advisory, forest.advisory_reasons
        n = rset.size
        assert Fraction(len(forest.v_far)) <= Fraction(n, 8)
        assert Fraction(len(forest.v_near)) > Fraction(n, 24)


def test_mode_p10_engine_vertex_is_constrained():
    rset, xi, tour = cluster_instance(2, 24, deep=True, deep_size=4)
    forest = build_forest_p10(rset, 24, tour)
    main = max(forest.trees, key=lambda t: len(t.vertices))
    internal = [v for v in main.vertices if v.children]
    assert internal and all(len(v.elements) == 3 for v in internal)


def test_mode_p10_determinism():
    rset, xi, tour = cluster_instance(5, 24, deep=True)
    f1 = build_forest_p10(rset, 24, tour)
    f2 = build_forest_p10(rset, 24, tour)
    assert f1.to_dict(FREE2) == f2.to_dict(FREE2)


# -- verification ----------------------------------------------------------------


def test_bound_soundness_cluster():
    for seed in range(4):
        rset, xi, tour = cluster_instance(seed, 24, deep=True)
        exact = tsp_exact(rset).length
        for build in (build_forest_p, build_forest_p10):
            forest = build(rset, 24, tour)
            assert forest.certified_bound <= exact


def test_verify_detects_duplicated_element():
    rset, xi, tour = cluster_instance(1, 24, deep=False)
    forest = build_forest_p(rset, 24, tour)
    # corrupt: duplicate an element into another vertex of the same tree
    main = max(forest.trees, key=lambda t: len(t.vertices))
    donor = main.vertices[0].elements[0]
    victim = main.vertices[-1]
    victim.elements = victim.elements + (donor,)
    rep = verify_forest(forest, rset, 24)
    assert not rep.checks["within_tree_disjoint"]["pass"]


def test_verify_cross_vertex_distance():
    rset, xi, tour = cluster_instance(4, 24, deep=True)
    forest = build_forest_p(rset, 24, tour)
    rep = verify_forest(forest, rset, 24)
    assert rep.checks["cross_vertex_distance"]["pass"]


def test_forest_json_round_trip_shape():
    rset, xi, tour = cluster_instance(0, 24, deep=True)
    forest = build_forest_p10(rset, 24, tour)
    d = forest.to_dict(FREE2)
    assert d["schema"] == 1
    assert d["mode"] == "P10"
    assert d["census"]["end_elements"] == forest.end_element_count
    total = sum(len(v["elements"]) for t in d["trees"] for v in t["vertices"])
    assert total == rset.size


def test_mode_p_shared_end_between_two_trees():
    # two normal clusters whose pair links land in one shared incomplete
    # segment: the second tree adopts it as a shared end vertex
    xi = first_aperiodic_word(2, 4 * 24 + 1)
    h = parse_word("b", 2)
    a_cluster = [h, h * parse_word("a", 2), h * parse_word("a b", 2)]
    u = FREE2.multiply(h, xi)
    v = u * parse_word("b", 2)
    g = FREE2.multiply(v, FREE2.inverse(xi))
    b_cluster = [g, g * parse_word("a", 2), g * parse_word("a b", 2)]
    pairs = [(x, FREE2.multiply(x, xi)) for x in a_cluster + b_cluster]
    elements = [x for p in pairs for x in p]
    assert len(set(elements)) == len(elements)
    rset = RelatedSet(FREE2, xi, tuple(elements), tuple(pairs))
    order = (
        a_cluster
        + [u, v]
        + b_cluster
        + [FREE2.multiply(x, xi) for x in a_cluster[1:] + b_cluster[1:]]
    )
    tour = tour_of_order(rset, order, "heuristic-upper")
    forest = build_forest_p(rset, 24, tour)
    owners = {}
    for ti, t in enumerate(forest.trees):
        for vert in t.vertices:
            for x in vert.elements:
                owners.setdefault(x, []).append(ti)
    assert owners[u] != owners[v] or len(owners[u]) == 2
    shared = [x for x, ts in owners.items() if len(ts) == 2]
    assert set(shared) == {u, v}
    rep = verify_forest(forest, rset, 24)
    assert rep.ok, rep.to_dict()
    assert rep.checks["shared_only_ends"]["pass"]


def test_threshold_must_be_positive():
    xi = parse_word("a", 2)
    rset = RelatedSet(FREE2, xi, (FREE2.identity(), xi))
    tour = tsp_exact(rset)
    with pytest.raises(MalformedInputError):
        decompose_pieces(rset, tour, 0)
