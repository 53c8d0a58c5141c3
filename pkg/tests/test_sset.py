import itertools

import pytest

from unihom.homology import normalized_chain_complex
from unihom.sset import (Eq, PinnedTo, ResourceLimitExceeded, SimplexKey, all_simplices,
                         check_simplicial_identities, coordinate_constraint_subset, custom_graph,
                         degeneracy, empty_mask, face, full_mask, intersect_subsets, power,
                         standard_model, total_degeneracy, union_subsets)


def graph_simplices(X, d):
    """Independent enumeration of d-simplices of a 1-dimensional model.

    A vertex contributes one constant simplex; an edge contributes one simplex
    per jump position of a monotone 0/1 sequence of length d+1.  Returned as
    (label, set of repeat positions).
    """
    out = [(("v", v), frozenset(range(d))) for v in range(X.count(0))]
    if X.top >= 1:
        for e in range(X.count(1)):
            for jump in range(d):
                seq = [0] * (jump + 1) + [1] * (d - jump)
                reps = frozenset(t for t in range(d) if seq[t] == seq[t + 1])
                out.append((("e", e, jump), reps))
    return out


def oracle_power_count(X, n, d):
    simp = graph_simplices(X, d)
    count = 0
    for combo in itertools.product(simp, repeat=n):
        common = frozenset(range(d))
        for _, reps in combo:
            common &= reps
        if not common:
            count += 1
    return count


def euler(counts):
    return sum((-1) ** d * c for d, c in enumerate(counts))


GRAPHS = {
    "wedge1": lambda: standard_model("wedge", r=1),
    "wedge2": lambda: standard_model("wedge", r=2),
    "tvc": lambda: standard_model("two_vertex_circle"),
    "interval2": lambda: standard_model("interval_chain", L=2),
}


def test_model_counts():
    assert standard_model("wedge", r=1).counts() == (1, 1)
    assert standard_model("wedge", r=3).counts() == (1, 3)
    assert standard_model("wedge_inv", r=1).counts() == (1, 2, 1)
    assert standard_model("two_vertex_circle").counts() == (2, 2)
    assert standard_model("interval_chain", L=3).counts() == (4, 3)


def test_model_errors():
    with pytest.raises(ValueError):
        standard_model("wedge", r=0)
    with pytest.raises(ValueError):
        standard_model("interval_chain", L=0)
    with pytest.raises(ValueError):
        standard_model("torus")


def test_custom_graph_edges():
    X = custom_graph(["p", "q"], [("u", "p", "q"), {"id": "w", "from": "q", "to": "p"}])
    assert X.edge_ends(X.edge_id("u")) == (X.vertex_id("p"), X.vertex_id("q"))
    assert X.edge_ends(X.edge_id("w")) == (X.vertex_id("q"), X.vertex_id("p"))
    with pytest.raises(ValueError):
        custom_graph(["p"], [("u", "p", "r")])


def test_face_of_degenerate_vertex():
    X = standard_model("wedge", r=1)
    s0v = total_degeneracy(0, 1)
    assert face(X, s0v, 0) == SimplexKey(0, 0, (0,))
    assert face(X, s0v, 1) == SimplexKey(0, 0, (0,))


def test_face_degeneracy_branches():
    X = standard_model("interval_chain", L=1)
    e = X.key(1, "e0")
    v0, v1 = X.vertex_id("0"), X.vertex_id("1")
    s1e = degeneracy(e, 1)
    s0e = degeneracy(e, 0)
    # d_1 s_1 = id
    assert face(X, s1e, 1) == e
    # d_0 s_1 = s_0 d_0
    assert face(X, s1e, 0) == total_degeneracy(v1, 1)
    # d_2 s_0 = s_0 d_1
    assert face(X, s0e, 2) == total_degeneracy(v0, 1)
    with pytest.raises(IndexError):
        face(X, e, 2)


def test_degeneracy_word_roundtrip():
    k = SimplexKey.from_word(1, 0, [2, 0])
    assert k.eta == (0, 0, 1, 1)
    assert k.degeneracy_word == [2, 0]
    assert k.is_degenerate and k.degree == 3
    with pytest.raises(ValueError):
        SimplexKey.from_word(1, 0, [0, 2])
    with pytest.raises(ValueError):
        SimplexKey.from_word(1, 0, [3, 1])


def test_power_counts_wedge1_square():
    # Euler characteristic of the torus is 0: 1 - 3 + 2
    P = power(standard_model("wedge", r=1), 2, 3)
    assert P.counts() == (1, 3, 2, 0)


@pytest.mark.parametrize("name", sorted(GRAPHS))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_power_counts_match_enumeration(name, n):
    X = GRAPHS[name]()
    P = power(X, n, n + 1)
    for d in range(n + 2):
        assert P.count(d) == oracle_power_count(X, n, d), (name, n, d)


@pytest.mark.parametrize("name", sorted(GRAPHS))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_power_euler_and_top_degree(name, n):
    X = GRAPHS[name]()
    P = power(X, n, n + 1)
    assert P.count(n + 1) == 0
    assert P.count(0) == X.count(0) ** n
    assert euler(P.counts()) == euler(X.counts()) ** n


def test_power_one_is_the_factor():
    X = standard_model("two_vertex_circle")
    P = power(X, 1, 2)
    assert P.counts()[:2] == X.counts()
    for k in range(X.count(1)):
        assert [f.index for f in P.faces[1][k]] == [f.index for f in X.faces[1][k]]


def test_simplicial_identities():
    for X in (standard_model("wedge_inv", r=1), standard_model("wedge", r=2)):
        assert check_simplicial_identities(X) == []
    P = power(standard_model("two_vertex_circle"), 3, 4)
    assert check_simplicial_identities(P, upto=4) == []
    P = power(standard_model("wedge_inv", r=1), 2, 3)
    assert check_simplicial_identities(P, upto=3) == []


def test_key_of_normalizes():
    X = standard_model("wedge", r=1)
    P = power(X, 2, 3)
    e = X.key(1, "e1")
    s0e, s1e = degeneracy(e, 0), degeneracy(e, 1)
    k = P.key_of((s0e, s1e))
    assert not k.is_degenerate and k.dim == 2
    assert P.components(k) == (s0e, s1e)
    d = P.key_of((s0e, s0e))
    assert d.is_degenerate and d.dim == 1 and d.eta == (0, 0, 1)


def test_boundary_squares_to_zero():
    for X in (standard_model("wedge_inv", r=1), standard_model("two_vertex_circle")):
        for n in (1, 2, 3):
            assert normalized_chain_complex(power(X, n, n + 1)).check_dd()


def test_constraint_subset_counts():
    X = standard_model("two_vertex_circle")
    P = power(X, 2, 3)
    eq = coordinate_constraint_subset(P, Eq(1, 2))
    assert eq.counts() == (2, 2, 0, 0)
    pin = coordinate_constraint_subset(P, PinnedTo(1, "x"))
    assert pin.counts() == (2, 2, 0, 0)
    assert eq.is_face_closed() and pin.is_face_closed()
    with pytest.raises(ValueError):
        coordinate_constraint_subset(P, Eq(1, 3))


@pytest.mark.parametrize("n", [2, 3])
def test_pinned_component_matches_lower_power(n):
    X = standard_model("wedge", r=2)
    P = power(X, n, n + 1)
    Q = power(X, n - 1, n + 1)
    for i, v in ((1, "v"), (n, "v")):
        assert coordinate_constraint_subset(P, PinnedTo(i, v)).counts() == Q.counts()


def test_retained_intersection_on_circle():
    X = standard_model("wedge", r=1)
    P = power(X, 2, 3)
    Y0 = coordinate_constraint_subset(P, PinnedTo(1, "v"))
    Y1 = coordinate_constraint_subset(P, Eq(1, 2))
    Y2 = coordinate_constraint_subset(P, PinnedTo(2, "v"))
    Z = union_subsets([Y1, Y2])
    A = intersect_subsets([Y0, Z])
    assert A.counts() == (1, 0, 0, 0)
    assert A.issubset(Y0) and A.issubset(Z)


def test_mask_algebra():
    P = power(standard_model("wedge", r=1), 2, 3)
    Y0 = coordinate_constraint_subset(P, PinnedTo(1, "v"))
    assert union_subsets([Y0, empty_mask(P)]) == Y0
    assert intersect_subsets([Y0, full_mask(P)]) == Y0
    Q = power(standard_model("wedge", r=1), 2, 3)
    with pytest.raises(ValueError):
        union_subsets([Y0, full_mask(Q)])


def test_all_simplices_sizes():
    X = standard_model("wedge", r=2)
    # constant vertex plus d jump positions per edge
    assert len(all_simplices(X, 3)) == 1 + 2 * 3


def test_resource_guard(monkeypatch):
    X = standard_model("wedge", r=3)
    with pytest.raises(ResourceLimitExceeded):
        power(X, 3, 4, max_cells=50)
    monkeypatch.setenv("UNIHOM_MAX_CELLS", "10")
    with pytest.raises(ResourceLimitExceeded):
        power(X, 3, 4)
