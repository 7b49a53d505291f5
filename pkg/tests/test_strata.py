"""Stratification layer: starred types, seam classification, C-L frontier."""

import itertools

import pytest
from hypothesis import given, strategies as st

from cosphere.poset import IsotropyPoset, OrbitType, transitive_closure
from cosphere.strata import (
    InvalidPosetError,
    MultipleOrbitTypesError,
    NotAlmostSemifreeError,
    NotStarredTypeError,
    StratificationError,
    StratumKind,
    bundle_targets,
    cc_name,
    cl_stratification,
    classify_seam,
    contact_frontier,
    contact_strata,
    is_finer_than_contact,
    result_to_dot,
    result_to_json,
    seam_name,
    secondary_strata,
    semifree_decomposition,
    single_type_reduce,
    starred_lattice,
    stratum_quotient_dim,
    zero_level_types,
)
from cosphere.torus import TorusActionSpec, build_isotropy_poset

LABELS = "ABCDEFGH"


def two_plane_poset():
    return build_isotropy_poset(TorusActionSpec(k=2, n=2, weights=((1, 0), (0, 1))))


def one_plane_poset():
    return build_isotropy_poset(TorusActionSpec(k=1, n=1, weights=((1,),)))


def test_starred_lattice_of_the_two_plane_action():
    poset = two_plane_poset()
    assert starred_lattice(poset) == {"e", "S^1×e", "e×S^1"}
    assert zero_level_types(poset) == starred_lattice(poset)
    assert stratum_quotient_dim(poset, "e") == 2
    assert stratum_quotient_dim(poset, "S^1×e") == 1
    assert stratum_quotient_dim(poset, "T^2") == 0


def test_contact_strata_dimensions():
    strata = contact_strata(two_plane_poset())
    dims = {s.name: s.dim for s in strata}
    assert dims == {"Contact(e)": 3, "Contact(S^1×e)": 1, "Contact(e×S^1)": 1}
    assert all(s.kind is StratumKind.CONTACT for s in strata)


def test_contact_frontier_pairs():
    assert contact_frontier(two_plane_poset()) == {
        ("Contact(S^1×e)", "Contact(e)"),
        ("Contact(e×S^1)", "Contact(e)"),
    }


def test_classify_seam_degenerate_gives_the_cosphere_piece():
    s = classify_seam(two_plane_poset(), "e", "e")
    assert s.name == "CC(e)"
    assert s.kind is StratumKind.COSPHERE
    assert s.dim == 3


def test_classify_seam_coisotropic_and_legendrian():
    poset = two_plane_poset()
    co = classify_seam(poset, "S^1×e", "e")
    assert (co.kind, co.dim) == (StratumKind.COISOTROPIC_SEAM, 2)
    assert co.base_target == "S^1×e" and co.parent_contact == "Contact(e)"
    leg = classify_seam(poset, "T^2", "e")
    assert (leg.kind, leg.dim) == (StratumKind.LEGENDRIAN_SEAM, 1)
    point = classify_seam(poset, "T^2", "S^1×e")
    assert (point.kind, point.dim) == (StratumKind.LEGENDRIAN_SEAM, 0)


def test_classify_seam_rejects_unstarred_lower_and_unrelated_pairs():
    poset = two_plane_poset()
    with pytest.raises(NotStarredTypeError):
        classify_seam(poset, "T^2", "T^2")
    with pytest.raises(StratificationError):
        classify_seam(poset, "e×S^1", "S^1×e")


def test_secondary_strata_of_the_open_contact_stratum():
    pieces = secondary_strata(two_plane_poset(), "e")
    names = [p.name for p in pieces]
    assert names[0] == "CC(e)"
    assert pieces[0].open_dense
    assert set(names[1:]) == {"Seam(S^1×e>e)", "Seam(e×S^1>e)", "Seam(T^2>e)"}


EXPECTED_TWO_PLANE_PIECES = {
    "CC(e)": (3, StratumKind.COSPHERE),
    "Seam(S^1×e>e)": (2, StratumKind.COISOTROPIC_SEAM),
    "Seam(e×S^1>e)": (2, StratumKind.COISOTROPIC_SEAM),
    "CC(S^1×e)": (1, StratumKind.COSPHERE),
    "CC(e×S^1)": (1, StratumKind.COSPHERE),
    "Seam(T^2>e)": (1, StratumKind.LEGENDRIAN_SEAM),
    "Seam(T^2>S^1×e)": (0, StratumKind.LEGENDRIAN_SEAM),
    "Seam(T^2>e×S^1)": (0, StratumKind.LEGENDRIAN_SEAM),
}

EXPECTED_TWO_PLANE_HASSE = {
    ("CC(S^1×e)", "Seam(S^1×e>e)"),
    ("CC(e×S^1)", "Seam(e×S^1>e)"),
    ("Seam(S^1×e>e)", "CC(e)"),
    ("Seam(e×S^1>e)", "CC(e)"),
    ("Seam(T^2>e)", "Seam(S^1×e>e)"),
    ("Seam(T^2>e)", "Seam(e×S^1>e)"),
    ("Seam(T^2>S^1×e)", "CC(S^1×e)"),
    ("Seam(T^2>S^1×e)", "Seam(T^2>e)"),
    ("Seam(T^2>e×S^1)", "CC(e×S^1)"),
    ("Seam(T^2>e×S^1)", "Seam(T^2>e)"),
}

EXPECTED_TWO_PLANE_CLOSURE_ONLY = {
    ("Seam(T^2>e×S^1)", "CC(e)"),
    ("Seam(T^2>e×S^1)", "Seam(e×S^1>e)"),
    ("Seam(T^2>e×S^1)", "Seam(S^1×e>e)"),
    ("Seam(T^2>S^1×e)", "CC(e)"),
    ("Seam(T^2>S^1×e)", "Seam(e×S^1>e)"),
    ("Seam(T^2>S^1×e)", "Seam(S^1×e>e)"),
}


def test_two_plane_cl_inventory():
    result = cl_stratification(two_plane_poset())
    got = {s.name: (s.dim, s.kind) for s in result.cl_strata}
    assert got == EXPECTED_TWO_PLANE_PIECES
    assert result.piece_count == 8
    assert [s.name for s in result.cl_strata if s.open_dense] == ["CC(e)"]
    assert result.starred == ("S^1×e", "e", "e×S^1")


def test_two_plane_frontier_closure_and_hasse():
    result = cl_stratification(two_plane_poset())
    assert len(result.frontier) == 19
    assert set(result.hasse) == EXPECTED_TWO_PLANE_HASSE
    assert result.closure_only == EXPECTED_TWO_PLANE_CLOSURE_ONLY
    assert transitive_closure(result.hasse) == result.frontier


def frontier_oracle(poset):
    """Re-derivation of the five generation rules by triple enumeration."""
    starred = starred_lattice(poset)
    order = poset.order
    labels = poset.labels()
    pairs = set()
    for h, k in order:
        if h in starred and k in starred:
            pairs.add((cc_name(k), cc_name(h)))
            pairs.add((cc_name(k), seam_name(k, h)))
        if h in starred:
            pairs.add((seam_name(k, h), cc_name(h)))
    for h, k, k2 in itertools.product(labels, repeat=3):
        if h in starred and (h, k) in order and (k, k2) in order:
            pairs.add((seam_name(k2, h), seam_name(k, h)))
    for h, h2, k in itertools.product(labels, repeat=3):
        if (
            h in starred
            and h2 in starred
            and (h, h2) in order
            and (h2, k) in order
        ):
            pairs.add((seam_name(k, h2), seam_name(k, h)))
    return transitive_closure(pairs)


def test_two_plane_frontier_matches_the_rule_oracle():
    poset = two_plane_poset()
    assert cl_stratification(poset).frontier == frontier_oracle(poset)


def test_one_plane_inventory():
    result = cl_stratification(one_plane_poset())
    got = {s.name: (s.dim, s.kind) for s in result.cl_strata}
    assert got == {
        "CC(e)": (1, StratumKind.COSPHERE),
        "Seam(S^1>e)": (0, StratumKind.LEGENDRIAN_SEAM),
    }
    assert result.frontier == {("Seam(S^1>e)", "CC(e)")}
    assert result.closure_only == frozenset()


def test_cl_stratification_rejects_invalid_posets():
    broken = IsotropyPoset(
        (OrbitType("A", 0, is_identity=True),),
        frozenset(),
        {"A": 9},
        1,
        3,
    )
    with pytest.raises(InvalidPosetError):
        cl_stratification(broken)


@st.composite
def valid_posets(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    labels = list(LABELS[:n])
    dim_g = n
    dim_q = draw(st.integers(min_value=dim_g, max_value=dim_g + 6))
    pairs = draw(
        st.lists(
            st.sampled_from(
                [(a, b) for a, b in itertools.combinations(labels, 2)] or [("A", "A")]
            ),
            max_size=10,
        )
    ) if n > 1 else []
    types = tuple(
        OrbitType(lab, i, is_identity=(i == 0)) for i, lab in enumerate(labels)
    )
    dims = {
        lab: draw(st.integers(min_value=dim_g - i, max_value=dim_q))
        for i, lab in enumerate(labels)
    }
    return IsotropyPoset(
        types=types,
        order=frozenset(pairs),
        dim_Q_of=dims,
        dim_G=dim_g,
        dim_Q=dim_q,
    )


@given(valid_posets())
def test_fuzz_frontier_matches_oracle(poset):
    assert cl_stratification(poset).frontier == frontier_oracle(poset)


@given(valid_posets())
def test_fuzz_piece_inventory_shape(poset):
    result = cl_stratification(poset)
    starred = starred_lattice(poset)
    seam_pairs = [(l, h) for (l, h) in poset.order if l in starred]
    assert result.piece_count == len(starred) + len(seam_pairs)
    names = {s.name for s in result.cl_strata}
    for s in result.cl_strata:
        assert s.dim >= 0
    for a, b in result.frontier:
        assert a in names and b in names
        assert a != b
    assert result.closure_only <= result.frontier
    assert set(result.hasse) <= result.frontier
    assert transitive_closure(result.hasse) == result.frontier


@given(valid_posets())
def test_fuzz_seam_excess_identity(poset):
    starred = starred_lattice(poset)
    for lower, upper in poset.order:
        if lower not in starred:
            continue
        s = classify_seam(poset, upper, lower)
        d_low = stratum_quotient_dim(poset, lower)
        assert s.dim - (d_low - 1) == stratum_quotient_dim(poset, upper)
        expect_coiso = upper in starred
        assert (s.kind is StratumKind.COISOTROPIC_SEAM) == expect_coiso
        if s.kind is StratumKind.LEGENDRIAN_SEAM:
            contact_dim = 2 * d_low - 1
            assert s.dim == (contact_dim - 1) // 2


@given(valid_posets())
def test_fuzz_rule_one_is_the_contact_frontier(poset):
    result = cl_stratification(poset)
    cc_pairs = {
        (a, b) for a, b in result.frontier
        if a.startswith("CC(") and b.startswith("CC(")
    }
    expected = {
        (cc_name(k), cc_name(h))
        for (h, k) in poset.order
        if h in starred_lattice(poset) and k in starred_lattice(poset)
    }
    # closure adds no CC-to-CC pairs beyond rule (i): the order is transitive
    assert cc_pairs == expected
    contact_pairs = {
        (a.replace("Contact(", "CC("), b.replace("Contact(", "CC("))
        for a, b in contact_frontier(poset)
    }
    assert contact_pairs == expected


@given(valid_posets())
def test_fuzz_open_dense_piece(poset):
    result = cl_stratification(poset)
    opens = [s for s in result.cl_strata if s.open_dense]
    principal = poset.types[0]  # the strategy makes label index 0 minimal-dim
    has_min = all(
        (principal.label, t.label) in poset.order
        for t in poset.types
        if t.label != principal.label
    )
    if has_min and principal.label in starred_lattice(poset):
        assert [s.name for s in opens] == [cc_name(principal.label)]
    assert len(opens) <= 1


def test_unstarred_middle_type_emits_no_ghost_seam():
    # A < B < C with B unstarred: rule (v) must not reference Seam(C>B)
    types = (
        OrbitType("A", 0, is_identity=True),
        OrbitType("B", 1),
        OrbitType("C", 2),
    )
    poset = IsotropyPoset(
        types=types,
        order={("A", "B"), ("B", "C")},
        dim_Q_of={"A": 4, "B": 1, "C": 0},
        dim_G=2,
        dim_Q=4,
    )
    assert starred_lattice(poset) == {"A"}
    result = cl_stratification(poset)
    names = {s.name for s in result.cl_strata}
    assert names == {"CC(A)", "Seam(B>A)", "Seam(C>A)"}
    for a, b in result.frontier:
        assert a in names and b in names


def test_finer_than_contact():
    assert is_finer_than_contact(cl_stratification(two_plane_poset())) == (True, True)
    single = IsotropyPoset(
        (OrbitType("e", 0, is_identity=True),),
        frozenset(),
        {"e": 3},
        0,
        3,
    )
    assert is_finer_than_contact(cl_stratification(single)) == (True, False)


def test_bundle_targets_are_single_orbit_type_strata():
    result = cl_stratification(two_plane_poset())
    targets = bundle_targets(result)
    assert targets["CC(e)"] == "e"
    assert targets["Seam(T^2>e)"] == "T^2"
    assert targets["Seam(S^1×e>e)"] == "S^1×e"
    assert set(targets) == {s.name for s in result.cl_strata}


def test_semifree_decomposition_of_the_circle_action():
    result = semifree_decomposition(one_plane_poset())
    got = {s.name: s.dim for s in result.cl_strata}
    assert got == {"CC(e)": 1, "Seam(S^1>e)": 0}
    assert result.smooth_total_space
    seam = next(s for s in result.cl_strata if s.name.startswith("Seam"))
    assert seam.kind is StratumKind.LEGENDRIAN_SEAM


def test_semifree_decomposition_two_equal_planes():
    poset = build_isotropy_poset(TorusActionSpec(k=1, n=2, weights=((1, 1),)))
    result = semifree_decomposition(poset)
    got = {s.name: s.dim for s in result.cl_strata}
    assert got == {"CC(e)": 5, "Seam(S^1>e)": 2}


def test_semifree_decomposition_rejects_the_two_plane_torus():
    with pytest.raises(NotAlmostSemifreeError):
        semifree_decomposition(two_plane_poset())


def test_semifree_decomposition_needs_a_principal_minimum():
    antichain = IsotropyPoset(
        (OrbitType("A", 0, is_identity=True), OrbitType("B", 0, finite_tag="2")),
        frozenset(),
        {"A": 2, "B": 2},
        1,
        2,
    )
    with pytest.raises(NotAlmostSemifreeError):
        semifree_decomposition(antichain)


def test_single_type_reduce():
    free = IsotropyPoset(
        (OrbitType("e", 0, is_identity=True),),
        frozenset(),
        {"e": 3},
        0,
        3,
    )
    s = single_type_reduce(free)
    assert (s.name, s.dim, s.kind) == ("CC(e)", 5, StratumKind.COSPHERE)
    assert s.open_dense
    # transitive action: the quotient is a point, C_0 is empty
    point = IsotropyPoset(
        (OrbitType("e", 0, is_identity=True),),
        frozenset(),
        {"e": 2},
        2,
        2,
    )
    assert single_type_reduce(point) is None
    with pytest.raises(MultipleOrbitTypesError):
        single_type_reduce(two_plane_poset())


def test_result_json_schema_and_determinism():
    result = cl_stratification(two_plane_poset())
    data = result_to_json(result)
    assert data["piece_count"] == 8
    assert data["starred"] == ["S^1×e", "e", "e×S^1"]
    assert data["finer_than_contact"] == {"finer": True, "strict": True}
    assert data["frontier"] == sorted(data["frontier"])
    assert len(data["hasse"]) == 10
    assert data == result_to_json(cl_stratification(two_plane_poset()))


def test_result_dot_lists_every_piece_and_cover():
    result = cl_stratification(two_plane_poset())
    dot = result_to_dot(result)
    for name in EXPECTED_TWO_PLANE_PIECES:
        assert f'"{name}"' in dot
    assert dot.count(" -> ") == 10
