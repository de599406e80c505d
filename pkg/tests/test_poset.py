from math import comb

import pytest

from qkcalc.poset import (
    InvalidShape,
    NotContained,
    UnsupportedSpace,
    build_cominuscule,
)
from qkcalc.rootsys import root_to_eps

SPACES = [
    "Gr(2,4)",
    "Gr(2,5)",
    "Gr(3,6)",
    "Gr(3,7)",
    "LG(2,4)",
    "LG(3,6)",
    "OG(5,10)",
    "Q(3)",
    "Q(4)",
    "Q(5)",
    "Q(6)",
    "E6",
    "E7",
]

CLASS_COUNTS = {
    "Gr(2,4)": comb(4, 2),
    "Gr(2,5)": comb(5, 2),
    "Gr(3,6)": comb(6, 3),
    "Gr(3,7)": comb(7, 3),
    "LG(2,4)": 2**2,
    "LG(3,6)": 2**3,
    "OG(5,10)": 2**4,
    "Q(3)": 4,
    "Q(4)": 6,
    "Q(5)": 6,
    "Q(6)": 8,
    "E6": 27,
    "E7": 56,
}

FANO = {
    "Gr(2,4)": 4,
    "Gr(2,5)": 5,
    "Gr(3,6)": 6,
    "Gr(3,7)": 7,
    "LG(2,4)": 3,
    "LG(3,6)": 4,
    "OG(5,10)": 8,
    "Q(3)": 3,
    "Q(4)": 4,
    "Q(5)": 5,
    "Q(6)": 6,
    "E6": 12,
    "E7": 18,
}


@pytest.fixture(scope="module")
def posets():
    return {s: build_cominuscule(s) for s in SPACES}


def test_class_counts(posets):
    for s, n in CLASS_COUNTS.items():
        assert len(posets[s].shape_masks) == n, s


def test_fano_index_table(posets):
    for s, f in FANO.items():
        assert posets[s].fano_index == f, s


def test_masks_are_ideals_and_closed_under_lattice_ops(posets):
    for s in ("Gr(2,4)", "LG(3,6)", "Q(4)", "E6"):
        poset = posets[s]
        masks = set(poset.shape_masks)
        for a in masks:
            for b in masks:
                assert a & b in masks
                assert a | b in masks


def test_parse_format_roundtrip(posets):
    for s in SPACES:
        poset = posets[s]
        for u in poset.shapes():
            lit = poset.format_shape(u)
            assert poset.parse_shape(lit) == u


def test_index_list_literals(posets):
    # every shape is also addressable by its explicit box list
    poset = posets["Q(4)"]
    for u in poset.shapes():
        lit = "[" + ",".join(str(i) for i in u.indices()) + "]"
        assert poset.parse_shape(lit) == u


def test_gr37_delta_labels(posets):
    # box with root e_i - e_j carries label e_{i+j-4} - e_{i+j-3}
    poset = posets["Gr(3,7)"]
    for k, alpha in enumerate(poset.boxes):
        eps = root_to_eps(poset.rs, alpha)
        i = eps.index(1) + 1
        j = eps.index(-1) + 1
        assert poset.delta[k] == i + j - 5  # 0-based index of alpha_{i+j-4}


def test_gr37_z_shapes(posets):
    poset = posets["Gr(3,7)"]
    assert poset.format_shape(poset.z_shape(1)) == "4,1,1"
    assert poset.format_shape(poset.z_shape(2)) == "4,4,2"
    assert poset.z_shape(3) == poset.full_shape
    # saturation past d_max
    assert poset.z_shape(9) == poset.full_shape


def test_gr37_curve_nbhd_matches_row_column_rule(posets):
    # w(-1) removes the first row and column, shifting the rest north-west
    poset = posets["Gr(3,7)"]
    cases = {
        "4,3,1": "2",
        "4,4,4": "3,3",
        "2,1": "0",
        "4,1": "0",
    }
    for w, expect in cases.items():
        u = poset.parse_shape(w)
        assert poset.format_shape(poset.curve_nbhd(u, -1)) == expect


def test_nbhd_composition_law(posets):
    for s in ("Gr(2,5)", "LG(3,6)", "Q(5)", "E6"):
        poset = posets[s]
        dm = poset.d_max
        for u in poset.shapes():
            for d in range(0, dm + 1):
                for e in range(0, dm + 1 - d):
                    assert poset.curve_nbhd(poset.curve_nbhd(u, d), e) == poset.curve_nbhd(u, d + e)


def test_negative_nbhd_length(posets):
    # ell(u(-d)) = ell(u join z_d) - ell(z_d)
    for s in ("Gr(3,6)", "LG(3,6)", "Q(6)"):
        poset = posets[s]
        for u in poset.shapes():
            for d in range(0, poset.d_max + 1):
                zd = poset.z_shape(d)
                join = poset.shape(u.mask | zd.mask)
                assert poset.curve_nbhd(u, -d).size == join.size - zd.size


def test_nbhd_dual_compatibility(posets):
    # u(-d) dual = dual(u)(d)
    for s in ("Gr(2,5)", "LG(3,6)", "OG(5,10)", "E7"):
        poset = posets[s]
        for u in poset.shapes():
            for d in range(0, poset.d_max + 1):
                lhs = poset.dual(poset.curve_nbhd(u, -d))
                rhs = poset.curve_nbhd(poset.dual(u), d)
                assert lhs == rhs


def test_dual_is_an_involution_and_de_morgan(posets):
    for s in SPACES:
        poset = posets[s]
        for u in poset.shapes():
            assert poset.dual(poset.dual(u)) == u
        masks = poset.shape_masks
        for a in masks[: min(len(masks), 8)]:
            for b in masks[: min(len(masks), 8)]:
                ua, ub = poset.shape(a), poset.shape(b)
                meet = poset.shape(a & b)
                assert poset.dual(meet).mask == poset.dual(ua).mask | poset.dual(ub).mask


def test_dual_complements_length(posets):
    for s in SPACES:
        poset = posets[s]
        for u in poset.shapes():
            assert u.size + poset.dual(u).size == poset.n_boxes


def test_weyl_action_is_extension_independent(posets):
    # the group element only depends on the ideal, not on which linear
    # extension orders the box reflections
    from qkcalc.rootsys import mat_mult

    for s in ("Gr(2,4)", "LG(3,6)", "Q(4)"):
        poset = posets[s]
        ident = tuple(
            tuple(int(i == j) for j in range(poset.rs.rank)) for i in range(poset.rs.rank)
        )
        for u in poset.shapes():
            want = poset.weyl_matrix(u.mask)
            # reverse order within each level of the grading
            alt = sorted(
                u.indices(),
                key=lambda i: (bin(poset.down_masks[i]).count("1"), -i),
            )
            mat = ident
            for i in alt:
                mat = mat_mult(mat, poset.rs.reflection_matrix(poset.boxes[i]))
            assert mat == want


def test_rook_strips_on_lg(posets):
    poset = posets["LG(3,6)"]
    u = poset.parse_shape("2")
    w1 = poset.parse_shape("3,1")
    assert poset.is_rook_strip(u, w1)
    w2 = poset.parse_shape("3,2")
    assert not poset.is_rook_strip(u, w2)  # two boxes in one column-pair


def test_short_rook_strip_excludes_long_boxes(posets):
    # on LG the diagonal boxes are long roots, so a strip touching the
    # diagonal is never short
    poset = posets["LG(2,4)"]
    empty = poset.empty_shape
    one = poset.parse_shape("1")
    two = poset.parse_shape("2")
    assert poset.is_short_rook_strip(empty, one) is False  # gamma is long
    assert poset.is_short_rook_strip(one, two) is True


def test_delta_sum_counts_labels(posets):
    poset = posets["Gr(2,4)"]
    u = poset.parse_shape("1")
    w = poset.parse_shape("2,1")
    total = poset.delta_sum(u, w)
    assert sum(total) == w.size - u.size
    assert all(c >= 0 for c in total)


def test_not_contained_raised(posets):
    poset = posets["Gr(2,4)"]
    u = poset.parse_shape("2,2")
    w = poset.parse_shape("1")
    with pytest.raises(NotContained):
        poset.skew_boxes(u, w)


def test_invalid_shapes_rejected(posets):
    poset = posets["Gr(2,4)"]
    for bad in ("3", "2,2,1", "1,2"):
        with pytest.raises(InvalidShape):
            poset.parse_shape(bad)


def test_unsupported_spaces_rejected():
    for bad in ("Gr(0,3)", "LG(3,7)", "OG(2,4)", "Q(2)", "E8", "Spin(7)"):
        with pytest.raises(UnsupportedSpace):
            build_cominuscule(bad)


def test_p1_aliases():
    a = build_cominuscule("P1")
    b = build_cominuscule("P(1)")
    c = build_cominuscule("Gr(1,2)")
    assert str(a.space) == str(b.space) == str(c.space) == "Gr(1,2)"


def test_describe_and_render(posets):
    poset = posets["Gr(3,7)"]
    text = poset.describe()
    assert "Gr(3,7)" in text
    assert "35" in text  # class count appears
    art = poset.render_ascii()
    assert art.count("\n") >= 2  # three rows of boxes


def test_addable_boxes(posets):
    poset = posets["Gr(2,4)"]
    u = poset.parse_shape("1")
    add = poset.addable(u)
    # can grow to (2) or (1,1)
    grown = {poset.format_shape(poset.shape(u.mask | 1 << b)) for b in add}
    assert grown == {"2", "1,1"}
