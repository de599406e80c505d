"""Chevalley formula checks, including the two worked product expansions
that double as integration tests for the operator pipeline."""

import pytest

from qkcalc.chevalley import (
    Psi_op,
    chev_constants_closed,
    j_class,
    j_weight,
    kt_chevalley,
    phi_op,
    psi_op,
    qkt_chevalley,
    sgamma_mask,
    sgamma_star,
    theta0_op,
    theta1_op,
)
from qkcalc.gamma import GammaElement, QPolynomial
from qkcalc.poset import build_cominuscule
from qkcalc.rootsys import eps_to_root


def char(poset, eps):
    """[C_mu] for mu given in epsilon coordinates {index: coeff}."""
    return GammaElement.monomial(eps_to_root(poset.rs, eps))


def one(poset):
    return GammaElement.from_int(poset.rs.rank, 1)


def by_shape(poset, items):
    return {poset.format_shape(poset.shape(m)): v for m, v in items}


def test_gr37_product():
    poset = build_cominuscule("Gr(3,7)")
    u = poset.parse_shape("4,3,1")
    ju = j_class(poset, u.mask)
    assert ju == char(poset, {7: 1, 5: 1, 3: -1, 1: -1})

    got = by_shape(poset, qkt_chevalley(poset, u.mask))
    classical = {"4,3,1": 1, "4,4,1": -1, "4,3,2": -1, "4,4,2": 1}
    quantum = {"2": -1, "3": 1, "2,1": 1, "3,1": -1}
    assert set(got) == set(classical) | set(quantum)
    for name, sign in classical.items():
        assert got[name] == QPolynomial(poset.rs.rank, [ju * sign]), name
    z = GammaElement.zero(poset.rs.rank)
    for name, sign in quantum.items():
        assert got[name] == QPolynomial(poset.rs.rank, [z, ju * sign]), name


def test_lg510_phi_expansion():
    poset = build_cominuscule("LG(5,10)")
    u = poset.parse_shape("4,2")
    got = by_shape(poset, phi_op(poset, {u.mask: one(poset)}).items())
    want = {
        "4,2": one(poset),
        "5,2": -char(poset, {2: 1, 1: -1}),
        "4,3": -char(poset, {4: 1, 3: -1}),
        "5,3": char(poset, {4: 1, 3: -1, 2: 1, 1: -1}),
    }
    assert got == want


def test_lg510_quantum_terms_and_structure_constant():
    poset = build_cominuscule("LG(5,10)")
    rank = poset.rs.rank
    u = poset.parse_shape("4,2")
    ju = j_class(poset, u.mask)
    assert ju == char(poset, {2: -2, 4: -2})

    a = char(poset, {1: -1, 2: -1, 4: -2})
    b = char(poset, {1: -1, 2: -1, 3: -1, 4: -1})
    want_q = {
        "2": a,
        "3": -a - b,
        "2,1": -a,
        "3,1": a + b,
        "4": b,
        "4,1": -b,
    }
    got = by_shape(poset, qkt_chevalley(poset, u.mask))
    got_q = {name: p.coeff(1) for name, p in got.items() if p.degree() >= 1}
    got_q = {name: g for name, g in got_q.items() if not g.is_zero()}
    assert got_q == want_q

    # N^{(3,1),1}_{s_gamma, u} = -J_u [C_{e2-e1}] (1 + [C_{e4-e3}])
    star = sgamma_star(poset, u.mask)
    nu = poset.parse_shape("3,1")
    npoly = star[nu.mask]
    expected = -(ju * char(poset, {2: 1, 1: -1}) * (one(poset) + char(poset, {4: 1, 3: -1})))
    assert npoly.coeff(1) == expected


SMALL = ["Gr(2,4)", "Gr(2,5)", "LG(2,4)", "LG(3,6)", "Q(3)", "Q(4)", "E6"]


@pytest.mark.parametrize("space", SMALL)
def test_theta1_factors_through_psi_theta0(space):
    poset = build_cominuscule(space)
    for mask in poset.shape_masks:
        cls = {mask: one(poset)}
        assert theta1_op(poset, cls) == psi_op(poset, theta0_op(poset, cls))


@pytest.mark.parametrize("space", SMALL)
def test_q0_specialization_is_classical_chevalley(space):
    poset = build_cominuscule(space)
    for mask in poset.shape_masks:
        q0 = {m: p.coeff(0) for m, p in qkt_chevalley(poset, mask)}
        q0 = {m: g for m, g in q0.items() if not g.is_zero()}
        assert q0 == dict(kt_chevalley(poset, mask))


@pytest.mark.parametrize("space", ["Gr(3,6)", "LG(3,6)", "OG(5,10)"])
def test_quantum_support_interval(space):
    # quantum terms live between u(-1) and the dual of z_1
    poset = build_cominuscule(space)
    top = poset.dual(poset.z_shape(1)).mask
    for mask in poset.shape_masks:
        lo = poset.curve_nbhd(poset.shape(mask), -1).mask
        for m, p in qkt_chevalley(poset, mask):
            if p.degree() < 1 or p.coeff(1).is_zero():
                continue
            assert lo & ~m == 0, "below u(-1)"
            assert m & ~top == 0, "above z_1 dual"


@pytest.mark.parametrize("space", ["LG(3,6)", "Gr(3,6)", "Q(5)", "E6"])
def test_j_class_ratio_on_short_rook_strips(space):
    poset = build_cominuscule(space)
    rank = poset.rs.rank
    for um in poset.shape_masks:
        for wm in poset.shape_masks:
            if um & ~wm:
                continue
            u, w = poset.shape(um), poset.shape(wm)
            if not poset.is_short_rook_strip(u, w):
                continue
            twice = tuple(-2 * c for c in poset.delta_sum(u, w))
            assert j_class(poset, wm) == j_class(poset, um) * GammaElement.monomial(twice)


def test_j_weight_vs_j_class():
    poset = build_cominuscule("LG(3,6)")
    for mask in poset.shape_masks:
        jw = j_weight(poset, mask)
        assert j_class(poset, mask) == GammaElement.monomial(tuple(-x for x in jw))


def test_sgamma_star_is_one_minus_jstar():
    poset = build_cominuscule("Gr(2,5)")
    rank = poset.rs.rank
    for mask in poset.shape_masks:
        star = sgamma_star(poset, mask)
        jstar = dict(qkt_chevalley(poset, mask))
        diff = dict(star)
        for m, p in jstar.items():
            diff[m] = diff.get(m, QPolynomial.zero(rank)) + p
        diff = {m: p for m, p in diff.items() if not p.is_zero()}
        assert diff == {mask: QPolynomial(rank, [one(poset)])}


@pytest.mark.parametrize("space", ["Gr(2,4)", "LG(2,4)", "Q(4)"])
def test_closed_form_equals_operator_form(space):
    poset = build_cominuscule(space)
    for mask in poset.shape_masks:
        assert chev_constants_closed(poset, mask) == sgamma_star(poset, mask)


def test_sgamma_mask_is_single_gamma_box():
    for space in ("Gr(3,7)", "LG(3,6)", "E7"):
        poset = build_cominuscule(space)
        m = sgamma_mask(poset)
        assert bin(m).count("1") == 1
        (i,) = [k for k in range(poset.n_boxes) if m >> k & 1]
        assert poset.boxes[i] == poset.gamma_root


def test_psi_inverts_one_minus_qpsi():
    from qkcalc.chevalley import _psi_mask

    poset = build_cominuscule("LG(2,4)")
    rank = poset.rs.rank
    D = 4
    for mask in poset.shape_masks:
        base = {mask: QPolynomial.from_gamma(one(poset))}
        big = Psi_op(poset, base, D)
        # apply (1 - q psi) and compare with the input
        acc = {m: p for m, p in big.items()}
        for m, p in big.items():
            sp = p.shift_q(1).truncate(D)
            if sp.is_zero():
                continue
            t = _psi_mask(poset, m)
            acc[t] = acc.get(t, QPolynomial.zero(rank)) - sp
        acc = {m: p for m, p in acc.items() if not p.is_zero()}
        assert acc == base


def test_psi_collapses_quantum_chevalley_to_classical():
    # Psi(J * O^u) telescopes to the classical product J . O^u
    for space in ("Gr(2,4)", "LG(3,6)"):
        poset = build_cominuscule(space)
        rank = poset.rs.rank
        D = poset.d_max + 2
        for mask in poset.shape_masks:
            jstar = dict(qkt_chevalley(poset, mask))
            folded = Psi_op(poset, jstar, D)
            folded = {m: p.truncate(D - 1) for m, p in folded.items()}
            folded = {m: p for m, p in folded.items() if not p.is_zero()}
            want = {m: QPolynomial(rank, [g]) for m, g in kt_chevalley(poset, mask)}
            assert folded == want
