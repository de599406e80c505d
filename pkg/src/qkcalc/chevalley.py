"""Chevalley formula in equivariant (quantum) K-theory.

Everything here expands products with the ideal sheaf class
J = 1 - O^{s_gamma} of the opposite Schubert divisor.  Classes are stored
as sparse dicts keyed by shape mask; coefficients live in the group ring
Gamma = Z[weight lattice] (GammaElement) or in Gamma[q] (QPolynomial).

The product J * O^u is computed two independent ways: by composing the
operators theta_0, phi, theta_1, and by the closed-form case analysis of
the structure constants.  Tests compare them on every space.
"""

from __future__ import annotations

from functools import lru_cache

from .gamma import GammaElement, QPolynomial
from .poset import BuildCheckError, CominusculePoset, Shape

KClass = dict[int, GammaElement]
QKClass = dict[int, QPolynomial]


def _add_to(out: KClass, mask: int, coeff: GammaElement) -> None:
    cur = out.get(mask)
    tot = coeff if cur is None else cur + coeff
    if tot.is_zero():
        out.pop(mask, None)
    else:
        out[mask] = tot


def _subset_masks(bits: list[int]):
    for k in range(1 << len(bits)):
        mask = 0
        for t, b in enumerate(bits):
            if k >> t & 1:
                mask |= 1 << b
        yield mask, k.bit_count()


# ---------------------------------------------------------------------------
# Fixed point restrictions of J


@lru_cache(maxsize=None)
def j_weight(poset: CominusculePoset, mask: int) -> tuple[int, ...]:
    """omega_gamma - w_u(omega_gamma) = sum over boxes of u of
    (omega_gamma, alpha^vee) delta(alpha), in simple-root coordinates."""
    total = [0] * poset.rs.rank
    for i in range(poset.n_boxes):
        if mask >> i & 1:
            total[poset.delta[i]] += poset.pairing_omega[i]
    return tuple(total)


@lru_cache(maxsize=None)
def j_class(poset: CominusculePoset, mask: int) -> GammaElement:
    """J_u = J restricted to the fixed point of u, a single character."""
    return GammaElement.monomial(tuple(-x for x in j_weight(poset, mask)))


# ---------------------------------------------------------------------------
# Basis operators.  Each returns a tuple of (mask, coefficient) pairs where
# the coefficient is an int sign or a GammaElement.


@lru_cache(maxsize=None)
def _theta0_basis(poset: CominusculePoset, mask: int):
    add = poset.addable(Shape(poset, mask))
    return tuple(
        (mask | sub, -1 if k % 2 else 1) for sub, k in _subset_masks(add)
    )


@lru_cache(maxsize=None)
def _phi_basis(poset: CominusculePoset, mask: int):
    rank = poset.rs.rank
    add = [i for i in poset.addable(Shape(poset, mask)) if poset.short[i]]
    out = []
    for sub, k in _subset_masks(add):
        expo = [0] * rank
        for i in range(poset.n_boxes):
            if sub >> i & 1:
                expo[poset.delta[i]] -= 1
        coeff = GammaElement.monomial(tuple(expo), -1 if k % 2 else 1)
        out.append((mask | sub, coeff))
    return tuple(out)


@lru_cache(maxsize=None)
def _psi_mask(poset: CominusculePoset, mask: int) -> int:
    return poset.curve_nbhd(Shape(poset, mask), -1).mask


@lru_cache(maxsize=None)
def _theta1_basis(poset: CominusculePoset, mask: int):
    z1 = poset.z_shape(1).mask
    if mask & z1 != z1:
        return ()
    zdual = poset.dual(poset.z_shape(1)).mask
    um1 = _psi_mask(poset, mask)
    if um1 & ~zdual:
        raise BuildCheckError("u(-1) escapes the dual of z_1")
    add = [
        i
        for i in poset.addable(Shape(poset, um1))
        if zdual >> i & 1
    ]
    return tuple(
        (um1 | sub, -1 if k % 2 else 1) for sub, k in _subset_masks(add)
    )


def theta0_op(poset: CominusculePoset, cls: KClass) -> KClass:
    """Alternating sum over rook strips; sends O^u to the ideal sheaf class
    of the boundary of the Schubert variety X^u."""
    out: KClass = {}
    for mask, coeff in cls.items():
        for m2, sign in _theta0_basis(poset, mask):
            _add_to(out, m2, coeff * sign)
    return out


def phi_op(poset: CominusculePoset, cls: KClass) -> KClass:
    """Alternating sum over short rook strips, weighted by characters."""
    out: KClass = {}
    for mask, coeff in cls.items():
        for m2, c2 in _phi_basis(poset, mask):
            _add_to(out, m2, coeff * c2)
    return out


def psi_op(poset: CominusculePoset, cls: KClass) -> KClass:
    """Linear extension of O^u -> O^{u(-1)}."""
    out: KClass = {}
    for mask, coeff in cls.items():
        _add_to(out, _psi_mask(poset, mask), coeff)
    return out


def theta1_op(poset: CominusculePoset, cls: KClass) -> KClass:
    """Quantum correction operator; equals psi composed with theta_0."""
    out: KClass = {}
    for mask, coeff in cls.items():
        for m2, sign in _theta1_basis(poset, mask):
            _add_to(out, m2, coeff * sign)
    return out


def Psi_op(poset: CominusculePoset, cls: QKClass, tmax: int) -> QKClass:
    """Sum_e q^e psi^e, truncated above q^tmax."""
    out: QKClass = {}
    for mask, poly in cls.items():
        m = mask
        for e in range(tmax + 1):
            shifted = poly.shift_q(e).truncate(tmax)
            if not shifted.is_zero():
                cur = out.get(m)
                out[m] = shifted if cur is None else cur + shifted
            m = _psi_mask(poset, m)
        _prune_qk(out)
    return out


def _prune_qk(cls: QKClass) -> None:
    dead = [m for m, p in cls.items() if p.is_zero()]
    for m in dead:
        del cls[m]


# ---------------------------------------------------------------------------
# Chevalley products


def sgamma_mask(poset: CominusculePoset) -> int:
    """Mask of the Schubert divisor class O^{s_gamma}."""
    for i, a in enumerate(poset.boxes):
        if a == poset.gamma_root:
            return 1 << i
    raise BuildCheckError("gamma is not a box")


@lru_cache(maxsize=None)
def kt_chevalley(poset: CominusculePoset, mask: int) -> tuple:
    """Classical product J . O^u = J_u theta_0(phi(O^u)) in K_T(X)."""
    ju = j_class(poset, mask)
    parts = theta0_op(poset, phi_op(poset, {mask: ju}))
    return tuple(sorted(parts.items()))


@lru_cache(maxsize=None)
def qkt_chevalley(poset: CominusculePoset, mask: int) -> tuple:
    """Quantum product J * O^u = J_u theta_0(phi(O^u))
    - q J_u theta_1(phi(O^u)); returns ((mask, QPolynomial), ...)."""
    ju = j_class(poset, mask)
    phi = phi_op(poset, {mask: ju})
    layer0 = theta0_op(poset, phi)
    layer1 = theta1_op(poset, phi)
    rank = poset.rs.rank
    out: QKClass = {}
    for m, c in layer0.items():
        out[m] = QPolynomial(rank, [c])
    for m, c in layer1.items():
        cur = out.get(m, QPolynomial.zero(rank))
        out[m] = cur + QPolynomial(rank, [GammaElement.zero(rank), -c])
    _prune_qk(out)
    return tuple(sorted(out.items()))


def sgamma_star(poset: CominusculePoset, mask: int) -> QKClass:
    """O^{s_gamma} * O^u = O^u - J * O^u in QK_T(X)."""
    rank = poset.rs.rank
    out: QKClass = {m: -p for m, p in qkt_chevalley(poset, mask)}
    one = QPolynomial(rank, [GammaElement.from_int(rank, 1)])
    cur = out.get(mask, QPolynomial.zero(rank))
    out[mask] = cur + one
    _prune_qk(out)
    return out


# ---------------------------------------------------------------------------
# Closed-form structure constants of the divisor product


def _skew_flags(poset: CominusculePoset, skew: int, i: int) -> tuple[bool, bool]:
    """(minimal, maximal) of box i within the skew set of boxes."""
    bit = 1 << i
    mn = not (poset.down_masks[i] & ~bit & skew)
    mx = not (poset.up_masks[i] & ~bit & skew)
    return mn, mx


def _closed_layer0(poset: CominusculePoset, u_mask: int, w_mask: int) -> GammaElement | None:
    """Coefficient of O^w in J . O^u divided by -J_u... sign included; None
    when the case analysis says the constant vanishes.  Requires u < w."""
    rank = poset.rs.rank
    skew = w_mask & ~u_mask
    expo = [0] * rank
    prod = GammaElement.from_int(rank, 1)
    count = 0
    for i in range(poset.n_boxes):
        if not skew >> i & 1:
            continue
        count += 1
        mn, mx = _skew_flags(poset, skew, i)
        if not mx:
            if not (poset.short[i] and mn):
                return None
            expo[poset.delta[i]] -= 1
        elif mn and poset.short[i]:
            e2 = [0] * rank
            e2[poset.delta[i]] = -1
            prod = prod * (
                GammaElement.from_int(rank, 1) + GammaElement.monomial(tuple(e2))
            )
    sign = -1 if (count - 1) % 2 else 1
    return GammaElement.monomial(tuple(expo), sign) * prod


def _closed_layer1(poset: CominusculePoset, u_mask: int, w_mask: int) -> GammaElement | None:
    rank = poset.rs.rank
    z1 = poset.z_shape(1).mask
    zdual = poset.dual(poset.z_shape(1)).mask
    um1 = _psi_mask(poset, u_mask)
    if um1 & ~w_mask or w_mask & ~zdual:
        return None
    w1 = poset.curve_nbhd(Shape(poset, w_mask), 1).mask
    if u_mask & ~w1:
        return None
    skew = w1 & ~u_mask
    zskew = z1 & ~u_mask
    if zskew & ~skew:
        return None
    expo = [0] * rank
    prod = GammaElement.from_int(rank, 1)
    count = 0
    for i in range(poset.n_boxes):
        if not skew >> i & 1:
            continue
        count += 1
        mn, mx = _skew_flags(poset, skew, i)
        in_z = bool(z1 >> i & 1)
        if in_z and not (poset.short[i] and mn):
            return None
        if not mx and not (poset.short[i] and mn):
            return None
        if not mx or in_z:
            expo[poset.delta[i]] -= 1
        elif mn and poset.short[i]:
            e2 = [0] * rank
            e2[poset.delta[i]] = -1
            prod = prod * (
                GammaElement.from_int(rank, 1) + GammaElement.monomial(tuple(e2))
            )
    sign = -1 if count % 2 else 1
    return GammaElement.monomial(tuple(expo), sign) * prod


def chev_constants_closed(poset: CominusculePoset, u_mask: int) -> QKClass:
    """Structure constants of O^{s_gamma} * O^u from the closed case
    analysis, independent of the operator composition above."""
    rank = poset.rs.rank
    ju = j_class(poset, u_mask)
    one = GammaElement.from_int(rank, 1)
    out: QKClass = {}

    layer0: KClass = {u_mask: one - ju}
    for w_mask in poset.shape_masks:
        if w_mask == u_mask or u_mask & ~w_mask:
            continue
        body = _closed_layer0(poset, u_mask, w_mask)
        if body is not None:
            layer0[w_mask] = ju * body
    for m, c in layer0.items():
        if not c.is_zero():
            out[m] = QPolynomial(rank, [c])

    for w_mask in poset.shape_masks:
        body = _closed_layer1(poset, u_mask, w_mask)
        if body is None:
            continue
        c = ju * body
        if c.is_zero():
            continue
        cur = out.get(w_mask, QPolynomial.zero(rank))
        out[w_mask] = cur + QPolynomial(rank, [GammaElement.zero(rank), c])
    _prune_qk(out)
    return out
