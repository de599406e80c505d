"""Root systems of the finite types that carry cominuscule flag varieties.

Roots are stored in simple-root coordinates: a root is a tuple of integers
giving its expansion in the simple basis, with Bourbaki numbering throughout.
The Cartan matrices are hard coded per family and every derived quantity
(positive roots, lengths, reflections, pairings) is computed from them with
integer arithmetic only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

RootVector = tuple[int, ...]


class RootSystemError(Exception):
    pass


class UnsupportedType(RootSystemError):
    """Requested (family, rank) is outside the supported list."""


class NotARoot(RootSystemError):
    """A vector expected to be a root of the system is not one."""


class NotInPoset(RootSystemError):
    """A root expected to carry the cominuscule root once does not."""


def _chain_cartan(n: int) -> list[list[int]]:
    cartan = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n - 1):
        cartan[i][i + 1] = -1
        cartan[i + 1][i] = -1
    return cartan


def _cartan_and_symmetrizer(family: str, rank: int) -> tuple[list[list[int]], list[int]]:
    """Cartan matrix ``a[i][j] = <alpha_j, alpha_i^vee>`` and minimal integer
    symmetrizer ``d`` with ``d[i] * a[i][j]`` symmetric."""
    if family == "A" and rank >= 1:
        return _chain_cartan(rank), [1] * rank
    if family == "B" and rank >= 2:
        cartan = _chain_cartan(rank)
        # alpha_n is the short root: <alpha_{n-1}, alpha_n^vee> = -2.
        cartan[rank - 1][rank - 2] = -2
        return cartan, [2] * (rank - 1) + [1]
    if family == "C" and rank >= 2:
        cartan = _chain_cartan(rank)
        # alpha_n is the long root: <alpha_n, alpha_{n-1}^vee> = -2.
        cartan[rank - 2][rank - 1] = -2
        return cartan, [1] * (rank - 1) + [2]
    if family == "D" and rank >= 3:
        cartan = _chain_cartan(rank - 1)
        for row in cartan:
            row.append(0)
        last = [0] * rank
        last[rank - 1] = 2
        cartan.append(last)
        cartan[rank - 3][rank - 1] = -1
        cartan[rank - 1][rank - 3] = -1
        return cartan, [1] * rank
    if family == "E" and rank in (6, 7):
        cartan = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]
        edges = [(1, 3), (3, 4), (4, 5), (5, 6), (2, 4)]
        if rank == 7:
            edges.append((6, 7))
        for i, j in edges:
            cartan[i - 1][j - 1] = -1
            cartan[j - 1][i - 1] = -1
        return cartan, [1] * rank
    raise UnsupportedType(f"no root system of type {family}{rank}")


@dataclass
class RootSystem:
    family: str
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    symmetrizer: tuple[int, ...]
    bilinear: tuple[tuple[int, ...], ...]  # (alpha_i, alpha_j), scaled
    positive_roots: tuple[RootVector, ...]
    cominuscule: int | None = None  # 0-based index of gamma, if assigned
    _root_set: frozenset[RootVector] = field(default=frozenset(), repr=False)
    _norm_cache: dict[RootVector, int] = field(default_factory=dict, repr=False)
    _max_norm: int = 0

    @property
    def simple_roots(self) -> tuple[RootVector, ...]:
        eye = []
        for i in range(self.rank):
            v = [0] * self.rank
            v[i] = 1
            eye.append(tuple(v))
        return tuple(eye)

    def is_root(self, v: RootVector) -> bool:
        return v in self._root_set or tuple(-c for c in v) in self._root_set

    def is_positive_root(self, v: RootVector) -> bool:
        return v in self._root_set

    def inner(self, v: RootVector, w: RootVector) -> int:
        """Scaled invariant form (v, w); integer on the root lattice."""
        total = 0
        bil = self.bilinear
        for i, vi in enumerate(v):
            if not vi:
                continue
            row = bil[i]
            for j, wj in enumerate(w):
                if wj:
                    total += vi * wj * row[j]
        return total

    def norm2(self, alpha: RootVector) -> int:
        cached = self._norm_cache.get(alpha)
        if cached is None:
            cached = self.inner(alpha, alpha)
            self._norm_cache[alpha] = cached
        return cached

    def is_long(self, alpha: RootVector) -> bool:
        if not self.is_root(alpha):
            raise NotARoot(f"{alpha} is not a root of {self.family}{self.rank}")
        return self.norm2(alpha) == self._max_norm

    def is_short(self, alpha: RootVector) -> bool:
        return not self.is_long(alpha)

    def pairing(self, v: RootVector, alpha: RootVector) -> int:
        """Coroot pairing <v, alpha^vee> = 2 (v, alpha) / (alpha, alpha)."""
        if not self.is_root(alpha):
            raise NotARoot(f"{alpha} is not a root of {self.family}{self.rank}")
        num = 2 * self.inner(v, alpha)
        den = self.norm2(alpha)
        q, r = divmod(num, den)
        if r:
            raise NotARoot(f"non-integral pairing of {v} against {alpha}")
        return q

    def reflect(self, v: RootVector, alpha: RootVector) -> RootVector:
        """Reflection s_alpha(v) = v - <v, alpha^vee> alpha."""
        c = self.pairing(v, alpha)
        if c == 0:
            return v
        return tuple(vi - c * ai for vi, ai in zip(v, alpha))

    def reflection_matrix(self, alpha: RootVector) -> tuple[tuple[int, ...], ...]:
        """Matrix of s_alpha acting on simple-root coordinates (columns map
        basis vectors)."""
        cols = [self.reflect(e, alpha) for e in self.simple_roots]
        return tuple(tuple(cols[j][i] for j in range(self.rank)) for i in range(self.rank))

    def weight_pairing(self, gamma_index: int, alpha: RootVector) -> int:
        """<omega, alpha^vee> for the fundamental weight omega of the simple
        root with the given 0-based index.  Equals coeff_gamma(alpha) for long
        alpha and twice that for short alpha (gamma is always long here)."""
        d_gamma = self.symmetrizer[gamma_index]
        num = 2 * alpha[gamma_index] * d_gamma
        den = self.norm2(alpha)
        q, r = divmod(num, den)
        if r:
            raise NotARoot(f"non-integral weight pairing against {alpha}")
        return q

    def comin_pairing(self, alpha: RootVector) -> int:
        """(omega_gamma, alpha^vee) for a root alpha containing gamma once:
        1 when alpha is long, 2 when alpha is short."""
        if self.cominuscule is None:
            raise NotInPoset("root system has no cominuscule root assigned")
        if not self.is_positive_root(alpha) or alpha[self.cominuscule] != 1:
            raise NotInPoset(f"{alpha} does not carry the cominuscule root once")
        return self.weight_pairing(self.cominuscule, alpha)

    def fundamental_weight(self, index: int) -> tuple[Fraction, ...]:
        """omega_index in simple-root coordinates (rational in general)."""
        # Solve cartan x = e_index, since <omega, alpha_i^vee> = sum_j
        # x_j cartan[i][j] must be delta_{i,index}.
        n = self.rank
        mat = [[Fraction(self.cartan[i][j]) for j in range(n)] for i in range(n)]
        rhs = [Fraction(1) if i == index else Fraction(0) for i in range(n)]
        for col in range(n):
            piv = next(r for r in range(col, n) if mat[r][col] != 0)
            mat[col], mat[piv] = mat[piv], mat[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
            inv = 1 / mat[col][col]
            mat[col] = [x * inv for x in mat[col]]
            rhs[col] *= inv
            for r in range(n):
                if r != col and mat[r][col]:
                    f = mat[r][col]
                    mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
                    rhs[r] -= f * rhs[col]
        return tuple(rhs)


def _close_positive_roots(cartan: list[list[int]], rank: int) -> list[RootVector]:
    """Enumerate positive roots by height with the root-string rule: for a
    known root beta, beta + alpha_i is a root iff p - <beta, alpha_i^vee> > 0
    where p is the depth of the alpha_i-string below beta."""
    simple = []
    for i in range(rank):
        v = [0] * rank
        v[i] = 1
        simple.append(tuple(v))
    known: set[RootVector] = set(simple)
    frontier = list(simple)
    while frontier:
        new: list[RootVector] = []
        for beta in frontier:
            for i in range(rank):
                pair = sum(beta[j] * cartan[i][j] for j in range(rank))
                p = 0
                walk = list(beta)
                while True:
                    walk[i] -= 1
                    if tuple(walk) in known:
                        p += 1
                    else:
                        break
                if p - pair > 0:
                    up = list(beta)
                    up[i] += 1
                    cand = tuple(up)
                    if cand not in known:
                        known.add(cand)
                        new.append(cand)
        frontier = new
    return sorted(known, key=lambda v: (sum(v), v))


def build_root_system(family: str, rank: int, cominuscule: int | None = None) -> RootSystem:
    """Build the root system of the given type.

    ``cominuscule`` is the 1-based Bourbaki index of the cominuscule simple
    root; when given, every positive root is checked to contain it with
    coefficient at most one.

    Supported: A_n (n>=1), B_n (n>=2), C_n (n>=2), D_n (n>=3, where D_3 only
    arises as the even quadric of dimension 4), E_6, E_7.
    """
    if not isinstance(rank, int) or rank < 1:
        raise UnsupportedType(f"invalid rank {rank!r}")
    cartan, sym = _cartan_and_symmetrizer(family, rank)
    bilinear = tuple(
        tuple(sym[i] * cartan[i][j] for j in range(rank)) for i in range(rank)
    )
    positives = _close_positive_roots(cartan, rank)
    rs = RootSystem(
        family=family,
        rank=rank,
        cartan=tuple(tuple(row) for row in cartan),
        symmetrizer=tuple(sym),
        bilinear=bilinear,
        positive_roots=tuple(positives),
        _root_set=frozenset(positives),
    )
    rs._max_norm = max(rs.norm2(a) for a in positives)
    if cominuscule is not None:
        g = cominuscule - 1
        if not 0 <= g < rank:
            raise UnsupportedType(f"no simple root with index {cominuscule}")
        for alpha in positives:
            if alpha[g] > 1:
                raise NotInPoset(
                    f"alpha_{cominuscule} is not cominuscule in {family}{rank}"
                )
        rs.cominuscule = g
    return rs


def longest_word(rs: RootSystem, subset: tuple[int, ...] | None = None) -> list[int]:
    """Reduced word (0-based simple indices, first letter applied first) for
    the longest element of the Weyl group generated by ``subset``.

    Computed by driving the subset's strictly dominant weight to the
    antidominant chamber in fundamental-weight coordinates.
    """
    n = rs.rank
    active = tuple(range(n)) if subset is None else subset
    p = [1 if i in active else 0 for i in range(n)]
    word: list[int] = []
    while True:
        i = next((i for i in active if p[i] > 0), None)
        if i is None:
            return word
        pi = p[i]
        for j in range(n):
            p[j] -= pi * rs.cartan[j][i]
        word.append(i)


def word_matrix(rs: RootSystem, word: list[int]) -> tuple[tuple[int, ...], ...]:
    """Matrix of the Weyl element with the given word, first letter applied
    first, acting on simple-root coordinates."""
    mat = _identity(rs.rank)
    for i in word:
        refl = rs.reflection_matrix(rs.simple_roots[i])
        mat = mat_mult(refl, mat)
    return mat


def _identity(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mult(a: tuple[tuple[int, ...], ...], b: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    n = len(a)
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_apply(mat: tuple[tuple[int, ...], ...], v: RootVector) -> RootVector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in mat)


# epsilon-coordinate conversion for the classical families; used for I/O only.

def eps_basis(rs: RootSystem) -> list[list[Fraction]] | None:
    """Columns give simple roots in the epsilon basis of the family, or None
    for the exceptional types."""
    n = rs.rank
    if rs.family == "A":
        cols = []
        for i in range(n):
            col = [Fraction(0)] * (n + 1)
            col[i] = Fraction(1)
            col[i + 1] = Fraction(-1)
            cols.append(col)
        return cols
    if rs.family in ("B", "C", "D"):
        cols = []
        for i in range(n - 1):
            col = [Fraction(0)] * n
            col[i] = Fraction(1)
            col[i + 1] = Fraction(-1)
            cols.append(col)
        last = [Fraction(0)] * n
        if rs.family == "B":
            last[n - 1] = Fraction(1)
        elif rs.family == "C":
            last[n - 1] = Fraction(2)
        else:
            last[n - 2] = Fraction(1)
            last[n - 1] = Fraction(1)
        cols.append(last)
        return cols
    return None


def root_to_eps(rs: RootSystem, v: RootVector) -> list[Fraction]:
    basis = eps_basis(rs)
    if basis is None:
        raise UnsupportedType("no epsilon coordinates for exceptional types")
    dim = len(basis[0])
    out = [Fraction(0)] * dim
    for coeff, col in zip(v, basis):
        if coeff:
            for i in range(dim):
                out[i] += coeff * col[i]
    return out


def eps_to_root(rs: RootSystem, eps: dict[int, int | Fraction]) -> RootVector:
    """Convert epsilon-coordinates {1-based index: coefficient} to
    simple-root coordinates; raises NotARoot if not in the root lattice."""
    basis = eps_basis(rs)
    if basis is None:
        raise UnsupportedType("no epsilon coordinates for exceptional types")
    dim = len(basis[0])
    target = [Fraction(0)] * dim
    for idx, coeff in eps.items():
        if not 1 <= idx <= dim:
            raise NotARoot(f"epsilon index {idx} out of range")
        target[idx - 1] += Fraction(coeff)
    # Solve basis * c = target by elimination over the rationals.
    rows = [[basis[j][i] for j in range(rs.rank)] + [target[i]] for i in range(dim)]
    coeffs: list[Fraction] = [Fraction(0)] * rs.rank
    row = 0
    pivots = []
    for col in range(rs.rank):
        piv = next((r for r in range(row, dim) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[row], rows[piv] = rows[piv], rows[row]
        inv = 1 / rows[row][col]
        rows[row] = [x * inv for x in rows[row]]
        for r in range(dim):
            if r != row and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[row])]
        pivots.append(col)
        row += 1
    for r in range(row, dim):
        if rows[r][rs.rank] != 0:
            raise NotARoot(f"{dict(eps)} is not in the root lattice")
    for r, col in enumerate(pivots):
        coeffs[col] = rows[r][rs.rank]
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise NotARoot(f"{dict(eps)} is not in the root lattice")
        out.append(int(c))
    return tuple(out)
