"""The symplectic group Sp4(F3), its quotient PSp4(F3), and their actions.

Conventions
-----------
Vectors in F3^4 are row vectors and matrices act on the right, so that the
matrix product evaluates left-to-right like permutation composition.  The
symplectic form is the antidiagonal one,

    <x, y> = x1 y4 + x2 y3 - x3 y2 - x4 y1,

and ``M`` is symplectic when ``M J M^T = J`` for the Gram matrix ``J`` of
the form.  The group is generated by symplectic transvections

    t_v : x  |->  x + <x, v> v,

one for each projective vector ``v``; a deterministic prefix of the
projective vectors suffices and is found by trying prefixes until the
group order reaches ``|Sp4(3)| = 51840``.

Three permutation models are built with compatible generator lists:

* degree 80, on the nonzero vectors (faithful for Sp4(3));
* degree 40, on the projective points (faithful for PSp4(3)); this is the
  canonical copy of the simple group of order 25920 used everywhere else;
* degree 40, on the 40 totally isotropic lines, and degree 45, on the
  unordered pairs ``{W, W^perp}`` of nondegenerate 2-spaces.

The commuting graph on projective points (orthogonal distinct points
adjacent) is strongly regular with parameters (40, 12, 2, 4) and
eigenvalues 12, 2, -4 of multiplicities 1, 24, 15.  Projecting a
permutation matrix onto the 24-dimensional eigenspace gives exact values
of the irreducible degree-24 character; the projector has entries in
(1/60) Z, and all traces come out integral, which is asserted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

import numpy as np

from .permgroups import PermGroup, pident, word_evaluate

SP4_ORDER = 51840
PSP4_ORDER = 25920

# Gram matrix of the form <x,y> = x1 y4 + x2 y3 - x3 y2 - x4 y1
J_FORM = ((0, 0, 0, 1),
          (0, 0, 1, 0),
          (0, 2, 0, 0),
          (2, 0, 0, 0))


# ---------------------------------------------------------------------------
# arithmetic in F3


def mat_mul3(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(4)) % 3
                       for j in range(4)) for i in range(4))


def mat_transpose(a):
    return tuple(tuple(a[j][i] for j in range(4)) for i in range(4))


def mat_neg(a):
    return tuple(tuple((-x) % 3 for x in row) for row in a)


MAT_ID = tuple(tuple(int(i == j) for j in range(4)) for i in range(4))


def vec_mul3(v, m):
    return tuple(sum(v[i] * m[i][j] for i in range(4)) % 3 for j in range(4))


def form(x, y):
    return (x[0] * y[3] + x[1] * y[2] - x[2] * y[1] - x[3] * y[0]) % 3


def is_symplectic(m) -> bool:
    mt = mat_transpose(m)
    return mat_mul3(mat_mul3(m, J_FORM), mt) == J_FORM


def transvection(v):
    """Matrix of t_v : x |-> x + <x, v> v (row-action convention)."""
    rows = []
    for i in range(4):
        e = tuple(int(k == i) for k in range(4))
        c = form(e, v)
        rows.append(tuple((e[j] + c * v[j]) % 3 for j in range(4)))
    return tuple(rows)


# ---------------------------------------------------------------------------
# vectors, points and subspaces

ALL_VECS = [v for v in itertools.product(range(3), repeat=4)]
NONZERO_VECS = [v for v in ALL_VECS if any(v)]
VEC_INDEX = {v: i for i, v in enumerate(NONZERO_VECS)}


def normalize_point(v):
    """The projective representative whose first nonzero entry is 1."""
    lead = next(x for x in v if x)
    scale = 1 if lead == 1 else 2
    return tuple((scale * x) % 3 for x in v)


POINTS = sorted({normalize_point(v) for v in NONZERO_VECS})
POINT_INDEX = {v: i for i, v in enumerate(POINTS)}
assert len(POINTS) == 40


def _span_points(v, w):
    """All projective points of the plane spanned by independent v, w."""
    pts = set()
    for a in range(3):
        for b in range(3):
            x = tuple((a * v[i] + b * w[i]) % 3 for i in range(4))
            if any(x):
                pts.add(POINT_INDEX[normalize_point(x)])
    return tuple(sorted(pts))


def _enumerate_planes():
    planes = {}
    for i, j in itertools.combinations(range(40), 2):
        key = _span_points(POINTS[i], POINTS[j])
        if len(key) == 4 and key not in planes:
            planes[key] = None
    return sorted(planes)


PLANES = _enumerate_planes()
assert len(PLANES) == 130


def _plane_is_isotropic(plane):
    pts = [POINTS[i] for i in plane]
    return all(form(x, y) == 0 for x, y in itertools.combinations(pts, 2))


ISOTROPIC_LINES = [p for p in PLANES if _plane_is_isotropic(p)]
assert len(ISOTROPIC_LINES) == 40
LINE_INDEX = {p: i for i, p in enumerate(ISOTROPIC_LINES)}


def _perp_plane(plane):
    basis = [POINTS[plane[0]], POINTS[plane[1]]]
    perp = tuple(sorted(i for i in range(40)
                        if all(form(POINTS[i], b) == 0 for b in basis)))
    return perp


def _enumerate_pairs():
    pairs = []
    seen = set()
    for p in PLANES:
        if _plane_is_isotropic(p):
            continue
        q = _perp_plane(p)
        assert len(q) == 4 and not _plane_is_isotropic(q)
        key = tuple(sorted((p, q)))
        if key not in seen:
            seen.add(key)
            pairs.append(key)
    return pairs


PERP_PAIRS = _enumerate_pairs()
assert len(PERP_PAIRS) == 45
PAIR_INDEX = {p: i for i, p in enumerate(PERP_PAIRS)}


# ---------------------------------------------------------------------------
# matrices to permutations


def vector_perm(m):
    return tuple(VEC_INDEX[vec_mul3(v, m)] for v in NONZERO_VECS)


def point_perm(m):
    return tuple(POINT_INDEX[normalize_point(vec_mul3(v, m))] for v in POINTS)


def _image_plane(plane, pperm):
    return tuple(sorted(pperm[i] for i in plane))


def line_perm_from_point_perm(pperm):
    return tuple(LINE_INDEX[_image_plane(p, pperm)] for p in ISOTROPIC_LINES)


def pair_perm_from_point_perm(pperm):
    out = []
    for p, q in PERP_PAIRS:
        key = tuple(sorted((_image_plane(p, pperm), _image_plane(q, pperm))))
        out.append(PAIR_INDEX[key])
    return tuple(out)


# ---------------------------------------------------------------------------
# the model


@dataclass
class SymplecticModel:
    """Sp4(F3) with its standard actions, built by :func:`build_sp4`."""

    gen_matrices: list
    sp80: PermGroup
    psp: PermGroup            # canonical PSp4(3): action on projective points
    line_action: PermGroup    # same generators acting on isotropic lines
    pair_action: PermGroup    # same generators acting on perp pairs
    _lift_cache: dict = field(default_factory=dict, repr=False)

    def lift_to_sp(self, perm):
        """A symplectic matrix mapping to the given point permutation.

        The lift is unique up to sign; the representative whose first
        nonzero entry (row-major) equals 1 is returned, so the map is
        deterministic.
        """
        perm = tuple(perm)
        if perm in self._lift_cache:
            return self._lift_cache[perm]
        word = self.psp.express(perm)
        if word is None:
            raise ValueError("permutation is not in PSp4(3)")
        m = MAT_ID
        for i, e in word:
            g = self.gen_matrices[i]
            if e < 0:
                g = _mat_inv3(g)
            m = mat_mul3(m, g)
        m = _canonical_sign(m)
        assert point_perm(m) == perm
        self._lift_cache[perm] = m
        return m

    def to_line_action(self, perm):
        """Transport a point permutation to the isotropic-line action."""
        word = self.psp.express(tuple(perm))
        return word_evaluate(word, self.line_action.generators)

    def to_pair_action(self, perm):
        word = self.psp.express(tuple(perm))
        return word_evaluate(word, self.pair_action.generators)


def _mat_inv3(m):
    # power trick: the matrix group has exponent dividing |Sp4(3)|
    out = MAT_ID
    cur = m
    # order of any element divides 51840; use repeated squaring on order-1
    k = SP4_ORDER - 1
    while k:
        if k & 1:
            out = mat_mul3(out, cur)
        cur = mat_mul3(cur, cur)
        k >>= 1
    assert mat_mul3(out, m) == MAT_ID
    return out


def _canonical_sign(m):
    for row in m:
        for x in row:
            if x:
                return m if x == 1 else mat_neg(m)
    raise ValueError("zero matrix")


def build_sp4() -> SymplecticModel:
    """Build the model deterministically from transvection generators."""
    gens = []
    group = PermGroup([], 80)
    for v in POINTS:
        m = transvection(v)
        assert is_symplectic(m)
        if vector_perm(m) in group:
            continue
        gens.append(m)
        group = PermGroup([vector_perm(g) for g in gens], 80)
        if group.order == SP4_ORDER:
            break
    else:  # pragma: no cover
        raise RuntimeError("transvections failed to generate Sp4(3)")
    point_gens = [point_perm(g) for g in gens]
    psp = PermGroup(point_gens, 40)
    assert psp.order == PSP4_ORDER
    neg = vector_perm(mat_neg(MAT_ID))
    assert neg in group
    line = PermGroup([line_perm_from_point_perm(p) for p in point_gens], 40)
    pair = PermGroup([pair_perm_from_point_perm(p) for p in point_gens], 45)
    assert line.order == PSP4_ORDER and pair.order == PSP4_ORDER
    return SymplecticModel(gens, group, psp, line, pair)


_MODEL = None


def standard_model() -> SymplecticModel:
    """The process-wide shared model (build_sp4 is deterministic)."""
    global _MODEL
    if _MODEL is None:
        _MODEL = build_sp4()
    return _MODEL


# ---------------------------------------------------------------------------
# the commuting graph and the degree-24 character


def srg_adjacency() -> np.ndarray:
    """Adjacency matrix of the orthogonality graph on projective points.

    Strongly regular with parameters (40, 12, 2, 4).
    """
    a = np.zeros((40, 40), dtype=np.int64)
    for i in range(40):
        for j in range(40):
            if i != j and form(POINTS[i], POINTS[j]) == 0:
                a[i, j] = 1
    assert (a.sum(axis=1) == 12).all()
    return a


def _projector_numerator():
    """60 * (projector onto the eigenvalue-2 eigenspace), an integer matrix.

    The spectrum of the (40,12,2,4) graph is 12, 2, -4 with multiplicities
    1, 24, 15, so (A - 12)(A + 4) / ((2-12)(2+4)) projects onto the
    24-dimensional eigenspace.
    """
    a = srg_adjacency()
    i40 = np.eye(40, dtype=np.int64)
    b = (a - 12 * i40) @ (a + 4 * i40)
    assert np.trace(b) == 24 * (2 - 12) * (2 + 4)
    return b


@dataclass(frozen=True)
class ClassFunction:
    """Exact values of a class function, aligned with conjugacy_classes()."""

    values: tuple

    def __getitem__(self, i):
        return self.values[i]

    def inner(self, other: "ClassFunction", sizes, group_order) -> Fraction:
        """<f, g> = (1/|G|) * sum |class| f g  (real-valued functions)."""
        s = sum(Fraction(sz) * a * b
                for sz, a, b in zip(sizes, self.values, other.values))
        return s / group_order


def chi24(model: SymplecticModel, perm) -> int:
    """Value of the degree-24 irreducible character at a point permutation."""
    b = _chi24_numerator_cached()
    perm = np.asarray(perm, dtype=np.int64)
    t = int(b[perm, np.arange(40)].sum())
    num = -t  # divide by (2-12)(2+4) = -60
    assert num % 60 == 0, "projector trace must be integral"
    return num // 60


_CHI24_NUM = None


def _chi24_numerator_cached():
    global _CHI24_NUM
    if _CHI24_NUM is None:
        _CHI24_NUM = _projector_numerator()
    return _CHI24_NUM


def chi24_classfunction(model: SymplecticModel) -> ClassFunction:
    reps = [rep for rep, _ in model.psp.conjugacy_classes()]
    return ClassFunction(tuple(chi24(model, r) for r in reps))


def fixed_points(perm) -> int:
    return sum(1 for i, x in enumerate(perm) if i == x)


def perm_classfunction(model: SymplecticModel, transport) -> ClassFunction:
    """Permutation character of an action given by a transport map."""
    reps = [rep for rep, _ in model.psp.conjugacy_classes()]
    return ClassFunction(tuple(fixed_points(transport(r)) for r in reps))


def picard_character_at(model: SymplecticModel, perm) -> int:
    """Value of pi_40 + pi_45 - chi_24 at a point permutation.

    This is the character of the rank-61 module cut out of the direct sum
    of the two natural permutation modules; any candidate for that module
    must match it classwise.
    """
    return (fixed_points(perm) + fixed_points(model.to_pair_action(perm))
            - chi24(model, perm))


def picard_character(model: SymplecticModel) -> ClassFunction:
    reps = [rep for rep, _ in model.psp.conjugacy_classes()]
    return ClassFunction(tuple(picard_character_at(model, r) for r in reps))


# ---------------------------------------------------------------------------
# absolute irreducibility of subgroups of PSp4(3) on F3^4


def _invariant_line_exists(mats):
    for v in POINTS:
        if all(normalize_point(vec_mul3(v, m)) == v for m in mats):
            return True
    return False


def _invariant_plane_exists(mats):
    for plane in PLANES:
        base = [POINTS[plane[0]], POINTS[plane[1]]]
        ok = True
        for m in mats:
            for v in base:
                if POINT_INDEX[normalize_point(vec_mul3(v, m))] not in plane:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def _endomorphism_dimension(mats) -> int:
    """F3-dimension of the commutant {X : X M = M X for all M}."""
    rows = []
    for m in mats:
        marr = np.array(m, dtype=np.int64)
        for i in range(4):
            for j in range(4):
                # (X M - M X)[i, j] as a linear form in X entries
                row = np.zeros((4, 4), dtype=np.int64)
                row[i, :] += marr[:, j]
                row[:, j] -= marr[i, :]
                rows.append(row.reshape(16) % 3)
    a = np.array(rows, dtype=np.int64) % 3
    return 16 - _rank_mod3(a)


def _rank_mod3(a) -> int:
    a = a.copy() % 3
    m, n = a.shape
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if a[i, c] % 3:
                piv = i
                break
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        inv = 1 if a[r, c] % 3 == 1 else 2
        a[r] = (a[r] * inv) % 3
        for i in range(m):
            if i != r and a[i, c] % 3:
                a[i] = (a[i] - a[i, c] * a[r]) % 3
        r += 1
        if r == m:
            break
    return r


def is_absolutely_irreducible(model: SymplecticModel, subgroup: PermGroup) -> bool:
    """Does the subgroup of PSp4(3) act absolutely irreducibly on F3^4?

    The preimage in Sp4(3) is used (invariant subspaces and the commutant
    do not depend on the sign of the lift).  Absolute irreducibility over
    an extension of F3 is equivalent to irreducibility over F3 together
    with a one-dimensional commutant.
    """
    mats = [model.lift_to_sp(g) for g in subgroup.generators
            if not all(i == x for i, x in enumerate(g))]
    if not mats:
        return False
    if _invariant_line_exists(mats) or _invariant_plane_exists(mats):
        return False
    # invariant 3-spaces correspond to invariant lines of the dual action
    duals = [mat_transpose(_mat_inv3(m)) for m in mats]
    if _invariant_line_exists(duals):
        return False
    return _endomorphism_dimension(mats) == 1
