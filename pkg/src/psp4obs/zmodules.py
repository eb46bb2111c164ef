"""Free Z-modules with a right action of a permutation group.

A module is given by one integer matrix per group generator, acting on row
vectors from the right, so the matrix of a product ``g h`` (first ``g``,
then ``h``) is ``M(g) M(h)``.  Matrices for arbitrary elements are
obtained by expressing the element as a word in the generators through the
group's stabiliser chain; since the group is finite, all such products
land in a fixed finite set of matrices and never overflow.

The module file format is line-oriented plain text:

    gmodule rank=<n> gens=<k>
    matrix 1
    <n rows of n integers>
    ...
    matrix k
    <n rows of n integers>

with matrices aligned to the generator list of the group supplied at load
time.  An invariant pairing uses the header ``pairing rank=<n>`` followed
by one symmetric block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import intlinalg
from .permgroups import PermGroup, is_identity, porder


def _as_matrix(m, rank):
    a = np.asarray(m)
    if a.shape != (rank, rank):
        raise ValueError(f"expected a {rank} x {rank} matrix, got {a.shape}")
    return intlinalg.as_int_array(a)


@dataclass
class GIntModule:
    """An integral representation of ``group`` on row vectors of Z^rank."""

    group: PermGroup
    gens: tuple
    rank: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.gens) != len(self.group.generators):
            raise ValueError(
                f"{len(self.gens)} matrices for "
                f"{len(self.group.generators)} group generators")
        self.gens = tuple(_as_matrix(g, self.rank) for g in self.gens)

    # -- evaluation --------------------------------------------------------

    def _gen_inverses(self):
        if 'gen_invs' not in self._cache:
            self._cache['gen_invs'] = tuple(
                intlinalg.unimodular_inverse(g) for g in self.gens)
        return self._cache['gen_invs']

    def identity_matrix(self):
        return intlinalg.identity(self.rank)

    def evaluate_word(self, word):
        """Matrix of a word ((gen_index, +-1), ...) over the generators."""
        invs = self._gen_inverses()
        out = self.identity_matrix()
        for idx, e in word:
            factor = self.gens[idx] if e == 1 else invs[idx]
            out = intlinalg.mat_mul(out, factor)
        return out

    def matrix_of(self, p):
        """Matrix of a group element, via its word in the generators."""
        key = tuple(p)
        cache = self._cache.setdefault('mats', {})
        if key not in cache:
            cache[key] = self.evaluate_word(self.group.express(key))
        return cache[key]

    def act(self, vectors, p):
        return intlinalg.mat_mul(np.atleast_2d(intlinalg.as_int_array(
            np.asarray(vectors))), self.matrix_of(p))

    # -- derived modules ---------------------------------------------------

    def character(self) -> tuple:
        """Trace of the action on each conjugacy class, canonical order."""
        return tuple(int(np.trace(self.matrix_of(rep)))
                     for rep, _ in self.group.conjugacy_classes())

    def dual(self) -> "GIntModule":
        """The contragredient module (inverse-transpose matrices)."""
        mats = tuple(np.ascontiguousarray(inv.T)
                     for inv in self._gen_inverses())
        return GIntModule(self.group, mats, self.rank)

    def restrict(self, subgroup: PermGroup) -> "GIntModule":
        """The same space as a module over a subgroup."""
        mats = tuple(self.matrix_of(g) for g in subgroup.generators)
        return GIntModule(subgroup, mats, self.rank)

    # -- validation --------------------------------------------------------

    def validate(self):
        """Raise ValueError unless the matrices define a homomorphism.

        Checks that every generator matrix is unimodular and that every
        relator of the group's presentation evaluates to the identity,
        which certifies the assignment extends to the whole group.
        """
        for i, g in enumerate(self.gens):
            d = intlinalg.det(g)
            if d not in (1, -1):
                raise ValueError(f"generator {i} has determinant {d}")
        pres = self.group.presentation()
        sgen_mats = [self.evaluate_word(w) for w in pres.gen_words]
        sgen_invs = [intlinalg.unimodular_inverse(m) for m in sgen_mats]
        ident = self.identity_matrix()
        for r, rel in enumerate(pres.relators):
            out = ident
            for idx, e in rel:
                out = intlinalg.mat_mul(
                    out, sgen_mats[idx] if e == 1 else sgen_invs[idx])
            if not np.array_equal(np.asarray(out, dtype=object),
                                  np.asarray(ident, dtype=object)):
                raise ValueError(f"relator {r} does not act trivially")


def perm_module(group: PermGroup, action_perms) -> GIntModule:
    """Permutation module for an action aligned with ``group.generators``.

    ``action_perms[i]`` is the permutation of basis indices induced by the
    i-th generator; basis vector ``e_r`` is sent to ``e_{sigma(r)}``.
    """
    action_perms = [tuple(s) for s in action_perms]
    if len(action_perms) != len(group.generators):
        raise ValueError("one action permutation per group generator")
    npts = len(action_perms[0]) if action_perms else 0
    mats = []
    for s in action_perms:
        m = np.zeros((npts, npts), dtype=np.int64)
        m[np.arange(npts), np.asarray(s)] = 1
        mats.append(m)
    return GIntModule(group, tuple(mats), npts)


def direct_sum(a: GIntModule, b: GIntModule) -> GIntModule:
    """Block-diagonal sum of two modules over the same group."""
    if a.group is not b.group:
        raise ValueError("modules must share the same group object")
    mats = []
    for ga, gb in zip(a.gens, b.gens):
        m = np.zeros((a.rank + b.rank, a.rank + b.rank), dtype=np.int64)
        m[:a.rank, :a.rank] = ga
        m[a.rank:, a.rank:] = gb
        mats.append(m)
    return GIntModule(a.group, tuple(mats), a.rank + b.rank)


def invariant_kernel(module: GIntModule, pairing) -> np.ndarray:
    """Saturated sublattice pairing to zero with everything.

    ``pairing`` is a symmetric integer matrix; the result is an HNF basis
    of ``{v : v . pairing = 0}``, which is a submodule whenever the pairing
    is invariant.
    """
    p = _as_matrix(pairing, module.rank)
    return intlinalg.kernel_saturated(p)


def quotient_by_radical(module: GIntModule, radical) -> GIntModule:
    """Quotient of the module by a saturated invariant sublattice.

    ``radical`` is a matrix whose rows span a saturated submodule; the
    quotient is then free and the induced action is returned on a
    complementary basis (the trailing block of an SNF change of basis).
    Raises if the rows are not saturated or not invariant.
    """
    radical = np.atleast_2d(np.asarray(radical))
    k = len(radical)
    if k == 0:
        return module
    s, _u, v = intlinalg.snf(radical)
    diag = intlinalg.smith_diagonal(s)
    if len(diag) != k or any(d != 1 for d in diag):
        raise ValueError("radical rows are dependent or not saturated")
    # S = U R V with S = [I_k | 0], so the radical spans the top k rows
    # of V^-1.  The complementary rows coming straight out of the Smith
    # computation can have enormous entries; put them in HNF and reduce
    # them modulo the radical (both are determinant-preserving row
    # operations) to keep the induced action small.
    rad = np.asarray(intlinalg.hnf_basis(radical))
    comp = np.asarray(intlinalg.unimodular_inverse(v))[k:]
    comp = np.asarray(intlinalg.hnf(comp)[0][:module.rank - k])
    comp = comp.astype(object)
    for r in rad:
        p = next(j for j in range(module.rank) if r[j] != 0)
        piv = int(r[p])
        q = (comp[:, p] + piv // 2) // piv
        comp = comp - np.outer(q, r.astype(object))
    basis = intlinalg.as_int_array(np.vstack([rad.astype(object),
                                              comp]))
    basis_inv = np.asarray(intlinalg.unimodular_inverse(basis))
    quot = []
    for i, g in enumerate(module.gens):
        c = np.asarray(intlinalg.mat_mul(intlinalg.mat_mul(basis, g),
                                         basis_inv))
        if np.any(c[:k, k:] != 0):
            raise ValueError(f"radical is not invariant under generator {i}")
        quot.append(intlinalg.as_int_array(c[k:, k:]))
    return GIntModule(module.group, tuple(quot), module.rank - k)


def quotient_by_pairing(module: GIntModule, pairing) -> GIntModule:
    """Quotient of the module by the radical of an invariant pairing.

    The pairing must satisfy M(g) . P . M(g)^T = P for every generator;
    its radical is then a saturated submodule and the quotient is again
    free, with the induced action returned on a complementary basis.
    """
    p = _as_matrix(pairing, module.rank)
    if not np.array_equal(p, p.T):
        raise ValueError("pairing is not symmetric")
    for i, g in enumerate(module.gens):
        lhs = intlinalg.mat_mul(intlinalg.mat_mul(g, p),
                                np.ascontiguousarray(g.T))
        if not np.array_equal(np.asarray(lhs, dtype=object),
                              np.asarray(p, dtype=object)):
            raise ValueError(f"pairing is not invariant under generator {i}")
    radical = intlinalg.kernel_saturated(p)
    if len(radical) == 0:
        return module
    return quotient_by_radical(module, radical)


# ---------------------------------------------------------------------------
# text formats


def _write_matrix(fh, mat):
    for row in np.asarray(mat):
        fh.write(" ".join(str(int(x)) for x in row))
        fh.write("\n")


def _read_matrix(lines, pos, rank):
    rows = []
    for i in range(rank):
        rows.append([int(x) for x in lines[pos + i].split()])
        if len(rows[-1]) != rank:
            raise ValueError(f"line {pos + i + 1}: expected {rank} entries")
    return np.array(rows, dtype=np.int64), pos + rank


def save_module(module: GIntModule, path):
    with open(path, "w") as fh:
        fh.write(f"gmodule rank={module.rank} gens={len(module.gens)}\n")
        for i, g in enumerate(module.gens):
            fh.write(f"matrix {i + 1}\n")
            _write_matrix(fh, g)


def check_character(module: GIntModule):
    """Reject a rank-61 module over PSp4(3) whose character is wrong.

    The target is pi_40 + pi_45 - chi_24; a mismatch is reported with the
    offending conjugacy class.  Modules of other ranks, or over other
    groups, are left alone.
    """
    from . import sp4f3
    if (module.rank != 61 or module.group.degree != 40
            or module.group.order != sp4f3.PSP4_ORDER):
        return
    model = sp4f3.standard_model()
    for j, (rep, size) in enumerate(module.group.conjugacy_classes()):
        want = sp4f3.picard_character_at(model, rep)
        got = int(np.trace(np.asarray(module.matrix_of(rep))))
        if got != want:
            raise ValueError(
                f"character mismatch at class {j} (element order "
                f"{porder(rep)}, size {size}): trace {got}, expected {want}")


def load_module(path, group: PermGroup) -> GIntModule:
    """Load and fully validate a module file.

    Validation covers unimodularity and the group relators; rank-61
    modules over the canonical degree-40 copy of PSp4(3) must additionally
    have character pi_40 + pi_45 - chi_24.
    """
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    head = lines[0].split()
    if head[0] != "gmodule":
        raise ValueError(f"not a gmodule file: {lines[0]!r}")
    fields = dict(kv.split("=") for kv in head[1:])
    rank, ngens = int(fields["rank"]), int(fields["gens"])
    if ngens != len(group.generators):
        raise ValueError(f"file has {ngens} matrices but the group has "
                         f"{len(group.generators)} generators")
    mats = []
    pos = 1
    for i in range(ngens):
        if lines[pos] != f"matrix {i + 1}":
            raise ValueError(f"line {pos + 1}: expected 'matrix {i + 1}'")
        m, pos = _read_matrix(lines, pos + 1, rank)
        mats.append(m)
    module = GIntModule(group, tuple(mats), rank)
    module.validate()
    check_character(module)
    return module


def save_pairing(pairing, path):
    pairing = np.asarray(pairing)
    with open(path, "w") as fh:
        fh.write(f"pairing rank={pairing.shape[0]}\n")
        _write_matrix(fh, pairing)


def load_pairing(path) -> np.ndarray:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    head = lines[0].split()
    if head[0] != "pairing":
        raise ValueError(f"not a pairing file: {lines[0]!r}")
    rank = int(dict(kv.split("=") for kv in head[1:])["rank"])
    mat, _ = _read_matrix(lines, 1, rank)
    if not np.array_equal(mat, mat.T):
        raise ValueError("pairing is not symmetric")
    return mat
