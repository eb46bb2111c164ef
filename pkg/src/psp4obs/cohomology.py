"""First integral cohomology of finite groups acting on free Z-modules.

For a finite group H acting on M = Z^n (rows, right action), a 1-cocycle
is a map c: H -> M with c(gh) = c(g) M(h) + c(h), and coboundaries are
c_m(g) = m (M(g) - 1).  Since H is finite and M is torsion-free, H^1(H, M)
is a finite abelian group.

The computation works on a Sims presentation of H coming from its
stabiliser chain: an unknown vector per presentation generator, and one
linear system per relator, obtained by expanding the cocycle rule along
the relator word with suffix products (which are matrices of honest group
elements, so entries stay bounded).  The cocycle lattice Z^1 is the
integral kernel of the stacked systems, accumulated relator by relator;
because H^1(H, M tensor Q) = 0, the kernel's rank is known in advance to
be n minus the rank of the invariants M^H, and processing stops as soon
as the accumulated kernel reaches that rank: any remaining relator
equations vanish on the saturated kernel automatically.  Finally
H^1 = Z^1 / B^1 via Smith reduction of coboundary coordinates.

A bar-resolution brute force (unknowns indexed by all nontrivial group
elements) is provided for cross-checking on very small inputs.
"""

from __future__ import annotations

import numpy as np

from . import intlinalg
from .intlinalg import AbelianInvariants, TRIVIAL_GROUP
from .permgroups import pmul
from .zmodules import GIntModule

BRUTE_FORCE_MAX_ORDER = 16
BRUTE_FORCE_MAX_CELLS = 200_000


def invariants_basis(module: GIntModule) -> np.ndarray:
    """HNF basis of the fixed sublattice M^H = {v : v M(g) = v}."""
    if not module.gens:
        return np.asarray(intlinalg.identity(module.rank))
    blocks = [np.asarray(g) - np.asarray(intlinalg.identity(module.rank))
              for g in module.gens]
    return intlinalg.kernel_saturated(np.hstack(blocks))


def h0(module: GIntModule) -> int:
    """Rank of the invariants M^H."""
    return len(invariants_basis(module))


def _word_system(rel, sgen_mats, sgen_invs, n, k):
    """Coefficient block of the relator equation c(rel) = 0.

    Returns a (k n) x n integer matrix B with the equation x B = 0, where
    x is the concatenation of the unknown rows c(s_1) ... c(s_k).
    """
    pieces = []  # (generator index, +-1, matrix)
    suffix = None  # identity so far
    for idx, e in reversed(rel):
        if e == 1:
            if suffix is None:
                pieces.append((idx, 1, np.eye(n, dtype=np.int64)))
                suffix = np.asarray(sgen_mats[idx])
            else:
                pieces.append((idx, 1, suffix))
                suffix = np.asarray(
                    intlinalg.mat_mul(sgen_mats[idx], suffix))
        else:
            # c(s^-1) = -c(s) M(s)^-1, and the new suffix product equals
            # the same matrix M(s)^-1 M(suffix)
            suffix = np.asarray(intlinalg.mat_mul(
                sgen_invs[idx], suffix)) if suffix is not None \
                else np.asarray(sgen_invs[idx])
            pieces.append((idx, -1, suffix))
    dtype = object if any(p[2].dtype == object for p in pieces) else np.int64
    block = np.zeros((k * n, n), dtype=dtype)
    for idx, sign, mat in pieces:
        if sign == 1:
            block[idx * n:(idx + 1) * n, :] += mat
        else:
            block[idx * n:(idx + 1) * n, :] -= mat
    return block


def _quotient_mod_coboundaries(z1, cob_rows) -> AbelianInvariants:
    if len(z1) == 0:
        return TRIVIAL_GROUP
    coords = []
    for row in cob_rows:
        c = intlinalg.solve_in_lattice(z1, row)
        assert c is not None, "coboundary outside the cocycle lattice"
        coords.append(c)
    inv = intlinalg.quotient_invariants(len(z1), np.array(coords,
                                                          dtype=object))
    assert inv.free_rank == 0, "H^1 of a finite group must be finite"
    return inv


def h1(module: GIntModule) -> AbelianInvariants:
    """H^1(H, M) as a finite abelian group (divisor-chain invariants)."""
    group = module.group
    n = module.rank
    if group.order == 1 or n == 0:
        return TRIVIAL_GROUP
    pres = group.presentation()
    k = pres.ngens
    sgen_mats = [np.asarray(module.evaluate_word(w)) for w in pres.gen_words]
    sgen_invs = [np.asarray(intlinalg.unimodular_inverse(m))
                 for m in sgen_mats]
    target = n - h0(module)
    acc = intlinalg.KernelAccumulator(k * n)
    for rel in pres.relators:
        acc.add_block(_word_system(rel, sgen_mats, sgen_invs, n, k))
        if acc.corank == target:
            break
    assert acc.corank == target, (
        f"cocycle rank {acc.corank} differs from expected {target}")
    z1 = acc.kernel()
    ident = np.eye(n, dtype=np.int64)
    cob = np.hstack([m - ident for m in sgen_mats])
    return _quotient_mod_coboundaries(z1, list(cob))


def h1_bruteforce(module: GIntModule) -> AbelianInvariants:
    """H^1 from the bar resolution; only for very small groups.

    Unknowns are c(h) for every nontrivial h, and every pair (g, h) gives
    the equation c(gh) = c(g) M(h) + c(h).  Serves as an oracle for
    :func:`h1`.
    """
    group = module.group
    n = module.rank
    m = group.order
    if m > BRUTE_FORCE_MAX_ORDER or n * m * m > BRUTE_FORCE_MAX_CELLS:
        raise ValueError("group or module too large for the brute force")
    if m == 1 or n == 0:
        return TRIVIAL_GROUP
    elems = [tuple(r) for r in group.element_table().table]
    nontriv = elems[1:]
    pos = {h: i for i, h in enumerate(nontriv)}
    mats = {h: np.asarray(module.matrix_of(h)) for h in elems}
    ident = np.eye(n, dtype=np.int64)
    acc = intlinalg.KernelAccumulator((m - 1) * n)
    for g in nontriv:
        for h in nontriv:
            gh = pmul(g, h)
            block = np.zeros(((m - 1) * n, n), dtype=np.int64)
            if gh in pos:
                i = pos[gh]
                block[i * n:(i + 1) * n] += ident
            i = pos[g]
            block[i * n:(i + 1) * n] -= mats[h]
            i = pos[h]
            block[i * n:(i + 1) * n] -= ident
            acc.add_block(block)
    z1 = acc.kernel()
    cob = np.hstack([mats[h] - ident for h in nontriv])
    return _quotient_mod_coboundaries(z1, list(cob))
