"""Tests for group cohomology in degree zero and one.

The presentation-based computation is validated against an independent
bar-resolution brute force on every module small enough for that, and
against textbook values where they are classical (sign modules, root
lattices, permutation modules).
"""

from random import Random

import numpy as np
import pytest

from psp4obs import cohomology, intlinalg
from psp4obs.permgroups import PermGroup
from psp4obs.zmodules import GIntModule, direct_sum, perm_module

C2 = PermGroup([(1, 0)], 2)
C3 = PermGroup([(1, 2, 0)], 3)
C4 = PermGroup([(1, 2, 3, 0)], 4)
V4 = PermGroup([(1, 0, 3, 2), (2, 3, 0, 1)], 4)
S3 = PermGroup([(1, 0, 2), (1, 2, 0)], 3)
D4 = PermGroup([(1, 2, 3, 0), (3, 2, 1, 0)], 4)
Q8 = PermGroup([(1, 2, 3, 0, 5, 6, 7, 4), (4, 7, 6, 5, 2, 1, 0, 3)], 8)

ROT = np.array([[0, 1], [-1, -1]])
J = np.array([[0, 1], [-1, 0]])
REFL = np.array([[1, 0], [0, -1]])

KNOWN = [
    # (name, module, expected torsion of H^1)
    ("C2 sign", GIntModule(C2, [np.array([[-1]])], 1), (2,)),
    ("C2 trivial Z", GIntModule(C2, [np.array([[1]])], 1), ()),
    ("C2 regular", perm_module(C2, C2.generators), ()),
    ("C2 minus identity", GIntModule(C2, [-np.eye(2, dtype=int)], 2), (2, 2)),
    ("C3 regular", perm_module(C3, C3.generators), ()),
    ("C3 root lattice", GIntModule(C3, [ROT], 2), (3,)),
    ("C4 rotation", GIntModule(C4, [J], 2), (2,)),
    ("V4 regular", perm_module(V4, V4.generators), ()),
    ("S3 natural", perm_module(S3, S3.generators), ()),
    ("S3 sign", GIntModule(S3, [np.array([[-1]]), np.array([[1]])], 1),
     (2,)),
    ("S3 root lattice", GIntModule(S3, [SWAP := np.array([[0, 1], [1, 0]]),
                                        ROT], 2), ()),
    ("D4 rotation lattice", GIntModule(D4, [J, REFL], 2), (2,)),
    ("Q8 regular", perm_module(Q8, Q8.generators), ()),
]


class TestKnownValues:
    @pytest.mark.parametrize("name,module,expected",
                             KNOWN, ids=[k[0] for k in KNOWN])
    def test_h1(self, name, module, expected):
        got = cohomology.h1(module)
        assert got.free_rank == 0
        assert got.torsion == expected

    @pytest.mark.parametrize("name,module,expected",
                             KNOWN, ids=[k[0] for k in KNOWN])
    def test_matches_bruteforce(self, name, module, expected):
        assert cohomology.h1(module) == cohomology.h1_bruteforce(module)

    def test_h0(self):
        assert cohomology.h0(perm_module(S3, S3.generators)) == 1
        assert cohomology.h0(perm_module(V4, V4.generators)) == 1
        assert cohomology.h0(GIntModule(C2, [np.array([[-1]])], 1)) == 0
        two_orbits = perm_module(C2, [(1, 0, 2, 3)])
        assert cohomology.h0(two_orbits) == 3

    def test_invariants_basis(self):
        m = perm_module(S3, S3.generators)
        basis = cohomology.invariants_basis(m)
        assert basis.shape == (1, 3)
        assert abs(int(basis[0].sum())) == 3  # the all-ones line


class TestProperties:
    def test_exponent_annihilates(self):
        # |H| kills H^1 in every case above
        for name, module, _ in KNOWN:
            inv = cohomology.h1(module)
            order = module.group.order
            for t in inv.torsion:
                assert order % t == 0, name

    def test_perm_modules_have_trivial_h1(self):
        # Shapiro: H^1(H, Z[H/Q]) = H^1(Q, Z) = 0
        rng = Random(4)
        for g in (S3, D4, Q8, V4, C4):
            subs = [g.subgroup([]), g]
            for _ in range(3):
                subs.append(g.subgroup([g.random_element(rng)]))
            for sub in subs:
                action, _, _ = g.coset_action(sub)
                mod = perm_module(g, action.generators)
                inv = cohomology.h1(mod)
                assert inv.is_trivial, (g.order, sub.order)

    def test_shapiro_pairs(self):
        # H^1(G, Z[G/Q] (x) sign-ish data) via induced modules: for the
        # sign module of a subgroup Q, induction gives a monomial module
        # whose H^1 equals H^1(Q, sign) by Shapiro's lemma.
        rng = Random(11)
        for trial in range(10):
            g = (S3, D4, Q8)[trial % 3]
            q = g.subgroup([g.random_element(rng)])
            action, labels, reps = g.coset_action(q)
            n = g.order // q.order
            # monomial induction of the Q-module Z with q acting by
            # det-of-permutation sign
            et = g.element_table()

            def sign_of(p):
                perm = np.asarray(p)
                seen = np.zeros(len(perm), dtype=bool)
                sgn = 1
                for i in range(len(perm)):
                    if seen[i]:
                        continue
                    j, length = i, 0
                    while not seen[j]:
                        seen[j] = True
                        j = perm[j]
                        length += 1
                    if length % 2 == 0:
                        sgn = -sgn
                return sgn

            from psp4obs.permgroups import pinv, pmul
            mats = []
            for gen in g.generators:
                m = np.zeros((n, n), dtype=int)
                for c in range(n):
                    target = pmul(reps[c], gen)
                    row = np.asarray([list(target)], dtype=et.table.dtype)
                    d = int(labels[et.index_of(row)[0]])
                    # rep[c] * gen = h * rep[d] with h in Q
                    h = pmul(target, pinv(reps[d]))
                    m[c, d] = sign_of(h)
                mats.append(m)
            induced = GIntModule(g, mats, n)
            induced.validate()
            q_sign = GIntModule(
                q, [np.array([[sign_of(p)]]) for p in q.generators], 1)
            assert cohomology.h1(induced) == cohomology.h1(q_sign), \
                (g.order, q.order, trial)

    def test_random_basis_change_invariance(self):
        rng = Random(12)
        cases = [(C2, [np.array([[-1]])]),
                 (C3, [ROT]),
                 (S3, [np.array([[0, 1], [1, 0]]), ROT]),
                 (D4, [J, REFL])]
        for trial in range(12):
            g, mats = cases[trial % len(cases)]
            n = mats[0].shape[0]
            u = np.eye(n, dtype=int)
            for _ in range(3):
                a, b = rng.randrange(n), rng.randrange(n)
                if a != b:
                    u[a] += rng.choice([-2, -1, 1, 2]) * u[b]
            uinv = np.asarray(intlinalg.unimodular_inverse(u))
            conj = [np.asarray(intlinalg.mat_mul(intlinalg.mat_mul(uinv, m), u))
                    for m in mats]
            mod = GIntModule(g, conj, n)
            mod.validate()
            base = cohomology.h1(GIntModule(g, mats, n))
            assert cohomology.h1(mod) == base
            assert cohomology.h1_bruteforce(mod) == base

    def test_direct_sum_additivity(self):
        sgn = GIntModule(S3, [np.array([[-1]]), np.array([[1]])], 1)
        std = GIntModule(S3, [np.array([[0, 1], [1, 0]]), ROT], 2)
        s = direct_sum(std, sgn)
        got = cohomology.h1(s)
        assert sorted(got.torsion) == sorted(
            cohomology.h1(std).torsion + cohomology.h1(sgn).torsion)

    def test_dual_modules(self):
        # the rotation lattice of D4 is self-dual up to basis change
        m = GIntModule(D4, [J, REFL], 2)
        assert cohomology.h1(m.dual()) == cohomology.h1_bruteforce(m.dual())


class TestBruteForceGuards:
    def test_order_cap(self):
        big = PermGroup([(1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14,
                          15, 16, 0)], 17)
        with pytest.raises(ValueError):
            cohomology.h1_bruteforce(perm_module(big, big.generators))
