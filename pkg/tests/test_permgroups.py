"""Tests for the permutation-group layer.

Orders, conjugacy data, and structural subgroups are cross-checked against
sympy's combinatorics module and against brute-force enumeration on groups
small enough to enumerate.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.combinatorics import Permutation, PermutationGroup

from psp4obs import permgroups as pg
from psp4obs.permgroups import PermGroup


C6 = PermGroup([(1, 2, 3, 4, 5, 0)], 6)
A4 = PermGroup([(1, 2, 0, 3), (0, 2, 3, 1)], 4)
S4 = PermGroup([(1, 0, 2, 3), (1, 2, 3, 0)], 4)
D4 = PermGroup([(1, 2, 3, 0), (3, 2, 1, 0)], 4)
Q8 = PermGroup([(1, 2, 3, 0, 5, 6, 7, 4), (4, 7, 6, 5, 2, 1, 0, 3)], 8)
A5 = PermGroup([(1, 2, 0, 3, 4), (0, 1, 3, 4, 2)], 5)
S5 = PermGroup([(1, 0, 2, 3, 4), (1, 2, 3, 4, 0)], 5)
SMALL = [C6, A4, S4, D4, Q8, A5, S5]


def sympy_group(g):
    return PermutationGroup([Permutation(list(p)) for p in g.generators]) \
        if g.generators else PermutationGroup([Permutation(g.degree - 1)])


def random_perm_groups(max_degree=7, max_gens=3):
    def build(degree):
        perm = st.permutations(tuple(range(degree))).map(tuple)
        return st.lists(perm, min_size=1, max_size=max_gens).map(
            lambda gens: PermGroup(gens, degree))
    return st.integers(2, max_degree).flatmap(build)


class TestElementary:
    def test_mul_convention(self):
        # pmul(p, q) applies p first, then q
        p, q = (1, 0, 2), (0, 2, 1)
        assert pg.pmul(p, q) == (2, 0, 1)
        assert pg.pmul(q, p) == (1, 2, 0)

    def test_inverse_conjugate(self):
        p = (2, 0, 3, 1)
        assert pg.pmul(p, pg.pinv(p)) == (0, 1, 2, 3)
        g = (1, 2, 3, 0)
        assert pg.porder(pg.pconj(p, g)) == pg.porder(p)

    def test_cycle_type_and_order(self):
        assert pg.cycle_type((1, 0, 3, 4, 2)) == (3, 2)
        assert pg.porder((1, 0, 3, 4, 2)) == 6
        assert pg.porder((0, 1, 2)) == 1

    def test_word_evaluate(self):
        gens = [(1, 2, 0), (1, 0, 2)]
        # letters are (generator index, exponent sign)
        assert pg.word_evaluate(((0, 1), (0, 1), (0, 1)), gens) == (0, 1, 2)
        assert pg.word_evaluate(((1, 1), (1, -1)), gens) == (0, 1, 2)
        assert pg.word_evaluate(((0, 1), (1, 1)), gens) == \
            pg.pmul(gens[0], gens[1])
        assert pg.word_inverse(((0, 1), (1, -1))) == ((1, 1), (0, -1))
        assert pg.word_free_reduce(((0, 1), (1, 1), (1, -1))) == ((0, 1),)


class TestOrders:
    @pytest.mark.parametrize("g,n", [(C6, 6), (A4, 12), (S4, 24), (D4, 8),
                                     (Q8, 8), (A5, 60), (S5, 120)])
    def test_known(self, g, n):
        assert g.order == n

    @given(random_perm_groups())
    @settings(max_examples=60, deadline=None)
    def test_matches_sympy(self, g):
        assert g.order == sympy_group(g).order()

    def test_membership_and_express(self):
        for g in (S4, Q8, A5):
            et = g.element_table()
            for i in range(len(et)):
                p = et.perm(i)
                assert p in g
                word = g.express(p)
                assert pg.word_evaluate(word, g.generators) == p
        assert (0, 2, 1, 3) not in A4


class TestConjugacyClasses:
    @pytest.mark.parametrize("g,k", [(C6, 6), (A4, 4), (S4, 5), (D4, 5),
                                     (Q8, 5), (A5, 5), (S5, 7)])
    def test_counts(self, g, k):
        classes = g.conjugacy_classes()
        assert len(classes) == k
        assert sum(size for _, size in classes) == g.order
        # identity first
        assert pg.is_identity(classes[0][0]) and classes[0][1] == 1

    @given(random_perm_groups(max_degree=6))
    @settings(max_examples=40, deadline=None)
    def test_matches_sympy_count(self, g):
        ref = len(sympy_group(g).conjugacy_classes())
        assert len(g.conjugacy_classes()) == ref

    def test_class_index_consistent(self):
        for g in (S4, Q8, A5):
            classes = g.conjugacy_classes()
            for j, (rep, size) in enumerate(classes):
                assert g.class_index_of(rep) == j
                assert g.is_conjugate_element(rep, rep)
            # every element lands in a class of the right total size
            counts = [0] * len(classes)
            for i in range(g.order):
                counts[g.class_index_of(g.element_table().perm(i))] += 1
            assert counts == [size for _, size in classes]

    def test_exponent(self):
        assert C6.exponent() == 6
        assert S4.exponent() == 12
        assert Q8.exponent() == 4
        assert A5.exponent() == 30


class TestStructure:
    def test_derived_series_s4(self):
        d1 = S4.derived_subgroup()
        assert d1.order == 12
        d2 = d1.derived_subgroup()
        assert d2.order == 4
        assert S4.derived_length() == 3
        assert S4.is_solvable() and not S4.is_nilpotent()
        assert D4.is_nilpotent()

    def test_solvable_residual(self):
        assert S4.solvable_residual().order == 1
        assert A5.solvable_residual().order == 60
        assert S5.solvable_residual().order == 60
        assert A5.is_perfect() and not S5.is_perfect()

    def test_abelian_invariants(self):
        assert pg.abelian_invariants(S4).torsion == (2,)
        assert pg.abelian_invariants(A4).torsion == (3,)
        assert pg.abelian_invariants(Q8).torsion == (2, 2)
        assert pg.abelian_invariants(C6).torsion == (6,)
        assert pg.abelian_invariants(A5).torsion == ()

    def test_normalizer(self):
        # <(0123)> in S4 has normalizer of order 8 (a dihedral group)
        c4 = S4.subgroup([(1, 2, 3, 0)])
        n = S4.normalizer(c4)
        assert n.order == 8
        # brute-force check
        et = S4.element_table()
        sub = c4.element_table()
        brute = sum(
            1 for i in range(len(et))
            if all(sub.contains_rows(
                np.array(pg.pconj(sub.perm(j), et.perm(i)),
                         dtype=sub.table.dtype).reshape(1, -1)).all()
                for j in range(len(sub))))
        assert n.order == brute

    def test_normal_closure(self):
        v4 = pg.normal_closure(S4, [(1, 0, 3, 2)])
        assert v4.order == 4
        assert pg.normal_closure(A5, [(1, 0, 3, 2, 4)]).order == 60

    def test_subgroup_conjugacy(self):
        a = S4.subgroup([(1, 0, 2, 3)])   # <(01)>
        b = S4.subgroup([(0, 1, 3, 2)])   # <(23)>
        assert S4.is_conjugate_subgroup(a, b)
        g = S4.conjugate_into(a, b)
        assert g is not None
        bt = b.element_table()
        for i in range(len(a.element_table())):
            q = pg.pconj(a.element_table().perm(i), g)
            assert bt.contains_rows(
                np.array(q, dtype=bt.table.dtype).reshape(1, -1)).all()
        # the normal Klein four vs a non-normal C2xC2 are not conjugate
        vn = S4.subgroup([(1, 0, 3, 2), (2, 3, 0, 1)])
        vo = S4.subgroup([(1, 0, 2, 3), (0, 1, 3, 2)])
        assert not S4.is_conjugate_subgroup(vn, vo)

    def test_coset_action(self):
        c4 = S4.subgroup([(1, 2, 3, 0)])
        act, labels, reps = S4.coset_action(c4)
        assert act.degree == 6
        assert act.order == 24  # faithful here
        assert len(reps) == 6
        # every label appears |sub| times and coset 0 holds the subgroup
        counts = np.bincount(labels)
        assert (counts == 4).all()
        et = S4.element_table()
        sub_rows = {tuple(r) for i, r in enumerate(et.table)
                    if labels[i] == 0}
        assert sub_rows == {tuple(r) for r in c4.element_table().table}


class TestPresentation:
    @pytest.mark.parametrize("g", SMALL)
    def test_relators_hold(self, g):
        pres = g.presentation()
        gens = [pg.word_evaluate(w, g.generators) for w in pres.gen_words]
        assert len(gens) == pres.ngens
        for w in pres.relators:
            assert pg.is_identity(pg.word_evaluate(w, gens)), w

    @pytest.mark.parametrize("g", SMALL)
    def test_abelianization_from_relators(self, g):
        pres = g.presentation()
        rel = pres.abelianized_relator_matrix()
        from psp4obs import intlinalg
        inv = intlinalg.quotient_invariants(pres.ngens, rel)
        assert inv.free_rank == 0
        assert inv.torsion == pg.abelian_invariants(g).torsion

    def test_gen_words_evaluate(self):
        # presentation generators all lie in the group
        pres = S4.presentation()
        for word in pres.gen_words:
            assert pg.word_evaluate(word, S4.generators) in S4


class TestElementTable:
    def test_sorted_and_complete(self):
        et = S4.element_table()
        assert len(et) == 24
        rows = [tuple(r) for r in et.table]
        assert rows == sorted(rows)
        assert et.contains_rows(et.table).all()

    def test_group_from_elements_roundtrip(self):
        et = A4.element_table()
        g = pg.group_from_elements(et.table, 4)
        assert g.order == 12
        assert g.element_table().table.tobytes() == et.table.tobytes()

    def test_random_element_stays_inside(self):
        from random import Random
        rng = Random(5)
        et = A5.element_table()
        for _ in range(20):
            p = A5.random_element(rng)
            assert p in A5

    def test_orbits(self):
        parts = pg.orbits([(1, 0, 2, 3, 4)], 5)
        assert sorted(sorted(o) for o in parts) == [[0, 1], [2], [3], [4]]
