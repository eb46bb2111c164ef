"""Tests for Burnside-cokernel orders.

The classical benchmark pair: the two-dimensional irreducible character of
the quaternion group has order 2 in the Burnside cokernel (quaternionic
Schur index), while the same character values on the dihedral group of
order 8 are a genuine difference of permutation characters (order 1).
"""

import numpy as np
import pytest

from psp4obs import burnside, subgroups
from psp4obs.permgroups import PermGroup, porder

D4 = PermGroup([(1, 2, 3, 0), (3, 2, 1, 0)], 4)
Q8 = PermGroup([(1, 2, 3, 0, 5, 6, 7, 4), (4, 7, 6, 5, 2, 1, 0, 3)], 8)
S4 = PermGroup([(1, 0, 2, 3), (1, 2, 3, 0)], 4)
C6 = PermGroup([(1, 2, 3, 4, 5, 0)], 6)


def own_perm_chars(g):
    """Permutation-character matrix over all own subgroup classes."""
    lat = subgroups.subgroup_classes(g, seed=1)
    rows = [c.rep(g.degree).element_table().table for c in lat.classes]
    return burnside.perm_characters(g, rows)


def two_dim_character(g):
    """The (2, -2, 0, 0, 0)-shaped 2-dim character of D4 or Q8.

    Classes are ordered canonically; the central involution is the unique
    non-identity class of size one.
    """
    values = []
    for rep, size in g.conjugacy_classes():
        if porder(rep) == 1:
            values.append(2)
        elif size == 1:
            values.append(-2)
        else:
            values.append(0)
    return tuple(values)


class TestPermCharacters:
    def test_rows_for_trivial_and_full(self):
        pc = own_perm_chars(S4)
        assert pc.shape == (11, 5)
        assert pc[0].tolist() == [24, 0, 0, 0, 0]
        assert pc[-1].tolist() == [1, 1, 1, 1, 1]

    def test_degrees_are_indices(self):
        lat = subgroups.subgroup_classes(S4, seed=1)
        pc = own_perm_chars(S4)
        for c, row in zip(lat.classes, pc):
            assert row[0] == S4.order // c.order

    def test_fixed_coset_counts_single(self):
        c4 = S4.subgroup([(1, 2, 3, 0)])
        counts = burnside.fixed_coset_counts(
            S4, c4.element_table().table)
        # S4/C4 is the action on three objects: character (3, 1, 0, 3, 1)
        # in some class order; identity fixes all 6/... index = 6
        assert counts[0] == 6
        assert all(0 <= v <= 6 for v in counts)

    def test_restrict_classfn(self):
        assert burnside.restrict_classfn((10, 20, 30), (0, 2, 2, 1)) == \
            (10, 30, 30, 20)


class TestBurnsideOrder:
    def test_q8_two_dim_has_order_two(self):
        chi = two_dim_character(Q8)
        assert burnside.burnside_order(own_perm_chars(Q8), chi,
                                       bound=8) == 2

    def test_d4_two_dim_has_order_one(self):
        chi = two_dim_character(D4)
        assert burnside.burnside_order(own_perm_chars(D4), chi,
                                       bound=8) == 1

    def test_linear_characters_of_c6(self):
        # all rational characters of a cyclic group are virtual
        # permutation characters (Artin induction with denominator 1)
        pc = own_perm_chars(C6)
        classes = C6.conjugacy_classes()
        # the rational character of the primitive 6th roots: values
        # (2, 1, -1, -2, -1, 1) ordered by powers; build it by orders
        by_order = {porder(rep): i for i, (rep, _) in enumerate(classes)}
        chi = [0] * 6
        for rep, _ in classes:
            chi[C6.class_index_of(rep)] = {1: 2, 2: -2, 3: -1, 6: 1}[
                porder(rep)]
        assert burnside.burnside_order(pc, tuple(chi), bound=6) == 1

    def test_s4_standard_character(self):
        # the standard 3-dim character = natural perm char minus trivial
        pc = own_perm_chars(S4)
        classes = S4.conjugacy_classes()
        natural = tuple(sum(1 for x in rep if rep[x] == x)
                        for rep, _ in classes)
        std = tuple(v - 1 for v in natural)
        assert burnside.burnside_order(pc, std, bound=24) == 1

    def test_sign_character_s4(self):
        from psp4obs.permgroups import cycle_type
        classes = S4.conjugacy_classes()

        def sign(p):
            evens = sum(1 for c in cycle_type(p) if c % 2 == 0)
            return 1 if evens % 2 == 0 else -1

        chi = tuple(sign(rep) for rep, _ in classes)
        assert burnside.burnside_order(own_perm_chars(S4), chi,
                                       bound=24) == 1

    def test_bound_is_enforced(self):
        # a character requiring multiplier 2 fails under bound 1
        chi = two_dim_character(Q8)
        with pytest.raises(ValueError):
            burnside.burnside_order(own_perm_chars(Q8), chi, bound=1)

    def test_target_outside_span_rejected(self):
        # no multiple of a vector outside the rational row space lies in
        # the lattice; the search must raise instead of looping
        pc = np.array([[1, 0]])
        with pytest.raises(ValueError):
            burnside.burnside_order(pc, (0, 1), bound=10)
