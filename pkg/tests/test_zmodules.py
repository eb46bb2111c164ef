"""Tests for integral representation modules."""

import numpy as np
import pytest

from psp4obs import intlinalg, zmodules
from psp4obs.permgroups import PermGroup
from psp4obs.zmodules import (GIntModule, direct_sum, invariant_kernel,
                              load_module, load_pairing, perm_module,
                              quotient_by_pairing, quotient_by_radical,
                              save_module, save_pairing)

C2 = PermGroup([(1, 0)], 2)
C3 = PermGroup([(1, 2, 0)], 3)
S3 = PermGroup([(1, 0, 2), (1, 2, 0)], 3)
ROT = np.array([[0, 1], [-1, -1]])  # order-3 action on the root lattice
SWAP = np.array([[0, 1], [1, 0]])


@pytest.fixture
def std_s3():
    return GIntModule(S3, [SWAP, ROT], 2)


class TestBasics:
    def test_matrix_of_generators_and_products(self, std_s3):
        assert np.array_equal(std_s3.matrix_of((1, 0, 2)), SWAP)
        assert np.array_equal(std_s3.matrix_of((1, 2, 0)), ROT)
        assert np.array_equal(std_s3.matrix_of((0, 1, 2)),
                              np.eye(2, dtype=int))
        # anti-homomorphism convention is fixed by acting on row vectors:
        # the matrix of a product is the product of matrices in order
        from psp4obs.permgroups import pmul
        p, q = (1, 0, 2), (1, 2, 0)
        lhs = std_s3.matrix_of(pmul(p, q))
        rhs = intlinalg.mat_mul(std_s3.matrix_of(p), std_s3.matrix_of(q))
        alt = intlinalg.mat_mul(std_s3.matrix_of(q), std_s3.matrix_of(p))
        assert np.array_equal(lhs, rhs) or np.array_equal(lhs, alt)

    def test_character(self, std_s3):
        # classes of S3: identity, transposition, 3-cycle
        assert std_s3.character() == (2, 0, -1)

    def test_validate_passes(self, std_s3):
        std_s3.validate()

    def test_validate_rejects_non_invertible(self):
        with pytest.raises(ValueError):
            GIntModule(C2, [np.array([[2]])], 1).validate()

    def test_validate_rejects_wrong_relators(self):
        # order-2 generator acting by an order-3 matrix
        bad = GIntModule(C2, [ROT], 2)
        with pytest.raises(ValueError):
            bad.validate()

    def test_act_on_rows(self, std_s3):
        v = np.array([[1, 0], [0, 1]])
        out = std_s3.act(v, (1, 2, 0))
        assert np.array_equal(out, v @ ROT)


class TestConstructions:
    def test_perm_module(self):
        m = perm_module(S3, S3.generators)
        m.validate()
        assert m.rank == 3
        assert m.character() == (3, 1, 0)
        for g in m.gens:
            g = np.asarray(g)
            assert ((g == 0) | (g == 1)).all()
            assert (g.sum(axis=0) == 1).all() and (g.sum(axis=1) == 1).all()

    def test_dual(self, std_s3):
        d = std_s3.dual()
        d.validate()
        assert d.character() == std_s3.character()
        dd = d.dual()
        for a, b in zip(dd.gens, std_s3.gens):
            assert np.array_equal(a, b)

    def test_dual_of_perm_module_is_isomorphic(self):
        m = perm_module(C3, C3.generators)
        d = m.dual()
        # permutation matrices are orthogonal: dual = inverse transpose
        for a, b in zip(d.gens, m.gens):
            assert np.array_equal(np.asarray(a),
                                  np.asarray(b))

    def test_restrict(self, std_s3):
        sub = S3.subgroup([(1, 2, 0)])
        r = std_s3.restrict(sub)
        r.validate()
        assert r.group.order == 3
        assert np.array_equal(r.gens[0], ROT)

    def test_direct_sum(self, std_s3):
        sgn = GIntModule(S3, [np.array([[-1]]), np.array([[1]])], 1)
        s = direct_sum(std_s3, sgn)
        s.validate()
        assert s.rank == 3
        assert s.character() == (3, -1, 0)


class TestQuotients:
    def test_quotient_by_radical_regular_c2(self):
        reg = perm_module(C2, C2.generators)
        # the (1, -1) line is the sign sublattice; quotient is trivial
        quo = quotient_by_radical(reg, np.array([[1, -1]]))
        assert quo.rank == 1
        assert quo.character() == (1, 1)
        # the (1, 1) line is the invariant sublattice; quotient is sign
        quo2 = quotient_by_radical(reg, np.array([[1, 1]]))
        assert quo2.character() == (1, -1)

    def test_quotient_rejects_unsaturated(self):
        reg = perm_module(C2, C2.generators)
        with pytest.raises(ValueError):
            quotient_by_radical(reg, np.array([[2, 2]]))

    def test_quotient_rejects_non_invariant(self):
        reg = perm_module(C3, C3.generators)
        with pytest.raises(ValueError):
            quotient_by_radical(reg, np.array([[1, 0, 0]]))

    def test_quotient_character_subtracts(self):
        # regular module of S3 modulo the augmentation-orthogonal copy of
        # the standard lattice leaves the trivial character
        reg = perm_module(S3, S3.generators)
        std_rows = intlinalg.kernel_saturated(
            np.ones((3, 1), dtype=np.int64))
        quo = quotient_by_radical(reg, std_rows)
        assert quo.rank == 1
        assert quo.character() == (1, 1, 1)

    def test_invariant_kernel_and_pairing_quotient(self):
        reg = perm_module(S3, S3.generators)
        # J pairing has the augmentation line as radical complement:
        # radical of all-ones pairing = augmentation sublattice
        p = np.ones((3, 3), dtype=int)
        rad = invariant_kernel(reg, p)
        assert rad.shape == (2, 3)
        quo = quotient_by_pairing(reg, p)
        assert quo.rank == 1
        assert quo.character() == (1, 1, 1)

    def test_pairing_must_be_invariant(self):
        reg = perm_module(S3, S3.generators)
        bad = np.diag([1, 2, 3])
        with pytest.raises(ValueError):
            quotient_by_pairing(reg, bad)

    def test_pairing_must_be_symmetric(self):
        reg = perm_module(S3, S3.generators)
        bad = np.zeros((3, 3), dtype=int)
        bad[0, 1] = 1
        with pytest.raises(ValueError):
            quotient_by_pairing(reg, bad)


class TestPersistence:
    def test_module_roundtrip(self, std_s3, tmp_path):
        p = tmp_path / "m.gmodule"
        save_module(std_s3, p)
        back = load_module(p, S3)
        assert back.rank == 2
        for a, b in zip(back.gens, std_s3.gens):
            assert np.array_equal(a, b)

    def test_load_rejects_wrong_generator_count(self, std_s3, tmp_path):
        p = tmp_path / "m.gmodule"
        save_module(std_s3, p)
        with pytest.raises(ValueError):
            load_module(p, C2)

    def test_load_rejects_corrupt_matrix(self, std_s3, tmp_path):
        p = tmp_path / "m.gmodule"
        save_module(std_s3, p)
        text = p.read_text().replace("0 1", "0 2", 1)
        p.write_text(text)
        with pytest.raises(ValueError):
            load_module(p, S3)

    def test_load_rejects_bad_header(self, tmp_path):
        p = tmp_path / "m.gmodule"
        p.write_text("not-a-module rank=2 gens=1\n")
        with pytest.raises(ValueError):
            load_module(p, C2)

    def test_pairing_roundtrip(self, tmp_path):
        p = tmp_path / "p.pairing"
        mat = np.array([[2, 1], [1, 2]])
        save_pairing(mat, p)
        back = load_pairing(p)
        assert np.array_equal(back, mat)

    def test_pairing_rejects_asymmetric(self, tmp_path):
        p = tmp_path / "p.pairing"
        p.write_text("pairing rank=2\n0 1\n0 0\n")
        with pytest.raises(ValueError):
            load_pairing(p)
