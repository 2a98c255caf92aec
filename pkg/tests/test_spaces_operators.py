import numpy as np
import pytest

from hybridccz.operators import (Operator, annihilation, commutator,
                                 expectation, identity, level_transition, lift,
                                 number, outer)
from hybridccz.spaces import (CompositeSpace, InvalidDimensionError,
                              SpaceMismatchError)
from hybridccz.states import StateVector, fock_population, level_population


class TestCompositeSpace:
    def test_total_dimension(self):
        s = CompositeSpace(6, 6)
        assert s.dim == 6 * 6 * 4

    def test_index_bijection(self):
        s = CompositeSpace(3, 3)
        seen = set()
        for n1 in range(3):
            for n2 in range(3):
                for lvl in range(4):
                    flat = s.index(n1, n2, lvl)
                    assert s.unindex(flat) == (n1, n2, lvl)
                    seen.add(flat)
        assert seen == set(range(s.dim))

    def test_index_convention_explicit(self):
        # flat = ((n1*N2) + n2)*4 + level
        s = CompositeSpace(5, 7)
        assert s.index(2, 3, "e") == ((2 * 7) + 3) * 4 + 2
        assert s.index(0, 0, "g_prime") == 0

    def test_rejects_bad_levels_and_sizes(self):
        s = CompositeSpace(3, 3)
        with pytest.raises(InvalidDimensionError):
            s.index(3, 0, "g")
        with pytest.raises(InvalidDimensionError):
            s.index(0, 0, "x")
        with pytest.raises(InvalidDimensionError):
            CompositeSpace(0, 3)


class TestAnnihilation:
    def test_lowers_one_photon(self):
        a = annihilation(4).toarray()
        ket1 = np.array([0, 1, 0, 0], dtype=complex)
        out = a @ ket1
        assert np.allclose(out, [1, 0, 0, 0])

    def test_vacuum_annihilates(self):
        a = annihilation(4).toarray()
        assert np.allclose(a @ np.array([1, 0, 0, 0]), 0)

    def test_number_operator_product(self):
        dim = 9
        a = annihilation(dim)
        n = a.dagger().multiply(a).toarray()
        # sqrt(n)*sqrt(n) rounds within one ulp of n
        assert np.abs(n - np.diag(np.arange(dim, dtype=float))).max() < 1e-14
        assert np.count_nonzero(n - np.diag(np.diag(n))) == 0

    def test_rejects_too_small(self):
        with pytest.raises(InvalidDimensionError):
            annihilation(1)

    def test_truncated_commutator_localized(self):
        # [a, a+] = 1 except in the top Fock row/column
        dim = 7
        a = annihilation(dim)
        c = commutator(a, a.dagger()).toarray()
        eye = np.eye(dim)
        mask = np.zeros((dim, dim), dtype=bool)
        mask[dim - 1, :] = True
        mask[:, dim - 1] = True
        assert np.allclose(c[~mask], eye[~mask], atol=1e-15)
        assert not np.allclose(c[dim - 1, dim - 1], 1.0)


class TestLevelTransition:
    def test_lowers_f_to_g(self):
        sm = level_transition("f", "g").toarray()
        f = np.array([0, 0, 0, 1], dtype=complex)
        out = sm @ f
        assert np.allclose(out, [0, 1, 0, 0])

    def test_orthogonal_level_gives_zero(self):
        sm = level_transition("f", "g").toarray()
        e = np.array([0, 0, 1, 0], dtype=complex)
        assert np.allclose(sm @ e, 0)

    def test_adjoint_of_dyad(self):
        up = level_transition("g_prime", "e")
        down = level_transition("e", "g_prime")
        assert np.allclose(down.toarray(), up.dagger().toarray())

    def test_unknown_label(self):
        with pytest.raises(InvalidDimensionError):
            level_transition("f", "q")


class TestLift:
    def test_identity_lifts_to_identity(self):
        s = CompositeSpace(3, 2)
        lifted = lift(identity((3,)), "cavity1", s)
        assert np.allclose(lifted.toarray(), np.eye(s.dim))

    def test_disjoint_subsystems_commute(self):
        s = CompositeSpace(3, 3)
        a1 = lift(annihilation(3), "cavity1", s)
        a2 = lift(annihilation(3), "cavity2", s)
        c = commutator(a1, a2).toarray()
        assert np.abs(c).max() == 0

    def test_number_expectation_on_every_basis_state(self):
        s = CompositeSpace(3, 2)
        n1 = lift(number(3), "cavity1", s)
        n2 = lift(number(2), "cavity2", s)
        for i1 in range(3):
            for i2 in range(2):
                for lvl in range(4):
                    ket = StateVector.basis(s, i1, i2, lvl)
                    assert expectation(n1, ket) == pytest.approx(i1)
                    assert expectation(n2, ket) == pytest.approx(i2)

    def test_dimension_mismatch(self):
        s = CompositeSpace(3, 2)
        with pytest.raises(SpaceMismatchError):
            lift(annihilation(4), "cavity1", s)


class TestAlgebra:
    def test_self_commutator_vanishes(self):
        rng = np.random.default_rng(3)
        m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        op = Operator((8,), m)
        assert np.abs(commutator(op, op).toarray()).max() == 0

    def test_expectation_of_photon_number(self):
        s = CompositeSpace(3, 2)
        n1 = lift(number(3), "cavity1", s)
        ket = StateVector.basis(s, 2, 0, "g")
        assert expectation(n1, ket) == pytest.approx(2.0)

    def test_outer_product_has_unit_trace(self):
        rng = np.random.default_rng(5)
        v = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        v /= np.linalg.norm(v)
        assert np.trace(outer(v)) == pytest.approx(1.0, abs=1e-12)

    def test_space_mismatch_raises(self):
        a = annihilation(3)
        b = annihilation(4)
        with pytest.raises(SpaceMismatchError):
            a.add(b)

    def test_product_adjoint_reverses(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
            b = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
            oa, ob = Operator((6,), a), Operator((6,), b)
            lhs = oa.multiply(ob).dagger().toarray()
            rhs = ob.dagger().multiply(oa.dagger()).toarray()
            assert np.abs(lhs - rhs).max() < 1e-14

    def test_double_dagger_is_identity_map(self):
        rng = np.random.default_rng(13)
        m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        op = Operator((5,), m)
        assert np.array_equal(op.dagger().dagger().toarray(), op.toarray())


class TestPopulations:
    def test_against_brute_force_reshape(self):
        s = CompositeSpace(3, 3)
        rng = np.random.default_rng(7)
        v = rng.standard_normal(s.dim) + 1j * rng.standard_normal(s.dim)
        v /= np.linalg.norm(v)
        ket = StateVector(s, v)
        probs = np.abs(v.reshape(3, 3, 4)) ** 2
        for n in range(3):
            assert fock_population(ket, s, "cavity1", n) == pytest.approx(probs[n].sum())
            assert fock_population(ket, s, "cavity2", n) == pytest.approx(probs[:, n].sum())
        for lvl in range(4):
            assert level_population(ket, s, lvl) == pytest.approx(probs[:, :, lvl].sum())
