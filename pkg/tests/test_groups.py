import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellcover import (
    AffineAutomorphism,
    FiniteActionGroup,
    FiniteSubgroupSpec,
    InvalidOrder,
    LatticeTau,
    OrderCapExceeded,
    TorusPoint,
    build_group_A,
    build_group_B,
    is_free_at,
    orbit,
)

from conftest import TAU

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)

LAT = LatticeTau.from_tau(TAU)


def pt(*pairs):
    return tuple(TorusPoint.from_coords(LAT, a, b) for a, b in pairs)


def _neg(d):
    return tuple(
        tuple(-1 if i == j else 0 for j in range(d)) for i in range(d)
    )


def _shift(d, *pairs):
    return AffineAutomorphism(
        tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d)),
        tuple(pairs),
    )


def _coords(point):
    return tuple((p.a, p.b) for p in point)


class TestAffineAutomorphism:
    def test_identity(self):
        e = AffineAutomorphism.identity(3)
        assert e.is_identity
        assert e.dim == 3
        x = pt((0.3, 0.4), (0.1, 0.9), (0.5, 0.5))
        assert _coords(e.apply(x)) == _coords(x)

    def test_compose_matches_pointwise(self):
        g = AffineAutomorphism(_neg(2), ((HALF, Fraction(0)), (Fraction(0), Fraction(0))))
        h = _shift(2, (THIRD, THIRD), (Fraction(0), HALF))
        x = pt((0.21, 0.77), (0.12, 0.68))
        lhs = (g * h).apply(x)
        rhs = g.apply(h.apply(x))
        for p, q in zip(lhs, rhs):
            assert p.close_to(q, tol=1e-12)

    def test_inverse(self):
        swap = AffineAutomorphism(
            ((0, 1), (1, 0)), ((HALF, Fraction(0)), (THIRD, THIRD))
        )
        assert (swap * swap.inverse()).is_identity
        assert (swap.inverse() * swap).is_identity

    def test_inverse_requires_unimodular(self):
        doubling = AffineAutomorphism(
            ((2, 0), (0, 1)), ((Fraction(0), Fraction(0)),) * 2
        )
        with pytest.raises(InvalidOrder):
            doubling.inverse()

    def test_apply_wraps_mod_one(self):
        g = _shift(1, (Fraction(3, 4), Fraction(1, 2)))
        ((a, b),) = _coords(g.apply(pt((0.5, 0.75))))
        assert math.isclose(a, 0.25, abs_tol=1e-12)
        assert math.isclose(b, 0.25, abs_tol=1e-12)

    def test_translations_are_exact(self):
        g = _shift(1, (THIRD, Fraction(0)))
        x = pt((0.0, 0.0))
        for _ in range(3):
            x = g.apply(x)
        assert x[0].a == 0.0 and x[0].b == 0.0

    def test_dimension_mismatch_rejected(self):
        e = AffineAutomorphism.identity(2)
        with pytest.raises(InvalidOrder):
            e.apply(pt((0.1, 0.2)))


class TestGroupGeneration:
    def test_cyclic_translation_group(self):
        g = _shift(1, (THIRD, Fraction(0)))
        grp = FiniteActionGroup.generate([g])
        assert grp.order == 3

    def test_identity_in_elements(self):
        grp = build_group_A(1, FiniteSubgroupSpec.parse(("1/2,0",)))
        assert any(e.is_identity for e in grp.elements)

    def test_elements_closed_and_invertible(self):
        grp = build_group_A(2, FiniteSubgroupSpec.parse(("1/2,0",)))
        elems = set(grp.elements)
        sample = random.Random(0).sample(sorted(elems, key=repr), 8)
        for g in sample:
            assert g.inverse() in elems
            for h in sample:
                assert g * h in elems

    def test_canonical_element_order(self):
        grp = build_group_B(2, FiniteSubgroupSpec.parse(("1/2,0",)))
        keyed = [(e.matrix, e.translation) for e in grp.elements]
        assert keyed == sorted(keyed)

    def test_order_cap(self):
        q0 = FiniteSubgroupSpec.parse(("1/4,0",))
        with pytest.raises(OrderCapExceeded):
            build_group_A(3, q0, cap=100)


class TestConstructionA:
    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("q", [1, 2, 3])
    def test_orders(self, d, q):
        q0 = (
            FiniteSubgroupSpec.trivial()
            if q == 1
            else FiniteSubgroupSpec.parse((f"1/{q},0",))
        )
        grp = build_group_A(d, q0)
        assert grp.order == 2 ** d * math.factorial(d) * q ** d

    def test_klein_four_subgroup(self):
        q0 = FiniteSubgroupSpec.parse(("1/2,0", "0,1/2"))
        assert build_group_A(2, q0).order == 4 * 2 * 16

    def test_contains_negation_and_swap(self):
        grp = build_group_A(2, FiniteSubgroupSpec.trivial())
        mats = {e.matrix for e in grp.elements}
        assert ((-1, 0), (0, -1)) in mats
        assert ((0, 1), (1, 0)) in mats

    def test_generic_orbit_is_free(self):
        grp = build_group_A(2, FiniteSubgroupSpec.parse(("1/2,0",)))
        x = pt((0.137, 0.261), (0.389, 0.731))
        free, stab = is_free_at(grp, x)
        assert free and len(stab) == 1
        assert len(orbit(grp, x)) == grp.order

    def test_two_torsion_is_not_free(self):
        grp = build_group_A(1, FiniteSubgroupSpec.parse(("1/2,0",)))
        x = pt((0.5, 0.0))
        free, stab = is_free_at(grp, x)
        assert not free
        assert len(stab) > 1
        stab_set = set(stab)
        for g in stab:
            for h in stab:
                assert g * h in stab_set

    def test_orbit_size_divides_order(self):
        grp = build_group_A(2, FiniteSubgroupSpec.parse(("1/2,0",)))
        x = pt((0.5, 0.5), (0.5, 0.5))
        assert grp.order % len(orbit(grp, x)) == 0


class TestConstructionB:
    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("q", [1, 2, 3])
    def test_orders(self, d, q):
        q0 = (
            FiniteSubgroupSpec.trivial()
            if q == 1
            else FiniteSubgroupSpec.parse((f"1/{q},0",))
        )
        grp = build_group_B(d, q0)
        assert grp.order == math.factorial(d + 1) * q ** d

    def test_order_24_landmark(self):
        q0 = FiniteSubgroupSpec.parse(("1/2,0",))
        assert build_group_B(2, q0).order == 24

    def test_matrix_part_is_full_permutation_action(self):
        for d in (2, 3):
            grp = build_group_B(d, FiniteSubgroupSpec.trivial())
            mats = {e.matrix for e in grp.elements}
            assert len(mats) == math.factorial(d + 1)

    def test_cycle_generator_has_order_d_plus_one(self):
        grp = build_group_B(3, FiniteSubgroupSpec.trivial())
        cyc = next(
            e
            for e in grp.elements
            if e.matrix == ((-1, -1, -1), (1, 0, 0), (0, 1, 0))
        )
        acc = cyc
        steps = 1
        while not acc.is_identity:
            acc = acc * cyc
            steps += 1
        assert steps == 4

    def test_translations_form_normal_subgroup(self):
        grp = build_group_B(2, FiniteSubgroupSpec.parse(("1/2,0",)))
        identity_mat = AffineAutomorphism.identity(2).matrix
        translations = [e for e in grp.elements if e.matrix == identity_mat]
        assert len(translations) == 4
        for t in translations:
            for g in grp.elements:
                conj = g * t * g.inverse()
                assert conj.matrix == identity_mat

    def test_generic_orbit_is_free(self):
        grp = build_group_B(2, FiniteSubgroupSpec.parse(("1/2,0",)))
        x = pt((0.137, 0.261), (0.389, 0.731))
        free, stab = is_free_at(grp, x)
        assert free and len(stab) == 1
        assert len(orbit(grp, x)) == 24


@settings(max_examples=30, deadline=None)
@given(
    i=st.integers(0, 23),
    j=st.integers(0, 23),
    k=st.integers(0, 23),
)
def test_associativity_on_group_elements(i, j, k):
    grp = build_group_B(2, FiniteSubgroupSpec.parse(("1/2,0",)))
    g, h, f = grp.elements[i], grp.elements[j], grp.elements[k]
    assert (g * h) * f == g * (h * f)


@settings(max_examples=30, deadline=None)
@given(
    a=st.floats(0.01, 0.99),
    b=st.floats(0.01, 0.99),
    idx=st.integers(0, 15),
)
def test_inverse_undoes_apply(a, b, idx):
    grp = build_group_A(1, FiniteSubgroupSpec.parse(("1/4,0",)))
    g = grp.elements[idx % grp.order]
    x = pt((a, b))
    back = g.inverse().apply(g.apply(x))
    assert back[0].close_to(x[0], tol=1e-9)
