import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellcover import (
    FiniteSubgroupSpec,
    InvalidOrder,
    InvalidPoint,
    InvalidSubgroup,
    LatticeTau,
    TorusPoint,
    eisenstein_g2_g3,
    quotient_lattice,
    reduce_point,
    torsion_points,
    wp,
    wp_inverse,
    wp_prime,
)
from ellcover.elliptic import wp_both_values

from conftest import TAU, lattice_sum_g2_g3, laurent_wp

# Frozen from the tail-corrected lattice sum at radius 200 (see conftest).
FROZEN_G2_G3 = {
    (0.3 + 1.1j): (
        120.05792111734831 + 29.370207407468381j,
        332.83105092489672 - 133.24570489453808j,
    ),
    (0.1 + 1.3j): (
        137.03612292878617 + 5.2165184559237847j,
        251.80530970359874 - 24.290454948804733j,
    ),
    (-0.4 + 1.05j): (
        95.644051617871213 - 24.496382872252344j,
        440.5300800842985 + 106.80369904993933j,
    ),
}

# Frozen from the Laurent expansion oracle (see conftest) at tau = 0.3+1.1i,
# z = a + b*tau for the listed (a, b).
FROZEN_WP = {
    (0.23, 0.11): (
        8.0085039028632572 - 8.5109960408181387j,
        -19.161617304921368 + 82.57277913151556j,
    ),
    (0.05, 0.31): (
        -5.9336719355362835 - 4.960987272331284j,
        35.353834352172491 - 9.9637404336495123j,
    ),
    (0.41, 0.37): (
        -0.77374428710548593 + 0.87816334966759035j,
        1.8579164775354091 + 14.570160164391529j,
    ),
}


class TestEisenstein:
    def test_frozen_lattice_sum_values(self):
        for tau, (g2_ref, g3_ref) in FROZEN_G2_G3.items():
            g2, g3 = eisenstein_g2_g3(LatticeTau.from_tau(tau))
            assert abs(g2 - g2_ref) < 1e-8 * abs(g2_ref)
            assert abs(g3 - g3_ref) < 1e-8 * abs(g3_ref)

    def test_live_lattice_sum_cross_check(self):
        tau = 0.21 + 1.17j
        g2_ref, g3_ref = lattice_sum_g2_g3(tau)
        g2, g3 = eisenstein_g2_g3(LatticeTau.from_tau(tau))
        assert abs(g2 - g2_ref) < 1e-8 * abs(g2_ref)
        assert abs(g3 - g3_ref) < 1e-8 * abs(g3_ref)

    def test_square_lattice_g3_vanishes(self):
        g2, g3 = eisenstein_g2_g3(LatticeTau.from_tau(1j))
        assert abs(g3) < 1e-12
        assert abs(g2.imag) < 1e-12
        assert g2.real > 0

    def test_hexagonal_lattice_g2_vanishes(self):
        rho = complex(math.cos(math.pi / 3), math.sin(math.pi / 3))
        g2, g3 = eisenstein_g2_g3(LatticeTau.from_tau(rho))
        assert abs(g2) < 1e-12

    def test_scaling_covariance(self):
        base = LatticeTau.from_tau(TAU)
        c = 1.3 - 0.7j
        scaled = LatticeTau(c, c * TAU)
        g2, g3 = eisenstein_g2_g3(base)
        g2c, g3c = eisenstein_g2_g3(scaled)
        assert abs(g2c - g2 / c ** 4) < 1e-10 * abs(g2)
        assert abs(g3c - g3 / c ** 6) < 1e-10 * abs(g3)


class TestLatticeReduction:
    def test_already_reduced(self):
        lat = LatticeTau.from_tau(TAU)
        assert lat.tau_reduced == pytest.approx(TAU)
        assert abs(lat.scale - 1) < 1e-15

    def test_reduction_reaches_fundamental_domain(self):
        for tau in (0.7 + 0.2j, 5.3 + 0.9j, -2.1 + 0.05j, 0.49 + 0.51j):
            lat = LatticeTau.from_tau(tau)
            red = lat.tau_reduced
            assert red.imag > 0
            assert abs(red.real) <= 0.5 + 1e-12
            assert abs(red) >= 1 - 1e-12

    def test_reduction_preserves_lattice(self):
        tau = 3.7 + 0.4j
        lat = LatticeTau.from_tau(tau)
        a, b, c, d = lat.basis_change
        assert a * d - b * c in (1, -1)
        # the reduced basis must generate the same lattice as (1, tau)
        s = lat.scale
        red = lat.tau_reduced
        for omega in (s, s * red):
            z = omega / 1.0
            # coordinates of omega in the original basis must be integers
            x = (z.real * tau.imag - z.imag * tau.real) / tau.imag
            y = z.imag / tau.imag
            assert abs(x - round(x)) < 1e-9
            assert abs(y - round(y)) < 1e-9

    def test_swapped_orientation(self):
        lat = LatticeTau(1.0, 1 / TAU)
        assert lat.tau_reduced.imag > 0

    def test_degenerate_periods_rejected(self):
        with pytest.raises(InvalidPoint):
            LatticeTau(1.0, 2.0)
        with pytest.raises(InvalidPoint):
            LatticeTau(0.0, 1j)


class TestWeierstrass:
    def test_frozen_laurent_values(self, lattice):
        for (a, b), (p_ref, dp_ref) in FROZEN_WP.items():
            pt = TorusPoint.from_coords(lattice, a, b)
            assert abs(wp(pt).value - p_ref) < 1e-9 * abs(p_ref)
            assert abs(wp_prime(pt).value - dp_ref) < 1e-9 * abs(dp_ref)

    def test_live_laurent_cross_check(self, lattice):
        g2, g3 = lattice_sum_g2_g3(TAU)
        for (a, b) in ((0.17, 0.08), (0.33, 0.29)):
            z = a + b * TAU
            p_ref, dp_ref = laurent_wp(z, g2, g3)
            pt = TorusPoint.from_coords(lattice, a, b)
            assert abs(wp(pt).value - p_ref) < 1e-9 * abs(p_ref)
            assert abs(wp_prime(pt).value - dp_ref) < 1e-9 * abs(dp_ref)

    def test_differential_equation(self, lattice):
        import random

        g2, g3 = eisenstein_g2_g3(lattice)
        rng = random.Random(7)
        for _ in range(100):
            a = rng.uniform(0.05, 0.95)
            b = rng.uniform(0.05, 0.95)
            pt = TorusPoint.from_coords(lattice, a, b)
            p, dp = wp_both_values(pt)
            lhs = dp * dp
            rhs = 4 * p ** 3 - g2 * p - g3
            scale = max(1.0, abs(4 * p ** 3), abs(g2 * p), abs(g3))
            assert abs(lhs - rhs) / scale < 1e-10

    def test_pole_at_origin(self, lattice):
        origin = TorusPoint.from_coords(lattice, 0.0, 0.0)
        assert wp(origin).is_pole
        assert wp_prime(origin).is_pole

    def test_two_torsion_critical_points(self, lattice):
        g2, g3 = eisenstein_g2_g3(lattice)
        es = []
        for (a, b) in ((0.5, 0.0), (0.0, 0.5), (0.5, 0.5)):
            pt = TorusPoint.from_coords(lattice, a, b)
            assert abs(wp_prime(pt).value) < 1e-9
            es.append(wp(pt).value)
        e1, e2, e3 = es
        assert abs(e1 + e2 + e3) < 1e-9
        assert abs(e1 * e2 + e1 * e3 + e2 * e3 + g2 / 4) < 1e-8 * max(1, abs(g2))
        assert abs(e1 * e2 * e3 - g3 / 4) < 1e-8 * max(1, abs(g3))

    @settings(max_examples=40, deadline=None)
    @given(
        a=st.floats(0.02, 0.98),
        b=st.floats(0.02, 0.98),
    )
    def test_parity(self, a, b):
        lat = LatticeTau.from_tau(TAU)
        pt = TorusPoint.from_coords(lat, a, b)
        neg = -pt
        p_pos, dp_pos = wp_both_values(pt)
        p_neg, dp_neg = wp_both_values(neg)
        scale = max(1.0, abs(p_pos))
        assert abs(p_pos - p_neg) < 1e-9 * scale
        dscale = max(1.0, abs(dp_pos))
        assert abs(dp_pos + dp_neg) < 1e-9 * dscale

    def test_periodicity_through_reduction(self, lattice):
        z = 0.31 + 0.22 * TAU
        base = reduce_point(z, lattice)
        for omega in (1.0, TAU, 3 - 2 * TAU):
            shifted = reduce_point(z + omega, lattice)
            assert base.close_to(shifted)
            assert abs(wp(base).value - wp(shifted).value) < 1e-9

    def test_basis_change_invariance(self):
        # same lattice presented with a different basis gives the same wp
        lat1 = LatticeTau.from_tau(TAU)
        lat2 = LatticeTau(TAU + 2, 1.0 + 0j)
        z = 0.27 + 0.31j
        v1 = wp(reduce_point(z, lat1)).value
        v2 = wp(reduce_point(z, lat2)).value
        assert abs(v1 - v2) < 1e-9 * max(1, abs(v1))


class TestWpInverse:
    def test_roundtrip_from_wp(self, lattice):
        for (a, b) in ((0.23, 0.11), (0.05, 0.31), (0.41, 0.37), (0.5, 0.25)):
            pt = TorusPoint.from_coords(lattice, a, b)
            x = wp(pt).value
            plus, minus = wp_inverse(x, lattice)
            assert plus.close_to(pt, tol=1e-7) or minus.close_to(pt, tol=1e-7)
            assert plus.close_to(-minus, tol=1e-7)

    def test_values_match_target(self, lattice):
        for x in (2.3 - 1.1j, -14.5 + 3j, 0.01 + 0.02j, 250 + 40j):
            plus, minus = wp_inverse(x, lattice)
            for z in (plus, minus):
                assert abs(wp(z).value - x) < 1e-8 * (1 + abs(x))

    @settings(max_examples=25, deadline=None)
    @given(
        re=st.floats(-20, 20),
        im=st.floats(-20, 20),
    )
    def test_random_targets(self, re, im):
        lat = LatticeTau.from_tau(TAU)
        x = complex(re, im)
        plus, _ = wp_inverse(x, lat)
        assert abs(wp(plus).value - x) < 1e-7 * (1 + abs(x))


class TestTorusPoints:
    def test_reduce_wraps_into_unit_cell(self, lattice):
        p = TorusPoint.from_coords(lattice, 1.75, -0.25)
        assert p.a == pytest.approx(0.75)
        assert p.b == pytest.approx(0.75)

    def test_negative_zero_normalized(self, lattice):
        p = TorusPoint.from_coords(lattice, -0.0, 1.0)
        assert p.a == 0.0 and p.b == 0.0
        assert p.is_zero()

    def test_addition_matches_complex(self, lattice):
        p = TorusPoint.from_coords(lattice, 0.3, 0.4)
        q = TorusPoint.from_coords(lattice, 0.8, 0.9)
        s = p + q
        expected = reduce_point(p.z + q.z, lattice)
        assert s.close_to(expected)

    def test_toroidal_distance_wraps(self, lattice):
        p = TorusPoint.from_coords(lattice, 0.01, 0.5)
        q = TorusPoint.from_coords(lattice, 0.99, 0.5)
        assert p.toroidal_dist(q) < 0.05

    def test_torsion_counts_and_orders(self, lattice):
        for n in (1, 2, 3, 4):
            pts = torsion_points(lattice, n)
            assert len(pts) == n * n
            assert len({(round(p.a, 9), round(p.b, 9)) for p in pts}) == n * n
            for p in pts:
                acc = TorusPoint.from_coords(lattice, 0.0, 0.0)
                for _ in range(n):
                    acc = acc + p
                assert acc.is_zero()

    def test_torsion_rejects_bad_order(self, lattice):
        with pytest.raises(InvalidOrder):
            torsion_points(lattice, 0)
        with pytest.raises(InvalidOrder):
            torsion_points(lattice, -3)
        with pytest.raises(InvalidOrder):
            torsion_points(lattice, True)


class TestFiniteSubgroup:
    def test_parse_and_order(self):
        assert FiniteSubgroupSpec.parse(("1/2,0",)).order == 2
        assert FiniteSubgroupSpec.parse(("1/3,0",)).order == 3
        assert FiniteSubgroupSpec.parse(("1/2,0", "0,1/2")).order == 4
        assert FiniteSubgroupSpec.parse(("1/6,1/6",)).order == 6
        assert FiniteSubgroupSpec.trivial().order == 1

    def test_elements_closed_under_addition(self):
        spec = FiniteSubgroupSpec.parse(("1/4,0", "0,1/2"))
        elems = set(spec.elements)
        assert len(elems) == spec.order == 8
        for x in elems:
            for y in elems:
                s = ((x[0] + y[0]) % 1, (x[1] + y[1]) % 1)
                assert s in elems

    def test_parse_rejects_garbage(self):
        for bad in ("", "1/2", "a,b", "1/0,0"):
            with pytest.raises(InvalidSubgroup):
                FiniteSubgroupSpec.parse((bad,))

    def test_denominator_cap(self):
        with pytest.raises(InvalidSubgroup):
            FiniteSubgroupSpec.from_generators([(Fraction(1, 5000), Fraction(0))])


class TestQuotientLattice:
    def test_index_two_quotient(self, lattice, q2):
        quo = quotient_lattice(lattice, q2)
        assert quo.index == 2
        # the generator becomes a period of the target
        img = quo.map(TorusPoint.from_coords(lattice, 0.5, 0.0))
        assert img.is_zero()

    def test_klein_four_quotient(self, lattice):
        q0 = FiniteSubgroupSpec.parse(("1/2,0", "0,1/2"))
        quo = quotient_lattice(lattice, q0)
        assert quo.index == 4
        for p in q0.points_on(lattice):
            assert quo.map(p).is_zero()

    def test_cyclic_three_diagonal(self, lattice):
        q0 = FiniteSubgroupSpec.parse(("1/3,1/3",))
        quo = quotient_lattice(lattice, q0)
        assert quo.index == 3
        assert quo.map(TorusPoint.from_coords(lattice, 1 / 3, 1 / 3)).is_zero()

    def test_trivial_quotient_is_identity(self, lattice):
        quo = quotient_lattice(lattice, FiniteSubgroupSpec.trivial())
        assert quo.index == 1
        p = TorusPoint.from_coords(lattice, 0.3, 0.7)
        assert quo.map(p).close_to(p)

    def test_lifts_invert_map(self, lattice, q2):
        quo = quotient_lattice(lattice, q2)
        w = TorusPoint.from_coords(quo.target, 0.37, 0.61)
        lifts = quo.lifts(w)
        assert len(lifts) == 2
        for z in lifts:
            assert quo.map(z).close_to(w, tol=1e-9)
        assert not lifts[0].close_to(lifts[1], tol=1e-6)

    def test_quotient_g2_differs(self, lattice, q2):
        # E and E/Q0 are non-isomorphic curves for |Q0| = 2
        quo = quotient_lattice(lattice, q2)
        g2_src, _ = eisenstein_g2_g3(lattice)
        g2_dst, _ = eisenstein_g2_g3(quo.target)
        assert abs(g2_src - g2_dst) > 1e-3
