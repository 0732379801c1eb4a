"""Projective coordinates, symmetric products, and section calculus on E.

Two coordinate engines live here.  `sym_product` turns a d-tuple of P^1
points into the coefficient vector of the degree-d binary form with those
roots, which is the quotient map (P^1)^d -> P^d; `sym_fiber` inverts it.
`SectionBasis` / `divisor_to_coords` / `section_zeros` realize the linear
system L(n*[0]) on E concretely enough to map divisors to coordinate vectors
and back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .elliptic import (
    EPS_NUM,
    EPS_PT,
    HomPair,
    LatticeTau,
    TorusPoint,
    wp_both_values,
    wp_inverse,
    wp_second_value,
)
from .errors import (
    DegenerateSection,
    HighMultiplicity,
    IllConditioned,
    InvalidOrder,
    InvalidPoint,
    SumNotZero,
)

#: default tolerance for projective-point equality (Fubini-Study chordal)
EPS_PROJ = 1e-7

#: relative threshold below which the SVD kernel is considered ambiguous
_COND_FLOOR = 1e-10

#: relative clustering radius for repeated polynomial roots
_ROOT_CLUSTER = 1e-5


@dataclass(frozen=True)
class ProjectivePoint:
    """A point of P^m with a canonical representative.

    Coordinates are divided by the entry of largest modulus, which therefore
    becomes exactly 1+0j; equality is Fubini-Study chordal distance below tol.
    """

    coords: tuple[complex, ...]

    @classmethod
    def normalize(cls, coords: Sequence[complex]) -> "ProjectivePoint":
        vec = [complex(c) for c in coords]
        if not vec:
            raise InvalidPoint("empty coordinate vector")
        mags = [abs(c) for c in vec]
        if not all(math.isfinite(m) for m in mags):
            raise InvalidPoint(f"invalid projective coordinates: {coords!r}")
        top = max(mags)
        if top == 0:
            raise InvalidPoint(f"invalid projective coordinates: {coords!r}")
        # ties pivot on the last maximal entry: (1:1),(-1:1) maps to (-1:0:1)
        k = len(mags) - 1 - mags[::-1].index(top)
        pivot = vec[k]
        out = tuple(c / pivot for c in vec)
        out = out[:k] + (1.0 + 0j,) + out[k + 1 :]
        return cls(out)

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def chordal_dist(self, other: "ProjectivePoint") -> float:
        """Chordal metric |p ^ q| / (|p| |q|) on P^m.

        The wedge form sum |p_i q_j - p_j q_i|^2 equals |p|^2|q|^2 - |<p,q>|^2
        exactly but avoids the cancellation that flattens distances below
        1e-8 in the inner-product form.
        """
        p = self.coords
        q = other.coords
        if len(p) != len(q):
            raise InvalidPoint("projective points of different dimension")
        wedge = 0.0
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                wedge += abs(p[i] * q[j] - p[j] * q[i]) ** 2
        norms = sum(abs(c) ** 2 for c in p) * sum(abs(c) ** 2 for c in q)
        return math.sqrt(wedge / norms)

    def close_to(self, other: "ProjectivePoint", tol: float = EPS_PROJ) -> bool:
        return self.chordal_dist(other) <= tol


def projective_spread(points: Sequence[ProjectivePoint]) -> float:
    """Largest pairwise chordal distance; 0 for fewer than two points."""
    worst = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            worst = max(worst, points[i].chordal_dist(points[j]))
    return worst


def _pair_sort_key(pair: HomPair) -> tuple[float, float, float, float]:
    return (pair.num.real, pair.num.imag, pair.den.real, pair.den.imag)


def sym_product(pairs: Sequence[HomPair]) -> ProjectivePoint:
    """Coefficients (c_0 : ... : c_d) of prod_i (den_i*X - num_i*Y) in P^d.

    Index k holds the coefficient of X^k Y^(d-k), so the roots num_i/den_i
    of the dehomogenization in t = X/Y are the roots of c_d*t^d + ... + c_0.
    Factors are multiplied in sorted order, making the result exactly
    invariant under permutations of the input.
    """
    if not pairs:
        raise InvalidPoint("need at least one factor")
    ordered = sorted(pairs, key=_pair_sort_key)
    coeffs = np.array([1.0 + 0j])
    for num, den in ordered:
        coeffs = np.convolve(coeffs, np.array([den, -num]))
    return ProjectivePoint.normalize(coeffs[::-1])


def _cluster_roots(roots: Sequence[complex], rel_tol: float = _ROOT_CLUSTER) -> list[tuple[complex, int]]:
    """Greedy clustering of numerically split repeated roots."""
    clusters: list[list[complex]] = []
    for r in sorted(roots, key=lambda c: (c.real, c.imag)):
        for cl in clusters:
            center = sum(cl) / len(cl)
            if abs(r - center) <= rel_tol * (1.0 + abs(center)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    return [(sum(cl) / len(cl), len(cl)) for cl in clusters]


def sym_fiber(
    point: ProjectivePoint | Sequence[complex], eps: float = EPS_NUM
) -> list[tuple[HomPair, int]]:
    """Roots (with multiplicity) of the binary form with coefficients `point`.

    Returns normalized (num, den) pairs; (1, 0) stands for the root at
    infinity, contributed by vanishing leading (top X-power) coefficients.
    """
    if not isinstance(point, ProjectivePoint):
        vec = [complex(c) for c in point]
        if not vec or not any(abs(c) > 0 for c in vec):
            raise DegenerateSection("zero coefficient vector has no roots")
        point = ProjectivePoint.normalize(vec)
    coeffs = list(point.coords)[::-1]  # decreasing degree in t = X/Y
    top = max(abs(c) for c in coeffs)
    lead = 0
    while lead < len(coeffs) - 1 and abs(coeffs[lead]) <= eps * top:
        lead += 1
    out: list[tuple[HomPair, int]] = []
    if lead:
        out.append((HomPair(1.0 + 0j, 0j), lead))
    finite = coeffs[lead:]
    if len(finite) > 1:
        roots = np.roots(np.array(finite))
        for center, mult in _cluster_roots(list(roots)):
            if abs(center) <= 1.0:
                out.append((HomPair(complex(center), 1.0 + 0j), mult))
            else:
                out.append((HomPair(1.0 + 0j, 1.0 / complex(center)), mult))
    return out


class SectionBasis:
    """Monomial basis of L(n*[0]): {1} u {wp^a : 2a <= n} u {wp^b wp' : 2b+3 <= n}.

    The n basis functions have pairwise distinct pole orders at 0, namely
    {0, 2, 3, ..., n}, and are listed in increasing pole order.
    """

    def __init__(self, n: int, lattice: LatticeTau):
        if n < 2:
            raise InvalidOrder(f"line bundle degree must be >= 2, got {n}")
        self.n = n
        self.lattice = lattice
        terms: list[tuple[int, int, int]] = [(0, 0, 0)]  # (pole order, wp power, wp' power)
        terms.extend((2 * a, a, 0) for a in range(1, n // 2 + 1))
        terms.extend((2 * b + 3, b, 1) for b in range((n - 3) // 2 + 1) if 2 * b + 3 <= n)
        terms.sort()
        self.terms = tuple(terms)
        self.pole_orders = tuple(t[0] for t in terms)

    def __len__(self) -> int:
        return self.n

    def evaluate(self, p: TorusPoint) -> np.ndarray:
        """Values of all basis functions at a non-pole point."""
        w, wprime = wp_both_values(p)
        return np.array(
            [w**a * (wprime if e else 1.0) for _, a, e in self.terms]
        )

    def evaluate_derivative(self, p: TorusPoint) -> np.ndarray:
        """z-derivatives of all basis functions at a non-pole point."""
        w, wprime = wp_both_values(p)
        wsecond = wp_second_value(p)
        out = []
        for _, a, e in self.terms:
            if e == 0:
                out.append(a * w ** (a - 1) * wprime if a else 0j)
            else:
                out.append(a * w ** (a - 1) * wprime**2 + w**a * wsecond if a else wsecond)
        return np.array(out)


def _group_divisor(
    points: Sequence[TorusPoint], tol: float
) -> list[tuple[TorusPoint, int]]:
    groups: list[tuple[TorusPoint, list[TorusPoint]]] = []
    for p in sorted(points, key=TorusPoint.sort_key):
        for rep, members in groups:
            if p.close_to(rep, tol):
                members.append(p)
                break
        else:
            groups.append((p, [p]))
    return [(rep, len(members)) for rep, members in groups]


def divisor_to_coords(
    points: Sequence[TorusPoint],
    basis: SectionBasis,
    eps: float = EPS_PT,
) -> ProjectivePoint:
    """Coordinates in P^(n-1) of the section of O(n*[0]) vanishing on `points`.

    The divisor must be effective of degree n = basis.n with sum 0 in E;
    otherwise no section exists and SumNotZero is raised.  Each point may
    appear at most twice: a repeated finite point contributes a derivative
    row, each copy of the origin strikes the basis element of highest
    remaining pole order.  The kernel is extracted by SVD; a collapsing
    second-smallest singular value raises IllConditioned.
    """
    n = basis.n
    if len(points) != n:
        raise InvalidPoint(f"divisor degree {len(points)} does not match n={n}")
    total = points[0]
    for p in points[1:]:
        total = total + p
    if not total.is_zero(tol=max(eps, 1e-6) * n):
        raise SumNotZero(
            f"divisor sum ({total.a:.3e}, {total.b:.3e}) is not the origin"
        )
    rows: list[np.ndarray] = []
    zero_mult = 0
    for rep, mult in _group_divisor(points, eps):
        if mult > 2:
            raise HighMultiplicity(
                f"point {rep.sort_key()} repeats {mult} times; at most 2 supported"
            )
        if rep.is_zero(eps):
            zero_mult = mult
            continue
        rows.append(basis.evaluate(rep))
        if mult == 2:
            rows.append(basis.evaluate_derivative(rep))
    # a zero of multiplicity m at the origin kills the m basis elements of
    # largest pole order, leaving a section of L((n-m)*[0])
    for k in range(zero_mult):
        unit = np.zeros(n, dtype=complex)
        unit[n - 1 - k] = 1.0
        rows.append(unit)
    matrix = np.array(rows)
    # row scaling does not change the kernel but tames wp-power growth
    norms = np.max(np.abs(matrix), axis=1, keepdims=True)
    matrix = matrix / np.where(norms == 0, 1.0, norms)
    _, s, vh = np.linalg.svd(matrix)
    if len(s) >= 2 and s[-2] <= _COND_FLOOR * s[0]:
        raise IllConditioned(
            f"section system is numerically degenerate (s2/s0={s[-2] / s[0]:.2e})"
        )
    return ProjectivePoint.normalize(np.conj(vh[-1]))


def section_zeros(
    coeffs: Sequence[complex] | ProjectivePoint,
    basis: SectionBasis,
    eps: float = EPS_NUM,
) -> list[tuple[TorusPoint, int]]:
    """Zero divisor of the section sum(c_j f_j) of O(n*[0]), n = basis.n.

    Writes the section as P(wp) + wp' Q(wp) and factors its norm
    N(x) = P(x)^2 - (4x^3 - g2 x - g3) Q(x)^2, whose roots are the wp-values
    of the finite zeros; each root is lifted by `wp_inverse` and assigned to
    the sign branch where the section actually vanishes.  The origin absorbs
    the remaining degree.
    """
    if isinstance(coeffs, ProjectivePoint):
        coeffs = coeffs.coords
    n = basis.n
    lattice = basis.lattice
    if len(coeffs) != n:
        raise InvalidPoint(f"coefficient vector length {len(coeffs)} != n={n}")
    c = np.asarray(coeffs, dtype=complex)
    top = float(np.max(np.abs(c)))
    if top == 0 or not math.isfinite(top):
        raise DegenerateSection("zero or non-finite coefficient vector")

    # pole order of the section = largest pole order with surviving coefficient
    p_order = 0
    for j in range(n - 1, -1, -1):
        if abs(c[j]) > 1e-12 * top:
            p_order = basis.pole_orders[j]
            break

    # split into even part P(x) and odd part x-polynomials: f = P(wp) + wp' Q(wp)
    degP = p_order // 2
    degQ = max((p_order - 3) // 2, -1)
    P = np.zeros(degP + 1, dtype=complex)
    Q = np.zeros(degQ + 1, dtype=complex) if degQ >= 0 else np.zeros(0, dtype=complex)
    for (order, a, e), cj in zip(basis.terms, c):
        if order > p_order:
            continue
        if e == 0:
            P[a] += cj
        else:
            Q[a] += cj

    divisor: list[tuple[TorusPoint, int]] = []
    if p_order == 0:
        divisor.append((TorusPoint(lattice, 0.0, 0.0), n))
        return divisor

    g2, g3 = lattice.g2g3
    # N(x) = P^2 - (4x^3 - g2 x - g3) Q^2, degree exactly p_order
    Pd = P[::-1]  # numpy poly convention: highest degree first
    norm = np.convolve(Pd, Pd)
    if len(Q):
        Qd = Q[::-1]
        cubic = np.array([4.0, 0.0, -g2, -g3])
        norm_q = np.convolve(np.convolve(Qd, Qd), cubic)
        width = max(len(norm), len(norm_q))
        norm = np.pad(norm, (width - len(norm), 0)) - np.pad(
            norm_q, (width - len(norm_q), 0)
        )
    # strip numerically void leading terms down to the true degree
    norm = norm[len(norm) - (p_order + 1) :]

    def section_at(z: TorusPoint) -> complex:
        return complex(np.dot(c, basis.evaluate(z)))

    scale = float(np.max(np.abs(norm)))
    if scale == 0:
        raise DegenerateSection("norm polynomial vanishes identically")
    roots = np.roots(norm / scale)
    for x0, mult in _cluster_roots(list(roots)):
        z_plus, z_minus = wp_inverse(x0, lattice, eps=max(eps, 1e-12))
        if z_plus.close_to(-z_plus, tol=1e-6):
            # 2-torsion: both branches coincide, full multiplicity
            divisor.append((z_plus, mult))
            continue
        f_plus = abs(section_at(z_plus))
        f_minus = abs(section_at(z_minus))
        # scale of the two nearly-cancelling halves of the section at x0
        vals = np.abs(basis.evaluate(z_plus)) * np.abs(c)
        size = float(np.max(vals)) + 1e-300
        if f_plus < 1e-4 * size and f_minus < 1e-4 * size:
            # both branches vanish: split the cluster between them
            low = mult // 2
            high = mult - low
            if f_plus <= f_minus:
                split = [(z_plus, high), (z_minus, low)]
            else:
                split = [(z_plus, low), (z_minus, high)]
            divisor.extend((z, m) for z, m in split if m)
        elif f_plus < f_minus:
            divisor.append((z_plus, mult))
        else:
            divisor.append((z_minus, mult))
    if n > p_order:
        divisor.append((TorusPoint(lattice, 0.0, 0.0), n - p_order))
    return divisor
