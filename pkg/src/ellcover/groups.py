"""Finite groups of affine automorphisms of E^d, represented exactly.

An automorphism is a pair (M, t): an integer matrix M acting coordinatewise
on C/Lambda tuples and a translation t whose components are rational torsion
points.  Products, inverses, and closure are all exact, so group orders are
certificates rather than floating-point artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .elliptic import EPS_PT, FiniteSubgroupSpec, TorusPoint, _frac
from .errors import InvalidOrder, OrderCapExceeded

IntMatrix = tuple[tuple[int, ...], ...]
Translation = tuple[tuple[Fraction, Fraction], ...]
PointTuple = tuple[TorusPoint, ...]

DEFAULT_ORDER_CAP = 100_000


def _identity(d: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def _zero_translation(d: int) -> Translation:
    return tuple((Fraction(0), Fraction(0)) for _ in range(d))


def _mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    d = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(d)) for j in range(d))
        for i in range(d)
    )


_ZERO = Fraction(0)


def _is_zero_translation(t: Translation) -> bool:
    return all(a == 0 and b == 0 for a, b in t)


def _mat_apply_translation(m: IntMatrix, t: Translation) -> Translation:
    d = len(m)
    out = []
    for i in range(d):
        a = _ZERO
        b = _ZERO
        for j in range(d):
            mij = m[i][j]
            if mij:
                a += mij * t[j][0]
                b += mij * t[j][1]
        out.append((a % 1, b % 1))
    return tuple(out)


def _int_det(m: Sequence[Sequence[int]]) -> int:
    mat = [list(row) for row in m]
    d = len(mat)
    det = 1
    for col in range(d):
        pivot = next((r for r in range(col, d) if mat[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            mat[col], mat[pivot] = mat[pivot], mat[col]
            det = -det
        # fraction-free elimination over Z via exact rational rows
        prow = mat[col]
        for r in range(col + 1, d):
            factor = Fraction(mat[r][col], prow[col])
            mat[r] = [a - factor * b for a, b in zip(mat[r], prow)]
        det *= prow[col]
    return int(Fraction(det))


def _unimodular_inverse(m: IntMatrix) -> IntMatrix:
    """Exact inverse of an integer matrix with det +-1 (adjugate route)."""
    d = len(m)
    det = _int_det(m)
    if det not in (1, -1):
        raise InvalidOrder(f"matrix with det {det} is not an automorphism of E^d")

    def minor(rows: Sequence[Sequence[int]], i: int, j: int) -> list[list[int]]:
        return [
            [row[c] for c in range(d) if c != j]
            for r, row in enumerate(rows)
            if r != i
        ]

    if d == 1:
        return ((det,),)
    adj = [
        [(-1) ** (i + j) * _int_det(minor(m, j, i)) for j in range(d)]
        for i in range(d)
    ]
    return tuple(tuple(det * v for v in row) for row in adj)


@dataclass(frozen=True)
class AffineAutomorphism:
    """z |-> M z + t on E^d, with M integral and t rational torsion."""

    matrix: IntMatrix
    translation: Translation

    @classmethod
    def identity(cls, d: int) -> "AffineAutomorphism":
        return cls(_identity(d), _zero_translation(d))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def is_identity(self) -> bool:
        return self == AffineAutomorphism.identity(self.dim)

    def compose(self, other: "AffineAutomorphism") -> "AffineAutomorphism":
        """self after other: (M1, t1) * (M2, t2) = (M1 M2, M1 t2 + t1)."""
        m = _mat_mul(self.matrix, other.matrix)
        if _is_zero_translation(other.translation):
            return AffineAutomorphism(m, self.translation)
        moved = _mat_apply_translation(self.matrix, other.translation)
        if _is_zero_translation(self.translation):
            return AffineAutomorphism(m, moved)
        t = tuple(
            ((a + b) % 1, (c + e) % 1)
            for (a, c), (b, e) in zip(moved, self.translation)
        )
        return AffineAutomorphism(m, t)

    def __mul__(self, other: "AffineAutomorphism") -> "AffineAutomorphism":
        return self.compose(other)

    def inverse(self) -> "AffineAutomorphism":
        minv = _unimodular_inverse(self.matrix)
        t = _mat_apply_translation(minv, self.translation)
        t = tuple(((-a) % 1, (-b) % 1) for a, b in t)
        return AffineAutomorphism(minv, t)

    def apply(self, point: PointTuple) -> PointTuple:
        """Image of a tuple of torus points; float arithmetic mod 1."""
        d = self.dim
        if len(point) != d:
            raise InvalidOrder(f"point has {len(point)} components, expected {d}")
        lattice = point[0].lattice
        out = []
        for i in range(d):
            a = float(self.translation[i][0])
            b = float(self.translation[i][1])
            for j in range(d):
                mij = self.matrix[i][j]
                if mij:
                    a += mij * point[j].a
                    b += mij * point[j].b
            out.append(TorusPoint(lattice, _frac(a), _frac(b)))
        return tuple(out)


class FiniteActionGroup:
    """Closure of affine generators; element list sorted for reproducibility."""

    def __init__(self, dim: int, generators: Sequence[AffineAutomorphism],
                 elements: tuple[AffineAutomorphism, ...]):
        self.dim = dim
        self.generators = tuple(generators)
        self.elements = elements

    @classmethod
    def generate(
        cls,
        generators: Iterable[AffineAutomorphism],
        cap: int = DEFAULT_ORDER_CAP,
    ) -> "FiniteActionGroup":
        gens = tuple(generators)
        if not gens:
            raise InvalidOrder("no generators")
        d = gens[0].dim
        if any(g.dim != d for g in gens):
            raise InvalidOrder("generators act on different dimensions")
        ident = AffineAutomorphism.identity(d)
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for f in frontier:
                for g in gens:
                    h = f * g
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
                        if len(seen) > cap:
                            raise OrderCapExceeded(
                                f"group closure exceeded cap {cap}"
                            )
            frontier = nxt
        ordered = tuple(sorted(seen, key=lambda e: (e.matrix, e.translation)))
        return cls(d, gens, ordered)

    @property
    def order(self) -> int:
        return len(self.elements)

    def orbit(self, point: PointTuple, tol: float = EPS_PT) -> list[PointTuple]:
        """Distinct images of a point, deduplicated in the toroidal metric.

        Canonically sorted, so the result is independent of element order.
        """
        reps: list[PointTuple] = []
        for g in self.elements:
            q = g.apply(point)
            if not any(_tuple_close(q, r, tol) for r in reps):
                reps.append(q)
        reps.sort(key=lambda t: tuple(p.sort_key() for p in t))
        return reps

    def is_free_at(
        self, point: PointTuple, tol: float = EPS_PT
    ) -> tuple[bool, list[AffineAutomorphism]]:
        """(True, [id]) when only the identity fixes the point; else the stabilizer."""
        stab = self.stabilizer(point, tol)
        return len(stab) == 1, stab

    def stabilizer(self, point: PointTuple, tol: float = EPS_PT) -> list[AffineAutomorphism]:
        return [
            g for g in self.elements if _tuple_close(g.apply(point), point, tol)
        ]


def _tuple_close(p: PointTuple, q: PointTuple, tol: float) -> bool:
    return all(a.close_to(b, tol) for a, b in zip(p, q))


def orbit(group: FiniteActionGroup, point: PointTuple, tol: float = EPS_PT) -> list[PointTuple]:
    return group.orbit(point, tol)


def is_free_at(
    group: FiniteActionGroup, point: PointTuple, tol: float = EPS_PT
) -> tuple[bool, list[AffineAutomorphism]]:
    return group.is_free_at(point, tol)


def _translation_generators(d: int, q0: FiniteSubgroupSpec) -> list[AffineAutomorphism]:
    ident = _identity(d)
    gens = []
    for ga, gb in q0.generators:
        for slot in range(d):
            t = list(_zero_translation(d))
            t[slot] = (ga % 1, gb % 1)
            gens.append(AffineAutomorphism(ident, tuple(t)))
    return gens


def _transposition_generators(d: int) -> list[AffineAutomorphism]:
    gens = []
    for i in range(d - 1):
        rows = [list(r) for r in _identity(d)]
        rows[i], rows[i + 1] = rows[i + 1], rows[i]
        gens.append(
            AffineAutomorphism(tuple(tuple(r) for r in rows), _zero_translation(d))
        )
    return gens


def build_group_A(
    d: int, q0: FiniteSubgroupSpec, cap: int = DEFAULT_ORDER_CAP
) -> FiniteActionGroup:
    """Deck group of the wp-quotient cover: order 2^d * d! * |Q0|^d.

    Per coordinate: negation (wp is even) and translation by Q0 (the fibers
    of E -> E/Q0); across coordinates: the symmetric group S_d.
    """
    if d < 1:
        raise InvalidOrder(f"need d >= 1, got {d}")
    gens = []
    for slot in range(d):
        neg = [list(r) for r in _identity(d)]
        neg[slot][slot] = -1
        gens.append(
            AffineAutomorphism(tuple(tuple(r) for r in neg), _zero_translation(d))
        )
    gens.extend(_transposition_generators(d))
    gens.extend(_translation_generators(d, q0))
    return FiniteActionGroup.generate(gens, cap=cap)


def build_group_B(
    d: int, q0: FiniteSubgroupSpec, cap: int = DEFAULT_ORDER_CAP
) -> FiniteActionGroup:
    """Deck group of the sum-zero divisor cover: order (d+1)! * |Q0|^d.

    S_(d+1) permutes the divisor points (y_1, ..., y_d, y_(d+1) = -sum y_i).
    Generators: sigma_1 swaps the first two coordinates; sigma_2 cycles,
    sending (y_1, ..., y_d) to (-(y_1+...+y_d), y_1, ..., y_(d-1)), so its
    matrix has first row all -1 over a subdiagonal identity.  Coordinatewise
    Q0 translations account for the isogeny factor.
    """
    if d < 1:
        raise InvalidOrder(f"need d >= 1, got {d}")
    gens = []
    if d >= 2:
        gens.extend(_transposition_generators(d)[:1])
    cyc = [[0] * d for _ in range(d)]
    cyc[0] = [-1] * d
    for i in range(1, d):
        cyc[i][i - 1] = 1
    gens.append(
        AffineAutomorphism(tuple(tuple(r) for r in cyc), _zero_translation(d))
    )
    gens.extend(_translation_generators(d, q0))
    return FiniteActionGroup.generate(gens, cap=cap)
