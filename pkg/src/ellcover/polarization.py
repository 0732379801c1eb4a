"""Exact intersection theory on E^d in the integer-matrix model (End(E) = Z).

Line bundles on E^d correspond to symmetric integer matrices; the Euler
characteristic is the determinant, the d-fold self-intersection is d! times
it, and abelian subvarieties are saturated sublattice inclusions.  Every
operation here is exact integer or rational arithmetic; no tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    ExponentMismatch,
    InvalidOrder,
    InvalidSubgroup,
    NonIntegralNorm,
)

IntRows = tuple[tuple[int, ...], ...]


def _freeze(rows: Sequence[Sequence[int]]) -> IntRows:
    out = []
    for row in rows:
        frozen = []
        for v in row:
            if isinstance(v, bool) or int(v) != v:
                raise InvalidOrder(f"matrix entry {v!r} is not an integer")
            frozen.append(int(v))
        out.append(tuple(frozen))
    return tuple(out)


def _det_bareiss(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free exact determinant of an integer matrix."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def _transpose(rows: IntRows) -> IntRows:
    return tuple(zip(*rows)) if rows else ()


def _matmul(a: Sequence[Sequence], b: Sequence[Sequence]):
    cols = len(b[0])
    inner = len(b)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols))
        for i in range(len(a))
    )


def _fraction_inverse(rows: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Exact inverse by Gauss-Jordan over Q; raises on singular input."""
    n = len(rows)
    aug = [
        [Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(rows)
    ]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise InvalidOrder("singular matrix has no inverse")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _invariant_factors(rows: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero Smith invariant factors d_1 | d_2 | ... of an integer matrix."""
    import sympy
    from sympy.matrices.normalforms import smith_normal_form

    mat = sympy.Matrix([list(r) for r in rows])
    snf = smith_normal_form(mat)
    out = []
    for i in range(min(snf.shape)):
        v = int(snf[i, i])
        if v != 0:
            out.append(abs(v))
    return out


@dataclass(frozen=True)
class PolarizationMatrix:
    """A line bundle on E^d as a symmetric d x d integer matrix.

    Positive definite matrices are polarizations; semidefinite ones arise as
    pullbacks (e.g. along norm endomorphisms) and are accepted too.
    """

    rows: IntRows

    def __post_init__(self):
        rows = _freeze(self.rows)
        object.__setattr__(self, "rows", rows)
        d = len(rows)
        if any(len(r) != d for r in rows):
            raise InvalidOrder("polarization matrix must be square")
        if rows != _transpose(rows):
            raise InvalidOrder("polarization matrix must be symmetric")

    @classmethod
    def identity(cls, d: int) -> "PolarizationMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @classmethod
    def ones(cls, d: int) -> "PolarizationMatrix":
        return cls(tuple(tuple(1 for _ in range(d)) for _ in range(d)))

    @classmethod
    def scaled_identity(cls, d: int, c: int) -> "PolarizationMatrix":
        return cls(tuple(tuple(c * int(i == j) for j in range(d)) for i in range(d)))

    @classmethod
    def identity_plus_ones(cls, d: int) -> "PolarizationMatrix":
        return cls(
            tuple(tuple(int(i == j) + 1 for j in range(d)) for i in range(d))
        )

    @property
    def d(self) -> int:
        return len(self.rows)

    @property
    def is_positive_definite(self) -> bool:
        """Sylvester test: all leading principal minors positive."""
        return all(
            _det_bareiss([row[: k + 1] for row in self.rows[: k + 1]]) > 0
            for k in range(self.d)
        )


@dataclass(frozen=True)
class SublatticeInclusion:
    """An abelian subvariety Z of E^d as a saturated integer column span.

    The columns of the d x r matrix span the tangent sublattice; saturation
    (all Smith invariant factors equal to 1) is exactly the condition that
    the subgroup they generate is a subtorus and not a finite extension.
    """

    columns: IntRows  # stored row-major, shape d x r

    def __post_init__(self):
        cols = _freeze(self.columns)
        object.__setattr__(self, "columns", cols)
        d = len(cols)
        if d == 0 or len(cols[0]) == 0:
            raise InvalidSubgroup("empty sublattice inclusion")
        r = len(cols[0])
        if any(len(row) != r for row in cols):
            raise InvalidSubgroup("ragged inclusion matrix")
        if r > d:
            raise InvalidSubgroup(f"more columns ({r}) than ambient dimension ({d})")
        factors = _invariant_factors(cols)
        if len(factors) != r:
            raise InvalidSubgroup("inclusion matrix does not have full column rank")
        if getattr(self, "_skip_saturation", False):
            return
        if any(f != 1 for f in factors):
            raise InvalidSubgroup(
                f"sublattice is not saturated (invariant factors {factors}); "
                "use SublatticeInclusion.unchecked to model a finite-index sublattice"
            )

    @classmethod
    def unchecked(cls, columns: Sequence[Sequence[int]]) -> "SublatticeInclusion":
        """Construct without the saturation check (rank is still required)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "_skip_saturation", True)
        obj.__init__(tuple(tuple(int(v) for v in row) for row in columns))
        return obj

    @property
    def d(self) -> int:
        return len(self.columns)

    @property
    def r(self) -> int:
        return len(self.columns[0])


def chi(s: PolarizationMatrix) -> int:
    """Euler characteristic of the bundle: det(S), exact."""
    return _det_bareiss(s.rows)


def self_intersection(s: PolarizationMatrix) -> int:
    """d-fold self-intersection (D^d) = d! * det(S)."""
    return math.factorial(s.d) * chi(s)


def mixed_intersection(
    terms: Sequence[tuple[PolarizationMatrix, int]]
) -> int:
    """Intersection number (S_1^a_1 ... S_k^a_k) with sum(a_i) = d.

    Equals (prod a_i!) times the coefficient of prod t_i^a_i in
    det(sum t_i S_i), computed by exact multilinear expansion of the
    determinant over column assignments.
    """
    if not terms:
        raise ExponentMismatch("no intersection terms")
    d = terms[0][0].d
    for s, a in terms:
        if s.d != d:
            raise ExponentMismatch(
                f"matrix sizes disagree: {s.d} vs {d}"
            )
        if a < 0:
            raise ExponentMismatch(f"negative exponent {a}")
    total = sum(a for _, a in terms)
    if total != d:
        raise ExponentMismatch(
            f"exponents sum to {total}, need the dimension {d}"
        )
    from sympy.utilities.iterables import multiset_permutations

    labels = [i for i, (_, a) in enumerate(terms) for _ in range(a)]
    acc = 0
    for assign in multiset_permutations(labels):
        cols_matrix = [
            [terms[assign[j]][0].rows[i][j] for j in range(d)] for i in range(d)
        ]
        acc += _det_bareiss(cols_matrix)
    for _, a in terms:
        acc *= math.factorial(a)
    return acc


def norm_endomorphism(
    l: PolarizationMatrix, z: SublatticeInclusion
) -> tuple[IntRows, int]:
    """(N, e) with N = e * I * (I^T L I)^(-1) * I^T L on the subvariety Z.

    e is the exponent of coker(I^T L I), i.e. the largest Smith invariant
    factor of the restricted polarization.  N is asserted integral; a
    failure indicates a violated saturation precondition.
    """
    if z.d != l.d:
        raise InvalidOrder(
            f"sublattice ambient dimension {z.d} != polarization dimension {l.d}"
        )
    i_mat = z.columns
    i_t = _transpose(i_mat)
    phi = _matmul(i_t, _matmul(l.rows, i_mat))
    if _det_bareiss(phi) == 0:
        raise InvalidOrder(
            "restricted form I^T L I is singular; L must be definite on Z"
        )
    e = _invariant_factors(phi)[-1]
    phi_inv = _fraction_inverse(phi)
    n_frac = _matmul(i_mat, _matmul(phi_inv, _matmul(i_t, l.rows)))
    n_rows = []
    for row in n_frac:
        out_row = []
        for v in row:
            scaled = e * v
            if scaled.denominator != 1:
                raise NonIntegralNorm(
                    f"entry {scaled} of the norm endomorphism is not integral"
                )
            out_row.append(int(scaled))
        n_rows.append(tuple(out_row))
    return tuple(n_rows), e


def pullback(alpha: Sequence[Sequence[int]], s: PolarizationMatrix) -> PolarizationMatrix:
    """Pullback of the bundle along the endomorphism alpha: alpha^T S alpha."""
    a = _freeze(alpha)
    if len(a) != s.d:
        raise InvalidOrder(
            f"endomorphism has {len(a)} rows, polarization dimension is {s.d}"
        )
    return PolarizationMatrix(_matmul(_transpose(a), _matmul(s.rows, a)))


def isogeny_degree_factor(q0, d: int) -> int:
    """Degree |Q0|^d of the coordinatewise quotient isogeny E^d -> (E/Q0)^d."""
    if d < 1:
        raise InvalidOrder(f"need d >= 1, got {d}")
    return q0.order**d
