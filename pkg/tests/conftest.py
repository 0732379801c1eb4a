import numpy as np
import pytest

from ellcover import FiniteSubgroupSpec, LatticeTau

TAU = complex(0.3, 1.1)


def lattice_sum_g2_g3(tau: complex, radius: int = 200) -> tuple[complex, complex]:
    """Direct Eisenstein sums over |m|, |n| <= radius on Z + Z*tau.

    Row sums decay exponentially in |n| for reduced tau, but each row's tail
    in m only decays algebraically; the midpoint-rule integral correction per
    row pushes the truncation error below 1e-9 relative at radius 200.
    """
    idx = np.arange(-radius, radius + 1)
    m, n = np.meshgrid(idx, idx)
    mask = (m != 0) | (n != 0)
    w = (m + n * tau)[mask].astype(complex)
    g4 = np.sum(w ** -4.0)
    g6 = np.sum(w ** -6.0)
    edge = radius + 0.5
    for k in idx:
        right = edge + k * tau
        left = edge - k * tau
        g4 += (right ** -3 + left ** -3) / 3
        g6 += (right ** -5 + left ** -5) / 5
    return 60 * g4, 140 * g6


def laurent_wp(z: complex, g2: complex, g3: complex, terms: int = 60):
    """(wp, wp') at z from the Laurent expansion around 0.

    Coefficient recursion c_k = 3/((2k+3)(k-2)) * sum c_m c_(k-1-m); valid for
    |z| below the shortest lattice vector, independent of the q-series route.
    """
    c = [0.0 + 0.0j, g2 / 20.0, g3 / 28.0]
    for k in range(3, terms):
        s = sum(c[m] * c[k - 1 - m] for m in range(1, k - 1))
        c.append(3.0 * s / ((2 * k + 3) * (k - 2)))
    p = 1.0 / z ** 2
    dp = -2.0 / z ** 3
    for k in range(1, terms):
        p += c[k] * z ** (2 * k)
        dp += 2 * k * c[k] * z ** (2 * k - 1)
    return p, dp


@pytest.fixture(scope="session")
def lattice() -> LatticeTau:
    return LatticeTau.from_tau(TAU)


@pytest.fixture(scope="session")
def q2() -> FiniteSubgroupSpec:
    return FiniteSubgroupSpec.parse(("1/2,0",))


@pytest.fixture(scope="session")
def q3() -> FiniteSubgroupSpec:
    return FiniteSubgroupSpec.parse(("1/3,0",))


@pytest.fixture(scope="session")
def q4() -> FiniteSubgroupSpec:
    return FiniteSubgroupSpec.parse(("1/4,0",))
