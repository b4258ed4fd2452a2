import math

import pytest
from hypothesis import strategies as st

from transvec.code import builtin_833, lift
from transvec.f2 import BitVec
from transvec.pauli import PhasedPauli


@pytest.fixture(scope="session")
def code833():
    return builtin_833()


@pytest.fixture(scope="session")
def lifted_x1z2x3(code833):
    return lift(code833, PhasedPauli.parse("X1 Z2 X3", 3))


@st.composite
def bitvecs(draw, length):
    return BitVec(length, draw(st.integers(0, (1 << length) - 1)))


@st.composite
def symplectic_triples(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    return tuple(draw(bitvecs(2 * n)) for _ in range(3))


@st.composite
def paulis(draw, n=None, max_n=5, phased=True):
    if n is None:
        n = draw(st.integers(1, max_n))
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    kappa = draw(st.integers(0, 3)) if phased else 0
    return PhasedPauli(n, x, z, kappa)


@st.composite
def pauli_pairs(draw, max_n=5, anticommuting=None):
    n = draw(st.integers(1, max_n))
    p = draw(paulis(n=n))
    q = draw(paulis(n=n))
    if anticommuting is not None:
        from hypothesis import assume

        assume(not p.is_identity)
        assume(p.commutes(q) != anticommuting)
    return p, q


angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False, allow_infinity=False)
