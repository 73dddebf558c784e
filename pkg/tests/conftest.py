from __future__ import annotations

from fractions import Fraction

import pytest

from schreierlab.ordinal import ONE, ZERO, from_int
from schreierlab.schreier import FinSet
from schreierlab.normmodel import SetPoint, SuppVec, schreier_space, tsirelson_space
from schreierlab.blockcert import AlphaEpsCert, Block, find_zero_eps_block


@pytest.fixture(scope="session")
def s1():
    return schreier_space(ONE)


@pytest.fixture(scope="session")
def s2():
    return schreier_space(from_int(2))


@pytest.fixture(scope="session")
def tsi():
    return tsirelson_space()


def uniform_cert(model, k: int, eps) -> AlphaEpsCert:
    """Level-zero certificate for the uniform average on {k, ..., 2k-1},
    strongly normed by the set itself."""
    window = FinSet(tuple(range(k, 2 * k)))
    u = SuppVec.of({i: Fraction(1, k) for i in window})
    return AlphaEpsCert(Block(u, model), ZERO, eps, SetPoint(window))


@pytest.fixture(scope="session")
def stored_certs(s1, tsi):
    """The passing certificates the suite stores and re-examines: both
    constructive search outputs and hand-built uniform averages."""
    found_s = find_zero_eps_block(s1, 3, 60, Fraction(1, 2))
    found_t = find_zero_eps_block(tsi, 3, 60, Fraction(1, 2))
    return [
        found_s.cert,
        found_t.cert,
        uniform_cert(s1, 7, Fraction(2, 5)),
        uniform_cert(s1, 12, Fraction(1, 2)),
    ]
