from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from conftest import uniform_cert
from schreierlab.errors import PreconditionError, ResourceBudgetError, SearchExhaustedError
from schreierlab.ordinal import ONE, ZERO, from_int
from schreierlab.radicals import Radical
from schreierlab.schreier import EMPTY, FinSet
from schreierlab.normmodel import SetPoint, SuppVec, TreePoint, Leaf, norm
from schreierlab.blockcert import (
    AlphaEpsCert,
    AssembleVerificationError,
    Block,
    ChainCert,
    assemble_block,
    chain_inequality_check,
    chain_level,
    check_domination,
    claim1_count,
    claim2_witness,
    default_chain_eps,
    dominated_chain_search,
    find_zero_eps_block,
    restrict_cert,
    strongly_norms,
    tau_estimate,
    verify_alpha_eps,
    verify_chain,
)


def test_block_validation(s1):
    with pytest.raises(PreconditionError):
        Block(SuppVec.of({2: 1, 3: 1}), s1)  # norm 2, not normalized
    with pytest.raises(PreconditionError):
        Block(SuppVec.of({2: -1}), s1)


def test_verify_uniform_equality_cert(s1):
    # condition 1 holds with equality for every J on the uniform average
    for k in range(2, 7):
        cert = uniform_cert(s1, k, Fraction(1, 2))
        if Fraction(1, k) < Fraction(1, 4):
            assert verify_alpha_eps(cert).passed
        else:
            v = verify_alpha_eps(cert)
            assert not v.passed and v.condition == 2


def test_verify_singleton_fails_condition2(s1):
    cert = AlphaEpsCert(
        Block(SuppVec.unit(7), s1), ZERO, Fraction(1, 2), SetPoint(FinSet((7,)))
    )
    v = verify_alpha_eps(cert)
    assert not v.passed and v.condition == 2 and v.violating.elements == (7,)


def test_verify_empty_point_fails_condition1(s1):
    cert = uniform_cert(s1, 5, Fraction(1, 2))
    bad = AlphaEpsCert(cert.block, cert.alpha, cert.eps, SetPoint(EMPTY))
    v = verify_alpha_eps(bad)
    assert not v.passed and v.condition == 1


def test_verify_budget_is_explicit(s1):
    # k = 11 is used nowhere else, so no cached verdict can answer this
    cert = uniform_cert(s1, 11, Fraction(1, 2))
    with pytest.raises(ResourceBudgetError):
        verify_alpha_eps(cert, budget=10)


def test_verify_first_violation_is_lexicographic(s1):
    # two singleton violations exist; the verifier must report the least
    k = 3
    A = FinSet((3, 4, 5))
    u = SuppVec.of({i: Fraction(1, 3) for i in A})
    cert = AlphaEpsCert(Block(u, s1), ZERO, Fraction(1, 2), SetPoint(A))
    v = verify_alpha_eps(cert)
    assert not v.passed and v.violating.elements == (3,)


def test_restrict_cert_identity(s1):
    cert = uniform_cert(s1, 7, Fraction(2, 5))
    out = restrict_cert(cert, cert.block.support())
    assert out.block.vec == cert.block.vec
    assert out.eps == Radical.of(Fraction(2, 5)).sqrt()
    assert out.t0 == cert.t0


def test_restrict_cert_small_restriction_rejected(s1):
    cert = uniform_cert(s1, 7, Fraction(2, 5))
    with pytest.raises(PreconditionError):
        restrict_cert(cert, FinSet((7,)))


def test_restriction_permanence_small(s1):
    cert = uniform_cert(s1, 7, Fraction(2, 5))
    assert verify_alpha_eps(cert).passed
    supp = cert.block.support()
    u = cert.block.vec
    checked = 0
    for r in range(1, len(supp) + 1):
        for combo in itertools.combinations(supp.elements, r):
            i0 = FinSet(combo)
            d = norm(s1, u.restrict(i0))
            if d * d >= Fraction(2, 5):
                out = restrict_cert(cert, i0)
                assert verify_alpha_eps(out).passed, combo
                checked += 1
    assert checked > 0


def test_tau_examples(s1, tsi):
    out = tau_estimate(s1, 3, 20)
    assert out.lower == 1 and out.witness.elements == (3, 4, 5)
    assert out.recheck(s1)
    out = tau_estimate(tsi, 3, 20, budget=200)
    assert out.lower >= Fraction(1, 2)
    assert out.recheck(tsi)
    out = tau_estimate(tsi, 3, 20, budget=0)
    assert out.partial and out.lower == tsi.a1_constant and out.witness is None
    with pytest.raises(PreconditionError):
        tau_estimate(s1, 5, 4)


def test_tau_bounds(s1, s2, tsi):
    for model, window in ((s1, (3, 20)), (s2, (2, 25)), (tsi, (3, 18))):
        out = tau_estimate(model, *window, budget=500)
        assert model.a1_constant <= out.lower <= 1
        assert out.recheck(model)


def test_claim1_examples(s1, tsi):
    # indicator point with two-element support: count bounded by 2
    count = claim1_count(
        s1, 19, SetPoint(FinSet((20, 21))), Fraction(1), Fraction(1, 16), 3, 60
    )
    assert count <= 2
    count = claim1_count(s1, 19, SetPoint(EMPTY), Fraction(1), Fraction(1, 16), 3, 60)
    assert count == 0
    count = claim1_count(
        tsi, 7, TreePoint(Leaf(5, 1)), Fraction(1, 2), Fraction(1, 9), 8, 30
    )
    assert count == 0  # the window excludes the leaf's coordinate
    with pytest.raises(PreconditionError):
        claim1_count(s1, 2, SetPoint(EMPTY), Fraction(1), Fraction(1, 16), 3, 60)


def test_claim2_examples(s1, tsi):
    out = claim2_witness(s1, 3, 4, 20, Fraction(1), Fraction(1, 100))
    assert out.indices.elements == (4, 5, 6)
    assert all(out.point is not None for _ in [0])
    out = claim2_witness(s1, 0, 4, 20, Fraction(1), Fraction(1, 100))
    assert out.indices.is_empty and out.point is None
    out = claim2_witness(tsi, 2, 3, 20, Fraction(1, 2), Fraction(1, 16))
    assert len(out.indices) == 2
    with pytest.raises(SearchExhaustedError):
        claim2_witness(s1, 5, 1, 4, Fraction(1), Fraction(1, 100))


def test_find0_schreier(s1):
    res = find_zero_eps_block(s1, 3, 60, Fraction(1, 2))
    assert res.verdict.passed
    assert res.cert.alpha == ZERO
    assert res.cert.block.support().min() > res.m0
    # the search never self-certifies: re-verify independently
    assert verify_alpha_eps(res.cert).passed


def test_find0_tsirelson(tsi):
    res = find_zero_eps_block(tsi, 3, 60, Fraction(1, 2))
    assert res.verdict.passed
    assert verify_alpha_eps(res.cert).passed


def test_find0_preconditions(s1):
    with pytest.raises(PreconditionError):
        find_zero_eps_block(s1, 3, 60, Fraction(3, 2))
    with pytest.raises((SearchExhaustedError, ResourceBudgetError)) as exc:
        find_zero_eps_block(s1, 1, 2, Fraction(1, 2))
    assert exc.value.diagnostic is None or "required" in str(exc.value.diagnostic)


def test_chain_eps_defaults():
    for m in (2, 3, 4):
        seq = default_chain_eps(m + 5, m)
        from schreierlab.radicals import rational_sqrt

        roots = [rational_sqrt(e) for e in seq]
        assert all(r is not None for r in roots)
        assert sum(roots) < 1
        assert all(a >= b for a, b in zip(seq, seq[1:]))


@pytest.fixture(scope="module")
def chain2(s2):
    return dominated_chain_search(s2, 2, 60, Fraction(1, 20), 2, alpha=ONE)


def test_chain_search_two_blocks(s2, chain2):
    assert verify_chain(chain2.cert).passed
    assert chain2.cert.blocks[0].support().min() == 2
    assert len(chain2.cert.blocks) == 2
    dom = check_domination(
        chain2.cert, chain2.t0, chain2.points, chain2.tau_hat, chain2.delta
    )
    assert dom.holds


def test_chain_level_convention():
    assert chain_level(ONE, 5) == ZERO
    assert chain_level(from_int(3), 2) == from_int(2)
    omega = __import__("schreierlab.ordinal", fromlist=["OMEGA"]).OMEGA
    assert chain_level(omega, 4) == from_int(4)


def test_chain_condition3_matches_brute_force():
    # at the first limit level the chain levels are the naturals, and the
    # containment must agree with raw membership on every tested subset
    from schreierlab.blockcert import chain_condition3_violation
    from schreierlab.ordinal import OMEGA
    from schreierlab.schreier import member as mem

    supp = FinSet((3, 4, 5, 6, 7))
    for d_prev in (2, 3, 4):
        got = chain_condition3_violation(OMEGA, d_prev, supp)
        want = None
        for j in range(1, d_prev + 1):
            for r in range(len(supp) + 1):
                for combo in itertools.combinations(supp.elements, r):
                    f = FinSet(combo)
                    if mem(f, chain_level(OMEGA, j)) and not mem(
                        f, chain_level(OMEGA, d_prev)
                    ):
                        want = f
                        break
                if want:
                    break
            if want:
                break
        assert (got is None) == (want is None), (d_prev, got, want)


def test_chain_search_on_level_one_model(s1):
    # indicator evaluations make domination achievable: the point covering
    # the second block's support dominates its strong-norming point
    res = dominated_chain_search(s1, 2, 60, Fraction(1, 20), 2, alpha=ONE)
    assert verify_chain(res.cert).passed
    assert res.cert.blocks[1].support().issubset(res.t0.elements)


def test_chain_search_rejects_length_one(s2):
    with pytest.raises(PreconditionError):
        dominated_chain_search(s2, 2, 60, Fraction(1, 20), 1, alpha=ONE)


def test_chain_search_tsirelson_exhausts(tsi):
    # desk windows cannot host the level-zero sub-block the chain needs
    with pytest.raises(SearchExhaustedError) as exc:
        dominated_chain_search(tsi, 2, 60, Fraction(1, 4), 2, alpha=ONE)
    assert exc.value.diagnostic is not None


def test_verify_chain_failures(s2, chain2):
    good = chain2.cert
    # wrong m: first block must start at the chain length
    bad = ChainCert(
        model=good.model,
        alpha=good.alpha,
        blocks=(Block(SuppVec.unit(3), good.model), good.blocks[1]),
        eps_seq=good.eps_seq,
        d=(3,) + good.d[1:],
        sub_certs=good.sub_certs,
    )
    v = verify_chain(bad)
    assert not v.passed and v.condition == "1"
    # divergent epsilon sequence
    bad = ChainCert(
        model=good.model,
        alpha=good.alpha,
        blocks=good.blocks,
        eps_seq=(Fraction(1, 4), Fraction(1, 4)),
        d=good.d,
        sub_certs=good.sub_certs,
    )
    v = verify_chain(bad)
    assert not v.passed and v.condition == "eps"
    # non-square entry
    bad = ChainCert(
        model=good.model,
        alpha=good.alpha,
        blocks=good.blocks,
        eps_seq=(Fraction(1, 4), Fraction(1, 5)),
        d=good.d,
        sub_certs=good.sub_certs,
    )
    v = verify_chain(bad)
    assert not v.passed and v.condition == "eps"


def test_chain_inequality_examples(chain2):
    empty = chain_inequality_check(
        chain2.cert, chain2.points, chain2.tau_hat, chain2.delta, EMPTY
    )
    assert empty.holds and empty.lhs == 0 and empty.rhs == chain2.delta
    at_u2 = chain_inequality_check(
        chain2.cert,
        chain2.points,
        chain2.tau_hat,
        chain2.delta,
        chain2.cert.blocks[1].support(),
    )
    assert at_u2.holds
    adversarial = chain_inequality_check(
        chain2.cert,
        chain2.points,
        chain2.tau_hat,
        chain2.delta,
        chain2.cert.blocks[0].support(),
    )
    # reported honestly: the unfiltered window cannot make this small
    assert not adversarial.holds


def test_strongly_norms_rejects_bad_point(chain2):
    sub = chain2.cert.sub_certs[0]
    assert strongly_norms(sub, sub.t0) is None
    bad = strongly_norms(sub, SetPoint(EMPTY))
    assert bad is not None


def test_assemble_block_passes_at_three_quarters(chain2):
    cert = assemble_block(chain2, Fraction(3, 4))
    assert cert.alpha == ONE
    assert verify_alpha_eps(cert).passed
    assert cert.t0 == chain2.t0


def test_assemble_block_half_is_impossible(chain2):
    # any two-block chain leaves a family set carrying half the mass, so
    # the level threshold 1/2 cannot be met; the violating set comes back
    with pytest.raises(AssembleVerificationError) as exc:
        assemble_block(chain2, Fraction(1, 2))
    assert exc.value.verdict.condition == 2
    assert exc.value.verdict.violating is not None


def test_assemble_block_rejects_unverified_chain(s2, chain2):
    broken = ChainCert(
        model=chain2.cert.model,
        alpha=chain2.cert.alpha,
        blocks=chain2.cert.blocks,
        eps_seq=(Fraction(1, 4), Fraction(1, 4)),
        d=chain2.cert.d,
        sub_certs=chain2.cert.sub_certs,
    )
    fake = type(chain2)(
        cert=broken,
        t0=chain2.t0,
        points=chain2.points,
        tau_hat=chain2.tau_hat,
        delta=chain2.delta,
    )
    with pytest.raises(PreconditionError):
        assemble_block(fake, Fraction(3, 4))


def test_assemble_block_no_parameters(chain2):
    # thresholds this small leave no admissible parameter pair in the grid
    with pytest.raises(PreconditionError):
        assemble_block(chain2, Fraction(1, 10000))
