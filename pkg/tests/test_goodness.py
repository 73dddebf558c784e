from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from schreierlab.errors import PreconditionError
from schreierlab.ordinal import ONE, ZERO
from schreierlab.schreier import EMPTY, FinSet, member
from schreierlab.normmodel import SetPoint
from schreierlab.goodness import (
    EpsSeq,
    Measure,
    MeasureFamily,
    MPAbort,
    admissible_window,
    chebyshev_mass,
    even_part,
    feasible_eps,
    is_appropriate,
    is_good,
    maximal_superset,
    point_mass_family,
    predecessors_of,
    prop_mP_run,
    rho_norms_check,
    splice,
    spliced_prefix,
)

QUARTER = EpsSeq.quarter_powers()
DELTAS = EpsSeq.quarter_powers()


def test_even_part_examples():
    a2, pred = even_part(FinSet((2, 5, 7, 9)))
    assert a2.elements == (5, 9) and pred == {5: 2, 9: 7}
    a2, pred = even_part(EMPTY)
    assert a2.is_empty and pred == {}
    a2, pred = even_part(FinSet((1, 2)))
    assert a2.elements == (2,) and pred == {2: 1}
    with pytest.raises(PreconditionError):
        even_part(FinSet((1, 2, 3)))


def test_even_part_reconstruction_exhaustive():
    pool = tuple(range(1, 9))
    for r in range(0, 9, 2):
        for combo in itertools.combinations(pool, r):
            a = FinSet(combo)
            a2, pred = even_part(a)
            rebuilt = sorted(list(a2.elements) + [pred[m] for m in a2])
            assert tuple(rebuilt) == combo


def test_splice_examples():
    res = splice(FinSet((5,)), FinSet((2, 5, 7, 9)), itertools.count(10))
    assert res.core.elements == (2, 5)
    assert [next(res.tail) for _ in range(3)] == [12, 13, 14]
    res = splice(EMPTY, EMPTY, itertools.count(4))
    assert res.core.is_empty and next(res.tail) == 6
    with pytest.raises(PreconditionError):
        splice(FinSet((9,)), FinSet((2, 5, 7, 9)), iter([8, 10, 11, 12]))


def test_splice_core_is_f_with_predecessors():
    pool = tuple(range(1, 9))
    for r in range(0, 9, 2):
        for combo in itertools.combinations(pool, r):
            a = FinSet(combo)
            a2, _ = even_part(a)
            for fr in range(len(a2) + 1):
                for fc in itertools.combinations(a2.elements, fr):
                    f = FinSet(fc)
                    res = splice(f, a, itertools.count(10))
                    assert res.core == f.union(predecessors_of(f, a))


def test_spliced_prefix_orders_core_before_tail():
    got = spliced_prefix(
        FinSet((5,)), FinSet((2, 5, 7, 9)), FinSet((10, 11, 12, 13, 14, 15)), 4
    )
    assert got.elements == (2, 5, 12, 13)


def test_is_appropriate_examples():
    assert is_appropriate(FinSet((5,)), FinSet((2, 5, 7, 9)))
    assert not is_appropriate(FinSet((2,)), FinSet((2, 5, 7, 9)))
    assert is_appropriate(EMPTY, EMPTY)
    assert not is_appropriate(EMPTY, FinSet((1, 2, 3)))


def test_is_good_examples(s1):
    mu = Measure.point_mass(s1, SetPoint(FinSet((10, 11, 12, 13))))
    prefix = FinSet((9, 10, 11, 12))
    assert is_good(mu, prefix, 1, 1, QUARTER)
    zero = Measure(s1, ((SetPoint(EMPTY), Fraction(0)),))
    assert not is_good(zero, prefix, 1, Fraction(1, 2), QUARTER)
    assert is_good(zero, prefix, 0, Fraction(1, 2), QUARTER)
    with pytest.raises(PreconditionError):
        is_good(mu, prefix, 3, 1, QUARTER)


def test_is_good_monotone_in_n(s1):
    rng = random.Random(3)
    prefix = FinSet(tuple(range(8, 20)))
    for _ in range(40):
        k = rng.randint(1, 4)
        pts = [
            maximal_superset(s1, FinSet((rng.randint(8, 19),)), prefix)
            for _ in range(k)
        ]
        weights = tuple(
            (SetPoint(p), Fraction(1, k)) for p in pts if p is not None
        )
        if not weights:
            continue
        mu = Measure(s1, weights)
        levels = [
            is_good(mu, prefix, n, Fraction(1, 2), QUARTER) for n in range(0, 7)
        ]
        # once goodness fails it stays failed
        assert all(a or not b for a, b in zip(levels, levels[1:]))


def test_admissible_window_vacuous(s1):
    zero = Measure(s1, ((SetPoint(EMPTY), Fraction(0)),))
    fam = MeasureFamily((zero,))
    out = admissible_window(
        fam, FinSet((5,)), FinSet((2, 5)), FinSet(tuple(range(6, 18))), 3, 1, QUARTER, DELTAS
    )
    assert out  # no good measure, so the condition holds vacuously


def test_admissible_window_companion_found(s1):
    # F1 = the whole even part, so only smallness at f_{l_2} is required;
    # the good measure avoids l_2 = 7 and serves as its own companion
    mu = Measure.point_mass(s1, SetPoint(FinSet((5, 9))))
    other = Measure.point_mass(s1, SetPoint(FinSet((3, 4))))
    fam = MeasureFamily((mu, other))
    out = admissible_window(
        fam, FinSet((5,)), FinSet((2, 5)), FinSet(tuple(range(6, 18))), 1, 1, QUARTER, DELTAS
    )
    assert out


def test_admissible_window_counterexample(s1):
    # the only good measure carries full mass on the unselected coordinate
    # m = 5, so no companion can be small there
    mu = Measure.point_mass(s1, SetPoint(FinSet((5, 9))))
    other = Measure.point_mass(s1, SetPoint(FinSet((3, 4))))
    fam = MeasureFamily((mu, other))
    out = admissible_window(
        fam, EMPTY, FinSet((2, 5)), FinSet(tuple(range(6, 18))), 1, 1, QUARTER, DELTAS
    )
    assert not out


def test_chebyshev_examples(s1):
    mu = Measure.point_mass(s1, SetPoint(FinSet((3,))))
    assert chebyshev_mass(mu, 3, Fraction(2), Fraction(1)) == 0
    two = Measure(
        s1,
        (
            (SetPoint(FinSet((3, 4))), Fraction(1, 2)),
            (SetPoint(FinSet((5, 6))), Fraction(1, 2)),
        ),
    )
    assert chebyshev_mass(two, 3, Fraction(2), Fraction(1, 2)) == Fraction(1, 2)
    with pytest.raises(PreconditionError):
        chebyshev_mass(mu, 9, Fraction(2), Fraction(0))
    with pytest.raises(PreconditionError):
        chebyshev_mass(mu, 3, Fraction(2), Fraction(1, 3))  # wrong delta


def test_chebyshev_random_measures(s1):
    rng = random.Random(11)
    window = FinSet(tuple(range(5, 17)))
    for _ in range(1000):
        k = rng.randint(1, 4)
        pts = []
        for _ in range(k):
            seed = FinSet((rng.randint(5, 16),))
            grown = maximal_superset(s1, seed, window)
            pts.append(grown)
        raw = [Fraction(rng.randint(0, 6), 24) for _ in pts]
        total = sum(raw, Fraction(0))
        if total > 1:
            raw = [w / total for w in raw]
        mu = Measure(s1, tuple((SetPoint(p), w) for p, w in zip(pts, raw)))
        n = rng.randint(5, 16)
        delta = mu.integral_f(n)
        if delta == 0:
            continue
        d = Fraction(rng.randint(2, 9), rng.randint(1, 3))
        assert chebyshev_mass(mu, n, d, delta) <= 1 / d


def test_rho_norms_examples(s1):
    window = FinSet(tuple(range(4, 12)))
    fam = point_mass_family(s1, window)
    out = rho_norms_check(fam, window, [1], 1, max_support=1)
    assert out.passed and out.worst == 1
    zero = MeasureFamily((Measure(s1, ((SetPoint(EMPTY), Fraction(0)),)),))
    out = rho_norms_check(zero, window, [1], Fraction(1, 2), max_support=1)
    assert not out.passed and out.worst == 0
    single = MeasureFamily(
        (Measure.point_mass(s1, SetPoint(FinSet((5, 6, 7, 8, 9)))),)
    )
    out = rho_norms_check(single, FinSet((6,)), [1], 1, max_support=1)
    assert out.passed and out.worst == 1
    with pytest.raises(PreconditionError):
        rho_norms_check(fam, window, [], 1)


def test_feasible_eps():
    # the display fails at 1/20 for rho = 1, and the bounded grid picks 1/25
    rho, e = Fraction(1), Fraction(1, 20)
    assert not ((rho - 2 * e) / (2 + e)) ** 2 > e * e + rho * rho / 5
    assert feasible_eps(Fraction(1)) == Fraction(1, 25)
    with pytest.raises(MPAbort):
        feasible_eps(Fraction(1, 100))  # rho too small for the grid


MP_WINDOW = FinSet(tuple(range(10, 42)))


@pytest.fixture(scope="module")
def mp_family(s1):
    return point_mass_family(s1, MP_WINDOW)


def test_mp_run_alpha_one_fails_only_at_membership(s1, mp_family):
    """The bundled fixture provably cannot yield an image escaping the
    level-1 family: the selected index image sits inside one point-mass
    set, which is itself a family set, and hereditarity closes downward.
    Every inequality of the chain still holds exactly."""
    res = prop_mP_run(mp_family, ONE, 1, QUARTER, MP_WINDOW)
    assert not res.ok
    assert res.failing_step == "image_not_in_family"
    for step in res.transcript.steps[:-1]:
        assert step.holds, step
    assert member(res.image, ONE)
    assert res.transcript.d_scale == Fraction(51, 23)  # (2+eps)/(rho-2eps) at eps=1/25


def test_mp_run_alpha_zero_succeeds(s1, mp_family):
    res = prop_mP_run(mp_family, ZERO, 1, QUARTER, MP_WINDOW)
    assert res.ok and res.failing_step is None
    assert len(res.image) >= 2 and not member(res.image, ZERO)
    assert all(step.holds for step in res.transcript.steps)


def test_mp_run_level_masses_meet_bound(s1, mp_family):
    res = prop_mP_run(mp_family, ZERO, 1, QUARTER, MP_WINDOW)
    bound = Fraction(1, 5)
    for i in res.selected:
        row = res.transcript.rows[i - 1]
        assert row.level_mass >= bound


def test_mp_transcript_integrity(s1, mp_family):
    a = prop_mP_run(mp_family, ONE, 1, QUARTER, MP_WINDOW)
    b = prop_mP_run(mp_family, ONE, 1, QUARTER, MP_WINDOW)
    assert a.transcript == b.transcript


def test_mp_run_norming_failure(s1):
    zero = MeasureFamily((Measure(s1, ((SetPoint(EMPTY), Fraction(0)),)),))
    with pytest.raises(MPAbort) as exc:
        prop_mP_run(zero, ONE, 1, QUARTER, MP_WINDOW)
    assert exc.value.step == "norming_check"


def test_mp_run_eps_tail_rejected(s1, mp_family):
    fat = EpsSeq.from_list([Fraction(1, 2)] * 60)
    with pytest.raises(MPAbort) as exc:
        prop_mP_run(mp_family, ONE, 1, fat, MP_WINDOW)
    assert exc.value.step == "eps_tail"


def test_mp_run_window_validation(s1, mp_family):
    with pytest.raises(PreconditionError):
        prop_mP_run(mp_family, ONE, 1, QUARTER, FinSet((10, 11, 12)))


def test_point_mass_family_members_are_maximal(s1):
    window = FinSet(tuple(range(8, 24)))
    fam = point_mass_family(s1, window)
    for mu in fam.members:
        (point, mass), = mu.weights
        assert mass == 1
        f = point.elements
        assert member(f, ONE)
        assert all(
            not member(f.with_element(n), ONE)
            for n in window
            if n not in f
        )
