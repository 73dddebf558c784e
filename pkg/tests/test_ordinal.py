from __future__ import annotations

import random

import pytest

from schreierlab.ordinal import (
    OMEGA,
    ONE,
    ZERO,
    Order,
    Ordinal,
    OrdinalError,
    OrdinalKind,
    assoc,
    classify,
    compare,
    from_int,
    fundamental,
    omega_power,
    parse,
    to_text,
)

SYNTAX = ["0", "3", "w", "w+1", "w*2", "w^2", "w^w", "w^(w+1)*3+w*2+5"]


@pytest.mark.parametrize("text", SYNTAX)
def test_parse_print_roundtrip(text):
    assert to_text(parse(text)) == text


@pytest.mark.parametrize("bad", ["", "1+w", "w*0", "w^", "w+", "3+2", "w^w+w^w", "x"])
def test_parser_rejects_junk(bad):
    with pytest.raises(OrdinalError):
        parse(bad)


def test_compare_examples():
    assert compare(ZERO, ONE) is Order.LT
    assert compare(OMEGA, OMEGA) is Order.EQ
    assert compare(parse("w+3"), parse("w*2")) is Order.LT


def sample_ordinals(count=1000, seed=7):
    rng = random.Random(seed)
    exps = [ZERO, ONE, from_int(2), from_int(3), OMEGA, parse("w+1"), parse("w*2")]
    out = set()
    while len(out) < count:
        k = rng.randint(0, 3)
        chosen = sorted(rng.sample(range(len(exps)), k) if k else [], reverse=True)
        terms = tuple((exps[i], rng.randint(1, 4)) for i in chosen)
        try:
            out.add(Ordinal(terms))
        except OrdinalError:
            continue
    return sorted(out, key=lambda o: random.Random(seed + 1).random())


def test_total_order_properties():
    vals = sample_ordinals()
    rng = random.Random(13)
    for _ in range(1000):
        a, b, c = rng.choice(vals), rng.choice(vals), rng.choice(vals)
        ab, ba = compare(a, b), compare(b, a)
        assert (ab is Order.EQ) == (a == b)
        assert (ab is Order.LT) == (ba is Order.GT)
        if compare(a, b) is not Order.GT and compare(b, c) is not Order.GT:
            assert compare(a, c) is not Order.GT


def test_classify_examples():
    assert classify(ZERO) == (OrdinalKind.ZERO, None)
    kind, pred = classify(from_int(5))
    assert kind is OrdinalKind.SUCCESSOR and pred == from_int(4)
    assert classify(omega_power(from_int(2)))[0] is OrdinalKind.LIMIT


def test_successor_roundtrip():
    for text in ("1", "7", "w+1", "w*2+3", "w^2+1"):
        a = parse(text)
        kind, pred = classify(a)
        assert kind is OrdinalKind.SUCCESSOR
        assert pred.plus_nat(1) == a


def test_assoc_examples():
    for n in range(1, 9):
        assert assoc(from_int(3), n) == from_int(3)
    assert assoc(OMEGA, 4) == from_int(5)
    assert to_text(assoc(omega_power(from_int(2)), 3)) == "w*3+1"
    with pytest.raises(OrdinalError):
        assoc(ZERO, 1)


@pytest.mark.parametrize("text", ["w", "w*2", "w^2", "w^w", "w^2+w", "w^(w+1)"])
def test_assoc_limit_properties(text):
    a = parse(text)
    for n in range(1, 12):
        term = assoc(a, n)
        assert classify(term)[0] is OrdinalKind.SUCCESSOR
        assert compare(term, a) is Order.LT
        assert compare(term, assoc(a, n + 1)) is Order.LT


def test_fundamental_examples():
    assert fundamental(OMEGA, 4) == from_int(4)
    assert to_text(fundamental(parse("w^w"), 3)) == "w^3"
    assert to_text(fundamental(parse("w*2"), 5)) == "w+5"
    with pytest.raises(OrdinalError):
        fundamental(from_int(4), 1)


def test_depth_cap():
    deep = "w^(w^(w^(w^(w^(w^(w^w))))))"
    with pytest.raises(OrdinalError):
        parse(deep)
    assert parse("w^(w^(w^(w^(w^(w^w)))))").depth() == 8
