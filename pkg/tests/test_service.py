from __future__ import annotations

from fractions import Fraction

from fastapi.testclient import TestClient

from schreierlab.ordinal import ONE
from schreierlab.schreier import FinSet
from schreierlab.service import app
from schreierlab.normmodel import schreier_space
from schreierlab.goodness import point_mass_family
from schreierlab import wire

client = TestClient(app)

SCHREIER_1 = {"kind": "schreier", "alpha": "1"}
TSIRELSON = {"kind": "tsirelson", "theta": "1/2", "alpha": "1"}


def post(path, payload, expect=200):
    response = client.post(path, json=payload)
    assert response.status_code == expect, response.text
    return response.json()


def test_ordinal_endpoints():
    assert post("/ordinal/compare", {"a": "w+3", "b": "w*2"})["order"] == "LT"
    out = post("/ordinal/classify", {"ordinal": "5"})
    assert out == {"kind": "successor", "predecessor": "4"}
    assert post("/ordinal/classify", {"ordinal": "w^2"})["kind"] == "limit"
    assert post("/ordinal/assoc", {"ordinal": "w^2", "n": 3})["result"] == "w*3+1"
    post("/ordinal/classify", {"ordinal": "huh"}, expect=400)


def test_schreier_endpoints():
    assert post("/schreier/member", {"alpha": "w^2", "elements": [2, 3, 10, 11]})[
        "member"
    ] in (True, False)
    assert post("/schreier/member", {"alpha": "1", "elements": [2, 3]})["member"]
    out = post("/schreier/enum", {"alpha": "1", "lo": 2, "hi": 4, "maximal": True})
    assert out["sets"] == [[2, 3], [2, 4], [3, 4]]
    out = post("/schreier/threshold", {"from_level": "2", "to_level": "w", "width": 12})
    assert out["n"] == 1
    out = post(
        "/schreier/restrict",
        {"family": {"kind": "schreier", "alpha": "1"}, "m": [2, 3], "window": [1, 4]},
    )
    assert out["members"] == [[], [2], [2, 3], [3]]
    post("/schreier/enum", {"alpha": "1", "lo": 1, "hi": 80}, expect=409)


def test_norm_endpoints():
    out = post(
        "/norm/eval",
        {"model": TSIRELSON, "vec": {"coeffs": {"3": "1", "4": "1", "5": "1"}}},
    )
    assert out["norm"] == "3/2"
    out = post(
        "/norm/a1-search",
        {"model": TSIRELSON, "lo": 2, "hi": 6, "coeff_grid": ["1"], "budget": 200000},
    )
    assert out["worst_ratio"] == "1/2" and not out["violation"]
    out = post("/norm/kpoints", {"model": TSIRELSON, "lo": 5, "hi": 5, "depth": 0})
    assert len(out["points"]) == 2


def test_block_endpoints():
    found = post(
        "/block/find0",
        {"model": SCHREIER_1, "lo": 3, "hi": 60, "eps": "1/2"},
    )
    assert found["verified"]
    cert = found["cert"]
    verdict = post("/block/verify", {"cert": cert})
    assert verdict["passed"]
    full_support = sorted(int(k) for k in cert["u"]["coeffs"])
    restricted = post("/block/restrict", {"cert": cert, "i0": full_support})
    assert restricted["cert"]["eps"].startswith("sqrt(")
    tau = post("/block/tau", {"model": SCHREIER_1, "lo": 3, "hi": 20})
    assert tau["lower"] == "1" and tau["witness"] == [3, 4, 5]
    post("/block/find0", {"model": SCHREIER_1, "lo": 1, "hi": 2, "eps": "1/2"}, expect=409)


def test_chain_endpoints():
    model = {"kind": "schreier", "alpha": "2"}
    search = post(
        "/chain/search",
        {
            "model": model,
            "alpha": "1",
            "lo": 2,
            "hi": 60,
            "delta": "1/20",
            "length": 2,
        },
    )
    verdict = post("/chain/verify", {"chain": search["chain"]})
    assert verdict["passed"], verdict
    l4 = post(
        "/chain/check-l4",
        {
            "chain": search["chain"],
            "t0": search["t0"],
            "points": search["points"],
            "tau_hat": search["tau_hat"],
            "delta": search["delta"],
        },
    )
    assert l4["holds"]
    j = sorted(int(k) for k in search["chain"]["blocks"][1]["coeffs"])
    l3 = post(
        "/chain/check-l3",
        {
            "chain": search["chain"],
            "points": search["points"],
            "tau_hat": search["tau_hat"],
            "delta": search["delta"],
            "j": j,
        },
    )
    assert l3["holds"]


def test_msep_endpoints():
    window = FinSet(tuple(range(10, 42)))
    fam = point_mass_family(schreier_space(ONE), window)
    fam_json = wire.family_json(fam)
    out = post(
        "/msep/run",
        {
            "family": fam_json,
            "alpha": "1",
            "rho": "1",
            "window": list(window.elements),
        },
    )
    assert not out["ok"] and out["failing_step"] == "image_not_in_family"
    assert out["transcript"] is not None
    out = post(
        "/msep/run",
        {
            "family": fam_json,
            "alpha": "0",
            "rho": "1",
            "window": list(window.elements),
        },
    )
    assert out["ok"]
    out = post(
        "/msep/check-norming",
        {
            "family": fam_json,
            "pool": list(window.elements),
            "coeff_grid": ["1"],
            "rho": "1",
            "max_support": 1,
        },
    )
    assert out["passed"]
    out = post(
        "/msep/good",
        {
            "family": fam_json,
            "measure_index": len(fam.members) - 1,
            "prefix": list(range(9, 13)),
            "n": 1,
            "rho": "1/2",
        },
    )
    assert out["good"] in (True, False)


def test_wire_roundtrips():
    from schreierlab.radicals import Radical

    assert wire.parse_frac(wire.frac_str(Fraction(-3, 7))) == Fraction(-3, 7)
    assert wire.parse_frac("2") == 2
    r = Radical(Fraction(1, 2), 2)
    assert wire.parse_radical(wire.radical_str(r)) == r
    v = wire.parse_suppvec({"coeffs": {"2": "1/2", "5": "1"}})
    assert wire.suppvec_json(v) == {"coeffs": {"2": "1/2", "5": "1"}}
    m = wire.parse_model({"kind": "tsirelson", "theta": "1/2", "alpha": "1"})
    assert wire.model_json(m)["theta"] == "1/2"
