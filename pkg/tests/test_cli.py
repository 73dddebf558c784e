from __future__ import annotations

import io
import json
import sys

from schreierlab.cli import run


def cli(*argv):
    buf = io.StringIO()
    old = sys.stdout
    sys.stdout = buf
    try:
        code = run(list(argv))
    finally:
        sys.stdout = old
    text = buf.getvalue()
    return code, (json.loads(text) if text.strip() else None)


def test_member_and_artifact_shape():
    code, artifact = cli("schreier", "member", "--alpha", "1", "--set", "2,3")
    assert code == 0
    assert artifact["schema_version"] == "1"
    assert artifact["config"]["command"] == "schreier member"
    assert artifact["config"]["params"] == {"alpha": "1", "elements": [2, 3]}
    assert artifact["result"] == {"member": True}


def test_norm_eval():
    code, artifact = cli(
        "norm", "eval", "--model", "tsirelson", "--theta", "1/2", "--vec", "3:1,4:1,5:1"
    )
    assert code == 0 and artifact["result"]["norm"] == "3/2"


def test_ordinal_commands():
    code, artifact = cli("ordinal", "compare", "--a", "w+3", "--b", "w*2")
    assert code == 0 and artifact["result"]["order"] == "LT"
    code, artifact = cli("ordinal", "assoc", "--ordinal", "w", "--n", "4")
    assert artifact["result"]["result"] == "5"
    code, artifact = cli("ordinal", "classify", "--ordinal", "0")
    assert artifact["result"]["kind"] == "zero"


def test_enum_and_restrict():
    code, artifact = cli("schreier", "enum", "--alpha", "1", "--window", "2:4", "--maximal")
    assert code == 0 and artifact["result"]["sets"] == [[2, 3], [2, 4], [3, 4]]
    code, artifact = cli(
        "schreier", "restrict", "--alpha", "1", "--window", "1:4", "--m", "2,3"
    )
    assert code == 0 and [2, 3] in artifact["result"]["members"]
    code, artifact = cli("schreier", "restrict", "--members", "1,2;3", "--m", "2")
    assert code == 0 and artifact["result"]["members"] == [[], [2]]


def test_cert_roundtrip_and_exit_codes(tmp_path):
    cert_path = tmp_path / "cert.json"
    code, _ = cli(
        "--out", str(cert_path),
        "block", "find0", "--model", "schreier", "--alpha", "1",
        "--window", "3:60", "--eps", "1/2",
    )
    assert code == 0
    code, artifact = cli("block", "verify", str(cert_path))
    assert code == 0 and artifact["result"]["passed"]

    # a broken certificate exits 1 and names the violating set
    broken = json.loads(cert_path.read_text())
    broken["result"]["cert"]["t0"] = {"kind": "set", "elements": []}
    bad_path = tmp_path / "bad.json"
    bad_path.write_text(json.dumps(broken))
    code, artifact = cli("block", "verify", str(bad_path))
    assert code == 1
    assert artifact["result"]["condition"] == 1
    assert artifact["result"]["violating"]

    code, artifact = cli("block", "restrict", str(cert_path), "--i0", "6,7,8,9,10")
    assert code == 0 and artifact["result"]["cert"]["eps"].startswith("sqrt(")


def test_chain_workflow(tmp_path):
    search_path = tmp_path / "search.json"
    code, _ = cli(
        "--out", str(search_path),
        "chain", "search", "--model", "schreier", "--alpha", "2", "--level", "1",
        "--window", "2:60", "--len", "2", "--delta", "1/20",
    )
    assert code == 0
    code, artifact = cli("chain", "verify", str(search_path))
    assert code == 0 and artifact["result"]["passed"]
    code, artifact = cli("chain", "check-l4", str(search_path))
    assert code == 0 and artifact["result"]["holds"]
    blocks = json.loads(search_path.read_text())["result"]["chain"]["blocks"]
    j = ",".join(sorted(blocks[1]["coeffs"], key=int))
    code, artifact = cli("chain", "check-l3", str(search_path), "--j", j)
    assert code == 0 and artifact["result"]["holds"]
    # the adversarial restriction reports honestly and exits 1
    code, artifact = cli("chain", "check-l3", str(search_path), "--j", "2")
    assert code == 1 and not artifact["result"]["holds"]


def test_msep_workflow(tmp_path):
    code, artifact = cli(
        "msep", "run", "--model", "schreier", "--alpha", "0", "--rho", "1",
        "--family", "bundled", "--window", "10:41",
    )
    assert code == 0 and artifact["result"]["ok"]
    code, artifact = cli(
        "msep", "run", "--model", "schreier", "--alpha", "1", "--rho", "1",
        "--family", "bundled", "--window", "10:41",
    )
    assert code == 1
    assert artifact["result"]["failing_step"] == "image_not_in_family"

    # write the bundled family out, then drive check-norming and good on it
    fam_path = tmp_path / "fam.json"
    from schreierlab import wire
    from schreierlab.goodness import point_mass_family
    from schreierlab.normmodel import schreier_space
    from schreierlab.ordinal import ONE
    from schreierlab.schreier import FinSet

    fam = point_mass_family(schreier_space(ONE), FinSet(tuple(range(10, 42))))
    fam_path.write_bytes(wire.canonical_json_bytes(wire.family_json(fam)))
    code, artifact = cli(
        "msep", "check-norming", str(fam_path), "--window", "10:41", "--rho", "1"
    )
    assert code == 0 and artifact["result"]["passed"]
    code, artifact = cli(
        "msep", "good", str(fam_path), "--measure", "0",
        "--prefix", "10,11,12,13", "--n", "1", "--rho", "1/2",
    )
    assert code == 0


def test_usage_and_resource_exit_codes():
    code, _ = cli("schreier", "member", "--alpha", "nonsense", "--set", "2,3")
    assert code == 2
    code, _ = cli("schreier", "enum", "--alpha", "1", "--window", "1:99")
    assert code == 3


def test_budget_flag_threads_through():
    code, artifact = cli(
        "--budget", "25", "schreier", "enum", "--alpha", "1", "--window", "1:22"
    )
    assert code == 0
    assert artifact["config"]["budget"] == 25
