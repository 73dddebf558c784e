"""JSON wire formats shared by the service, the CLI and stored artifacts.

Rationals travel as canonical lowest-terms strings ("3/2", integers plain),
ordinals in their text syntax, finite sets as sorted integer arrays, and
functional-tree points as nested one-key objects.  Dumping is canonical
(sorted keys, tight separators, trailing newline) so identical data always
serializes to identical bytes.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .errors import PreconditionError
from . import ordinal as ordmod
from .ordinal import Ordinal
from .radicals import Radical
from .schreier import FinSet
from .normmodel import (
    KPoint,
    Leaf,
    Node,
    SetPoint,
    SpaceModel,
    SuppVec,
    TreeNode,
    TreePoint,
    schreier_space,
    tsirelson_space,
)
from .blockcert import AlphaEpsCert, Block, ChainCert, TauEstimate, VERIFIER_VERSION
from .goodness import EpsSeq, Measure, MeasureFamily, MPIndexRow, MPStep, MPTranscript

SCHEMA_VERSION = "1"


# -- scalars -------------------------------------------------------------------


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(text: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"cannot parse rational {text!r}") from exc


def radical_str(x: Radical) -> str:
    return str(x)


def parse_radical(text: str) -> Radical:
    text = text.strip()
    level = 0
    while text.startswith("sqrt(") and text.endswith(")"):
        text = text[5:-1]
        level += 1
    return Radical(parse_frac(text), level)


def ordinal_str(a: Ordinal) -> str:
    return ordmod.to_text(a)


def parse_ordinal(text: str) -> Ordinal:
    return ordmod.parse(text)


# -- basic aggregates ----------------------------------------------------------


def finset_json(f: FinSet) -> List[int]:
    return list(f.elements)


def parse_finset(data) -> FinSet:
    return FinSet(tuple(int(x) for x in data))


def suppvec_json(v: SuppVec) -> Dict[str, Any]:
    return {"coeffs": {str(i): frac_str(c) for i, c in v.pairs}}


def parse_suppvec(data) -> SuppVec:
    coeffs = data["coeffs"] if isinstance(data, dict) and "coeffs" in data else data
    return SuppVec.of({int(i): parse_frac(c) for i, c in coeffs.items()})


def model_json(m: SpaceModel) -> Dict[str, Any]:
    out = {
        "kind": m.kind,
        "alpha": ordinal_str(m.alpha),
        "a1_constant": frac_str(m.a1_constant),
    }
    if m.theta is not None:
        out["theta"] = frac_str(m.theta)
    return out


def parse_model(data) -> SpaceModel:
    kind = data["kind"]
    alpha = parse_ordinal(data.get("alpha", "1"))
    a1 = parse_frac(data["a1_constant"]) if "a1_constant" in data else None
    if kind == "schreier":
        return schreier_space(alpha, a1_constant=a1)
    if kind == "tsirelson":
        theta = parse_frac(data.get("theta", "1/2"))
        return tsirelson_space(theta, alpha, a1_constant=a1)
    raise PreconditionError(f"unknown model kind {kind!r}")


def _tree_json(node: TreeNode):
    if isinstance(node, Leaf):
        return {"leaf": [node.index, node.sign]}
    return {"node": [_tree_json(c) for c in node.children]}


def _parse_tree(data) -> TreeNode:
    if "leaf" in data:
        index, sign = data["leaf"]
        return Leaf(int(index), int(sign))
    if "node" in data:
        return Node(tuple(_parse_tree(c) for c in data["node"]))
    raise PreconditionError(f"cannot parse functional tree {data!r}")


def kpoint_json(t: KPoint) -> Dict[str, Any]:
    if isinstance(t, SetPoint):
        return {"kind": "set", "elements": finset_json(t.elements)}
    return {"kind": "functional", "tree": _tree_json(t.root)}


def parse_kpoint(data) -> KPoint:
    if data["kind"] == "set":
        return SetPoint(parse_finset(data["elements"]))
    if data["kind"] == "functional":
        return TreePoint(_parse_tree(data["tree"]))
    raise PreconditionError(f"unknown point kind {data['kind']!r}")


# -- certificates --------------------------------------------------------------


def cert_json(cert: AlphaEpsCert, verified: Optional[bool] = None) -> Dict[str, Any]:
    out = {
        "type": "alpha_eps",
        "model": model_json(cert.model),
        "alpha": ordinal_str(cert.alpha),
        "eps": radical_str(cert.eps),
        "u": suppvec_json(cert.block.vec),
        "t0": kpoint_json(cert.t0),
        "verifier_version": VERIFIER_VERSION,
    }
    if verified is not None:
        out["verified"] = verified
    return out


def parse_cert(data) -> AlphaEpsCert:
    if data.get("type") != "alpha_eps":
        raise PreconditionError("expected an alpha_eps certificate")
    model = parse_model(data["model"])
    return AlphaEpsCert(
        block=Block(parse_suppvec(data["u"]), model),
        alpha=parse_ordinal(data["alpha"]),
        eps=parse_radical(data["eps"]),
        t0=parse_kpoint(data["t0"]),
    )


def chain_json(cert: ChainCert, verified: Optional[bool] = None) -> Dict[str, Any]:
    out = {
        "type": "alpha_chain",
        "model": model_json(cert.model),
        "alpha": ordinal_str(cert.alpha),
        "blocks": [suppvec_json(b.vec) for b in cert.blocks],
        "eps_seq": [frac_str(e) for e in cert.eps_seq],
        "d": list(cert.d),
        "sub_certs": [cert_json(c) for c in cert.sub_certs],
        "verifier_version": VERIFIER_VERSION,
    }
    if verified is not None:
        out["verified"] = verified
    return out


def parse_chain(data) -> ChainCert:
    if data.get("type") != "alpha_chain":
        raise PreconditionError("expected an alpha_chain certificate")
    model = parse_model(data["model"])
    return ChainCert(
        model=model,
        alpha=parse_ordinal(data["alpha"]),
        blocks=tuple(Block(parse_suppvec(v), model) for v in data["blocks"]),
        eps_seq=tuple(parse_frac(e) for e in data["eps_seq"]),
        d=tuple(int(x) for x in data["d"]),
        sub_certs=tuple(parse_cert(c) for c in data["sub_certs"]),
    )


def tau_json(t: TauEstimate) -> Dict[str, Any]:
    return {
        "lower": frac_str(t.lower),
        "witness": finset_json(t.witness) if t.witness is not None else None,
        "window": list(t.window),
        "budget_spent": t.budget_spent,
        "partial": t.partial,
    }


# -- measures ------------------------------------------------------------------


def measure_json(m: Measure) -> Dict[str, Any]:
    return {
        "weights": [
            {"point": kpoint_json(p), "mass": frac_str(w)} for p, w in m.weights
        ]
    }


def parse_measure(data, model: SpaceModel) -> Measure:
    return Measure(
        model,
        tuple(
            (parse_kpoint(w["point"]), parse_frac(w["mass"]))
            for w in data["weights"]
        ),
    )


def family_json(f: MeasureFamily) -> Dict[str, Any]:
    return {
        "model": model_json(f.model),
        "members": [measure_json(m) for m in f.members],
    }


def parse_family(data) -> MeasureFamily:
    model = parse_model(data["model"])
    return MeasureFamily(
        tuple(parse_measure(m, model) for m in data["members"])
    )


def eps_seq_json(e: EpsSeq) -> Dict[str, Any]:
    if e.kind == "quarter_powers":
        return {"kind": "quarter_powers"}
    return {"kind": "list", "values": [frac_str(v) for v in e.values]}


def parse_eps_seq(data) -> EpsSeq:
    if data is None or data.get("kind") == "quarter_powers":
        return EpsSeq.quarter_powers()
    return EpsSeq.from_list(parse_frac(v) for v in data["values"])


# -- transcripts ---------------------------------------------------------------


def _step_json(s: MPStep) -> Dict[str, Any]:
    return {
        "name": s.name,
        "lhs": frac_str(s.lhs),
        "rhs": frac_str(s.rhs),
        "holds": s.holds,
        "note": s.note,
    }


def _row_json(r: MPIndexRow) -> Dict[str, Any]:
    return {
        "i": r.i,
        "n_odd": r.n_odd,
        "n_even": r.n_even,
        "a_i": frac_str(r.a_i),
        "delta_i": frac_str(r.delta_i),
        "phi_mass": frac_str(r.phi_mass) if r.phi_mass is not None else None,
        "level_threshold": frac_str(r.level_threshold),
        "level_mass": frac_str(r.level_mass),
    }


def transcript_json(t: MPTranscript) -> Dict[str, Any]:
    return {
        "rho": frac_str(t.rho),
        "eps": frac_str(t.eps),
        "d_scale": frac_str(t.d_scale),
        "alpha": ordinal_str(t.alpha),
        "window": finset_json(t.window),
        "block": cert_json(t.block_cert),
        "block_level_note": t.block_level_note,
        "mu_index": t.mu_index,
        "rows": [_row_json(r) for r in t.rows],
        "steps": [_step_json(s) for s in t.steps],
        "selected": finset_json(t.selected),
        "image": finset_json(t.image),
        "norming_note": t.norming_note,
    }


# -- canonical dumping ---------------------------------------------------------


def canonical_json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode()


def atomic_write(path: str, data: bytes) -> None:
    """Write via a temporary file and rename, so readers never see a torn file."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-artifact-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
